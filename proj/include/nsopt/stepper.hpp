#pragma once

#include <memory>

#include "nsopt/linalg.hpp"

namespace nsopt {

/// Per-configuration assembly state shared by the forward, linearized and
/// adjoint sweeps. The symmetric blocks are built once; only the Oseen
/// convection changes between steps.
class StepOperator {
public:
    StepOperator(const Grid& g, const BcSpec& bc, double mu, double dt, double theta);

    const Grid& grid() const { return *grid_; }
    const DofMap& dofs() const { return *blocks_.dofs; }
    std::shared_ptr<const DofMap> dofs_ptr() const { return blocks_.dofs; }
    double dt() const { return dt_; }
    double theta() const { return theta_; }

    struct Step {
        Eigen::SparseMatrix<double> S;       ///< full saddle matrix for one implicit step
        Eigen::VectorXd rhs_affine;          ///< boundary-data contributions (full length)
        Eigen::SparseMatrix<double> Cmat;    ///< convection matrix (velocity block only)
    };
    /// Builds the step system linearized about the given advecting field.
    Step make_step(const VelocityField& advecting) const;

    /// Momentum mass vector (control-volume areas; zero on wall trace dofs).
    const Eigen::VectorXd& mass() const { return mass_; }
    /// A_visc as a sparse matrix (velocity block), for explicit theta terms
    /// and energy checks.
    const Eigen::SparseMatrix<double>& Avisc() const { return Avisc_mat_; }

private:
    const Grid* grid_;
    BcSpec bc_;
    double mu_, dt_, theta_;
    OperatorBlocks blocks_;
    Triplets static_triplets_; ///< mass/dt + theta*Avisc + G + B + gauge
    Eigen::VectorXd rhs_static_;
    Eigen::VectorXd mass_;
    Eigen::SparseMatrix<double> Avisc_mat_;
};

} // namespace nsopt
