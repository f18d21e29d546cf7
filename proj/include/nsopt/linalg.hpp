#pragma once

#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "nsopt/fields.hpp"
#include "nsopt/grid.hpp"

namespace nsopt {

enum class BcKind { Dirichlet, NavierSlip };

/// Boundary condition of the state system: either no-slip (u = b) or Navier
/// slip with friction coefficient alpha. The normal component of b is zero
/// by construction of BoundaryData. In slip mode alpha must exceed
/// max|b| + 1.
struct BcSpec {
    BcKind kind = BcKind::Dirichlet;
    double alpha = 0.0;
    BoundaryData b;

    static BcSpec dirichlet(BoundaryData bd) { return BcSpec{BcKind::Dirichlet, 0.0, std::move(bd)}; }
    static BcSpec navier_slip(double alpha, BoundaryData bd) {
        return BcSpec{BcKind::NavierSlip, alpha, std::move(bd)};
    }
    void validate(const Grid& g) const;
};

enum class SolverKind { Auto, Direct, BiCgStab };

/// Map from the staggered layout to the saddle unknown vector
/// [velocity dofs | pressure dofs | mean-pressure multiplier].
/// Eliminated positions (normal dofs on walls; tangential wall dofs in
/// Dirichlet mode) carry their prescribed values.
struct DofMap {
    const Grid* grid = nullptr;
    BcKind kind = BcKind::Dirichlet;
    std::vector<int> ux_dof, uy_dof;     // dof id or -1
    std::vector<double> ux_fix, uy_fix;  // value where eliminated
    std::vector<double> mass;            // lumped control-volume area per velocity dof
    int n_u = 0, n_p = 0;

    int n_total() const { return n_u + n_p + 1; }
    int p_dof(int flat) const { return n_u + flat; }
    int lambda_dof() const { return n_u + n_p; }

    // resolve with periodic wrap of the ux column index
    int ux_dof_at(int i, int j) const;
    double ux_fix_at(int i, int j) const;
    int uy_dof_at(int i, int j) const { return uy_dof[grid->uy_idx(i, j)]; }
    double uy_fix_at(int i, int j) const { return uy_fix[grid->uy_idx(i, j)]; }

    Eigen::VectorXd gather(const VelocityField& u) const;
    /// Writes dof values back into a field; eliminated positions receive
    /// their fixed values, the periodic alias column is mirrored.
    void scatter(const Eigen::VectorXd& x, VelocityField& u) const;
    PressureField scatter_pressure(const Eigen::VectorXd& x, const Grid& g) const;
};

DofMap build_dof_map(const Grid& g, const BcSpec& bc);

using Triplets = std::vector<Eigen::Triplet<double>>;

/// Symmetric part of the velocity operator and the pressure coupling.
/// Avisc is the Gram matrix of the strain-rate quadrature (2 mu D:D over
/// cell centers and nodes) plus, in slip mode, the boundary friction mass
/// (alpha + (b.nu)/2) per wall trace dof; <Avisc u, u> equals
/// 2 mu ||D(u)||^2 + alpha ||u_tau||^2_boundary exactly. B is the integrated
/// divergence, G = -B^T the integrated pressure gradient.
struct OperatorBlocks {
    std::shared_ptr<const DofMap> dofs;
    Triplets Avisc;             // n_u x n_u, symmetric
    Eigen::VectorXd rhs_visc;   // boundary-data contributions (n_u)
    Triplets G;                 // n_u x n_p columns (stored with global col ids)
    Triplets B;                 // rows offset to pressure ids
    Eigen::VectorXd rhs_div;    // n_p
    double mu = 0;
};

OperatorBlocks build_operator_blocks(const Grid& g, const BcSpec& bc, double mu);

/// Skew-symmetric Oseen convection C(a) = (N(a) - N(a)^T)/2 built from
/// divergence-form fluxes with centred interpolation; <C w, w> = 0 by
/// construction. Returns the matrix part plus the affine contribution from
/// eliminated (boundary-valued) advected slots.
struct ConvectionOp {
    Triplets C;              // n_u x n_u
    Eigen::VectorXd rhs;     // -(affine part), add to the momentum rhs
};
ConvectionOp build_convection(const Grid& g, const DofMap& dofs, const VelocityField& advecting);

/// Jacobian of a |-> C(a) u_new with respect to the advecting field, i.e.
/// K v = C(v) u_new, derived from the same flux triples as build_convection.
Eigen::SparseMatrix<double> build_convection_jacobian(const Grid& g, const DofMap& dofs,
                                                      const VelocityField& u_new);

/// Assembled per-step saddle-point system
///   [ M/dt + theta (Avisc + C)   G   0 ] [u]   [rhs_u]
///   [ B                          0   e ] [p] = [rhs_p]
///   [ 0                          e^T 0 ] [l]   [0    ]
/// with e the cell-area vector (pressure gauge: zero area-weighted mean).
struct SaddleSystem {
    std::shared_ptr<const DofMap> dofs;
    Eigen::SparseMatrix<double> S;
    Eigen::VectorXd rhs;
    double dt = 0, mu = 0, theta = 1.0;

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return S * x; }
};

/// One-step implicit system for the Oseen-linearized momentum equation.
/// Throws std::invalid_argument when dt <= 0 or the slip friction bound
/// alpha > max|b| + 1 is violated.
SaddleSystem assemble_saddle(const Grid& g, const BcSpec& bc, const VelocityField* advecting,
                             double dt, double mu, double theta = 1.0);

/// Steady Stokes system: no mass, no convection.
SaddleSystem assemble_steady(const Grid& g, const BcSpec& bc, double mu);

/// Factorization wrapper; solve() and solve_transposed() check the
/// relative residual and throw std::runtime_error carrying it on failure.
class SaddleSolver {
public:
    SaddleSolver(const SaddleSystem& sys, double tol, SolverKind kind = SolverKind::Auto);
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    Eigen::VectorXd solve_transposed(const Eigen::VectorXd& rhs) const;

private:
    const Eigen::SparseMatrix<double>* S_;
    Eigen::SparseMatrix<double> St_; // only built for the iterative path
    double tol_;
    bool direct_;
    mutable Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_; // transpose view is non-const
    void check(const Eigen::SparseMatrix<double>& M, const Eigen::VectorXd& x,
               const Eigen::VectorXd& rhs) const;
};

/// Solves the assembled system for (velocity, pressure); the pressure comes
/// back with zero area-weighted mean (enforced by the multiplier row).
std::pair<VelocityField, PressureField> solve_saddle(const Grid& g, const SaddleSystem& sys,
                                                     double tol,
                                                     SolverKind kind = SolverKind::Auto);

SolverKind pick_solver(const Grid& g, SolverKind requested);

} // namespace nsopt
