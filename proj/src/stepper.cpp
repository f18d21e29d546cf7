#include "nsopt/stepper.hpp"

namespace nsopt {

StepOperator::StepOperator(const Grid& g, const BcSpec& bc, double mu, double dt, double theta)
    : grid_(&g), bc_(bc), mu_(mu), dt_(dt), theta_(theta) {
    if (!(dt > 0)) throw std::invalid_argument("time.dt: step size must be positive");
    blocks_ = build_operator_blocks(g, bc, mu);
    const DofMap& m = *blocks_.dofs;

    mass_ = Eigen::VectorXd::Zero(m.n_u);
    for (int d = 0; d < m.n_u; ++d) mass_[d] = m.mass[d];

    static_triplets_.reserve(blocks_.Avisc.size() + blocks_.G.size() + blocks_.B.size() +
                             m.n_u + 2 * m.n_p);
    for (int d = 0; d < m.n_u; ++d)
        if (mass_[d] > 0) static_triplets_.emplace_back(d, d, mass_[d] / dt_);
    for (const auto& t : blocks_.Avisc)
        static_triplets_.emplace_back(t.row(), t.col(), theta_ * t.value());
    for (const auto& t : blocks_.G) static_triplets_.emplace_back(t.row(), t.col(), t.value());
    for (const auto& t : blocks_.B) static_triplets_.emplace_back(t.row(), t.col(), t.value());
    const double area = g.hx * g.hy;
    const int lam = m.lambda_dof();
    for (int k = 0; k < m.n_p; ++k) {
        static_triplets_.emplace_back(m.n_u + k, lam, area);
        static_triplets_.emplace_back(lam, m.n_u + k, area);
    }

    rhs_static_ = Eigen::VectorXd::Zero(m.n_total());
    rhs_static_.head(m.n_u) = blocks_.rhs_visc;
    rhs_static_.segment(m.n_u, m.n_p) = blocks_.rhs_div;

    Avisc_mat_.resize(m.n_u, m.n_u);
    Avisc_mat_.setFromTriplets(blocks_.Avisc.begin(), blocks_.Avisc.end());
}

StepOperator::Step StepOperator::make_step(const VelocityField& advecting) const {
    const DofMap& m = *blocks_.dofs;
    ConvectionOp conv = build_convection(*grid_, m, advecting);

    Step st;
    Triplets trip = static_triplets_;
    trip.reserve(trip.size() + conv.C.size());
    for (const auto& t : conv.C) trip.emplace_back(t.row(), t.col(), theta_ * t.value());
    st.S.resize(m.n_total(), m.n_total());
    st.S.setFromTriplets(trip.begin(), trip.end());

    st.rhs_affine = rhs_static_;
    st.rhs_affine.head(m.n_u) += conv.rhs; // boundary-valued advected slots (zero here)

    st.Cmat.resize(m.n_u, m.n_u);
    st.Cmat.setFromTriplets(conv.C.begin(), conv.C.end());
    return st;
}

} // namespace nsopt
