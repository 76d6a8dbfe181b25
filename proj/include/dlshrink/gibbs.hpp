#ifndef DLSHRINK_GIBBS_HPP_
#define DLSHRINK_GIBBS_HPP_

#include <stdexcept>

#include <Eigen/Core>

#include "dlshrink/dl_prior.hpp"
#include "dlshrink/rng.hpp"

namespace dlshrink {

/// |theta_j| floor inside the Bayesian-lasso latent-scale update; a
/// coordinate that collapses numerically to zero would otherwise push the
/// giG setup outside its supported range. The Dirichlet-Laplace conditionals
/// instead use exact limit-branch samplers for collapsed coordinates, since
/// flooring |theta_j| there measurably biases the grid update of a.
inline constexpr double kThetaFloor = 1e-10;

/// Full latent state of one DL chain.
struct DlState {
    Eigen::VectorXd theta;
    Eigen::VectorXd psi;
    Eigen::VectorXd phi;  // simplex
    double tau;
    double a;
};

/// Bayesian lasso state: theta_j ~ N(0, psi_j), psi_j ~ Exp(lambda2/2),
/// lambda2 ~ gamma(r, delta).
struct BlState {
    Eigen::VectorXd theta;
    Eigen::VectorXd psi;
    double lambda2;
};

struct BlHyper {
    double r = 1.0;
    double delta = 1.0;
};

/// Horseshoe state with the inverse-gamma auxiliary representation of the
/// half-Cauchy scales: theta_j ~ N(0, lam2_j tau2),
/// lam2_j | nu_j ~ IG(1/2, 1/nu_j), nu_j ~ IG(1/2, 1), likewise tau2 with xi.
struct HsState {
    Eigen::VectorXd theta;
    Eigen::VectorXd lam2;
    double tau2;
    Eigen::VectorXd nu;
    double xi;
};

struct ChainConfig {
    long iterations = 10000;
    long burn_in = 5000;
    long thin = 1;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    bool store_latents = false;
};

struct ChainOutput {
    Eigen::MatrixXd theta_draws;  // retained x n
    Eigen::VectorXd a_draws;      // retained (grid mode only, else empty)
    // latent trajectories, populated only when cfg.store_latents
    Eigen::MatrixXd psi_draws;
    Eigen::MatrixXd phi_draws;
    Eigen::VectorXd tau_draws;

    long retained() const { return theta_draws.rows(); }
    long dim() const { return theta_draws.cols(); }
};

/// Signalled when all normalized-measure components underflow (cannot occur
/// with the chi clamp in place); carries the failing iteration index.
struct DegenerateStateError : std::runtime_error {
    long iteration;
    explicit DegenerateStateError(long iter)
        : std::runtime_error("degenerate Gibbs state at iteration " +
                             std::to_string(iter)),
          iteration(iter) {}
};

// Single-site conditional draws shared by the step operations and the chain
// driver.
double dl_draw_theta_j(RngStream& rng, double y_j, double scale2);
double dl_draw_t_j(RngStream& rng, double a, double abs_theta);
double dl_draw_psi_j(RngStream& rng, double phi_j_tau, double abs_theta);
double dl_draw_tau(RngStream& rng, int n, double a, double chi);

// Blocked Gibbs steps for the DL chain. theta | psi, phi, tau, y is a
// conjugate normal; (psi, phi, tau) | theta is drawn as one block through the
// factorization [psi | phi, tau, theta][tau | phi, theta][phi | theta], i.e.
// phi first, then tau, then psi.
void dl_step_theta(RngStream& rng, DlState& state,
                   const Eigen::Ref<const Eigen::VectorXd>& y);
void dl_step_psi(RngStream& rng, DlState& state);
void dl_step_tau(RngStream& rng, DlState& state);
void dl_step_phi(RngStream& rng, DlState& state);
void dl_step_a(RngStream& rng, DlState& state, const DlPriorSpec& spec);

ChainOutput run_dl_chain(const Eigen::Ref<const Eigen::VectorXd>& y,
                         const DlPriorSpec& spec, const ChainConfig& cfg,
                         DlState* final_state = nullptr);

ChainOutput run_bl_chain(const Eigen::Ref<const Eigen::VectorXd>& y,
                         const BlHyper& hyper, const ChainConfig& cfg,
                         BlState* final_state = nullptr);

ChainOutput run_hs_chain(const Eigen::Ref<const Eigen::VectorXd>& y,
                         const ChainConfig& cfg, HsState* final_state = nullptr);

}  // namespace dlshrink

#endif  // DLSHRINK_GIBBS_HPP_
