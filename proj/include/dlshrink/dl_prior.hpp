#ifndef DLSHRINK_DL_PRIOR_HPP_
#define DLSHRINK_DL_PRIOR_HPP_

#include <vector>

#include <Eigen/Core>

#include "dlshrink/rng.hpp"
#include "dlshrink/special_math.hpp"

namespace dlshrink {

/// Dirichlet-Laplace prior specification: dimension plus either a fixed
/// concentration a in (0,1) or a discrete grid prior on a.
struct DlPriorSpec {
    enum class AMode { kFixed, kGrid };

    int n;
    AMode a_mode;
    double a_fixed;                 // valid when a_mode == kFixed
    std::vector<double> a_grid;     // ascending, each in (0,1), when kGrid

    static DlPriorSpec fixed(int n, double a);
    static DlPriorSpec grid(int n, std::vector<double> points);
    /// Default: fixed a = 1/n.
    static DlPriorSpec default_spec(int n) { return fixed(n, 1.0 / n); }
};

/// One draw from the full DL hierarchy.
struct PriorDraw {
    Eigen::VectorXd theta;
    Eigen::VectorXd psi;   // phi_j * tau coupling
    Eigen::VectorXd phi;   // simplex
    double tau;
};

/// Hierarchical representation: phi ~ Dir(a,...,a), tau ~ gamma(na, 1/2),
/// theta_j ~ DE(phi_j tau).
PriorDraw sample_prior_hierarchical(RngStream& rng, const DlPriorSpec& spec, double a);

/// Marginalized representation: theta_j ~ DE(psi_j), psi_j ~ Ga(a, 1/2),
/// i.i.d. across coordinates.
Eigen::VectorXd sample_prior_marginalized(RngStream& rng, int n, double a);

/// Thrown by marginal_log_pdf at theta = 0, where the density has an
/// integrable pole for a < 1. Distinct from std::domain_error.
struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exact log marginal density of one DL coordinate:
/// |theta|^{(a-1)/2} K_{1-a}(sqrt(2|theta|)) / (2^{(1+a)/2} Gamma(a)).
LogValue marginal_log_pdf(double theta, double a);

struct TailMassEstimate {
    double probability;
    double standard_error;
};

/// Monte Carlo estimate of P(|theta_1| > delta) under the marginalized
/// representation.
TailMassEstimate tail_mass_estimate(RngStream& rng, double a, double delta,
                                    long draws);

/// Number of coordinates with |theta_j| > delta.
int supp_delta_count(const Eigen::Ref<const Eigen::VectorXd>& theta, double delta);

}  // namespace dlshrink

#endif  // DLSHRINK_DL_PRIOR_HPP_
