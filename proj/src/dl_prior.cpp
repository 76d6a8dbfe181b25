#include "dlshrink/dl_prior.hpp"

#include <cmath>
#include <stdexcept>

namespace dlshrink {

namespace {

void validate_a(double a) {
    if (!(a > 0.0) || !(a < 1.0))
        throw std::domain_error("DL prior: a must lie in (0, 1)");
}

}  // namespace

DlPriorSpec DlPriorSpec::fixed(int n, double a) {
    if (n <= 0) throw std::domain_error("DlPriorSpec: n must be >= 1");
    validate_a(a);
    return {n, AMode::kFixed, a, {}};
}

DlPriorSpec DlPriorSpec::grid(int n, std::vector<double> points) {
    if (n <= 0) throw std::domain_error("DlPriorSpec: n must be >= 1");
    if (points.empty()) throw std::domain_error("DlPriorSpec: empty grid");
    for (std::size_t i = 0; i < points.size(); ++i) {
        validate_a(points[i]);
        if (i > 0 && points[i] <= points[i - 1])
            throw std::domain_error("DlPriorSpec: grid must be strictly ascending");
    }
    return {n, AMode::kGrid, points.front(), std::move(points)};
}

PriorDraw sample_prior_hierarchical(RngStream& rng, const DlPriorSpec& spec, double a) {
    validate_a(a);
    const int n = spec.n;
    PriorDraw draw;
    draw.phi = draw_dirichlet(rng, a, n);
    draw.tau = draw_gamma(rng, n * a, 0.5);
    draw.psi = draw.phi * draw.tau;
    draw.theta.resize(n);
    for (int j = 0; j < n; ++j) {
        const double scale = std::max(draw.psi[j], 1e-300);
        draw.theta[j] = draw_double_exponential(rng, scale);
    }
    return draw;
}

Eigen::VectorXd sample_prior_marginalized(RngStream& rng, int n, double a) {
    if (n <= 0) throw std::domain_error("sample_prior_marginalized: n must be >= 1");
    validate_a(a);
    Eigen::VectorXd theta(n);
    for (int j = 0; j < n; ++j) {
        // psi_j ~ Ga(a, 1/2) in log scale, theta_j = psi_j * L with L ~ DE(1);
        // the product form survives psi underflow at tiny a
        const double log_psi = draw_log_gamma(rng, a, 0.5);
        const double lap = draw_double_exponential(rng, 1.0);
        const double s = (lap < 0.0) ? -1.0 : 1.0;
        theta[j] = s * std::exp(log_psi + std::log(std::abs(lap)));
    }
    return theta;
}

LogValue marginal_log_pdf(double theta, double a) {
    validate_a(a);
    if (theta == 0.0)
        throw SingularityError("marginal_log_pdf: density is singular at theta = 0");
    const double abs_t = std::abs(theta);
    const double log_k = log_bessel_k(1.0 - a, std::sqrt(2.0 * abs_t)).value;
    return {-0.5 * (1.0 + a) * std::log(2.0) - log_gamma_fn(a).value +
            0.5 * (a - 1.0) * std::log(abs_t) + log_k};
}

TailMassEstimate tail_mass_estimate(RngStream& rng, double a, double delta, long draws) {
    validate_a(a);
    if (!(delta > 0.0)) throw std::domain_error("tail_mass_estimate: delta must be > 0");
    if (draws < 10000) throw std::domain_error("tail_mass_estimate: need >= 1e4 draws");
    const double log_delta = std::log(delta);
    long hits = 0;
    for (long i = 0; i < draws; ++i) {
        const double log_psi = draw_log_gamma(rng, a, 0.5);
        const double lap = draw_double_exponential(rng, 1.0);
        if (log_psi + std::log(std::abs(lap)) > log_delta) ++hits;
    }
    const double p = static_cast<double>(hits) / draws;
    return {p, std::sqrt(p * (1.0 - p) / draws)};
}

int supp_delta_count(const Eigen::Ref<const Eigen::VectorXd>& theta, double delta) {
    return static_cast<int>((theta.array().abs() > delta).count());
}

}  // namespace dlshrink
