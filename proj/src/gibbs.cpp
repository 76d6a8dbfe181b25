#include "dlshrink/gibbs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <vector>

namespace dlshrink {

namespace {

constexpr double kTiny = 1e-300;

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t kTagScalarA = 0x61677269645f7461ULL;
constexpr std::uint64_t kTagScalarGlobal = 0x676c6f62616c5f74ULL;

void validate_chain_inputs(const Eigen::Ref<const Eigen::VectorXd>& y,
                           const ChainConfig& cfg) {
    if (y.size() == 0) throw std::invalid_argument("chain: y must be nonempty");
    for (long j = 0; j < y.size(); ++j)
        if (!std::isfinite(y[j])) throw std::invalid_argument("chain: y must be finite");
    if (cfg.iterations <= 0) throw std::invalid_argument("chain: iterations must be >= 1");
    if (cfg.burn_in < 0 || cfg.burn_in >= cfg.iterations)
        throw std::invalid_argument("chain: need 0 <= burn_in < iterations");
    if (cfg.thin <= 0) throw std::invalid_argument("chain: thin must be >= 1");
}

long retained_count(const ChainConfig& cfg) {
    return (cfg.iterations - cfg.burn_in + cfg.thin - 1) / cfg.thin;
}

// Per-coordinate substreams keyed by the data value (with an occurrence index
// breaking ties), plus a canonical reduction order. Keying by value rather
// than position makes a chain on permuted data produce identically permuted
// draws; reductions walk the canonical order so scalar conditionals see
// bit-identical sums.
struct CoordinateStreams {
    std::vector<RngStream> streams;
    std::vector<int> order;

    CoordinateStreams(const Eigen::Ref<const Eigen::VectorXd>& y,
                      const ChainConfig& cfg) {
        const int n = static_cast<int>(y.size());
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int i, int j) { return y[i] < y[j]; });
        std::vector<std::uint64_t> occ(n, 0);
        // occurrence rank among equal values, in canonical order
        for (int k = 1; k < n; ++k) {
            const int i = order[k];
            const int prev = order[k - 1];
            if (y[i] == y[prev]) occ[i] = occ[prev] + 1;
        }
        streams.reserve(n);
        for (int j = 0; j < n; ++j) {
            const std::uint64_t key =
                mix64(mix64(cfg.stream_id, std::bit_cast<std::uint64_t>(y[j])), occ[j]);
            streams.emplace_back(cfg.seed, key);
        }
    }

    template <typename F>
    double sum(int n, F&& term) const {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += term(order[k]);
        return s;
    }
};

int sample_categorical_from_logs(RngStream& rng, const std::vector<double>& logw) {
    const double lse =
        log_sum_exp(std::span<const double>(logw.data(), logw.size())).value;
    const double u = rng.next_double();
    double cum = 0.0;
    for (std::size_t k = 0; k < logw.size(); ++k) {
        cum += std::exp(logw[k] - lse);
        if (u <= cum) return static_cast<int>(k);
    }
    return static_cast<int>(logw.size()) - 1;
}

// log of the product-gamma weight sum_j log Ga(psi'_j; a, 1/2) with
// psi'_j = phi_j tau, given S = sum_j log psi'_j and sum_psi = sum_j psi'_j.
double dl_a_log_weight(double a, int n, double log_psi_sum, double sum_psi) {
    return n * a * std::log(0.5) - n * std::lgamma(a) + (a - 1.0) * log_psi_sum -
           0.5 * sum_psi;
}

double inv_gamma_draw(RngStream& rng, double shape, double scale) {
    return 1.0 / std::max(draw_gamma(rng, shape, scale), kTiny);
}

}  // namespace

double dl_draw_theta_j(RngStream& rng, double y_j, double scale2) {
    double s2;
    if (!std::isfinite(scale2)) {
        s2 = 1.0;  // no shrinkage in the infinite-scale limit
    } else {
        s2 = scale2 / (1.0 + scale2);
    }
    s2 = std::max(s2, kTiny);
    return draw_normal(rng, s2 * y_j, std::sqrt(s2));
}

double dl_draw_t_j(RngStream& rng, double a, double abs_theta) {
    const double chi = 2.0 * abs_theta;
    if (chi < kChiFloor) {
        // Small-chi branch: proposing T = chi / (2 Ga(1-a, 1)) matches the
        // giG(a-1, 1, chi) density up to the factor exp(-T/2), which serves
        // as the acceptance probability (nearly 1 here). Clamping chi instead
        // would inflate the latent weights of strongly shrunk coordinates and
        // bias the grid update of a upward.
        for (;;) {
            const double t =
                std::max(chi, kTiny) / (2.0 * draw_gamma(rng, 1.0 - a, 1.0));
            if (rng.next_double() <= std::exp(-0.5 * t)) return t;
        }
    }
    return draw_gig(rng, {a - 1.0, 1.0, chi});
}

double dl_draw_psi_j(RngStream& rng, double phi_j_tau, double abs_theta) {
    // zeta = 1/psi is inverse-Gaussian; psi then has the exact
    // giG(1/2, 1, theta^2/(phi tau)^2) full conditional
    const double mu = std::max(phi_j_tau, kTiny) / std::max(abs_theta, kTiny);
    double zeta;
    if (mu > 1e8) {
        // Large-mu branch (|theta_j| far below phi_j tau): iG(mu, 1) tends to
        // the reciprocal of a Ga(1/2, 1/2); exact rejection with acceptance
        // exp(-zeta / (2 mu^2)), evaluated without forming mu^2.
        for (;;) {
            zeta = 1.0 / std::max(draw_gamma(rng, 0.5, 0.5), kTiny);
            if (rng.next_double() <= std::exp(-0.5 * (zeta / mu) / mu)) break;
        }
    } else {
        zeta = draw_inverse_gaussian(rng, {mu, 1.0});
    }
    return 1.0 / std::max(zeta, kTiny);
}

double dl_draw_tau(RngStream& rng, int n, double a, double chi) {
    return draw_gig(rng, {n * a - n, 1.0, std::max(chi, kChiFloor)});
}

void dl_step_theta(RngStream& rng, DlState& state,
                   const Eigen::Ref<const Eigen::VectorXd>& y) {
    const int n = static_cast<int>(y.size());
    for (int j = 0; j < n; ++j) {
        const double scale2 =
            state.psi[j] * state.phi[j] * state.phi[j] * state.tau * state.tau;
        state.theta[j] = dl_draw_theta_j(rng, y[j], scale2);
    }
}

void dl_step_psi(RngStream& rng, DlState& state) {
    const int n = static_cast<int>(state.theta.size());
    for (int j = 0; j < n; ++j)
        state.psi[j] =
            dl_draw_psi_j(rng, state.phi[j] * state.tau, std::abs(state.theta[j]));
}

void dl_step_tau(RngStream& rng, DlState& state) {
    const int n = static_cast<int>(state.theta.size());
    double chi = 0.0;
    for (int j = 0; j < n; ++j)
        chi += 2.0 * std::abs(state.theta[j]) / std::max(state.phi[j], kTiny);
    state.tau = dl_draw_tau(rng, n, state.a, chi);
}

void dl_step_phi(RngStream& rng, DlState& state) {
    const int n = static_cast<int>(state.theta.size());
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        state.phi[j] = dl_draw_t_j(rng, state.a, std::abs(state.theta[j]));
        sum += state.phi[j];
    }
    if (!(sum > 0.0) || !std::isfinite(sum)) throw DegenerateStateError(-1);
    state.phi /= sum;
    state.phi /= state.phi.sum();  // renormalize exactly
}

void dl_step_a(RngStream& rng, DlState& state, const DlPriorSpec& spec) {
    if (spec.a_mode != DlPriorSpec::AMode::kGrid) return;
    if (spec.a_grid.size() == 1) {
        state.a = spec.a_grid.front();
        return;
    }
    const int n = static_cast<int>(state.theta.size());
    double log_psi_sum = 0.0;
    double sum_psi = 0.0;
    for (int j = 0; j < n; ++j) {
        log_psi_sum += std::log(std::max(state.phi[j], kTiny)) + std::log(state.tau);
        sum_psi += state.phi[j] * state.tau;
    }
    std::vector<double> logw(spec.a_grid.size());
    for (std::size_t k = 0; k < spec.a_grid.size(); ++k)
        logw[k] = dl_a_log_weight(spec.a_grid[k], n, log_psi_sum, sum_psi);
    state.a = spec.a_grid[sample_categorical_from_logs(rng, logw)];
}

ChainOutput run_dl_chain(const Eigen::Ref<const Eigen::VectorXd>& y,
                         const DlPriorSpec& spec, const ChainConfig& cfg,
                         DlState* final_state) {
    validate_chain_inputs(y, cfg);
    const int n = static_cast<int>(y.size());
    if (spec.n != n) throw std::invalid_argument("run_dl_chain: spec.n != y.size()");

    const bool grid = spec.a_mode == DlPriorSpec::AMode::kGrid;
    DlState state;
    state.theta = y;
    state.psi = Eigen::VectorXd::Ones(n);
    state.phi = Eigen::VectorXd::Constant(n, 1.0 / n);
    // Warm start with per-coordinate scale phi_j tau = 1 so the first theta
    // draw stays near the data. Starting from a collapsed state instead makes
    // large coordinates race to re-activate out of a basin the sampler exits
    // extremely slowly.
    state.tau = static_cast<double>(n);
    state.a = grid ? spec.a_grid[spec.a_grid.size() / 2] : spec.a_fixed;

    CoordinateStreams coord(y, cfg);
    RngStream tau_stream(cfg.seed, mix64(cfg.stream_id, kTagScalarGlobal));
    RngStream a_stream(cfg.seed, mix64(cfg.stream_id, kTagScalarA));

    const long kept = retained_count(cfg);
    ChainOutput out;
    out.theta_draws.resize(kept, n);
    if (grid) out.a_draws.resize(kept);
    if (cfg.store_latents) {
        out.psi_draws.resize(kept, n);
        out.phi_draws.resize(kept, n);
        out.tau_draws.resize(kept);
    }

    Eigen::VectorXd t_vec(n);
    long row = 0;
    for (long it = 0; it < cfg.iterations; ++it) {
        // (i) theta | psi, phi, tau, y
        for (int j = 0; j < n; ++j) {
            const double scale2 =
                state.psi[j] * state.phi[j] * state.phi[j] * state.tau * state.tau;
            state.theta[j] = dl_draw_theta_j(coord.streams[j], y[j], scale2);
        }
        // (psi, phi, tau) | theta as a block: phi | theta first
        for (int j = 0; j < n; ++j)
            t_vec[j] = dl_draw_t_j(coord.streams[j], state.a, std::abs(state.theta[j]));
        const double t_sum = coord.sum(n, [&](int j) { return t_vec[j]; });
        if (!(t_sum > 0.0) || !std::isfinite(t_sum)) throw DegenerateStateError(it);
        state.phi = t_vec / t_sum;
        const double phi_sum = coord.sum(n, [&](int j) { return state.phi[j]; });
        state.phi /= phi_sum;
        // tau | phi, theta
        const double chi_tau = 2.0 * coord.sum(n, [&](int j) {
            return std::abs(state.theta[j]) / std::max(state.phi[j], kTiny);
        });
        state.tau = dl_draw_tau(tau_stream, n, state.a, chi_tau);
        // psi | phi, tau, theta
        for (int j = 0; j < n; ++j)
            state.psi[j] = dl_draw_psi_j(coord.streams[j], state.phi[j] * state.tau,
                                         std::abs(state.theta[j]));
        // a | phi, tau on the grid (via the gamma reparametrization of phi tau)
        if (grid) {
            if (spec.a_grid.size() == 1) {
                state.a = spec.a_grid.front();
            } else {
                const double log_tau = std::log(state.tau);
                const double log_psi_sum = coord.sum(n, [&](int j) {
                    return std::log(std::max(state.phi[j], kTiny)) + log_tau;
                });
                const double sum_psi =
                    state.tau * coord.sum(n, [&](int j) { return state.phi[j]; });
                std::vector<double> logw(spec.a_grid.size());
                for (std::size_t k = 0; k < spec.a_grid.size(); ++k)
                    logw[k] = dl_a_log_weight(spec.a_grid[k], n, log_psi_sum, sum_psi);
                state.a = spec.a_grid[sample_categorical_from_logs(a_stream, logw)];
            }
        }

        if (it >= cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) {
            out.theta_draws.row(row) = state.theta;
            if (grid) out.a_draws[row] = state.a;
            if (cfg.store_latents) {
                out.psi_draws.row(row) = state.psi;
                out.phi_draws.row(row) = state.phi;
                out.tau_draws[row] = state.tau;
            }
            ++row;
        }
    }
    if (final_state) *final_state = state;
    return out;
}

ChainOutput run_bl_chain(const Eigen::Ref<const Eigen::VectorXd>& y,
                         const BlHyper& hyper, const ChainConfig& cfg,
                         BlState* final_state) {
    validate_chain_inputs(y, cfg);
    if (!(hyper.r > 0.0) || !(hyper.delta > 0.0))
        throw std::invalid_argument("run_bl_chain: hyperparameters must be > 0");
    const int n = static_cast<int>(y.size());

    BlState state;
    state.theta = y;
    state.psi = Eigen::VectorXd::Ones(n);
    state.lambda2 = 1.0;

    CoordinateStreams coord(y, cfg);
    RngStream global_stream(cfg.seed, mix64(cfg.stream_id, kTagScalarGlobal));

    const long kept = retained_count(cfg);
    ChainOutput out;
    out.theta_draws.resize(kept, n);
    if (cfg.store_latents) {
        out.psi_draws.resize(kept, n);
        out.tau_draws.resize(kept);  // lambda2 trajectory
    }

    long row = 0;
    for (long it = 0; it < cfg.iterations; ++it) {
        for (int j = 0; j < n; ++j)
            state.theta[j] = dl_draw_theta_j(coord.streams[j], y[j], state.psi[j]);
        for (int j = 0; j < n; ++j) {
            const double th = std::max(std::abs(state.theta[j]), kThetaFloor);
            state.psi[j] =
                draw_gig(coord.streams[j], {0.5, state.lambda2, th * th});
        }
        const double psi_sum = coord.sum(n, [&](int j) { return state.psi[j]; });
        state.lambda2 =
            draw_gamma(global_stream, hyper.r + n, hyper.delta + 0.5 * psi_sum);

        if (it >= cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) {
            out.theta_draws.row(row) = state.theta;
            if (cfg.store_latents) {
                out.psi_draws.row(row) = state.psi;
                out.tau_draws[row] = state.lambda2;
            }
            ++row;
        }
    }
    if (final_state) *final_state = state;
    return out;
}

ChainOutput run_hs_chain(const Eigen::Ref<const Eigen::VectorXd>& y,
                         const ChainConfig& cfg, HsState* final_state) {
    validate_chain_inputs(y, cfg);
    const int n = static_cast<int>(y.size());

    HsState state;
    state.theta = y;
    state.lam2 = Eigen::VectorXd::Ones(n);
    state.tau2 = 1.0;
    state.nu = Eigen::VectorXd::Ones(n);
    state.xi = 1.0;

    CoordinateStreams coord(y, cfg);
    RngStream global_stream(cfg.seed, mix64(cfg.stream_id, kTagScalarGlobal));

    const long kept = retained_count(cfg);
    ChainOutput out;
    out.theta_draws.resize(kept, n);
    if (cfg.store_latents) {
        out.psi_draws.resize(kept, n);  // lam2 trajectory
        out.tau_draws.resize(kept);     // tau2 trajectory
    }

    long row = 0;
    for (long it = 0; it < cfg.iterations; ++it) {
        for (int j = 0; j < n; ++j)
            state.theta[j] =
                dl_draw_theta_j(coord.streams[j], y[j], state.lam2[j] * state.tau2);
        for (int j = 0; j < n; ++j) {
            const double th2 = state.theta[j] * state.theta[j];
            state.lam2[j] = inv_gamma_draw(coord.streams[j], 1.0,
                                           1.0 / state.nu[j] + th2 / (2.0 * state.tau2));
            state.nu[j] =
                inv_gamma_draw(coord.streams[j], 1.0, 1.0 + 1.0 / state.lam2[j]);
        }
        const double quad = coord.sum(n, [&](int j) {
            return state.theta[j] * state.theta[j] / state.lam2[j];
        });
        state.tau2 = inv_gamma_draw(global_stream, 0.5 * (n + 1),
                                    1.0 / state.xi + 0.5 * quad);
        state.xi = inv_gamma_draw(global_stream, 1.0, 1.0 + 1.0 / state.tau2);

        if (it >= cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) {
            out.theta_draws.row(row) = state.theta;
            if (cfg.store_latents) {
                out.psi_draws.row(row) = state.lam2;
                out.tau_draws[row] = state.tau2;
            }
            ++row;
        }
    }
    if (final_state) *final_state = state;
    return out;
}

}  // namespace dlshrink
