#include "dlshrink/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace dlshrink {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
    std::uint64_t mix = seed;
    s_[0] = splitmix64(mix);
    s_[1] = splitmix64(mix);
    mix ^= 0xd1b54a32d192ed03ULL + stream_id * 0x2545f4914f6cdd1dULL;
    s_[2] = splitmix64(mix);
    s_[3] = splitmix64(mix);
    // avoid the all-zero state
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::next_double() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1p-52;
}

double draw_normal(RngStream& rng, double mean, double sd) {
    if (!(sd > 0.0)) throw std::domain_error("draw_normal: sd must be > 0");
    const double u1 = rng.next_double();
    const double u2 = rng.next_double();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double draw_gamma(RngStream& rng, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::domain_error("draw_gamma: shape and rate must be > 0");
    if (shape < 1.0) {
        // boost by one and rescale with U^{1/shape}; may underflow to a
        // denormal/zero for tiny shapes, which matches the target CDF mass
        const double g = draw_gamma(rng, shape + 1.0, rate);
        return g * std::pow(rng.next_double(), 1.0 / shape);
    }
    // Marsaglia-Tsang
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = draw_normal(rng, 0.0, 1.0);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.next_double();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

double draw_log_gamma(RngStream& rng, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::domain_error("draw_log_gamma: shape and rate must be > 0");
    if (shape < 1.0) {
        const double g = draw_gamma(rng, shape + 1.0, 1.0);
        return std::log(g) + std::log(rng.next_double()) / shape - std::log(rate);
    }
    return std::log(draw_gamma(rng, shape, rate));
}

Eigen::VectorXd draw_dirichlet(RngStream& rng, double concentration, int n) {
    if (n <= 0) throw std::domain_error("draw_dirichlet: n must be >= 1");
    if (!(concentration > 0.0))
        throw std::domain_error("draw_dirichlet: concentration must be > 0");
    Eigen::VectorXd logs(n);
    for (int i = 0; i < n; ++i) logs[i] = draw_log_gamma(rng, concentration, 1.0);
    const double lse = log_sum_exp(std::span<const double>(logs.data(), n)).value;
    Eigen::VectorXd phi = (logs.array() - lse).exp();
    phi /= phi.sum();
    return phi;
}

double draw_double_exponential(RngStream& rng, double scale) {
    if (!(scale > 0.0)) throw std::domain_error("draw_double_exponential: scale must be > 0");
    const double u = rng.next_double() - 0.5;
    const double s = (u < 0.0) ? -1.0 : 1.0;
    return -scale * s * std::log(1.0 - 2.0 * std::abs(u));
}

double draw_inverse_gaussian(RngStream& rng, const IgParams& p) {
    if (!(p.mu > 0.0) || !(p.lam > 0.0))
        throw std::domain_error("draw_inverse_gaussian: mu and lam must be > 0");
    const double v = draw_normal(rng, 0.0, 1.0);
    const double w = p.mu * v * v / p.lam;
    // stable form of mu (1 + w/2 - sqrt(w + w^2/4))
    const double x = (w > 0.0) ? p.mu * (1.0 - 2.0 / (1.0 + std::sqrt(1.0 + 4.0 / w)))
                               : p.mu;
    const double u = rng.next_double();
    if (u <= p.mu / (p.mu + x)) return x;
    return p.mu * p.mu / x;
}

namespace {

double gig_mode(double lam, double omega) {
    if (lam >= 1.0)
        return (std::sqrt((lam - 1.0) * (lam - 1.0) + omega * omega) + (lam - 1.0)) / omega;
    return omega / (std::sqrt((1.0 - lam) * (1.0 - lam) + omega * omega) + (1.0 - lam));
}

// Ratio-of-uniforms without mode shift; standardized density
// x^{lam-1} exp(-omega/2 (x + 1/x)), lam >= 0.
double gig_rou_noshift(RngStream& rng, double lam, double omega) {
    const double t = 0.5 * (lam - 1.0);
    const double s = 0.25 * omega;
    const double xm = gig_mode(lam, omega);
    const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);
    const double ym =
        (std::sqrt((lam + 1.0) * (lam + 1.0) + omega * omega) + (lam + 1.0)) / omega;
    const double um = std::exp(0.5 * (lam + 1.0) * std::log(ym) - s * (ym + 1.0 / ym) - nc);
    for (;;) {
        const double u = um * rng.next_double();
        const double v = rng.next_double();
        const double x = u / v;
        if (std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
    }
}

// Ratio-of-uniforms with mode shift (Dagpunar), for lam > 2 or omega > 3.
double gig_rou_shift(RngStream& rng, double lam, double omega) {
    const double t = 0.5 * (lam - 1.0);
    const double s = 0.25 * omega;
    const double xm = gig_mode(lam, omega);
    const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);
    // real roots of x^3 + a x^2 + b x + c bracketing the mode
    const double a = -(2.0 * (lam + 1.0) / omega + xm);
    const double b = 2.0 * (lam - 1.0) * xm / omega - 1.0;
    const double c = xm;
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double fi = std::acos(-q / (2.0 * std::sqrt(-p * p * p / 27.0)));
    const double fak = 2.0 * std::sqrt(-p / 3.0);
    const double y1 = fak * std::cos(fi / 3.0) - a / 3.0;
    const double y2 = fak * std::cos(fi / 3.0 + 4.0 * M_PI / 3.0) - a / 3.0;
    const double uplus = (y1 - xm) * std::exp(t * std::log(y1) - s * (y1 + 1.0 / y1) - nc);
    const double uminus = (y2 - xm) * std::exp(t * std::log(y2) - s * (y2 + 1.0 / y2) - nc);
    for (;;) {
        const double u = uminus + rng.next_double() * (uplus - uminus);
        const double v = rng.next_double();
        const double x = u / v + xm;
        if (x > 0.0 && std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
    }
}

// Three-piece rejection envelope for 0 <= lam < 1 with small omega
// (Hoermann-Leydold); the rejection constant stays bounded as omega -> 0.
double gig_three_piece(RngStream& rng, double lam, double omega) {
    const double xm = gig_mode(lam, omega);
    const double x0 = omega / (1.0 - lam);
    const double k0 = std::exp((lam - 1.0) * std::log(xm) - 0.5 * omega * (xm + 1.0 / xm));
    const double area0 = k0 * x0;
    double k1, area1, k2, area2;
    if (x0 >= 2.0 / omega) {
        k1 = 0.0;
        area1 = 0.0;
        k2 = std::pow(x0, lam - 1.0);
        area2 = k2 * 2.0 * std::exp(-omega * x0 / 2.0) / omega;
    } else {
        k1 = std::exp(-omega);
        area1 = (lam == 0.0)
                    ? k1 * std::log(2.0 / (omega * omega))
                    : (k1 / lam) * (std::pow(2.0 / omega, lam) - std::pow(x0, lam));
        k2 = std::pow(2.0 / omega, lam - 1.0);
        area2 = k2 * 2.0 * std::exp(-1.0) / omega;
    }
    const double total = area0 + area1 + area2;
    const double cut = std::max(x0, 2.0 / omega);
    for (;;) {
        double v = total * rng.next_double();
        double x, hx;
        if (v <= area0) {
            x = x0 * v / area0;
            hx = k0;
        } else if ((v -= area0) <= area1) {
            x = (lam == 0.0) ? x0 * std::exp(v / k1)
                             : std::pow(std::pow(x0, lam) + v * lam / k1, 1.0 / lam);
            hx = k1 * std::pow(x, lam - 1.0);
        } else {
            v -= area1;
            x = -(2.0 / omega) * std::log(std::exp(-omega * cut / 2.0) - v * omega / (2.0 * k2));
            hx = k2 * std::exp(-omega * x / 2.0);
        }
        const double u = rng.next_double() * hx;
        if (std::log(u) <= (lam - 1.0) * std::log(x) - 0.5 * omega * (x + 1.0 / x)) return x;
    }
}

double gig_standardized(RngStream& rng, double lam, double omega) {
    if (lam > 2.0 || omega > 3.0) return gig_rou_shift(rng, lam, omega);
    if (lam >= 1.0 - 2.25 * omega * omega || omega > 0.2)
        return gig_rou_noshift(rng, lam, omega);
    return gig_three_piece(rng, lam, omega);
}

void validate_gig(const GigParams& p) {
    if (!(p.rho > 0.0) || p.chi < 0.0 || !std::isfinite(p.lambda))
        throw std::domain_error("gig: requires rho > 0 and chi >= 0");
    if (p.chi == 0.0 && p.lambda <= 0.0)
        throw std::domain_error("gig: chi = 0 requires lambda > 0 (improper otherwise)");
}

}  // namespace

double draw_gig(RngStream& rng, const GigParams& p) {
    validate_gig(p);
    if (p.chi == 0.0) return draw_gamma(rng, p.lambda, p.rho / 2.0);
    const double alpha = std::sqrt(p.chi / p.rho);
    const double omega = std::sqrt(p.rho * p.chi);
    if (p.lambda < 0.0) return alpha / gig_standardized(rng, -p.lambda, omega);
    return alpha * gig_standardized(rng, p.lambda, omega);
}

LogValue gig_log_pdf(double y, const GigParams& p) {
    validate_gig(p);
    if (!(y > 0.0)) throw std::domain_error("gig_log_pdf: y must be > 0");
    if (p.chi == 0.0) {
        // gamma(lambda, rho/2) limit
        return {p.lambda * std::log(p.rho / 2.0) - log_gamma_fn(p.lambda).value +
                (p.lambda - 1.0) * std::log(y) - 0.5 * p.rho * y};
    }
    const double omega = std::sqrt(p.rho * p.chi);
    const double log_norm = 0.5 * p.lambda * std::log(p.rho / p.chi) - std::log(2.0) -
                            log_bessel_k(p.lambda, omega).value;
    return {log_norm + (p.lambda - 1.0) * std::log(y) - 0.5 * (p.rho * y + p.chi / y)};
}

}  // namespace dlshrink
