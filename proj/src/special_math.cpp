#include "dlshrink/special_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dlshrink {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Coefficients c_k of 1/Gamma(z) = sum_k c_k z^k (Abramowitz & Stegun 6.1.34).
// Only the even-indexed ones of 1/Gamma(1+mu) enter the cancellation-prone
// combination below.
constexpr double kC2 = 0.5772156649015329;
constexpr double kC4 = -0.0420026350340952;
constexpr double kC6 = -0.0421977345555443;
constexpr double kC8 = -0.0072189432466630;
constexpr double kC10 = -0.0002152416741149;
constexpr double kC12 = -0.0000128050282388;

// chi1(mu) = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu), even in mu,
// chi2(mu) = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2.
// The direct quotient for chi1 loses digits near mu = 0.
void temme_gamma_terms(double mu, double& chi1, double& chi2, double& inv_gam_plus,
                       double& inv_gam_minus) {
    inv_gam_plus = 1.0 / std::tgamma(1.0 + mu);
    inv_gam_minus = 1.0 / std::tgamma(1.0 - mu);
    chi2 = 0.5 * (inv_gam_minus + inv_gam_plus);
    if (std::abs(mu) < 0.12) {
        const double m2 = mu * mu;
        chi1 = -(kC2 + m2 * (kC4 + m2 * (kC6 + m2 * (kC8 + m2 * (kC10 + m2 * kC12)))));
    } else {
        chi1 = (inv_gam_minus - inv_gam_plus) / (2.0 * mu);
    }
}

// Temme's series for K_mu(x) and K_{mu+1}(x), |mu| <= 1/2, 0 < x <= 2.
void bessel_k_temme(double mu, double x, double& k_mu, double& k_mu1) {
    const double pimu = M_PI * mu;
    const double fact = (std::abs(pimu) < kEps) ? 1.0 : pimu / std::sin(pimu);
    const double d = -std::log(0.5 * x);
    double e = mu * d;
    const double fact2 = (std::abs(e) < kEps) ? 1.0 : std::sinh(e) / e;
    double chi1, chi2, inv_gam_plus, inv_gam_minus;
    temme_gamma_terms(mu, chi1, chi2, inv_gam_plus, inv_gam_minus);
    double ff = fact * (chi1 * std::cosh(e) + chi2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / inv_gam_plus;
    double q = 0.5 / (e * inv_gam_minus);
    double c = 1.0;
    const double x2 = 0.25 * x * x;
    double sum1 = p;
    for (int i = 1; i <= 10000; ++i) {
        ff = (i * ff + p + q) / (i * i - mu * mu);
        c *= x2 / i;
        p /= (i - mu);
        q /= (i + mu);
        const double del = c * ff;
        sum += del;
        const double del1 = c * (p - i * ff);
        sum1 += del1;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    k_mu = sum;
    k_mu1 = sum1 * (2.0 / x);
}

// Thompson-Barnett continued fraction for x > 2: computes e^x K_mu(x) and
// e^x K_{mu+1}(x), |mu| <= 1/2.
void bessel_k_cf2_scaled(double mu, double x, double& ek_mu, double& ek_mu1) {
    const double mu2 = mu * mu;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= 10000; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps) break;
    }
    h = a1 * h;
    ek_mu = std::sqrt(M_PI / (2.0 * x)) / s;
    ek_mu1 = ek_mu * (mu + x + 0.5 - h) / x;
}

}  // namespace

LogValue log_gamma_fn(double a) {
    if (!(a > 0.0)) throw std::domain_error("log_gamma_fn: a must be > 0");
    return {std::lgamma(a)};
}

LogValue log_bessel_k(double nu, double x) {
    if (!(x > 0.0)) throw std::domain_error("log_bessel_k: x must be > 0");
    nu = std::abs(nu);  // K_{-nu} = K_nu
    const int nsteps = static_cast<int>(nu + 0.5);
    const double mu = nu - nsteps;  // |mu| <= 1/2

    double k0, k1;        // K_mu, K_{mu+1} up to a factor exp(log_scale)
    double log_scale;     // 0 for x <= 2, -x for the exp-scaled branch
    if (x <= 2.0) {
        bessel_k_temme(mu, x, k0, k1);
        log_scale = 0.0;
    } else {
        bessel_k_cf2_scaled(mu, x, k0, k1);
        log_scale = -x;
    }
    // Upward recurrence K_{m+1} = K_{m-1} + (2m/x) K_m, rescaling to avoid
    // overflow when x is tiny and the order large.
    double m = mu;
    for (int i = 0; i < nsteps; ++i) {
        m += 1.0;
        const double knext = k0 + (2.0 * m / x) * k1;
        k0 = k1;
        k1 = knext;
        if (k1 > 1e280) {
            k0 *= 1e-280;
            k1 *= 1e-280;
            log_scale += std::log(1e280);
        }
    }
    return {std::log(k0) + log_scale};
}

LogValue log_sum_exp(std::span<const double> values) {
    if (values.empty()) throw std::domain_error("log_sum_exp: empty input");
    const double m = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(m)) return {m};  // all -inf (or a +/-inf dominates)
    double s = 0.0;
    for (double v : values) s += std::exp(v - m);
    return {m + std::log(s)};
}

LogValue log_sum_exp(std::span<const LogValue> values) {
    if (values.empty()) throw std::domain_error("log_sum_exp: empty input");
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& v : values) m = std::max(m, v.value);
    if (!std::isfinite(m)) return {m};
    double s = 0.0;
    for (const auto& v : values) s += std::exp(v.value - m);
    return {m + std::log(s)};
}

}  // namespace dlshrink
