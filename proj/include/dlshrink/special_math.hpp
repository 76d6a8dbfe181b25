#ifndef DLSHRINK_SPECIAL_MATH_HPP_
#define DLSHRINK_SPECIAL_MATH_HPP_

#include <span>

namespace dlshrink {

/// Natural-log-scale scalar. All densities in this library are evaluated in
/// log scale: concentration parameters as small as 1/n make Gamma(a) huge and
/// raw densities overflow.
struct LogValue {
    double value;
};

/// log Gamma(a) for a > 0. Throws std::domain_error otherwise.
LogValue log_gamma_fn(double a);

/// log K_nu(x), the modified Bessel function of the second kind, for x > 0
/// and any real nu (K_{-nu} = K_nu). Stable in log scale for small x where
/// K_nu(x) ~ x^{-|nu|}.
///
/// Evaluation: Temme's series for x <= 2, Steed/Thompson-Barnett continued
/// fraction (computing e^x K) for x > 2, with upward recurrence in the order.
LogValue log_bessel_k(double nu, double x);

/// log sum_i exp(v_i), computed with a shift by the max element.
LogValue log_sum_exp(std::span<const LogValue> values);
LogValue log_sum_exp(std::span<const double> values);

}  // namespace dlshrink

#endif  // DLSHRINK_SPECIAL_MATH_HPP_
