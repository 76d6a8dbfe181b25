#include "dlshrink/inference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace dlshrink {

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile: empty input");
    std::sort(values.begin(), values.end());
    const double h = (values.size() - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - lo;
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

double effective_sample_size(const Eigen::Ref<const Eigen::VectorXd>& draws) {
    const long n = draws.size();
    if (n < 100) throw std::invalid_argument("effective_sample_size: need >= 100 draws");
    // a constant sequence has no autocorrelation structure; by convention ESS = N
    if ((draws.array() == draws[0]).all()) return static_cast<double>(n);
    const double mean = draws.mean();
    Eigen::VectorXd centered = draws.array() - mean;
    const double gamma0 = centered.squaredNorm() / n;
    if (gamma0 <= 0.0) return static_cast<double>(n);

    auto autocov = [&](long k) {
        return centered.head(n - k).dot(centered.tail(n - k)) / n;
    };
    // Geyer initial positive sequence: accumulate adjacent-pair sums
    // Gamma_m = gamma_{2m} + gamma_{2m+1} while they stay positive.
    double s = -gamma0;
    for (long m = 0; 2 * m + 1 < n; ++m) {
        const double pair = autocov(2 * m) + autocov(2 * m + 1);
        if (pair <= 0.0) break;
        s += 2.0 * pair;
    }
    if (s <= 0.0) return static_cast<double>(n);
    const double ess = n * gamma0 / s;
    return std::clamp(ess, 1e-12, static_cast<double>(n));
}

PosteriorSummary summarize(const ChainOutput& chain) {
    const long kept = chain.retained();
    const long n = chain.dim();
    if (kept < 100) throw std::invalid_argument("summarize: need >= 100 retained draws");
    PosteriorSummary s;
    s.median.resize(n);
    s.ci_low.resize(n);
    s.ci_high.resize(n);
    s.ess.resize(n);
    std::vector<double> col(kept);
    for (long j = 0; j < n; ++j) {
        Eigen::VectorXd column = chain.theta_draws.col(j);
        col.assign(column.data(), column.data() + kept);
        s.median[j] = quantile(col, 0.5);
        s.ci_low[j] = quantile(col, 0.025);
        s.ci_high[j] = quantile(col, 0.975);
        s.ess[j] = effective_sample_size(column);
    }
    return s;
}

double squared_error(const Eigen::Ref<const Eigen::VectorXd>& estimate,
                     const Eigen::Ref<const Eigen::VectorXd>& truth) {
    if (estimate.size() != truth.size())
        throw std::invalid_argument("squared_error: length mismatch");
    return (estimate - truth).squaredNorm();
}

Kmeans2Result kmeans2_1d(const Eigen::Ref<const Eigen::VectorXd>& values) {
    const long n = values.size();
    if (n < 2) throw std::invalid_argument("kmeans2_1d: need at least 2 values");
    double lo = values.minCoeff();
    double hi = values.maxCoeff();
    if (lo == hi) throw DegenerateClusteringError("kmeans2_1d: all values identical");

    Kmeans2Result res;
    res.assignment.assign(n, 0);
    double c0 = lo, c1 = hi;
    for (int pass = 0; pass < 1000; ++pass) {
        bool changed = false;
        long n1 = 0;
        double s0 = 0.0, s1 = 0.0;
        for (long i = 0; i < n; ++i) {
            // equidistant points go to the lower-center cluster
            const int a = (std::abs(values[i] - c1) < std::abs(values[i] - c0)) ? 1 : 0;
            if (a != res.assignment[i]) {
                res.assignment[i] = a;
                changed = true;
            }
            if (a == 1) {
                s1 += values[i];
                ++n1;
            } else {
                s0 += values[i];
            }
        }
        if (n1 == 0 || n1 == n) break;
        c0 = s0 / (n - n1);
        c1 = s1 / n1;
        if (!changed) break;
    }
    const long n1 = std::count(res.assignment.begin(), res.assignment.end(), 1);
    res.smaller_cluster_size = static_cast<int>(std::min(n1, n - n1));
    return res;
}

SelectionResult select_signals(const ChainOutput& chain,
                               const PosteriorSummary& summary) {
    const long kept = chain.retained();
    const long n = chain.dim();
    std::map<int, long> count_freq;
    for (long r = 0; r < kept; ++r) {
        int count = 0;
        try {
            count = kmeans2_1d(chain.theta_draws.row(r).cwiseAbs().transpose())
                        .smaller_cluster_size;
        } catch (const DegenerateClusteringError&) {
            count = 0;
        } catch (const std::invalid_argument&) {
            count = 0;  // n == 1
        }
        ++count_freq[count];
    }
    int m_hat = 0;
    long best = -1;
    for (const auto& [count, freq] : count_freq) {
        if (freq > best) {  // map is ordered, so ties keep the smaller count
            best = freq;
            m_hat = count;
        }
    }
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) {
        return std::abs(summary.median[i]) > std::abs(summary.median[j]);
    });
    idx.resize(m_hat);
    std::sort(idx.begin(), idx.end());
    return {m_hat, std::move(idx)};
}

}  // namespace dlshrink
