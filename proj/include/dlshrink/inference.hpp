#ifndef DLSHRINK_INFERENCE_HPP_
#define DLSHRINK_INFERENCE_HPP_

#include <vector>

#include <Eigen/Core>

#include "dlshrink/gibbs.hpp"

namespace dlshrink {

/// Per-coordinate posterior median, central 95% interval and effective sample
/// size. ci_low <= median <= ci_high coordinate-wise.
struct PosteriorSummary {
    Eigen::VectorXd median;
    Eigen::VectorXd ci_low;   // 2.5% quantile
    Eigen::VectorXd ci_high;  // 97.5% quantile
    Eigen::VectorXd ess;
};

struct SelectionResult {
    int m_hat;
    std::vector<int> selected;  // the m_hat largest |posterior median| indices
};

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double p);

/// N / (1 + 2 sum rho_k) with the autocorrelation sum truncated by the
/// initial-positive-sequence rule; clamped to (0, N]. A zero-variance
/// sequence returns N.
double effective_sample_size(const Eigen::Ref<const Eigen::VectorXd>& draws);

/// Requires >= 100 retained draws.
PosteriorSummary summarize(const ChainOutput& chain);

double squared_error(const Eigen::Ref<const Eigen::VectorXd>& estimate,
                     const Eigen::Ref<const Eigen::VectorXd>& truth);

struct Kmeans2Result {
    int smaller_cluster_size;
    std::vector<int> assignment;  // 0 = lower-center cluster, 1 = upper
};

/// Thrown by kmeans2_1d on all-identical input; callers treat the count as 0.
struct DegenerateClusteringError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Lloyd's algorithm in one dimension with two clusters. Deterministic:
/// centers start at min and max, equidistant points go to the lower-center
/// cluster, iteration stops when assignments stabilize.
Kmeans2Result kmeans2_1d(const Eigen::Ref<const Eigen::VectorXd>& values);

/// Signal selection: per retained draw, 2-means on |theta| gives a smaller
/// cluster size; m_hat is the mode of those counts (ties -> smaller), and the
/// selected set is the m_hat largest |posterior median| coordinates.
SelectionResult select_signals(const ChainOutput& chain,
                               const PosteriorSummary& summary);

}  // namespace dlshrink

#endif  // DLSHRINK_INFERENCE_HPP_
