#ifndef DLSHRINK_HARNESS_HPP_
#define DLSHRINK_HARNESS_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dlshrink/gibbs.hpp"
#include "dlshrink/inference.hpp"

namespace dlshrink {

enum class MethodKind { kDlFixed, kDlGrid, kBl, kHs };

struct MethodSpec {
    MethodKind kind;
    double a = 0.0;  // DlFixed only; 0 means "use 1/n"
    std::string name() const;
};

/// Simulation design: theta_0 has q entries at the constant A (first q
/// indices), or the structured blocks of `structure` (count, value) pairs;
/// y = theta_0 + standard normal noise.
struct Scenario {
    int n = 100;
    int q = 5;
    double signal = 7.0;
    std::vector<std::pair<int, double>> structure;  // overrides (q, signal)
    int replicates = 20;
    std::vector<MethodSpec> methods;
    ChainConfig chain;
    std::uint64_t base_seed = 0;
    int threads = 1;
};

struct ReplicateReport {
    int replicate;
    std::vector<double> squared_errors;  // per method, ordered as in Scenario
    std::vector<double> min_ess;
    std::vector<double> wall_seconds;
    std::vector<std::string> failures;   // empty string = success
};

struct ScenarioReport {
    std::vector<std::string> method_names;
    std::vector<ReplicateReport> replicates;  // ordered by replicate index
    std::vector<double> mean_squared_error;   // per method
    std::vector<double> mc_standard_error;    // per method
    bool any_failures = false;
};

/// The default discrete grid on a: support points 10(k+1)/n clipped to
/// (0, 1/2]; falls back to {1/n, 1/2} when n is too small for any.
std::vector<double> default_a_grid(int n);

std::pair<Eigen::VectorXd, Eigen::VectorXd> generate_data(RngStream& rng,
                                                          const Scenario& scenario);

ChainOutput run_method_chain(const Eigen::Ref<const Eigen::VectorXd>& y,
                             const MethodSpec& method, const ChainConfig& cfg);

/// Runs every (replicate, method) chain; replicates may execute on a worker
/// pool, results are ordered by replicate index and deterministic given
/// base_seed regardless of execution order.
ScenarioReport run_scenario(const Scenario& scenario);

// --- file fitting (CSV in, JSON out) ---

struct FitConfig {
    MethodSpec method{MethodKind::kDlGrid};
    std::vector<double> a_grid;  // empty -> default_a_grid(n)
    ChainConfig chain;
    std::string density_grid_path;  // optional extra output
};

struct CsvParseError : std::invalid_argument {
    long line;
    CsvParseError(std::string msg, long line_no)
        : std::invalid_argument(std::move(msg)), line(line_no) {}
};

struct Column {
    std::vector<std::string> ids;
    Eigen::VectorXd z;
};

/// Reads a CSV with header `id,z`, one coordinate per row (at most 1e6).
Column read_z_csv(const std::string& path);

/// Fits the chosen sampler to the z column of input_path and writes the JSON
/// run artifact (per-coordinate summaries, chain metadata, selection) to
/// output_path. Returns the process exit status contract (0 on success).
int fit_file(const std::string& input_path, const FitConfig& cfg,
             const std::string& output_path);

// --- prior diagnostics ---

/// Writes a density-grid CSV (marginal log-density on a symmetric log-spaced
/// grid excluding the singular point) and a tail-mass JSON (Monte Carlo
/// P(|theta_1| > delta) with standard errors per delta).
int prior_check(double a, int n, const std::vector<double>& delta_grid, long draws,
                std::uint64_t seed, const std::string& density_csv_path,
                const std::string& tails_json_path);

/// RFC-4180 field quoting.
std::string csv_escape(const std::string& field);

}  // namespace dlshrink

#endif  // DLSHRINK_HARNESS_HPP_
