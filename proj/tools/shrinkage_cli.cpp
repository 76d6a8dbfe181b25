// Command-line entry point: `simulate` (replicated squared-error scenarios),
// `fit` (normal-means fit of a z-score CSV), `prior-check` (marginal density
// grid and tail-mass diagnostics).
//
// Exit codes: 0 success, 1 validation error, 2 runtime failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dlshrink/harness.hpp"

namespace {

using dlshrink::MethodKind;
using dlshrink::MethodSpec;
using dlshrink::Scenario;
using nlohmann::json;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& p : split(s, ',')) out.push_back(std::stod(p));
    return out;
}

MethodSpec parse_method(const std::string& name, double a_fixed) {
    if (name == "dl") return {MethodKind::kDlFixed, a_fixed};
    if (name == "dl-grid") return {MethodKind::kDlGrid};
    if (name == "bl") return {MethodKind::kBl};
    if (name == "hs") return {MethodKind::kHs};
    throw std::invalid_argument("unknown method '" + name +
                                "' (expected dl, dl-grid, bl, hs)");
}

// structure spec "10:10,90:3" -> {(10, 10.0), (90, 3.0)}
std::vector<std::pair<int, double>> parse_structure(const std::string& s) {
    std::vector<std::pair<int, double>> out;
    for (const auto& block : split(s, ',')) {
        const auto kv = split(block, ':');
        if (kv.size() != 2)
            throw std::invalid_argument("--structure expects count:value pairs");
        out.emplace_back(std::stoi(kv[0]), std::stod(kv[1]));
    }
    return out;
}

int resolve_threads(int cli_threads) {
    if (const char* env = std::getenv("SHRINKAGE_THREADS")) {
        return std::max(1, std::atoi(env));
    }
    if (cli_threads > 0) return cli_threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

json scenario_report_json(const dlshrink::ScenarioReport& report) {
    json methods = json::array();
    for (std::size_t m = 0; m < report.method_names.size(); ++m) {
        methods.push_back({{"name", report.method_names[m]},
                           {"mean_squared_error", report.mean_squared_error[m]},
                           {"mc_standard_error", report.mc_standard_error[m]}});
    }
    json reps = json::array();
    for (const auto& rep : report.replicates) {
        json per_method = json::array();
        for (std::size_t m = 0; m < rep.squared_errors.size(); ++m) {
            json entry = {{"squared_error", rep.squared_errors[m]},
                          {"min_ess", rep.min_ess[m]}};
            if (!rep.failures[m].empty()) entry["failure"] = rep.failures[m];
            per_method.push_back(entry);
        }
        reps.push_back({{"replicate", rep.replicate}, {"methods", per_method}});
    }
    // wall times are reported on stderr only, keeping the artifact
    // byte-deterministic across runs
    return json{{"methods", methods}, {"replicates", reps}};
}

int run_simulate(const Scenario& scenario, const std::string& out_path) {
    dlshrink::ScenarioReport report = dlshrink::run_scenario(scenario);

    std::cout << "method,mean_squared_error,mc_standard_error\n";
    for (std::size_t m = 0; m < report.method_names.size(); ++m) {
        std::cout << dlshrink::csv_escape(report.method_names[m]) << ","
                  << report.mean_squared_error[m] << ","
                  << report.mc_standard_error[m] << "\n";
    }
    for (const auto& rep : report.replicates) {
        for (std::size_t m = 0; m < rep.wall_seconds.size(); ++m) {
            std::cerr << "replicate " << rep.replicate << " "
                      << report.method_names[m] << ": " << rep.wall_seconds[m]
                      << "s";
            if (!rep.failures[m].empty()) std::cerr << " FAILED: " << rep.failures[m];
            std::cerr << "\n";
        }
    }
    if (!out_path.empty()) {
        std::ofstream os(out_path, std::ios::binary);
        if (!os) {
            std::cerr << "cannot open " << out_path << "\n";
            return 2;
        }
        os << scenario_report_json(report).dump(2) << "\n";
    }
    return report.any_failures ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirichlet-Laplace shrinkage: samplers, fits and diagnostics"};
    app.require_subcommand(1);

    // --- simulate ---
    auto* sim = app.add_subcommand("simulate", "replicated squared-error scenarios");
    std::string config_path, methods_arg, structure_arg, sim_out;
    std::string a_grid_arg;
    int n = -1, q = -1, replicates = -1, threads = -1;
    double signal = -1.0, a_fixed = 0.0;
    long iters = -1, burnin = -1, thin = -1;
    std::int64_t seed = -1;
    sim->add_option("--config", config_path, "JSON config file (CLI flags override)");
    sim->add_option("--n", n, "dimension");
    sim->add_option("--q", q, "number of signals");
    sim->add_option("--signal", signal, "signal amplitude A");
    sim->add_option("--structure", structure_arg,
                    "structured truth, count:value pairs (overrides --q/--signal)");
    sim->add_option("--replicates", replicates, "number of replicates");
    sim->add_option("--methods", methods_arg, "comma list of dl,dl-grid,bl,hs");
    sim->add_option("--a", a_fixed, "fixed a for the dl method (default 1/n)");
    sim->add_option("--a-grid", a_grid_arg, "comma list of grid points for dl-grid");
    sim->add_option("--iters", iters, "Gibbs iterations");
    sim->add_option("--burnin", burnin, "burn-in iterations");
    sim->add_option("--thin", thin, "thinning interval");
    sim->add_option("--seed", seed, "base seed");
    sim->add_option("--threads", threads, "worker threads (env SHRINKAGE_THREADS wins)");
    sim->add_option("--out", sim_out, "JSON report path");

    // --- fit ---
    auto* fit = app.add_subcommand("fit", "fit a normal-means model to CSV z-scores");
    std::string fit_in, fit_out, fit_method = "dl-grid", density_grid;
    fit->add_option("--input", fit_in, "input CSV with header id,z")->required();
    fit->add_option("--out", fit_out, "output JSON path")->required();
    fit->add_option("--method", fit_method, "dl, dl-grid, bl or hs");
    fit->add_option("--a", a_fixed, "fixed a for dl");
    fit->add_option("--a-grid", a_grid_arg, "grid points for dl-grid");
    fit->add_option("--iters", iters, "Gibbs iterations");
    fit->add_option("--burnin", burnin, "burn-in iterations");
    fit->add_option("--thin", thin, "thinning interval");
    fit->add_option("--seed", seed, "seed");
    fit->add_option("--density-grid", density_grid,
                    "also write a marginal-density CSV to this path");

    // --- prior-check ---
    auto* pc = app.add_subcommand("prior-check", "prior density and tail diagnostics");
    double pc_a = 0.5;
    int pc_n = 100;
    long pc_draws = 100000;
    std::string deltas_arg = "0.1,0.01,0.001", out_density, out_tails;
    pc->add_option("--a", pc_a, "Dirichlet concentration");
    pc->add_option("--n", pc_n, "dimension (metadata)");
    pc->add_option("--deltas", deltas_arg, "comma list of tail thresholds");
    pc->add_option("--draws", pc_draws, "Monte Carlo draws per threshold");
    pc->add_option("--seed", seed, "seed");
    pc->add_option("--out-density", out_density, "density grid CSV path")->required();
    pc->add_option("--out-tails", out_tails, "tail-mass JSON path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            Scenario sc;  // defaults
            if (!config_path.empty()) {
                std::ifstream is(config_path);
                if (!is) throw std::invalid_argument("cannot open " + config_path);
                json cfg = json::parse(is);
                sc.n = cfg.value("n", sc.n);
                sc.q = cfg.value("q", sc.q);
                sc.signal = cfg.value("signal", sc.signal);
                sc.replicates = cfg.value("replicates", sc.replicates);
                sc.chain.iterations = cfg.value("iterations", sc.chain.iterations);
                sc.chain.burn_in = cfg.value("burn_in", sc.chain.burn_in);
                sc.chain.thin = cfg.value("thin", sc.chain.thin);
                sc.base_seed = cfg.value("seed", sc.base_seed);
                if (cfg.contains("methods"))
                    methods_arg = methods_arg.empty()
                                      ? cfg["methods"].get<std::string>()
                                      : methods_arg;
                if (cfg.contains("structure") && structure_arg.empty()) {
                    for (const auto& block : cfg["structure"])
                        sc.structure.emplace_back(block[0].get<int>(),
                                                  block[1].get<double>());
                }
                if (cfg.contains("a") && a_fixed == 0.0) a_fixed = cfg["a"].get<double>();
            }
            if (n > 0) sc.n = n;
            if (q >= 0) sc.q = q;
            if (signal >= 0.0) sc.signal = signal;
            if (replicates > 0) sc.replicates = replicates;
            if (iters > 0) sc.chain.iterations = iters;
            if (burnin >= 0) sc.chain.burn_in = burnin;
            if (thin > 0) sc.chain.thin = thin;
            if (seed >= 0) sc.base_seed = static_cast<std::uint64_t>(seed);
            if (!structure_arg.empty()) sc.structure = parse_structure(structure_arg);
            if (!methods_arg.empty()) {
                for (const auto& name : split(methods_arg, ','))
                    sc.methods.push_back(parse_method(name, a_fixed));
            }
            sc.threads = resolve_threads(threads);
            return run_simulate(sc, sim_out);
        }
        if (fit->parsed()) {
            dlshrink::FitConfig cfg;
            cfg.method = parse_method(fit_method, a_fixed);
            if (!a_grid_arg.empty()) cfg.a_grid = parse_double_list(a_grid_arg);
            if (iters > 0) cfg.chain.iterations = iters;
            if (burnin >= 0) cfg.chain.burn_in = burnin;
            if (thin > 0) cfg.chain.thin = thin;
            if (seed >= 0) cfg.chain.seed = static_cast<std::uint64_t>(seed);
            cfg.density_grid_path = density_grid;
            return dlshrink::fit_file(fit_in, cfg, fit_out);
        }
        if (pc->parsed()) {
            const std::uint64_t s = (seed >= 0) ? static_cast<std::uint64_t>(seed) : 0;
            return dlshrink::prior_check(pc_a, pc_n, parse_double_list(deltas_arg),
                                         pc_draws, s, out_density, out_tails);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
