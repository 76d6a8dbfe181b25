#include "dlshrink/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dlshrink/dl_prior.hpp"

namespace dlshrink {

namespace {

using nlohmann::json;

DlPriorSpec dl_spec_for(const MethodSpec& method, int n,
                        const std::vector<double>& grid_override = {}) {
    if (method.kind == MethodKind::kDlFixed) {
        const double a = (method.a > 0.0) ? method.a : 1.0 / n;
        return DlPriorSpec::fixed(n, a);
    }
    return DlPriorSpec::grid(n, grid_override.empty() ? default_a_grid(n)
                                                      : grid_override);
}

Eigen::VectorXd build_theta0(const Scenario& sc) {
    Eigen::VectorXd theta0 = Eigen::VectorXd::Zero(sc.n);
    if (!sc.structure.empty()) {
        int pos = 0;
        for (const auto& [count, value] : sc.structure) {
            if (count < 0 || pos + count > sc.n)
                throw std::invalid_argument("Scenario: structure exceeds n");
            theta0.segment(pos, count).setConstant(value);
            pos += count;
        }
    } else {
        if (sc.q < 0 || sc.q > sc.n)
            throw std::invalid_argument("Scenario: need 0 <= q <= n");
        theta0.head(sc.q).setConstant(sc.signal);
    }
    return theta0;
}

double mode_of_draws(const Eigen::VectorXd& draws) {
    std::map<double, long> freq;
    for (long i = 0; i < draws.size(); ++i) ++freq[draws[i]];
    double mode = 0.0;
    long best = -1;
    for (const auto& [value, count] : freq) {
        if (count > best) {
            best = count;
            mode = value;
        }
    }
    return mode;
}

void write_density_grid_csv(const std::string& path, double a) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "x,log_pdf,pdf\n";
    constexpr int kPointsPerSide = 240;
    std::vector<double> xs;
    for (int i = 0; i < kPointsPerSide; ++i) {
        // log-spaced |x| from just above the excluded singular window to 50
        const double lx = -5.95 + i * (std::log10(50.0) + 5.95) / (kPointsPerSide - 1);
        xs.push_back(std::pow(10.0, lx));
    }
    std::ostringstream body;
    body.precision(17);
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) {
        const double lp = marginal_log_pdf(-*it, a).value;
        body << -*it << "," << lp << "," << std::exp(lp) << "\n";
    }
    for (double x : xs) {
        const double lp = marginal_log_pdf(x, a).value;
        body << x << "," << lp << "," << std::exp(lp) << "\n";
    }
    out << body.str();
}

}  // namespace

std::string MethodSpec::name() const {
    switch (kind) {
        case MethodKind::kDlFixed:
            return (a > 0.0) ? "dl_a=" + std::to_string(a) : "dl_1_over_n";
        case MethodKind::kDlGrid:
            return "dl_grid";
        case MethodKind::kBl:
            return "bl";
        case MethodKind::kHs:
            return "hs";
    }
    return "unknown";
}

std::vector<double> default_a_grid(int n) {
    std::vector<double> grid;
    for (int k = 0;; ++k) {
        const double a = 10.0 * (k + 1) / n;
        if (a > 0.5) break;
        grid.push_back(a);
    }
    if (grid.empty()) {
        if (n >= 3) grid.push_back(1.0 / n);
        grid.push_back(0.5);
    }
    return grid;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> generate_data(RngStream& rng,
                                                          const Scenario& sc) {
    if (sc.n <= 0) throw std::invalid_argument("Scenario: n must be >= 1");
    Eigen::VectorXd theta0 = build_theta0(sc);
    Eigen::VectorXd y(sc.n);
    for (int j = 0; j < sc.n; ++j) y[j] = theta0[j] + draw_normal(rng, 0.0, 1.0);
    return {std::move(y), std::move(theta0)};
}

ChainOutput run_method_chain(const Eigen::Ref<const Eigen::VectorXd>& y,
                             const MethodSpec& method, const ChainConfig& cfg) {
    const int n = static_cast<int>(y.size());
    switch (method.kind) {
        case MethodKind::kDlFixed:
        case MethodKind::kDlGrid:
            return run_dl_chain(y, dl_spec_for(method, n), cfg);
        case MethodKind::kBl:
            return run_bl_chain(y, BlHyper{}, cfg);
        case MethodKind::kHs:
            return run_hs_chain(y, cfg);
    }
    throw std::invalid_argument("unknown method");
}

ScenarioReport run_scenario(const Scenario& sc) {
    if (sc.replicates <= 0) throw std::invalid_argument("Scenario: replicates >= 1");
    const std::size_t n_methods = sc.methods.size();

    ScenarioReport report;
    for (const auto& m : sc.methods) report.method_names.push_back(m.name());
    report.replicates.resize(sc.replicates);

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= sc.replicates) return;
            ReplicateReport rep;
            rep.replicate = r;
            rep.squared_errors.assign(n_methods, 0.0);
            rep.min_ess.assign(n_methods, 0.0);
            rep.wall_seconds.assign(n_methods, 0.0);
            rep.failures.assign(n_methods, "");

            // data stream and per-method chain streams, injective in (r, method)
            RngStream data_rng(sc.base_seed,
                               (static_cast<std::uint64_t>(r) << 8) | 0xFFu);
            auto [y, theta0] = generate_data(data_rng, sc);
            for (std::size_t m = 0; m < n_methods; ++m) {
                ChainConfig cfg = sc.chain;
                cfg.seed = sc.base_seed;
                cfg.stream_id = (static_cast<std::uint64_t>(r) << 8) | m;
                const auto start = std::chrono::steady_clock::now();
                try {
                    ChainOutput out = run_method_chain(y, sc.methods[m], cfg);
                    PosteriorSummary summary = summarize(out);
                    rep.squared_errors[m] = squared_error(summary.median, theta0);
                    rep.min_ess[m] = summary.ess.minCoeff();
                } catch (const std::exception& e) {
                    rep.failures[m] = e.what();
                }
                rep.wall_seconds[m] =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                  start)
                        .count();
            }
            report.replicates[r] = std::move(rep);
        }
    };

    const int threads = std::max(1, std::min(sc.threads, sc.replicates));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    report.mean_squared_error.assign(n_methods, 0.0);
    report.mc_standard_error.assign(n_methods, 0.0);
    for (std::size_t m = 0; m < n_methods; ++m) {
        std::vector<double> ok;
        for (const auto& rep : report.replicates) {
            if (rep.failures[m].empty())
                ok.push_back(rep.squared_errors[m]);
            else
                report.any_failures = true;
        }
        if (ok.empty()) continue;
        double mean = 0.0;
        for (double e : ok) mean += e;
        mean /= ok.size();
        double var = 0.0;
        for (double e : ok) var += (e - mean) * (e - mean);
        var = (ok.size() > 1) ? var / (ok.size() - 1) : 0.0;
        report.mean_squared_error[m] = mean;
        report.mc_standard_error[m] = std::sqrt(var / ok.size());
    }
    return report;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

std::vector<std::string> parse_csv_record(const std::string& line, long line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw CsvParseError("unterminated quote", line_no);
    fields.push_back(cur);
    return fields;
}

}  // namespace

Column read_z_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvParseError("cannot open " + path, 0);
    std::string line;
    long line_no = 0;
    Column col;
    std::vector<double> zs;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = parse_csv_record(line, line_no);
        if (line_no == 1) {
            if (fields.size() != 2 || fields[0] != "id" || fields[1] != "z")
                throw CsvParseError("expected header 'id,z'", line_no);
            continue;
        }
        if (fields.size() != 2)
            throw CsvParseError("expected 2 fields", line_no);
        std::size_t consumed = 0;
        double z = 0.0;
        try {
            z = std::stod(fields[1], &consumed);
        } catch (const std::exception&) {
            throw CsvParseError("cannot parse z value '" + fields[1] + "'", line_no);
        }
        if (consumed != fields[1].size())
            throw CsvParseError("trailing characters in z value", line_no);
        if (!std::isfinite(z))
            throw std::invalid_argument("non-finite z at line " +
                                        std::to_string(line_no));
        col.ids.push_back(fields[0]);
        zs.push_back(z);
        if (zs.size() > 1000000)
            throw CsvParseError("more than 1e6 rows", line_no);
    }
    if (zs.empty()) throw CsvParseError("no data rows", line_no);
    col.z = Eigen::Map<Eigen::VectorXd>(zs.data(), static_cast<long>(zs.size()));
    return col;
}

int fit_file(const std::string& input_path, const FitConfig& cfg,
             const std::string& output_path) {
    Column col = read_z_csv(input_path);
    const int n = static_cast<int>(col.z.size());

    ChainOutput out;
    json chain_meta;
    chain_meta["iterations"] = cfg.chain.iterations;
    chain_meta["burn_in"] = cfg.chain.burn_in;
    chain_meta["thin"] = cfg.chain.thin;
    chain_meta["seed"] = cfg.chain.seed;
    chain_meta["method"] = cfg.method.name();

    double density_a = 0.0;
    if (cfg.method.kind == MethodKind::kDlFixed || cfg.method.kind == MethodKind::kDlGrid) {
        const DlPriorSpec spec = dl_spec_for(cfg.method, n, cfg.a_grid);
        out = run_dl_chain(col.z, spec, cfg.chain);
        if (spec.a_mode == DlPriorSpec::AMode::kGrid) {
            chain_meta["a_mode"] = "grid";
            chain_meta["a_grid"] = spec.a_grid;
            density_a = mode_of_draws(out.a_draws);
            chain_meta["a_posterior_mode"] = density_a;
        } else {
            chain_meta["a_mode"] = "fixed";
            chain_meta["a"] = spec.a_fixed;
            density_a = spec.a_fixed;
        }
    } else {
        out = run_method_chain(col.z, cfg.method, cfg.chain);
    }

    PosteriorSummary summary = summarize(out);
    SelectionResult sel = select_signals(out, summary);

    json coords = json::array();
    for (int j = 0; j < n; ++j) {
        coords.push_back({{"id", col.ids[j]},
                          {"median", summary.median[j]},
                          {"ci_low", summary.ci_low[j]},
                          {"ci_high", summary.ci_high[j]},
                          {"ess", summary.ess[j]}});
    }
    json selection;
    selection["m_hat"] = sel.m_hat;
    selection["selected_indices"] = sel.selected;
    json selected_ids = json::array();
    for (int idx : sel.selected) selected_ids.push_back(col.ids[idx]);
    selection["selected_ids"] = selected_ids;

    json doc;
    doc["chain"] = chain_meta;
    doc["selection"] = selection;
    doc["coordinates"] = coords;

    std::ofstream os(output_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + output_path);
    os << doc.dump(2) << "\n";

    if (!cfg.density_grid_path.empty() && density_a > 0.0)
        write_density_grid_csv(cfg.density_grid_path, density_a);
    return 0;
}

int prior_check(double a, int n, const std::vector<double>& delta_grid, long draws,
                std::uint64_t seed, const std::string& density_csv_path,
                const std::string& tails_json_path) {
    if (n <= 0) throw std::invalid_argument("prior_check: n must be >= 1");
    write_density_grid_csv(density_csv_path, a);

    RngStream rng(seed, 0);
    json tails = json::array();
    for (double delta : delta_grid) {
        TailMassEstimate est = tail_mass_estimate(rng, a, delta, draws);
        tails.push_back({{"delta", delta},
                         {"estimate", est.probability},
                         {"standard_error", est.standard_error}});
    }
    json doc;
    doc["a"] = a;
    doc["n"] = n;
    doc["draws"] = draws;
    doc["tail_mass"] = tails;
    std::ofstream os(tails_json_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + tails_json_path);
    os << doc.dump(2) << "\n";
    return 0;
}

}  // namespace dlshrink
