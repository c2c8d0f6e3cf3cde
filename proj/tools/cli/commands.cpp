#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "sgpvsel/baselines.hpp"
#include "sgpvsel/error.hpp"
#include "sgpvsel/metrics.hpp"
#include "sgpvsel/prosgpv.hpp"

#ifndef SGPVSEL_VERSION
#define SGPVSEL_VERSION "unknown"
#endif

namespace sgpvsel::cli {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

// Stream tag for split shuffles, distinct from the simulation streams.
constexpr std::uint64_t kSplitStream = 4;

ojson number(double v)
{
    return std::isfinite(v) ? ojson(v) : ojson(nullptr);
}

ojson names_of(const Dataset& data, const std::vector<Index>& columns)
{
    ojson out = ojson::array();
    for (Index j : columns) {
        out.push_back(data.column_names()[static_cast<std::size_t>(j)]);
    }
    return out;
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string csv_number(double v)
{
    if (!std::isfinite(v)) {
        return "NA";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    }
    os << content;
    if (!os) {
        throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
    }
}

void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::Io, "cannot create output directory '" + dir + "': " + ec.message());
    }
}

ojson coefficient_table(const Dataset& data, const FittedModel& model, const OlsFit* refit)
{
    ojson rows = ojson::array();
    rows.push_back(ojson{{"variable", "(Intercept)"},
                         {"estimate", model.intercept},
                         {"se", refit && refit->intercept_se ? number(*refit->intercept_se) : ojson(nullptr)}});
    for (std::size_t k = 0; k < model.selected.size(); ++k) {
        const Index j = model.selected[k];
        rows.push_back(ojson{{"variable", data.column_names()[static_cast<std::size_t>(j)]},
                             {"estimate", model.coefficients(j)},
                             {"se", refit ? number(refit->se(static_cast<Index>(k))) : ojson(nullptr)}});
    }
    return rows;
}

ojson prosgpv_entry(const Dataset& data, const SelectionResult& res, const ProSgpvConfig& cfg)
{
    ojson e;
    e["selected"] = names_of(data, res.selected());
    e["coefficients"] = coefficient_table(data, res.model, &res.refit);
    ojson diag;
    diag["stage"] = std::string(to_string(res.mode));
    diag["lambda_gic"] = res.mode == StageMode::TwoStage ? number(res.stage1_lambda) : ojson(nullptr);
    diag["candidate_set"] = names_of(data, res.stage1_candidate_set);
    diag["candidate_set_truncated"] = res.stage1_truncated;
    diag["null_bound_variant"] = std::string(to_string(cfg.null_bound));
    diag["null_bound"] = number(res.sgpv_report.bound);
    diag["se_bar"] = res.candidate_fit && res.candidate_fit->se.size() > 0 ? number(res.candidate_fit->se.mean())
                                                                          : ojson(nullptr);
    diag["interval_multiplier"] = res.sgpv_report.multiplier;
    ojson sgpvs = ojson::array();
    for (const auto& s : res.sgpv_report.entries) {
        sgpvs.push_back(ojson{{"variable", data.column_names()[static_cast<std::size_t>(s.column)]},
                              {"estimate_std", s.estimate},
                              {"se_std", s.se},
                              {"interval", ojson::array({s.interval.lo, s.interval.hi})},
                              {"sgpv", s.p_delta},
                              {"keep", s.keep}});
    }
    diag["sgpv"] = std::move(sgpvs);
    e["diagnostics"] = std::move(diag);
    return e;
}

ojson method_entry(Method method, const Dataset& data, const MethodOptions& opts)
{
    ojson e;
    e["method"] = std::string(to_string(method));
    try {
        switch (method) {
        case Method::ProSgpv:
            e.update(prosgpv_entry(data, fit_two_stage(data, opts.prosgpv), opts.prosgpv));
            break;
        case Method::ProSgpvOneStage:
            e.update(prosgpv_entry(data, fit_one_stage(data, opts.prosgpv), opts.prosgpv));
            break;
        case Method::Lasso: {
            const LassoGicFit fit = lasso_gic_fit(data, opts.prosgpv.grid, opts.prosgpv.lasso);
            e["selected"] = names_of(data, fit.model.selected);
            e["coefficients"] = coefficient_table(data, fit.model, nullptr);
            e["diagnostics"] = ojson{{"lambda_gic", fit.lambda}, {"estimates", "penalized"}};
            break;
        }
        case Method::AdaptiveLasso: {
            const AdaptiveLassoFit fit = adaptive_lasso_fit(data, opts.adaptive);
            e["selected"] = names_of(data, fit.model.selected);
            e["coefficients"] = coefficient_table(data, fit.model, nullptr);
            ojson weights = ojson::object();
            for (Index j = 0; j < data.p(); ++j) {
                weights[data.column_names()[static_cast<std::size_t>(j)]] = number(fit.weights(j));
            }
            e["diagnostics"] = ojson{{"lambda", fit.lambda},
                                     {"gamma", fit.gamma},
                                     {"weights", std::move(weights)},
                                     {"all_weights_infinite", fit.all_weights_infinite},
                                     {"estimates", opts.adaptive.ols_refit ? "ols_refit" : "penalized"}};
            break;
        }
        case Method::OracleOls:
            throw Error(ErrorCode::InvalidArgument, "oracle needs a known support");
        }
    } catch (const Error& err) {
        e["error"] = std::string(to_string(err.code()));
        e["message"] = err.what();
    }
    return e;
}

struct SplitRow
{
    Index split = 0;
    Method method = Method::ProSgpv;
    Index train_n = 0;
    Index test_n = 0;
    std::string error;
    Index selected_size = 0;
    double test_rmse = 0.0;
    std::vector<Index> selected;
};

std::vector<Index> split_permutation(Index n, std::uint64_t seed, Index split)
{
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(split), kSplitStream));
    for (std::size_t i = perm.size(); i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(perm[i - 1], perm[pick(rng)]);
    }
    return perm;
}

std::vector<SplitRow> run_splits(const Dataset& data, const RunConfig& cfg)
{
    const Index n = data.n();
    const auto train_n = static_cast<Index>(std::llround(cfg.train_frac * static_cast<double>(n)));
    if (train_n < 3 || n - train_n < 1) {
        throw Error(ErrorCode::InvalidArgument, "train_frac leaves fewer than 3 training or 1 test rows");
    }
    const auto splits = static_cast<std::size_t>(cfg.splits);
    const std::size_t n_methods = cfg.methods.size();
    std::vector<SplitRow> rows(splits * n_methods);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < splits; k = next++) {
            const auto perm = split_permutation(n, cfg.seed, static_cast<Index>(k));
            const std::vector<Index> train_rows(perm.begin(), perm.begin() + train_n);
            const std::vector<Index> test_rows(perm.begin() + train_n, perm.end());
            const Dataset train = data.select_rows(train_rows);
            const Dataset test = data.select_rows(test_rows);
            for (std::size_t m = 0; m < n_methods; ++m) {
                SplitRow& row = rows[k * n_methods + m];
                row.split = static_cast<Index>(k);
                row.method = cfg.methods[m];
                row.train_n = train.n();
                row.test_n = test.n();
                try {
                    const FittedModel fit = fit_method(row.method, train, cfg.method_options);
                    row.selected = fit.selected;
                    row.selected_size = static_cast<Index>(fit.selected.size());
                    row.test_rmse = prediction_rmse(fit, test);
                } catch (const Error& e) {
                    row.error = std::string(to_string(e.code()));
                }
            }
        }
    };
    const std::size_t n_workers = std::clamp<std::size_t>(cfg.workers, 1, std::max<std::size_t>(splits, 1));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    return rows;
}

ojson quartile_json(std::vector<double> values)
{
    const Quartiles q = quartiles(std::move(values));
    return ojson{{"median", number(q.median)}, {"q1", number(q.q1)}, {"q3", number(q.q3)}, {"count", q.count}};
}

ojson split_summary(const Dataset& data, const RunConfig& cfg, const std::vector<SplitRow>& rows)
{
    ojson out = ojson::array();
    for (Method m : cfg.methods) {
        std::vector<double> sizes, rmse;
        std::vector<std::size_t> freq(static_cast<std::size_t>(data.p()), 0);
        std::size_t failures = 0;
        for (const auto& r : rows) {
            if (r.method != m) {
                continue;
            }
            if (!r.error.empty()) {
                ++failures;
                continue;
            }
            sizes.push_back(static_cast<double>(r.selected_size));
            rmse.push_back(r.test_rmse);
            for (Index j : r.selected) {
                ++freq[static_cast<std::size_t>(j)];
            }
        }
        ojson sel = ojson::object();
        for (Index j = 0; j < data.p(); ++j) {
            const auto f = freq[static_cast<std::size_t>(j)];
            sel[data.column_names()[static_cast<std::size_t>(j)]]
                = sizes.empty() ? ojson(nullptr) : ojson(static_cast<double>(f) / static_cast<double>(sizes.size()));
        }
        const double mean_size
            = sizes.empty() ? std::nan("") : std::accumulate(sizes.begin(), sizes.end(), 0.0) / double(sizes.size());
        out.push_back(ojson{{"method", std::string(to_string(m))},
                            {"splits", cfg.splits},
                            {"failures", failures},
                            {"selected_size_mean", number(mean_size)},
                            {"selected_size", quartile_json(sizes)},
                            {"test_rmse", quartile_json(rmse)},
                            {"selection_frequency", std::move(sel)}});
    }
    return out;
}

void write_split_rows(std::ostream& os, const Dataset& data, const std::vector<SplitRow>& rows)
{
    os << "split,method,train_n,test_n,error,selected_size,test_rmse,selected\n";
    for (const auto& r : rows) {
        os << r.split << ',' << to_string(r.method) << ',' << r.train_n << ',' << r.test_n << ',' << r.error << ',';
        if (!r.error.empty()) {
            os << "NA,NA,NA\n";
            continue;
        }
        std::string names;
        for (Index j : r.selected) {
            names += (names.empty() ? "" : ";") + data.column_names()[static_cast<std::size_t>(j)];
        }
        os << r.selected_size << ',' << csv_number(r.test_rmse) << ',' << csv_quote(names) << '\n';
    }
}

void print_fit_summary(std::ostream& out, const ojson& report)
{
    const auto& d = report["data"];
    out << "data: " << d["rows_used"].get<std::size_t>() << " rows used (" << d["rows_dropped"].get<std::size_t>()
        << " dropped), " << d["features"].size() << " features, outcome '" << d["outcome"].get<std::string>()
        << "'\n";
    for (const auto& m : report["methods"]) {
        out << "\n[" << m["method"].get<std::string>() << "]\n";
        if (m.contains("error")) {
            out << "  failed: " << m["message"].get<std::string>() << "\n";
            continue;
        }
        out << "  selected (" << m["selected"].size() << "):";
        for (const auto& v : m["selected"]) {
            out << ' ' << v.get<std::string>();
        }
        out << "\n";
        for (const auto& c : m["coefficients"]) {
            out << "  " << std::left << std::setw(20) << c["variable"].get<std::string>() << std::right
                << std::setw(14) << std::setprecision(6) << c["estimate"].get<double>();
            if (!c["se"].is_null()) {
                out << "  (se " << std::setprecision(4) << c["se"].get<double>() << ")";
            }
            out << "\n";
        }
        const auto& diag = m["diagnostics"];
        if (diag.contains("candidate_set")) {
            out << "  candidate set (" << diag["candidate_set"].size() << ")";
            if (!diag["lambda_gic"].is_null()) {
                out << ", lambda_gic " << std::setprecision(6) << diag["lambda_gic"].get<double>();
            }
            if (!diag["null_bound"].is_null()) {
                out << ", null bound " << std::setprecision(6) << diag["null_bound"].get<double>();
            }
            out << "\n";
        }
    }
    if (report.contains("splits")) {
        out << "\nrepeated splits (" << report["splits"][0]["splits"].get<Index>() << "):\n";
        for (const auto& s : report["splits"]) {
            out << "  " << std::left << std::setw(10) << s["method"].get<std::string>() << std::right
                << " failures " << s["failures"].get<std::size_t>();
            if (!s["test_rmse"]["median"].is_null()) {
                out << ", median size " << s["selected_size"]["median"].get<double>() << ", test RMSE median "
                    << std::setprecision(5) << s["test_rmse"]["median"].get<double>() << " [IQR "
                    << s["test_rmse"]["q1"].get<double>() << ", " << s["test_rmse"]["q3"].get<double>() << "]";
            }
            out << "\n";
        }
    }
}

void print_experiment_summary(std::ostream& out, const std::vector<ExperimentResult>& results)
{
    out << std::left << std::setw(34) << "scenario" << std::setw(10) << "method" << std::right << std::setw(9)
        << "capture" << std::setw(8) << "power" << std::setw(8) << "type1" << std::setw(12) << "rel.MAE"
        << std::setw(10) << "failures" << "\n";
    for (const auto& r : results) {
        for (const auto& a : r.aggregates) {
            out << std::left << std::setw(34) << r.spec.label() << std::setw(10) << to_string(a.method) << std::right
                << std::fixed << std::setprecision(3) << std::setw(9) << a.capture_rate << std::setw(8) << a.power
                << std::setw(8) << a.type1 << std::setw(12) << a.relative_mae.median << std::setw(10) << a.failures
                << std::defaultfloat << "\n";
        }
    }
}

} // namespace

ojson run_metadata(const RunConfig& config)
{
    return ojson{{"tool", "sgpv-select"},
                 {"version", SGPVSEL_VERSION},
                 {"command", std::string(to_string(config.command))},
                 {"timestamp", utc_timestamp()},
                 {"workers", config.workers},
                 {"config", config.echo}};
}

ojson fit_report(const LoadedData& loaded, const RunConfig& config, std::ostream* splits_csv)
{
    const Dataset& data = loaded.data;
    ojson report;
    report["data"] = ojson{{"path", config.data},
                           {"outcome", loaded.outcome},
                           {"rows_read", loaded.rows_read},
                           {"rows_dropped", loaded.rows_dropped},
                           {"rows_used", data.n()},
                           {"features", data.column_names()}};
    ojson methods = ojson::array();
    for (Method m : config.methods) {
        methods.push_back(method_entry(m, data, config.method_options));
    }
    report["methods"] = std::move(methods);
    if (config.splits > 0) {
        const auto rows = run_splits(data, config);
        report["splits"] = split_summary(data, config, rows);
        if (splits_csv != nullptr) {
            write_split_rows(*splits_csv, data, rows);
        }
    }
    return report;
}

int cmd_fit(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    const LoadedData loaded = table_to_dataset(read_csv_file(config.data), config.outcome);
    if (loaded.rows_dropped > 0) {
        err << "warning: dropped " << loaded.rows_dropped << " of " << loaded.rows_read
            << " rows with missing values\n";
    }
    ensure_dir(config.out);
    std::ostringstream splits;
    ojson report = fit_report(loaded, config, config.splits > 0 ? &splits : nullptr);

    ojson doc;
    doc["metadata"] = run_metadata(config);
    doc.update(report);
    write_file(fs::path(config.out) / "report.json", doc.dump(2) + "\n");
    if (config.splits > 0) {
        write_file(fs::path(config.out) / "splits.csv", splits.str());
    }
    print_fit_summary(out, report);
    out << "\nwrote " << (fs::path(config.out) / "report.json").string() << "\n";

    std::size_t failed = 0;
    for (const auto& m : report["methods"]) {
        if (m.contains("error")) {
            err << "error: " << m["method"].get<std::string>() << ": " << m["message"].get<std::string>() << "\n";
            ++failed;
        }
    }
    return failed == report["methods"].size() ? 1 : 0;
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    ensure_dir(config.out);
    ExperimentOptions opts;
    opts.methods = config.methods;
    opts.method_options = config.method_options;
    opts.workers = config.workers;
    opts.record_timing = config.timing;

    std::vector<ExperimentResult> results;
    ojson failed_cells = ojson::array();
    for (const ScenarioSpec& spec : scenario_grid(config)) {
        try {
            results.push_back(run_experiment(spec, opts));
            const auto& r = results.back();
            err << "done " << spec.label() << " (" << spec.reps << " reps";
            if (r.failures > 0) {
                err << ", " << r.failures << " failed fits";
            }
            err << ")\n";
        } catch (const Error& e) {
            err << "error: scenario " << spec.label() << ": " << e.what() << "\n";
            failed_cells.push_back(ojson{{"scenario", spec.label()}, {"error", std::string(to_string(e.code()))},
                                         {"message", e.what()}});
        }
    }

    std::ostringstream records, summary;
    write_records_csv(records, results);
    write_summary_csv(summary, results);
    ojson doc = ojson::parse(summary_json(results, run_metadata(config).dump()));
    doc["failures"] = doc["failures"].get<std::size_t>() + failed_cells.size();
    doc["failed_cells"] = std::move(failed_cells);

    const fs::path dir(config.out);
    write_file(dir / "results.csv", records.str());
    write_file(dir / "summary.csv", summary.str());
    write_file(dir / "summary.json", doc.dump(2) + "\n");
    print_experiment_summary(out, results);
    out << "\nwrote results.csv, summary.csv, summary.json to " << dir.string() << "\n";
    if (doc["failures"].get<std::size_t>() > 0) {
        err << "warning: " << doc["failures"].get<std::size_t>() << " failures (see summary.json)\n";
    }
    // Partial failures still succeed; a run where no cell could start did not.
    return results.empty() ? 1 : 0;
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    switch (config.command) {
    case Command::Fit: return cmd_fit(config, out, err);
    case Command::Simulate:
    case Command::Sweep: return cmd_simulate(config, out, err);
    }
    return 1;
}

} // namespace sgpvsel::cli
