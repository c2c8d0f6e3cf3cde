#include "sgpvsel/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "sgpvsel/error.hpp"

namespace sgpvsel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_number(double v)
{
    if (!std::isfinite(v)) {
        return "NA";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string format_optional(const std::optional<double>& v)
{
    return v ? format_number(*v) : "NA";
}

Index support_size(const ScenarioSpec& spec)
{
    return spec.beta ? static_cast<Index>((spec.beta->array() != 0.0).count()) : spec.s;
}

std::string scenario_prefix(const ScenarioSpec& spec)
{
    // Labels are user text; quote them so commas cannot break the row.
    std::string label = spec.label();
    std::string quoted = "\"";
    for (char c : label) {
        quoted += c;
        if (c == '"') {
            quoted += '"';
        }
    }
    quoted += '"';
    return quoted + "," + std::to_string(spec.n) + "," + std::to_string(spec.p) + ","
        + std::to_string(support_size(spec)) + "," + format_number(spec.rho) + ","
        + (spec.sigma2 ? std::string("NA") : format_number(spec.snr));
}

double mean_of(std::span<const ReplicationRecord> records, Method method, double MetricsRecord::*field)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : records) {
        if (r.method == method && r.error.empty()) {
            sum += r.metrics.*field;
            ++count;
        }
    }
    return count > 0 ? sum / static_cast<double>(count) : kNaN;
}

ReplicationRecord run_method(Method method, const Replication& rep, Index index, const MethodOptions& options,
                             const FittedModel* oracle, bool record_timing)
{
    ReplicationRecord rec;
    rec.replication = index;
    rec.method = method;
    const auto start = std::chrono::steady_clock::now();
    try {
        const FittedModel model = fit_method(method, rep.train, options, rep.truth.support);
        const auto stop = std::chrono::steady_clock::now();
        rec.metrics = eval_metrics(model, rep.truth, rep.test, oracle);
        const double seconds = std::chrono::duration<double>(stop - start).count();
        rec.metrics.runtime_seconds = seconds;
        if (record_timing) {
            rec.runtime_seconds = seconds;
        }
    } catch (const Error& e) {
        rec.error = std::string(to_string(e.code()));
    } catch (const std::exception&) {
        rec.error = "Exception";
    }
    return rec;
}

} // namespace

std::string_view to_string(Method method) noexcept
{
    switch (method) {
    case Method::ProSgpv: return "prosgpv";
    case Method::ProSgpvOneStage: return "prosgpv1";
    case Method::Lasso: return "lasso";
    case Method::AdaptiveLasso: return "alasso";
    case Method::OracleOls: return "oracle";
    }
    return "prosgpv";
}

Method parse_method(std::string_view name)
{
    for (auto m : {Method::ProSgpv, Method::ProSgpvOneStage, Method::Lasso, Method::AdaptiveLasso,
                   Method::OracleOls}) {
        if (name == to_string(m)) {
            return m;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

std::vector<Method> parse_methods(std::string_view name)
{
    if (name == "all") {
        return {Method::ProSgpv, Method::ProSgpvOneStage, Method::Lasso, Method::AdaptiveLasso};
    }
    return {parse_method(name)};
}

FittedModel fit_method(Method method, const Dataset& train, const MethodOptions& options,
                       const std::vector<Index>& support)
{
    switch (method) {
    case Method::ProSgpv: return fit_two_stage(train, options.prosgpv).model;
    case Method::ProSgpvOneStage: return fit_one_stage(train, options.prosgpv).model;
    case Method::Lasso:
        return lasso_gic_fit(train, options.prosgpv.grid, options.prosgpv.lasso).model;
    case Method::AdaptiveLasso: return adaptive_lasso_fit(train, options.adaptive).model;
    case Method::OracleOls: return oracle_model(train, support);
    }
    throw Error(ErrorCode::InvalidArgument, "unhandled method");
}

Quartiles quartiles(std::vector<double> values)
{
    Quartiles q;
    q.count = values.size();
    if (values.empty()) {
        q.q1 = q.median = q.q3 = kNaN;
        return q;
    }
    std::sort(values.begin(), values.end());
    auto at = [&](double prob) {
        const double h = prob * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    q.q1 = at(0.25);
    q.median = at(0.5);
    q.q3 = at(0.75);
    return q;
}

std::pair<double, double> wald_interval(double rate, std::size_t reps)
{
    if (reps == 0 || !std::isfinite(rate)) {
        return {kNaN, kNaN};
    }
    const double half = 1.96 * std::sqrt(rate * (1.0 - rate) / static_cast<double>(reps));
    return {std::max(0.0, rate - half), std::min(1.0, rate + half)};
}

std::vector<MethodAggregate> aggregate_records(std::span<const ReplicationRecord> records,
                                               std::span<const Method> methods)
{
    std::vector<MethodAggregate> out;
    for (Method method : methods) {
        MethodAggregate agg;
        agg.method = method;
        std::vector<double> mae, rel_mae, rmse, rel_rmse;
        std::size_t captured = 0;
        std::size_t ok = 0;
        double runtime = 0.0;
        bool timed = true;
        for (const auto& r : records) {
            if (r.method != method) {
                continue;
            }
            ++agg.reps;
            if (!r.error.empty()) {
                ++agg.failures;
                continue;
            }
            ++ok;
            captured += r.metrics.captured ? 1 : 0;
            mae.push_back(r.metrics.mae);
            rmse.push_back(r.metrics.test_rmse);
            if (r.metrics.relative_mae) {
                rel_mae.push_back(*r.metrics.relative_mae);
            }
            if (r.metrics.relative_rmse) {
                rel_rmse.push_back(*r.metrics.relative_rmse);
            }
            if (r.runtime_seconds) {
                runtime += *r.runtime_seconds;
            } else {
                timed = false;
            }
        }
        agg.capture_rate = ok > 0 ? static_cast<double>(captured) / static_cast<double>(ok) : kNaN;
        std::tie(agg.capture_lo, agg.capture_hi) = wald_interval(agg.capture_rate, ok);
        agg.power = mean_of(records, method, &MetricsRecord::power);
        agg.type1 = mean_of(records, method, &MetricsRecord::type1);
        agg.pfdr = mean_of(records, method, &MetricsRecord::pfdr);
        agg.pfnr = mean_of(records, method, &MetricsRecord::pfnr);
        double size_sum = 0.0;
        for (const auto& r : records) {
            if (r.method == method && r.error.empty()) {
                size_sum += static_cast<double>(r.metrics.selected_size);
            }
        }
        agg.selected_size = ok > 0 ? size_sum / static_cast<double>(ok) : kNaN;
        agg.mae = quartiles(std::move(mae));
        agg.relative_mae = quartiles(std::move(rel_mae));
        agg.test_rmse = quartiles(std::move(rmse));
        agg.relative_rmse = quartiles(std::move(rel_rmse));
        if (timed && ok > 0) {
            agg.runtime_seconds = runtime / static_cast<double>(ok);
        }
        out.push_back(agg);
    }
    return out;
}

const MethodAggregate& ExperimentResult::aggregate(Method method) const
{
    for (const auto& a : aggregates) {
        if (a.method == method) {
            return a;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "method not part of this experiment");
}

ExperimentResult run_experiment(const ScenarioSpec& spec, const ExperimentOptions& options)
{
    spec.validate();
    if (options.methods.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no methods requested");
    }
    const auto reps = static_cast<std::size_t>(spec.reps);
    const std::size_t n_methods = options.methods.size();
    std::vector<ReplicationRecord> records(reps * n_methods);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < reps; r = next++) {
            const auto index = static_cast<Index>(r);
            std::optional<Replication> rep;
            std::string gen_error;
            try {
                rep = generate_replication(spec, index);
            } catch (const Error& e) {
                gen_error = std::string(to_string(e.code()));
            }
            std::optional<FittedModel> oracle;
            if (rep && static_cast<Index>(rep->truth.support.size()) < rep->train.n()) {
                try {
                    oracle = oracle_model(rep->train, rep->truth.support);
                } catch (const Error&) {
                    oracle.reset();
                }
            }
            for (std::size_t m = 0; m < n_methods; ++m) {
                auto& slot = records[r * n_methods + m];
                if (!rep) {
                    slot.replication = index;
                    slot.method = options.methods[m];
                    slot.error = gen_error;
                    continue;
                }
                slot = run_method(options.methods[m], *rep, index, options.method_options,
                                  oracle ? &*oracle : nullptr, options.record_timing);
            }
        }
    };

    const std::size_t n_workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(reps, 1));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) {
            pool.emplace_back(worker);
        }
    }

    ExperimentResult result;
    result.spec = spec;
    result.aggregates = aggregate_records(records, options.methods);
    result.failures = static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.error.empty(); }));
    result.records = std::move(records);
    return result;
}

const std::vector<std::string_view> kRecordColumns = {
    "scenario", "n", "p", "s", "rho", "snr", "method", "replication", "error", "captured", "power",
    "type1", "pfdr", "pfnr", "mae", "relative_mae", "test_rmse", "relative_rmse", "runtime_seconds",
    "selected_size",
};

const std::vector<std::string_view> kSummaryColumns = {
    "scenario", "n", "p", "s", "rho", "snr", "method", "reps", "failures", "capture_rate",
    "capture_wald_lo", "capture_wald_hi", "power", "type1", "pfdr", "pfnr", "selected_size",
    "mae_median", "mae_q1", "mae_q3", "relative_mae_median", "relative_mae_q1", "relative_mae_q3",
    "test_rmse_median", "test_rmse_q1", "test_rmse_q3", "relative_rmse_median", "relative_rmse_q1",
    "relative_rmse_q3", "runtime_seconds",
};

namespace {

void write_header(std::ostream& os, const std::vector<std::string_view>& columns)
{
    for (std::size_t i = 0; i < columns.size(); ++i) {
        os << (i ? "," : "") << columns[i];
    }
    os << '\n';
}

std::string quartile_cells(const Quartiles& q)
{
    return format_number(q.median) + "," + format_number(q.q1) + "," + format_number(q.q3);
}

} // namespace

void write_records_csv(std::ostream& os, std::span<const ExperimentResult> results)
{
    write_header(os, kRecordColumns);
    for (const auto& res : results) {
        const std::string prefix = scenario_prefix(res.spec);
        for (const auto& r : res.records) {
            os << prefix << ',' << to_string(r.method) << ',' << r.replication << ',' << r.error << ',';
            if (!r.error.empty()) {
                os << "NA,NA,NA,NA,NA,NA,NA,NA,NA,NA,NA\n";
                continue;
            }
            const auto& m = r.metrics;
            os << (m.captured ? 1 : 0) << ',' << format_number(m.power) << ',' << format_number(m.type1)
               << ',' << format_number(m.pfdr) << ',' << format_number(m.pfnr) << ','
               << format_number(m.mae) << ',' << format_optional(m.relative_mae) << ','
               << format_number(m.test_rmse) << ',' << format_optional(m.relative_rmse) << ','
               << format_optional(r.runtime_seconds) << ',' << m.selected_size << '\n';
        }
    }
}

void write_summary_csv(std::ostream& os, std::span<const ExperimentResult> results)
{
    write_header(os, kSummaryColumns);
    for (const auto& res : results) {
        const std::string prefix = scenario_prefix(res.spec);
        for (const auto& a : res.aggregates) {
            os << prefix << ',' << to_string(a.method) << ',' << a.reps << ',' << a.failures << ','
               << format_number(a.capture_rate) << ',' << format_number(a.capture_lo) << ','
               << format_number(a.capture_hi) << ',' << format_number(a.power) << ','
               << format_number(a.type1) << ',' << format_number(a.pfdr) << ',' << format_number(a.pfnr)
               << ',' << format_number(a.selected_size) << ',' << quartile_cells(a.mae) << ','
               << quartile_cells(a.relative_mae) << ',' << quartile_cells(a.test_rmse) << ','
               << quartile_cells(a.relative_rmse) << ',' << format_optional(a.runtime_seconds) << '\n';
        }
    }
}

std::string summary_json(std::span<const ExperimentResult> results, const std::string& metadata_json)
{
    using json = nlohmann::ordered_json;
    auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
    auto quart = [&](const Quartiles& q) {
        return json{{"median", num(q.median)}, {"q1", num(q.q1)}, {"q3", num(q.q3)}, {"count", q.count}};
    };
    json doc;
    doc["metadata"] = json::parse(metadata_json.empty() ? "{}" : metadata_json);
    std::size_t failures = 0;
    json scenarios = json::array();
    for (const auto& res : results) {
        failures += res.failures;
        const auto& spec = res.spec;
        json sc{{"scenario", spec.label()},
                {"n", spec.n},
                {"p", spec.p},
                {"s", support_size(spec)},
                {"rho", spec.rho},
                {"snr", spec.sigma2 ? json(nullptr) : json(spec.snr)},
                {"reps", spec.reps},
                {"master_seed", spec.master_seed},
                {"test_fraction", spec.test_fraction},
                {"test_mode", spec.test_mode == TestSetMode::Inflated ? "inflated" : "split"},
                {"failures", res.failures}};
        if (spec.sigma2) {
            sc["sigma2"] = *spec.sigma2;
        }
        json methods = json::array();
        for (const auto& a : res.aggregates) {
            methods.push_back(json{{"method", std::string(to_string(a.method))},
                                   {"reps", a.reps},
                                   {"failures", a.failures},
                                   {"capture_rate", num(a.capture_rate)},
                                   {"capture_wald", json::array({num(a.capture_lo), num(a.capture_hi)})},
                                   {"power", num(a.power)},
                                   {"type1", num(a.type1)},
                                   {"pfdr", num(a.pfdr)},
                                   {"pfnr", num(a.pfnr)},
                                   {"selected_size", num(a.selected_size)},
                                   {"mae", quart(a.mae)},
                                   {"relative_mae", quart(a.relative_mae)},
                                   {"test_rmse", quart(a.test_rmse)},
                                   {"relative_rmse", quart(a.relative_rmse)},
                                   {"runtime_seconds", a.runtime_seconds ? num(*a.runtime_seconds) : json(nullptr)}});
        }
        sc["methods"] = std::move(methods);
        scenarios.push_back(std::move(sc));
    }
    doc["failures"] = failures;
    doc["scenarios"] = std::move(scenarios);
    return doc.dump(2) + "\n";
}

} // namespace sgpvsel
