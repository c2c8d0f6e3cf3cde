#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgpvsel/baselines.hpp"
#include "sgpvsel/generate.hpp"
#include "sgpvsel/metrics.hpp"
#include "sgpvsel/prosgpv.hpp"

namespace sgpvsel {

enum class Method {
    ProSgpv,          ///< two-stage
    ProSgpvOneStage,
    Lasso,            ///< lasso at lambda_gic (the stage-one candidate set)
    AdaptiveLasso,
    OracleOls,
};

std::string_view to_string(Method method) noexcept;
/// CLI spellings: prosgpv, prosgpv1, lasso, alasso, oracle.
Method parse_method(std::string_view name);
/// "all" expands to the four selection methods; otherwise a single method.
std::vector<Method> parse_methods(std::string_view name);

struct MethodOptions
{
    ProSgpvConfig prosgpv;
    AdaptiveLassoConfig adaptive;
};

/// Fit `method` on `train` and return its original-scale model.
/// `support` is only used by OracleOls.
FittedModel fit_method(Method method, const Dataset& train, const MethodOptions& options,
                       const std::vector<Index>& support = {});

struct ExperimentOptions
{
    std::vector<Method> methods{Method::ProSgpv, Method::ProSgpvOneStage, Method::Lasso,
                                Method::AdaptiveLasso};
    MethodOptions method_options;
    std::size_t workers = 1;
    /// Wall-clock fields are left empty unless set, so outputs stay
    /// byte-identical across runs.
    bool record_timing = false;
};

struct ReplicationRecord
{
    Index replication = 0;
    Method method = Method::ProSgpv;
    std::string error;                   ///< empty on success, else an error tag
    MetricsRecord metrics;
    std::optional<double> runtime_seconds;
};

struct Quartiles
{
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    std::size_t count = 0;
};

/// Type-7 (linear interpolation) quartiles; NaN fields when `values` is empty.
Quartiles quartiles(std::vector<double> values);

struct MethodAggregate
{
    Method method = Method::ProSgpv;
    std::size_t reps = 0;
    std::size_t failures = 0;
    double capture_rate = 0.0;
    double capture_lo = 0.0;  ///< Wald 95% interval, clipped to [0, 1]
    double capture_hi = 0.0;
    double power = 0.0;
    double type1 = 0.0;
    double pfdr = 0.0;
    double pfnr = 0.0;
    double selected_size = 0.0;
    Quartiles mae;
    Quartiles relative_mae;
    Quartiles test_rmse;
    Quartiles relative_rmse;
    std::optional<double> runtime_seconds;
};

struct ExperimentResult
{
    ScenarioSpec spec;
    std::vector<ReplicationRecord> records;  ///< replication-major, then method order
    std::vector<MethodAggregate> aggregates; ///< one per method, in option order
    std::size_t failures = 0;

    const MethodAggregate& aggregate(Method method) const;
};

/// Generates spec.reps replications, fits every method and aggregates.
/// Results depend only on the scenario (including seeds), never on `workers`.
ExperimentResult run_experiment(const ScenarioSpec& spec, const ExperimentOptions& options);

/// Ordered reduction of per-replication records into per-method aggregates.
std::vector<MethodAggregate> aggregate_records(std::span<const ReplicationRecord> records,
                                               std::span<const Method> methods);

/// Wald interval p +/- 1.96 sqrt(p (1 - p) / reps), clipped to [0, 1].
std::pair<double, double> wald_interval(double rate, std::size_t reps);

/// Per-replication rows for every experiment, one header line.
void write_records_csv(std::ostream& os, std::span<const ExperimentResult> results);
/// One row per (scenario, method) aggregate.
void write_summary_csv(std::ostream& os, std::span<const ExperimentResult> results);
/// Aggregates as JSON; `metadata_json` (an object, may be "{}") is embedded
/// verbatim under "metadata".
std::string summary_json(std::span<const ExperimentResult> results, const std::string& metadata_json);

extern const std::vector<std::string_view> kRecordColumns;
extern const std::vector<std::string_view> kSummaryColumns;

} // namespace sgpvsel
