#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgpvsel/experiment.hpp"

namespace sgpvsel::cli {

enum class Command { Fit, Simulate, Sweep };

std::string_view to_string(Command command) noexcept;

enum class ValueKind { String, Int, UInt, Double, IntList, DoubleList, Flag };

/// One configurable setting, shared by the flag parser and the config file.
struct SettingInfo
{
    std::string_view key;   ///< JSON key; the flag is "--" + key with '_' -> '-'
    ValueKind kind;
    std::string_view help;
};

/// Every setting accepted on the command line or in a --config file.
const std::vector<SettingInfo>& settings();

/// Converts a flag's raw text to the JSON value for `kind`; lists are
/// comma separated. Throws InvalidArgument on malformed text.
nlohmann::json setting_value(ValueKind kind, const std::string& text);

struct RunConfig
{
    Command command = Command::Fit;

    std::string data;
    std::string outcome = "y";
    std::vector<Method> methods{Method::ProSgpv};
    std::string method_text = "prosgpv";
    MethodOptions method_options;

    // Scenario grid; simulate takes one value per list, sweep the cross product.
    std::vector<Index> n;
    std::vector<Index> p;
    std::vector<Index> s;
    std::vector<double> rho{0.0};
    std::vector<double> snr{2.0};
    Index reps = 100;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> beta_seed;
    std::optional<std::vector<double>> beta;
    std::optional<double> sigma2;
    double test_fraction = 0.4;
    TestSetMode test_mode = TestSetMode::Inflated;
    std::string name;

    std::size_t workers = 1;
    std::string out = "sgpv_out";
    bool timing = false;

    Index splits = 0;
    double train_frac = 0.7;

    /// Merged settings as given (file values overridden by flags), echoed
    /// into output metadata.
    nlohmann::ordered_json echo;
};

/// Merges `file` and `flags` (flags win), applies the worker default from
/// `env_workers` (may be null), and validates the result for `command`.
/// Throws InvalidArgument for unknown keys, bad types or inconsistent settings.
RunConfig resolve_config(Command command, const nlohmann::json& file, const nlohmann::json& flags,
                         const char* env_workers);

/// Reads a JSON object from disk; throws Io or Parse.
nlohmann::json load_config_file(const std::string& path);

/// Scenario cells in n, p, s, rho, snr nesting order.
std::vector<ScenarioSpec> scenario_grid(const RunConfig& config);

} // namespace sgpvsel::cli
