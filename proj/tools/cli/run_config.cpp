#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "sgpvsel/error.hpp"

namespace sgpvsel::cli {

using json = nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what)
{
    throw Error(ErrorCode::InvalidArgument, what);
}

std::vector<std::string> split_commas(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        parts.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
    }
    return parts;
}

template <typename T>
T parse_number(const std::string& text, std::string_view key)
{
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        bad("setting '" + std::string(key) + "' expects a number, got '" + text + "'");
    }
    return value;
}

const SettingInfo& find_setting(const std::string& key)
{
    for (const auto& s : settings()) {
        if (s.key == key) {
            return s;
        }
    }
    bad("unknown setting '" + key + "'");
}

std::string normalize_key(std::string key)
{
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

// Type checks a config-file value against its declared kind. Scalars are
// accepted where lists are expected.
void check_kind(const SettingInfo& info, const json& v)
{
    const std::string key(info.key);
    auto is_int = [](const json& x) { return x.is_number_integer(); };
    auto is_num = [](const json& x) { return x.is_number(); };
    switch (info.kind) {
    case ValueKind::String:
        if (!v.is_string()) {
            bad("setting '" + key + "' expects a string");
        }
        break;
    case ValueKind::Int:
        if (!is_int(v)) {
            bad("setting '" + key + "' expects an integer");
        }
        break;
    case ValueKind::UInt:
        if (!v.is_number_unsigned() && !(is_int(v) && v.get<std::int64_t>() >= 0)) {
            bad("setting '" + key + "' expects a nonnegative integer");
        }
        break;
    case ValueKind::Double:
        if (!is_num(v)) {
            bad("setting '" + key + "' expects a number");
        }
        break;
    case ValueKind::IntList:
    case ValueKind::DoubleList: {
        const auto ok = info.kind == ValueKind::IntList ? +is_int : +is_num;
        const bool good = v.is_array() ? !v.empty() && std::all_of(v.begin(), v.end(), ok) : ok(v);
        if (!good) {
            bad("setting '" + key + "' expects a number or a nonempty list of numbers");
        }
        break;
    }
    case ValueKind::Flag:
        if (!v.is_boolean()) {
            bad("setting '" + key + "' expects true or false");
        }
        break;
    }
}

template <typename T>
std::vector<T> as_list(const json& v)
{
    if (v.is_array()) {
        return v.get<std::vector<T>>();
    }
    return {v.get<T>()};
}

} // namespace

std::string_view to_string(Command command) noexcept
{
    switch (command) {
    case Command::Fit: return "fit";
    case Command::Simulate: return "simulate";
    case Command::Sweep: return "sweep";
    }
    return "fit";
}

const std::vector<SettingInfo>& settings()
{
    static const std::vector<SettingInfo> table = {
        {"data", ValueKind::String, "input CSV with a header row (fit)"},
        {"outcome", ValueKind::String, "outcome column name (fit; default y)"},
        {"method", ValueKind::String, "prosgpv, prosgpv1, lasso, alasso, oracle, all, or a comma list"},
        {"null_bound", ValueKind::String, "sebar, sebar-loginfl, sebar-logdefl, const or zero"},
        {"t_quantile", ValueKind::Flag, "use t(df) instead of 1.96 for SGPV intervals"},
        {"max_candidates", ValueKind::Int, "candidate cap when the lasso set reaches n (0 = n/2)"},
        {"grid_length", ValueKind::Int, "lambda grid length (default 100)"},
        {"grid_ratio", ValueKind::Double, "lambda_min / lambda_max (default 1e-4 if n > p, else 1e-2)"},
        {"gamma", ValueKind::Double, "adaptive lasso weight exponent (default 1)"},
        {"n", ValueKind::IntList, "training sample size(s)"},
        {"p", ValueKind::IntList, "number of features"},
        {"s", ValueKind::IntList, "number of true signals"},
        {"rho", ValueKind::DoubleList, "AR(1) feature correlation(s) in [0, 1)"},
        {"snr", ValueKind::DoubleList, "signal-to-noise ratio(s)"},
        {"reps", ValueKind::Int, "replications per scenario"},
        {"seed", ValueKind::UInt, "master seed"},
        {"beta_seed", ValueKind::UInt, "pin the true coefficients across replications"},
        {"beta", ValueKind::DoubleList, "explicit true coefficient vector (overrides s)"},
        {"sigma2", ValueKind::Double, "explicit noise variance (overrides snr)"},
        {"test_fraction", ValueKind::Double, "held-out fraction (default 0.4)"},
        {"test_mode", ValueKind::String, "inflated (extra rows) or split (carve from n)"},
        {"name", ValueKind::String, "scenario label"},
        {"workers", ValueKind::Int, "worker threads (0 = all cores; default $SGPV_SELECT_WORKERS or 1)"},
        {"out", ValueKind::String, "output directory (default sgpv_out)"},
        {"timing", ValueKind::Flag, "record wall-clock runtimes (outputs stop being reproducible)"},
        {"splits", ValueKind::Int, "repeated train/test splits for fit (0 = fit once on all rows)"},
        {"train_frac", ValueKind::Double, "training fraction per split (default 0.7)"},
    };
    return table;
}

json setting_value(ValueKind kind, const std::string& text)
{
    switch (kind) {
    case ValueKind::String: return text;
    case ValueKind::Int: return parse_number<std::int64_t>(text, "integer");
    case ValueKind::UInt: return parse_number<std::uint64_t>(text, "unsigned integer");
    case ValueKind::Double: return parse_number<double>(text, "number");
    case ValueKind::IntList: {
        json out = json::array();
        for (const auto& part : split_commas(text)) {
            out.push_back(parse_number<std::int64_t>(part, "integer list"));
        }
        return out;
    }
    case ValueKind::DoubleList: {
        json out = json::array();
        for (const auto& part : split_commas(text)) {
            out.push_back(parse_number<double>(part, "number list"));
        }
        return out;
    }
    case ValueKind::Flag:
        if (text.empty() || text == "true" || text == "1") {
            return true;
        }
        if (text == "false" || text == "0") {
            return false;
        }
        bad("flag expects true or false, got '" + text + "'");
    }
    return nullptr;
}

json load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open config '" + path + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, "config '" + path + "': " + e.what());
    }
    if (!doc.is_object()) {
        throw Error(ErrorCode::Parse, "config '" + path + "' must hold a JSON object");
    }
    return doc;
}

RunConfig resolve_config(Command command, const json& file, const json& flags, const char* env_workers)
{
    // Merge in declaration order so the echoed config is stable.
    json merged = json::object();
    for (const json* layer : {&file, &flags}) {
        if (layer->is_null()) {
            continue;
        }
        if (!layer->is_object()) {
            bad("settings must be a JSON object");
        }
        for (const auto& [raw_key, value] : layer->items()) {
            const std::string key = normalize_key(raw_key);
            check_kind(find_setting(key), value);
            merged[key] = value;
        }
    }

    RunConfig cfg;
    cfg.command = command;
    for (const auto& info : settings()) {
        if (merged.contains(info.key)) {
            cfg.echo[std::string(info.key)] = merged[std::string(info.key)];
        }
    }
    auto has = [&](const char* key) { return merged.contains(key); };
    auto get = [&](const char* key) -> const json& { return merged.at(key); };

    if (has("data")) cfg.data = get("data").get<std::string>();
    if (has("outcome")) cfg.outcome = get("outcome").get<std::string>();
    if (has("method")) {
        cfg.method_text = get("method").get<std::string>();
        cfg.methods.clear();
        for (const auto& part : split_commas(cfg.method_text)) {
            for (Method m : parse_methods(part)) {
                if (std::find(cfg.methods.begin(), cfg.methods.end(), m) == cfg.methods.end()) {
                    cfg.methods.push_back(m);
                }
            }
        }
        if (cfg.methods.empty()) {
            bad("no method given");
        }
    }
    auto& pro = cfg.method_options.prosgpv;
    auto& al = cfg.method_options.adaptive;
    if (has("null_bound")) pro.null_bound = parse_null_bound(get("null_bound").get<std::string>());
    if (has("t_quantile")) pro.screen.t_quantile = get("t_quantile").get<bool>();
    if (has("max_candidates")) {
        pro.max_candidates = get("max_candidates").get<Index>();
        if (pro.max_candidates < 0) bad("max_candidates must be nonnegative");
    }
    if (has("grid_length")) {
        pro.grid.length = get("grid_length").get<Index>();
        if (pro.grid.length < 2) bad("grid_length must be at least 2");
    }
    if (has("grid_ratio")) {
        pro.grid.ratio = get("grid_ratio").get<double>();
        if (!(pro.grid.ratio > 0.0 && pro.grid.ratio < 1.0)) bad("grid_ratio must lie in (0, 1)");
    }
    al.grid = pro.grid;
    al.lasso = pro.lasso;
    if (has("gamma")) {
        al.gamma = get("gamma").get<double>();
        if (!(al.gamma > 0.0)) bad("gamma must be positive");
    }

    if (has("n")) cfg.n = as_list<Index>(get("n"));
    if (has("p")) cfg.p = as_list<Index>(get("p"));
    if (has("s")) cfg.s = as_list<Index>(get("s"));
    if (has("rho")) cfg.rho = as_list<double>(get("rho"));
    if (has("snr")) cfg.snr = as_list<double>(get("snr"));
    if (has("reps")) cfg.reps = get("reps").get<Index>();
    if (has("seed")) cfg.seed = get("seed").get<std::uint64_t>();
    if (has("beta_seed")) cfg.beta_seed = get("beta_seed").get<std::uint64_t>();
    if (has("beta")) cfg.beta = as_list<double>(get("beta"));
    if (has("sigma2")) cfg.sigma2 = get("sigma2").get<double>();
    if (has("test_fraction")) cfg.test_fraction = get("test_fraction").get<double>();
    if (has("test_mode")) {
        const auto mode = get("test_mode").get<std::string>();
        if (mode == "inflated") {
            cfg.test_mode = TestSetMode::Inflated;
        } else if (mode == "split") {
            cfg.test_mode = TestSetMode::Split;
        } else {
            bad("test_mode must be 'inflated' or 'split'");
        }
    }
    if (has("name")) cfg.name = get("name").get<std::string>();
    if (has("out")) cfg.out = get("out").get<std::string>();
    if (has("timing")) cfg.timing = get("timing").get<bool>();
    if (has("splits")) cfg.splits = get("splits").get<Index>();
    if (has("train_frac")) cfg.train_frac = get("train_frac").get<double>();

    std::int64_t workers = 1;
    if (has("workers")) {
        workers = get("workers").get<std::int64_t>();
    } else if (env_workers != nullptr && *env_workers != '\0') {
        workers = parse_number<std::int64_t>(env_workers, "SGPV_SELECT_WORKERS");
    }
    if (workers < 0) {
        bad("workers must be nonnegative");
    }
    cfg.workers = workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : static_cast<std::size_t>(workers);

    // Cross-setting consistency.
    const bool scenario_given = has("n") || has("p") || has("s") || has("rho") || has("snr") || has("beta")
        || has("sigma2") || has("reps") || has("beta_seed") || has("test_fraction") || has("test_mode");
    switch (command) {
    case Command::Fit:
        if (cfg.data.empty()) bad("fit requires --data");
        if (scenario_given) bad("scenario settings (n, p, s, rho, snr, reps, ...) do not apply to fit");
        if (cfg.splits < 0) bad("splits must be nonnegative");
        if (!(cfg.train_frac > 0.0 && cfg.train_frac < 1.0)) bad("train_frac must lie in (0, 1)");
        if (std::find(cfg.methods.begin(), cfg.methods.end(), Method::OracleOls) != cfg.methods.end()) {
            bad("the oracle method needs a known true support and is only available in simulations");
        }
        break;
    case Command::Simulate:
    case Command::Sweep:
        if (has("data") || has("outcome") || has("splits") || has("train_frac")) {
            bad("data, outcome, splits and train_frac only apply to fit");
        }
        if (cfg.beta) {
            if (cfg.p.empty()) {
                cfg.p = {static_cast<Index>(cfg.beta->size())};
            }
            if (has("s")) bad("give either beta or s, not both");
        }
        if (cfg.n.empty() || cfg.p.empty()) bad(std::string(to_string(command)) + " requires n and p");
        if (cfg.s.empty()) {
            if (!cfg.beta) bad(std::string(to_string(command)) + " requires s (or an explicit beta)");
            cfg.s = {0};
        }
        if (command == Command::Simulate
            && (cfg.n.size() > 1 || cfg.p.size() > 1 || cfg.s.size() > 1 || cfg.rho.size() > 1
                || cfg.snr.size() > 1)) {
            bad("simulate takes single values; use sweep for lists");
        }
        if (cfg.reps < 1) bad("reps must be at least 1");
        break;
    }
    return cfg;
}

std::vector<ScenarioSpec> scenario_grid(const RunConfig& config)
{
    std::vector<ScenarioSpec> cells;
    for (Index n : config.n) {
        for (Index p : config.p) {
            for (Index s : config.s) {
                for (double rho : config.rho) {
                    for (double snr : config.snr) {
                        ScenarioSpec spec;
                        spec.n = n;
                        spec.p = p;
                        spec.s = s;
                        spec.rho = rho;
                        spec.snr = snr;
                        spec.reps = config.reps;
                        spec.master_seed = config.seed;
                        spec.beta_seed = config.beta_seed;
                        spec.test_fraction = config.test_fraction;
                        spec.test_mode = config.test_mode;
                        if (config.beta) {
                            spec.beta = Eigen::Map<const Vector>(config.beta->data(),
                                                                 static_cast<Index>(config.beta->size()));
                        }
                        spec.sigma2 = config.sigma2;
                        if (!config.name.empty()) {
                            spec.name = cells.empty() && config.command == Command::Simulate
                                ? config.name
                                : config.name + "_" + spec.label();
                        }
                        cells.push_back(std::move(spec));
                    }
                }
            }
        }
    }
    return cells;
}

} // namespace sgpvsel::cli
