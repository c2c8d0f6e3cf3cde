#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/csv.hpp"
#include "cli/run_config.hpp"
#include "sgpvsel/error.hpp"

using namespace sgpvsel;
using namespace sgpvsel::cli;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

CsvTable parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_csv(in);
}

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an sgpvsel::Error");
    return ErrorCode::InvalidArgument;
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("sgpvsel_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& text)
{
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

std::string signal_csv(std::uint64_t seed, Index n)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::ostringstream os;
    os.precision(10);
    os << "y,x1,x2\n";
    for (Index i = 0; i < n; ++i) {
        const double x1 = z(rng);
        const double x2 = z(rng);
        os << 2.0 * x1 + z(rng) << ',' << x1 << ',' << x2 << '\n';
    }
    return os.str();
}

// Plain json for comparisons against literals.
json report_of(const LoadedData& loaded, const RunConfig& cfg, std::ostream* splits = nullptr)
{
    return json::parse(fit_report(loaded, cfg, splits).dump());
}

RunConfig config_for(Command command, const json& flags)
{
    return resolve_config(command, nullptr, flags, nullptr);
}

} // namespace

TEST_CASE("parse_csv: RFC 4180 quoting and line endings")
{
    const CsvTable t = parse("\xEF\xBB\xBF" "a,\"b, c\",\"d\"\"q\"\r\n1,\"2\",3\r\n\"4\n5\",,6\n\n");
    REQUIRE(t.header == std::vector<std::string>{"a", "b, c", "d\"q"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == std::vector<std::string>{"1", "2", "3"});
    CHECK(t.rows[1] == std::vector<std::string>{"4\n5", "", "6"});

    const CsvTable no_newline = parse("x,y\n1,2");
    CHECK(no_newline.rows.size() == 1);
}

TEST_CASE("parse_csv: malformed input")
{
    CHECK(code_of([] { parse(""); }) == ErrorCode::Parse);
    CHECK(code_of([] { parse("a,b\n1,2,3\n"); }) == ErrorCode::Parse);
    CHECK(code_of([] { parse("a,b\n\"1,2\n"); }) == ErrorCode::Parse);
    CHECK(code_of([] { parse("a,a\n1,2\n"); }) == ErrorCode::Parse);
    CHECK(code_of([] { parse("a,b\n1\"x\",2\n"); }) == ErrorCode::Parse);
    CHECK(code_of([] { read_csv_file("/nonexistent/file.csv"); }) == ErrorCode::Io);
}

TEST_CASE("table_to_dataset: outcome, types and missing values")
{
    const CsvTable t = parse("x1,y,x2\n1,2,3\nNA,5,6\n7,8,9\n10,,12\n13,14,15\n");
    const LoadedData d = table_to_dataset(t, "y");
    CHECK(d.rows_read == 5);
    CHECK(d.rows_dropped == 2);
    REQUIRE(d.data.n() == 3);
    CHECK(d.data.column_names() == std::vector<std::string>{"x1", "x2"});
    CHECK(d.data.y()(1) == 8.0);
    CHECK(d.data.X()(2, 1) == 15.0);

    CHECK(code_of([&] { table_to_dataset(t, "z"); }) == ErrorCode::OutcomeMissing);
    const CsvTable words = parse("y,x1,group\n1,2,a\n3,4,b\n");
    try {
        table_to_dataset(words, "y");
        FAIL("expected NonNumericColumn");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonNumericColumn);
        CHECK(std::string(e.what()).find("group") != std::string::npos);
    }
    CHECK(code_of([] { table_to_dataset(parse("y,x1\n1,2\n3,4\n"), "y"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("resolve_config: layering and validation")
{
    const json file = {{"data", "a.csv"}, {"method", "lasso"}, {"workers", 3}, {"null-bound", "zero"}};
    const json flags = {{"method", "prosgpv,alasso"}};
    const RunConfig cfg = resolve_config(Command::Fit, file, flags, "5");
    CHECK(cfg.data == "a.csv");
    CHECK(cfg.methods == std::vector<Method>{Method::ProSgpv, Method::AdaptiveLasso});
    CHECK(cfg.workers == 3);
    CHECK(cfg.method_options.prosgpv.null_bound == NullBound::Zero);
    CHECK(resolve_config(Command::Fit, json{{"data", "a"}}, nullptr, "5").workers == 5);
    CHECK(resolve_config(Command::Fit, json{{"data", "a"}}, nullptr, nullptr).workers == 1);
    CHECK(config_for(Command::Fit, {{"data", "a"}, {"method", "all"}}).methods.size() == 4);

    auto rejects = [](Command c, const json& flags) {
        CHECK(code_of([&] { config_for(c, flags); }) == ErrorCode::InvalidArgument);
    };
    rejects(Command::Fit, json::object());
    rejects(Command::Fit, {{"data", "a"}, {"bogus", 1}});
    rejects(Command::Fit, {{"data", "a"}, {"n", 100}});
    rejects(Command::Fit, {{"data", "a"}, {"method", "ridge"}});
    rejects(Command::Fit, {{"data", "a"}, {"null_bound", "huge"}});
    rejects(Command::Fit, {{"data", "a"}, {"train_frac", 1.5}});
    rejects(Command::Fit, {{"data", "a"}, {"reps", "ten"}});
    rejects(Command::Simulate, {{"n", 100}});
    rejects(Command::Simulate, {{"n", {100, 200}}, {"p", 10}, {"s", 2}});
    rejects(Command::Simulate, {{"n", 100}, {"p", 10}, {"s", 2}, {"data", "a"}});
    rejects(Command::Simulate, {{"n", 100}, {"beta", {1, 0}}, {"s", 1}});

    CHECK(setting_value(ValueKind::IntList, "100, 200") == json({100, 200}));
    CHECK(setting_value(ValueKind::DoubleList, "0.5") == json({0.5}));
    CHECK_THROWS_AS(setting_value(ValueKind::Int, "1.5"), Error);
}

TEST_CASE("scenario_grid: cross product order and explicit beta")
{
    const RunConfig cfg = config_for(Command::Sweep, {{"n", {100, 200}}, {"p", 10}, {"s", 2}, {"rho", {0, 0.7}}});
    const auto cells = scenario_grid(cfg);
    REQUIRE(cells.size() == 4);
    CHECK(cells[0].n == 100);
    CHECK(cells[1].rho == 0.7);
    CHECK(cells[2].n == 200);

    const RunConfig explicit_beta = config_for(Command::Simulate, {{"n", 50}, {"beta", {0, 0, 0.5}}, {"sigma2", 1}});
    const auto one = scenario_grid(explicit_beta);
    REQUIRE(one.size() == 1);
    CHECK(one[0].p == 3);
    CHECK(one[0].beta.has_value());
    CHECK_NOTHROW(one[0].validate());
}

TEST_CASE("fit_report: strong signal is selected with SGPV zero")
{
    const LoadedData loaded = table_to_dataset(parse(signal_csv(5, 500)), "y");
    const RunConfig cfg = config_for(Command::Fit, {{"data", "mem"}, {"method", "all"}});
    const auto report = report_of(loaded, cfg);
    REQUIRE(report["methods"].size() == 4);
    const auto& pro = report["methods"][0];
    CHECK(pro["method"] == "prosgpv");
    CHECK(pro["selected"] == json({"x1"}));
    CHECK(pro["coefficients"][1]["variable"] == "x1");
    CHECK_THAT(pro["coefficients"][1]["estimate"].get<double>(), Catch::Matchers::WithinAbs(2.0, 0.2));
    CHECK(pro["coefficients"][1]["se"].get<double>() > 0.0);
    bool found = false;
    for (const auto& s : pro["diagnostics"]["sgpv"]) {
        if (s["variable"] == "x1") {
            CHECK(s["sgpv"].get<double>() == 0.0);
            found = true;
        }
    }
    CHECK(found);
    CHECK(pro["diagnostics"]["lambda_gic"].get<double>() > 0.0);
    CHECK(pro["diagnostics"]["se_bar"] == pro["diagnostics"]["null_bound"]);
    for (const auto& m : report["methods"]) {
        CHECK_FALSE(m.contains("error"));
    }
}

TEST_CASE("fit_report: method failures are reported, not thrown")
{
    // p >= n makes the one-stage fit underdetermined.
    std::ostringstream os;
    os << "y,a,b,c,d\n1,2,3,4,5\n2,1,4,3,7\n3,5,1,2,2\n4,4,2,9,1\n";
    const LoadedData loaded = table_to_dataset(parse(os.str()), "y");
    const auto report = report_of(loaded, config_for(Command::Fit, {{"data", "mem"}, {"method", "prosgpv1"}}));
    CHECK(report["methods"][0]["error"] == "Underdetermined");
}

TEST_CASE("fit_report: repeated splits are deterministic across workers")
{
    const LoadedData loaded = table_to_dataset(parse(signal_csv(6, 120)), "y");
    std::ostringstream a, b;
    const auto ra = report_of(loaded,
                               config_for(Command::Fit, {{"data", "m"}, {"method", "prosgpv,lasso"}, {"splits", 25},
                                                         {"train_frac", 0.7}, {"workers", 1}}),
                               &a);
    const auto rb = report_of(loaded,
                               config_for(Command::Fit, {{"data", "m"}, {"method", "prosgpv,lasso"}, {"splits", 25},
                                                         {"train_frac", 0.7}, {"workers", 3}}),
                               &b);
    CHECK(a.str() == b.str());
    CHECK(ra["splits"] == rb["splits"]);
    CHECK(line_count(a.str()) == 1 + 25 * 2);
    CHECK(a.str().find("0,prosgpv,84,36,,") != std::string::npos);
    const auto& pro = ra["splits"][0];
    CHECK(pro["failures"] == 0);
    CHECK(pro["test_rmse"]["count"] == 25);
    CHECK(pro["selection_frequency"]["x1"].get<double>() == 1.0);
}

TEST_CASE("cmd_simulate: one replication gives one row per method")
{
    const fs::path dir = scratch_dir("simulate");
    const RunConfig cfg = config_for(Command::Simulate, {{"n", 60}, {"p", 8}, {"s", 2}, {"reps", 1}, {"seed", 3},
                                                         {"method", "all"}, {"out", dir.string()}});
    std::ostringstream out, err;
    CHECK(cmd_simulate(cfg, out, err) == 0);
    CHECK(line_count(slurp(dir / "results.csv")) == 1 + 4);
    CHECK(line_count(slurp(dir / "summary.csv")) == 1 + 4);
    const json summary = json::parse(slurp(dir / "summary.json"));
    CHECK(summary["metadata"]["command"] == "simulate");
    CHECK(summary["metadata"].contains("timestamp"));
    CHECK(summary["failures"] == 0);
}

TEST_CASE("cmd_simulate: sweep counts and partial failures")
{
    const fs::path dir = scratch_dir("sweep");
    const RunConfig cfg = config_for(Command::Sweep, {{"n", {100, 200}}, {"p", 10}, {"s", 2}, {"rho", {0, 0.7}},
                                                      {"reps", 2}, {"method", "prosgpv,alasso"}, {"out", dir.string()}});
    std::ostringstream out, err;
    CHECK(cmd_simulate(cfg, out, err) == 0);
    CHECK(line_count(slurp(dir / "summary.csv")) == 1 + 4 * 2);
    CHECK(line_count(slurp(dir / "results.csv")) == 1 + 4 * 2 * 2);

    // s > p in one cell: logged, counted, and the run still succeeds.
    const fs::path dir2 = scratch_dir("sweep_fail");
    const RunConfig bad = config_for(Command::Sweep, {{"n", 80}, {"p", {3, 10}}, {"s", 4}, {"reps", 2},
                                                      {"method", "prosgpv"}, {"out", dir2.string()}});
    std::ostringstream out2, err2;
    CHECK(cmd_simulate(bad, out2, err2) == 0);
    const json summary = json::parse(slurp(dir2 / "summary.json"));
    CHECK(summary["failures"] == 1);
    CHECK(summary["failed_cells"].size() == 1);
    CHECK(summary["scenarios"].size() == 1);
    CHECK(err2.str().find("error: scenario") != std::string::npos);
}

TEST_CASE("shipped configuration files resolve")
{
    const fs::path configs = fs::path(SGPVSEL_SOURCE_DIR) / "configs";
    const RunConfig fig2 = resolve_config(Command::Simulate, load_config_file((configs / "figure2.json").string()),
                                          nullptr, nullptr);
    const auto cells = scenario_grid(fig2);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].n == 400);
    CHECK(cells[0].reps == 1000);
    CHECK(fig2.methods == std::vector<Method>{Method::ProSgpv, Method::Lasso});

    const RunConfig desk = resolve_config(Command::Sweep, load_config_file((configs / "desk_sweep.json").string()),
                                          nullptr, nullptr);
    CHECK(scenario_grid(desk).size() == 18);
    for (const char* full : {"full_low_dim.json", "full_high_dim.json"}) {
        CHECK_NOTHROW(resolve_config(Command::Sweep, load_config_file((configs / full).string()), nullptr, nullptr));
    }
}
