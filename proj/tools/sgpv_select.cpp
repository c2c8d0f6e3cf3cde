#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#include "sgpvsel/error.hpp"

using namespace sgpvsel;
using namespace sgpvsel::cli;

namespace {

struct SubcommandFlags
{
    CLI::App* app = nullptr;
    Command command = Command::Fit;
    std::string config_path;
    std::map<std::string, std::string> text;
    std::map<std::string, bool> flags;
    std::map<std::string, CLI::Option*> options;
};

void add_settings(SubcommandFlags& sub)
{
    sub.app->add_option("--config", sub.config_path, "JSON file with any of these settings; flags override it")
        ->check(CLI::ExistingFile);
    for (const auto& info : settings()) {
        std::string key(info.key);
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        if (info.kind == ValueKind::Flag) {
            sub.options[key] = sub.app->add_flag(flag, sub.flags[key], std::string(info.help));
        } else {
            sub.options[key] = sub.app->add_option(flag, sub.text[key], std::string(info.help));
        }
    }
}

nlohmann::json given_flags(const SubcommandFlags& sub)
{
    nlohmann::json out = nlohmann::json::object();
    for (const auto& info : settings()) {
        const std::string key(info.key);
        if (sub.options.at(key)->count() == 0) {
            continue;
        }
        out[key] = info.kind == ValueKind::Flag ? nlohmann::json(sub.flags.at(key))
                                                : setting_value(info.kind, sub.text.at(key));
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-stage variable selection with second-generation p-values"};
    app.set_version_flag("--version", SGPVSEL_VERSION);
    app.require_subcommand(1);

    SubcommandFlags fit{app.add_subcommand("fit", "select variables on a CSV data set"), Command::Fit};
    SubcommandFlags simulate{app.add_subcommand("simulate", "run one simulation scenario"), Command::Simulate};
    SubcommandFlags sweep{app.add_subcommand("sweep", "run the cross product of scenario lists"), Command::Sweep};
    for (auto* sub : {&fit, &simulate, &sweep}) {
        add_settings(*sub);
    }

    CLI11_PARSE(app, argc, argv);

    const SubcommandFlags* chosen = nullptr;
    for (const auto* sub : {&fit, &simulate, &sweep}) {
        if (sub->app->parsed()) {
            chosen = sub;
        }
    }
    try {
        const nlohmann::json file = chosen->config_path.empty() ? nlohmann::json(nullptr)
                                                                : load_config_file(chosen->config_path);
        const RunConfig config = resolve_config(chosen->command, file, given_flags(*chosen),
                                                std::getenv("SGPV_SELECT_WORKERS"));
        return run_command(config, std::cout, std::cerr);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
