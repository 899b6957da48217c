#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hemostab/cli.hpp"

namespace {

using hemostab::cli::json;

struct Flags {
    std::map<std::string, std::optional<double>> numbers;
    std::map<std::string, std::optional<long long>> integers;
    std::map<std::string, std::optional<std::string>> strings;
    bool generic = false;
};

const std::map<std::string, std::string> kNumberFlags{
    {"--beta", "beta"},       {"--gamma", "gamma"},       {"--n", "n"},
    {"--tau", "tau"},         {"--eta", "eta"},           {"--x0", "x0"},
    {"--t-end", "t_end"},     {"--h", "h"},               {"--from", "from"},
    {"--to", "to"},           {"--a", "a"},               {"--b", "b"},
    {"--beta-lo", "beta_lo"}, {"--beta-hi", "beta_hi"},   {"--gamma-lo", "gamma_lo"},
    {"--gamma-hi", "gamma_hi"}, {"--n-lo", "n_lo"},       {"--n-hi", "n_hi"},
    {"--eta-from", "eta_from"}, {"--eta-to", "eta_to"},   {"--transient", "transient"},
};

const std::map<std::string, std::string> kIntegerFlags{{"--steps", "steps"}, {"--stride", "stride"}};

const std::map<std::string, std::string> kStringFlags{{"--model", "model"}, {"--sweep", "sweep"}};

void add_analysis_flags(CLI::App* cmd, Flags& f)
{
    for (const auto& [flag, key] : kNumberFlags) cmd->add_option(flag, f.numbers[key]);
    for (const auto& [flag, key] : kIntegerFlags) cmd->add_option(flag, f.integers[key]);
    for (const auto& [flag, key] : kStringFlags) cmd->add_option(flag, f.strings[key]);
    cmd->add_flag("--generic", f.generic, "Use the (a, b) linearisation instead of a model");
}

json merge(json cfg, const Flags& f)
{
    for (const auto& [key, v] : f.numbers) {
        if (v) cfg[key] = *v;
    }
    for (const auto& [key, v] : f.integers) {
        if (v) cfg[key] = *v;
    }
    for (const auto& [key, v] : f.strings) {
        if (v) cfg[key] = *v;
    }
    if (f.generic) cfg["generic"] = true;
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    namespace cli = hemostab::cli;
    CLI::App app{"Stability, convergence and Hopf analysis of Mackey-Glass and Lasota delay equations"};
    app.require_subcommand(0, 1);

    std::string preset;
    std::string from_file;
    std::string output;
    std::optional<std::string> format;
    auto add_io = [&](CLI::App* a) {
        a->add_option("--preset", preset, "Figure preset (fig1, fig2a, ..., fig10b)");
        a->add_option("--from-file", from_file, "Replay the config echoed in a previous output");
        a->add_option("--output,-o", output, "Write to this file instead of stdout");
        a->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };
    app.set_help_flag("--help", "Print this help message and exit");
    add_io(&app);
    bool list_presets = false;
    app.add_flag("--list-presets", list_presets, "Print preset names and exit");

    Flags flags;
    add_analysis_flags(&app, flags);
    for (const auto& name : cli::command_names()) {
        auto* sub = app.add_subcommand(name);
        sub->set_help_flag("--help", "Print this help message and exit");
        add_io(sub);
        add_analysis_flags(sub, flags);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (list_presets) {
        for (const auto& [name, cfg] : cli::presets()) {
            std::cout << name << ' ' << cfg["command"].get<std::string>() << '\n';
        }
        return 0;
    }

    try {
        json cfg = json::object();
        if (!from_file.empty()) cfg = cli::config_from_file(from_file);
        if (!preset.empty()) cfg.update(cli::preset(preset));
        const auto subs = app.get_subcommands();
        if (!subs.empty()) {
            const std::string name = subs.front()->get_name();
            if (cfg.contains("command") && cfg["command"] != name) {
                throw cli::UsageError("preset/replay command '" + cfg["command"].get<std::string>() +
                                      "' differs from '" + name + "'");
            }
            cfg["command"] = name;
        }
        if (!cfg.contains("command")) throw cli::UsageError("no command given; see --help");
        cfg = merge(std::move(cfg), flags);
        if (format) cfg["format"] = *format;

        const json resolved = cli::resolve_config(cfg);
        const auto out = cli::execute(resolved);
        if (output.empty()) {
            cli::write(resolved, out, std::cout);
        } else {
            std::ofstream file(output);
            if (!file) throw cli::UsageError("cannot write '" + output + "'");
            cli::write(resolved, out, file);
        }
        return cli::has_failed_check(out) ? 3 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::exit_code(e);
    }
}
