// rsl: run Ricci flow scenarios, refinement studies and print the catalog.
#include <CLI11.hpp>
#include <iostream>

#include "rsl/scenario.hpp"

namespace {

int dispatch(const std::string& command, const std::string& config_path, int levels_override) {
    using namespace rsl;
    ScenarioConfig config = ScenarioConfig::parse_file(config_path);
    RunResult rr;
    if (command == "run") {
        rr = run_scenario(config);
    } else {
        const int levels = levels_override > 0 ? levels_override : config.refine_levels;
        rr = run_refinement_study(config, levels);
    }
    for (const auto& v : rr.verdicts)
        std::cout << v.name << ": "
                  << (v.status == VerdictStatus::Pass
                          ? "PASS"
                          : (v.status == VerdictStatus::Fail ? "FAIL" : "SKIPPED"))
                  << "\n";
    if (!rr.error.empty()) std::cerr << "error: " << rr.error << "\n";
    for (const auto& p : rr.csv_paths) std::cout << "wrote " << p << "\n";
    if (!rr.report_path.empty()) std::cout << "wrote " << rr.report_path << "\n";
    return rr.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ricci flow spectral laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    int levels = 0;

    auto* run = app.add_subcommand("run", "run a scenario config end to end");
    run->add_option("config", config_path, "scenario config file")->required();

    auto* refine = app.add_subcommand("refine", "convergence-order study over grid refinements");
    refine->add_option("config", config_path, "scenario config file")->required();
    refine->add_option("--levels", levels, "number of refinement levels (2-4)");

    auto* catalog = app.add_subcommand("catalog", "list model families, phi expressions, checks");
    (void)catalog;

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("catalog")) {
            std::cout << rsl::list_catalog();
            return 0;
        }
        return dispatch(app.got_subcommand("run") ? "run" : "refine", config_path, levels);
    } catch (const rsl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
