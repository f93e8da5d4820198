#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sfcinv/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Inventory-cycle stock-flow model runner"};
    app.require_subcommand(1, 1);

    std::string scenario_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    bool strict_inventory = false;
    bool print_scenario = false;
    bool allow_inadmissible = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", scenario_path, "scenario TOML file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
        sub->add_option("--override", overrides, "dotted key=value, applied before validation")->take_all();
        sub->add_flag("--strict-inventory", strict_inventory, "halt integration when the inventory ratio turns negative");
        sub->add_flag("--print-scenario", print_scenario, "echo the resolved scenario as TOML");
        sub->add_flag("--allow-inadmissible", allow_inadmissible, "accept behavioural forms that fail validation");
    };
    const std::vector<std::pair<std::string, std::string>> commands{
        {"simulate", "integrate from [initial] and write simulate.csv"},
        {"equilibria", "locate and certify equilibria, write equilibria.json"},
        {"stability", "Jacobian, eigenvalues and Routh-Hurwitz per equilibrium, write stability.json"},
        {"hopf", "scan gamma for the eigenvalue crossing at (1,1), write hopf.csv and hopf.json"},
        {"portrait", "integrate from [analysis.portrait] starts, write portrait.csv"},
        {"basin", "classify a grid of short-run starts, write basin.csv"},
        {"sfc-audit", "rebuild levels along a trajectory and audit the accounting identities"}};
    for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help));

    CLI11_PARSE(app, argc, argv);
    const std::string cmd = app.get_subcommands().front()->get_name();

    if (allow_inadmissible) overrides.push_back("model.allow_inadmissible=true");
    try {
        const auto scenario = sfcinv::load_scenario(scenario_path, overrides);
        if (print_scenario) std::cout << sfcinv::serialize_scenario(scenario);
        sfcinv::RunOptions opt;
        opt.out_dir = out_dir.empty() ? scenario.out_dir : out_dir;
        opt.strict_inventory = strict_inventory;
        const auto res = sfcinv::run_subcommand(cmd, scenario, opt);
        for (const auto& f : res.files) std::cout << "wrote " << f.string() << "\n";
        for (const auto& line : res.summary) std::cout << line << "\n";
    } catch (const sfcinv::ParseError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << cmd << " failed: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
