// jchsim: command-line front end for the experiment runner and the invariant self-check.

#include "jch/runner.hpp"
#include "jch/selfcheck.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Polariton branch control experiments for Jaynes-Cummings(-Hubbard) systems"};
    app.require_subcommand(1);

    jch::runner::RunOptions options;
    std::string output_dir = ".";
    app.add_option("--output-dir", output_dir, "Directory for result files")->capture_default_str();
    app.add_option("--format", options.format, "Override the output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", options.threads, "Worker threads for sweeps")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_flag("--strict-ramp", options.strict_ramp, "Keep hopping on during ramp pulses");

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "Config file")->required();

    bool corrupt = false;
    auto* check = app.add_subcommand("selfcheck", "Run the invariant suites and print a JSON report");
    check->add_flag("--corrupt-coefficients", corrupt, "Inject a fault into the ladder coefficients (negative-path test)");

    auto* list = app.add_subcommand("list-experiments", "List experiment names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : jch::runner::exit_config;
    }
    options.output_dir = output_dir;

    if (*run) return jch::runner::run(config_path, options, std::cerr);
    if (*check) {
        const auto results = jch::selfcheck::run({corrupt});
        std::cout << jch::selfcheck::to_json(results).dump(2) << '\n';
        return jch::selfcheck::all_passed(results) ? 0 : 1;
    }
    if (*list) {
        for (const auto& e : jch::runner::experiments()) std::cout << e.name << "\t" << e.description << '\n';
    }
    return 0;
}
