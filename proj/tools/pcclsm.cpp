#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "pcclsm/error.hpp"
#include "pcclsm/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Correlation-based feature selection and least-squares distortion for intrusion-detection data"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> output_dir;
    std::optional<std::size_t> sample_rows;
    std::optional<std::uint64_t> seed;

    const std::pair<pcclsm::Command, const char*> commands[] = {
        {pcclsm::Command::select, "correlation matrix, feature ranking and selection report"},
        {pcclsm::Command::distort, "least-squares distortion of each distorted configuration"},
        {pcclsm::Command::evaluate, "classifier, privacy and utility reports for every configuration"},
        {pcclsm::Command::pipeline, "select, distort and evaluate in one run"},
    };
    std::optional<pcclsm::Command> chosen;
    for (const auto& [command, help] : commands) {
        auto* sub = app.add_subcommand(std::string(pcclsm::to_string(command)), help);
        sub->add_option("--config", config_path, "pipeline config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--output", output_dir, "output directory, overrides output_dir");
        sub->add_option("--sample", sample_rows, "stratified row sample size, overrides sample.rows")
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "one seed for split, sample and classifiers");
        sub->callback([&chosen, c = command] { chosen = c; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        auto config = pcclsm::load_config(config_path);
        if (output_dir) config.output_dir = *output_dir;
        if (sample_rows) config.sample.rows = *sample_rows;
        if (seed) config.override_seed(*seed);
        config.validate();
        const auto result = pcclsm::run_command(*chosen, config);
        for (const auto& f : result.written) std::cout << (config.output_dir / f).string() << '\n';
        std::cout << result.manifest.string() << '\n';
        return 0;
    } catch (const pcclsm::Error& e) {
        std::cerr << "pcclsm: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "pcclsm: " << e.what() << '\n';
        return 2;
    }
}
