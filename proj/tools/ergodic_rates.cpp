// ergodic-rates: run rate experiments from a JSON config.
//
//   ergodic-rates run --config exp.json [--seed N] [--out DIR]
//   ergodic-rates list-checks
//
// Exit status: 0 when every check holds, 1 when some check fails, 2 on a
// configuration error (nothing is written in that case).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ergodic/experiment.hpp"

namespace {

int run(const std::string& config_path, const std::optional<std::uint64_t>& seed,
        const std::optional<std::string>& out) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read config " << config_path << "\n";
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();

    ergodic::ConfigOverrides overrides;
    overrides.seed = seed;
    if (out) overrides.out_dir = *out;

    ergodic::ExperimentConfig cfg;
    ergodic::ExperimentResult result;
    try {
        cfg = ergodic::parse_config(buf.str(), overrides);
        result = ergodic::run_experiment(cfg);
    } catch (const ergodic::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    std::vector<std::filesystem::path> written;
    try {
        written = ergodic::write_artifacts(cfg, result);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    std::cout << cfg.model_label << "\n";
    for (const ergodic::VerificationReport& r : result.reports) {
        std::cout << "  " << (r.holds ? "holds " : "FAILS ") << r.claim;
        if (r.advisory) std::cout << "  (" << *r.advisory << ")";
        std::cout << "\n";
    }
    for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
    if (!result.all_hold) {
        std::cerr << "some checks failed; see " << (cfg.out_dir / "report.json").string() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convergence-rate experiments for ergodic averages"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    run_cmd->add_option("--config", config, "Experiment JSON")->required();
    run_cmd->add_option("--seed", seed, "Override the config seed");
    run_cmd->add_option("--out", out, "Override the output directory");

    auto* list_cmd = app.add_subcommand("list-checks", "List verification identifiers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (list_cmd->parsed()) {
        for (const ergodic::CheckInfo& c : ergodic::check_registry()) {
            std::cout << c.id << "\t" << c.summary << "\n";
        }
        return 0;
    }
    return run(config, seed, out);
}
