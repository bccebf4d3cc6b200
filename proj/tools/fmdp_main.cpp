#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fmdp/agents.hpp"
#include "fmdp/estimation.hpp"
#include "fmdp/env.hpp"
#include "fmdp/experiment.hpp"
#include "fmdp/knapsack.hpp"
#include "fmdp/spec.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRunInvariant = 3;
constexpr int kExitVerification = 4;

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
    std::vector<std::uint64_t> seeds;
    std::string token;
    std::istringstream in(csv);
    while (std::getline(in, token, ',')) {
        if (!token.empty()) seeds.push_back(std::stoull(token));
    }
    return seeds;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_run(const std::string& config_path, const std::string& seeds_csv,
            const std::string& out_override) {
    auto cfg = fmdp::load_experiment_config(config_path);
    if (!seeds_csv.empty()) cfg.seeds = parse_seed_list(seeds_csv);
    if (cfg.seeds.empty()) throw std::invalid_argument("no seeds given");
    const std::string out = !out_override.empty() ? out_override
                            : !cfg.out_dir.empty() ? cfg.out_dir
                                                   : std::string("results");
    const auto written = fmdp::run_experiment(cfg, out);
    for (const auto& path : written) std::cout << path << "\n";
    return kExitOk;
}

int cmd_gen(const std::string& config_path, const std::string& out_dir) {
    const auto spec = fmdp::spec_from_generator_json(read_file(config_path));
    if (out_dir.empty()) {
        std::cout << fmdp::spec_to_json(spec) << "\n";
    } else {
        fs::create_directories(out_dir);
        const auto path = (fs::path(out_dir) / "spec.json").string();
        fmdp::save_spec_file(spec, path);
        std::cout << path << "\n";
    }
    return kExitOk;
}

int print_suites(const std::vector<fmdp::SuiteResult>& suites, bool as_table) {
    bool all_ok = true;
    if (as_table) {
        std::cout << "suite                    passed  total  status\n";
        for (const auto& s : suites) {
            std::cout << s.name << std::string(s.name.size() < 24 ? 24 - s.name.size() : 1, ' ')
                      << s.passed << "       " << s.total << "     "
                      << (s.ok() ? "PASS" : "FAIL") << "\n";
            all_ok = all_ok && s.ok();
        }
    } else {
        for (const auto& s : suites) {
            std::cout << s.name << ": " << s.passed << "/" << s.total
                      << (s.ok() ? " ok" : " FAILED") << "\n";
            all_ok = all_ok && s.ok();
        }
    }
    return all_ok ? kExitOk : kExitVerification;
}

int cmd_verify(std::int64_t trials, std::uint64_t seed, bool as_table) {
    return print_suites(fmdp::run_verification_suites(trials, seed), as_table);
}

int cmd_rlwk(const std::string& config_path, const std::string& seeds_csv,
             const std::string& out_override) {
    auto cfg = fmdp::load_knapsack_config(config_path);
    if (!seeds_csv.empty()) cfg.seeds = parse_seed_list(seeds_csv);
    if (cfg.seeds.empty()) throw std::invalid_argument("no seeds given");
    const std::string out = !out_override.empty() ? out_override
                            : !cfg.out_dir.empty() ? cfg.out_dir
                                                   : std::string("results");
    const auto written = fmdp::run_knapsack_experiment(cfg, out);
    for (const auto& path : written) std::cout << path << "\n";
    return kExitOk;
}

int cmd_counts(const std::string& config_path, const std::string& out_dir) {
    const auto cfg = fmdp::load_experiment_config(config_path);
    if (cfg.algorithms.empty() || cfg.seeds.empty()) {
        throw std::invalid_argument("config needs at least one algorithm and one seed");
    }
    // replay the first (algorithm, seed) pair and dump its final counters
    fmdp::RunConfig rc;
    rc.episodes = cfg.episodes;
    rc.delta = cfg.delta;
    rc.seed = cfg.seeds.front();
    rc.initial_state = cfg.initial_state;

    const auto& spec = cfg.spec;
    fmdp::Estimators est(spec);
    const auto lf = fmdp::LogFactors::for_spec(spec, rc.episodes, rc.delta);
    const fmdp::CounterRng rng(rc.seed);
    const auto initial = rc.initial_state.empty()
                             ? fmdp::FactorVec(spec.dims.state_dims.size(), 0)
                             : rc.initial_state;
    const bool bernstein = cfg.algorithms.front() == fmdp::Algorithm::Bernstein;
    for (std::int64_t k = 0; k < rc.episodes; ++k) {
        const auto known = fmdp::known_cells(spec, est);
        const auto tables = bernstein ? fmdp::sweep_bernstein(spec, est, lf, known)
                                      : fmdp::sweep_hoeffding(spec, est, lf, known);
        const auto traj = fmdp::run_episode(spec, tables.policy, initial, rng,
                                            static_cast<std::uint64_t>(k));
        est.update_from_episode(traj);
    }
    if (out_dir.empty()) {
        est.dump_counts_csv(std::cout);
    } else {
        fs::create_directories(out_dir);
        const auto path = (fs::path(out_dir) / "counts.csv").string();
        std::ofstream out(path, std::ios::binary);
        est.dump_counts_csv(out);
        std::cout << path << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Factored-MDP optimistic RL toolkit"};
    app.require_subcommand(1);

    std::string config_path, seeds_csv, out_dir;
    std::int64_t trials = 1000;
    std::uint64_t verify_seed = 20240901;

    auto* run = app.add_subcommand("run", "Run a multi-seed regret experiment to CSV");
    run->add_option("--config", config_path, "experiment config JSON")->required();
    run->add_option("--seeds", seeds_csv, "comma-separated seed override");
    run->add_option("--out", out_dir, "output directory override");

    auto* gen = app.add_subcommand("gen", "Generate a benchmark spec JSON");
    gen->add_option("--config", config_path, "generator config JSON")->required();
    gen->add_option("--out", out_dir, "output directory (stdout when omitted)");

    auto* verify = app.add_subcommand("verify", "Run the numerical verification suites");
    verify->add_option("--trials", trials, "decomposition-lemma trial count");
    verify->add_option("--seed", verify_seed, "suite seed");

    auto* check = app.add_subcommand("check-variance",
                                     "Variance identity suites as a pass/fail table");
    check->add_option("--trials", trials, "decomposition-lemma trial count");
    check->add_option("--seed", verify_seed, "suite seed");

    auto* rlwk = app.add_subcommand("rlwk", "Run the budget-constrained learner to CSV");
    rlwk->add_option("--config", config_path, "instance config JSON")->required();
    rlwk->add_option("--seeds", seeds_csv, "comma-separated seed override");
    rlwk->add_option("--out", out_dir, "output directory override");

    auto* counts = app.add_subcommand("counts", "Dump estimator counters to CSV");
    counts->add_option("--config", config_path, "experiment config JSON")->required();
    counts->add_option("--out", out_dir, "output directory (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, seeds_csv, out_dir);
        if (gen->parsed()) return cmd_gen(config_path, out_dir);
        if (verify->parsed()) return cmd_verify(trials, verify_seed, /*as_table=*/false);
        if (check->parsed()) return cmd_verify(trials, verify_seed, /*as_table=*/true);
        if (rlwk->parsed()) return cmd_rlwk(config_path, seeds_csv, out_dir);
        if (counts->parsed()) return cmd_counts(config_path, out_dir);
    } catch (const fmdp::RunInvariantError& e) {
        std::cerr << "run invariant violated: " << e.what() << "\n";
        return kExitRunInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
