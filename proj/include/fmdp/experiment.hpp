#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmdp/agents.hpp"
#include "fmdp/knapsack.hpp"
#include "fmdp/spec.hpp"

namespace fmdp {

/// A mid-run contract was broken (negative oracle regret, budget violation).
/// The CLI maps this to exit code 3.
struct RunInvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Resolved experiment description: the spec source (file or generator) has
/// already been materialized.
struct ExperimentConfig {
    FmdpSpec spec;
    std::vector<Algorithm> algorithms;
    std::int64_t episodes = 1;
    double delta = 0.1;
    std::vector<std::uint64_t> seeds;
    FactorVec initial_state;  // empty = all zeros
    std::string out_dir;      // default output directory; CLI --out overrides
};

ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

/// Builds a spec from {"generator": name, "params": {...}} JSON. Known
/// generators: production-line, tree-bandit, parallel-hard, random.
FmdpSpec spec_from_generator_json(const std::string& text);

/// Runs every (algorithm, seed) pair through a worker pool and writes one run
/// CSV per pair (columns episode,k_regret,cum_regret,optimism_flag) plus
/// summary.csv with per-algorithm mean/stddev of cum_regret at the K/4, K/2
/// and K checkpoints. Returns the paths written. Output is byte-identical
/// across reruns and worker counts.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

struct KnapsackExperimentConfig {
    BudgetedMdp instance;
    std::int64_t episodes = 1;
    double delta = 0.1;
    std::vector<std::uint64_t> seeds;
    int initial_state = 0;
    std::string out_dir;
};

KnapsackExperimentConfig knapsack_config_from_json(const std::string& text,
                                                   const std::string& base_dir = "");
KnapsackExperimentConfig load_knapsack_config(const std::string& path);

std::vector<std::string> run_knapsack_experiment(const KnapsackExperimentConfig& cfg,
                                                 const std::string& out_dir);

/// One verification suite's tally.
struct SuiteResult {
    std::string name;
    int passed = 0;
    int total = 0;
    double max_error = 0.0;

    bool ok() const { return passed == total; }
};

/// The three numerical verification suites: the return-variance Bellman
/// recursion against brute-force enumeration, the occupancy-weighted total
/// variance bound with its telescoped identity, and the product-distribution
/// estimation-error decomposition inequalities. lemma_trials controls the
/// third suite's trial count; the first two scale from it.
std::vector<SuiteResult> run_verification_suites(std::int64_t lemma_trials, std::uint64_t seed);

/// Worker pool width: FACTORED_RL_THREADS when set, hardware concurrency
/// otherwise, always at least 1.
int worker_pool_size();

/// Shortest round-trip decimal formatting, locale-independent.
std::string format_double(double value);

}  // namespace fmdp
