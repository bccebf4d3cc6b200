#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fmdp/estimation.hpp"
#include "fmdp/oracle.hpp"
#include "fmdp/planner.hpp"
#include "fmdp/spec.hpp"

namespace fmdp {

enum class Algorithm { Hoeffding, Bernstein, FlatHoeffding };

Algorithm algorithm_from_tag(const std::string& tag);  // "ch" | "bf" | "flat-ch"
std::string algorithm_tag(Algorithm algo);

/// One learning run's knobs. The episode budget enters the log factors, so it
/// must be fixed before the run starts. An empty initial_state means the
/// all-zeros factor vector.
struct RunConfig {
    std::int64_t episodes = 1;
    double delta = 0.1;
    std::uint64_t seed = 0;
    FactorVec initial_state;
    bool record_actions = false;
};

struct EpisodeRecord {
    std::int64_t episode = 0;  // 1-based
    std::uint64_t policy_hash = 0;
    double realized_return = 0.0;
    double regret = 0.0;      // V*_1(s_1) - V^{pi_k}_1(s_1), oracle-evaluated
    double cum_regret = 0.0;
    int optimistic = 0;       // 1 iff the sweep's V_upper at (1, s_1) >= V*_1(s_1)
};

struct RunRecord {
    std::vector<EpisodeRecord> episodes;
    std::uint64_t estimator_digest = 0;
    std::vector<std::vector<int>> action_log;  // flat actions per episode when recorded

    double final_cum_regret() const {
        return episodes.empty() ? 0.0 : episodes.back().cum_regret;
    }
    double cum_regret_at(std::int64_t episode) const;  // 1-based
};

/// Optimistic learner with Hoeffding bonuses over the factored scopes.
RunRecord run_fmdp_ch(const FmdpSpec& spec, const RunConfig& cfg);

/// Optimistic/pessimistic learner with Bernstein bonuses over the factored
/// scopes.
RunRecord run_fmdp_bf(const FmdpSpec& spec, const RunConfig& cfg);

/// Flat baseline: plans with Hoeffding bonuses over the flattened full-scope
/// MDP while acting in the original factored environment, flattening the
/// observations on the fly.
RunRecord run_flat_ucbvi_ch(const FmdpSpec& spec, const RunConfig& cfg);

RunRecord run_algorithm(const FmdpSpec& spec, Algorithm algo, const RunConfig& cfg);

}  // namespace fmdp
