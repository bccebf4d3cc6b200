#include "fmdp/agents.hpp"

#include <stdexcept>

#include "fmdp/env.hpp"
#include "fmdp/rng.hpp"

namespace fmdp {

Algorithm algorithm_from_tag(const std::string& tag) {
    if (tag == "ch") return Algorithm::Hoeffding;
    if (tag == "bf") return Algorithm::Bernstein;
    if (tag == "flat-ch") return Algorithm::FlatHoeffding;
    throw std::invalid_argument("unknown algorithm tag: " + tag +
                                " (expected ch, bf or flat-ch)");
}

std::string algorithm_tag(Algorithm algo) {
    switch (algo) {
        case Algorithm::Hoeffding: return "ch";
        case Algorithm::Bernstein: return "bf";
        case Algorithm::FlatHoeffding: return "flat-ch";
    }
    return "?";
}

double RunRecord::cum_regret_at(std::int64_t episode) const {
    if (episode < 1 || episode > static_cast<std::int64_t>(episodes.size())) {
        throw std::out_of_range("no episode " + std::to_string(episode) + " in run record");
    }
    return episodes[static_cast<size_t>(episode - 1)].cum_regret;
}

namespace {

FactorVec resolve_initial_state(const FmdpSpec& spec, const RunConfig& cfg) {
    if (cfg.initial_state.empty()) {
        return FactorVec(spec.dims.state_dims.size(), 0);
    }
    if (cfg.initial_state.size() != spec.dims.state_dims.size()) {
        throw std::invalid_argument("initial state has wrong factor count");
    }
    return cfg.initial_state;
}

std::vector<int> flat_actions_of(const Trajectory& traj, const FactorDims& dims) {
    std::vector<int> out;
    out.reserve(traj.steps.size());
    for (const auto& step : traj.steps) {
        out.push_back(static_cast<int>(encode_index(step.action, dims.action_dims)));
    }
    return out;
}

RunRecord run_factored(const FmdpSpec& spec, const RunConfig& cfg, bool bernstein) {
    require_valid(spec);
    if (cfg.episodes < 1) throw std::invalid_argument("episode budget must be >= 1");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw std::invalid_argument("delta outside (0,1)");

    const auto initial_state = resolve_initial_state(spec, cfg);
    const FlatIndex s0 = encode_index(initial_state, spec.dims.state_dims);
    const auto exact = exact_optimal_values(spec);
    const double v_star_start = exact.v_star[0][static_cast<size_t>(s0)];
    const auto lf = LogFactors::for_spec(spec, cfg.episodes, cfg.delta);
    const CounterRng rng(cfg.seed);

    Estimators est(spec);
    RunRecord record;
    record.episodes.reserve(static_cast<size_t>(cfg.episodes));
    double cum = 0.0;
    for (std::int64_t k = 0; k < cfg.episodes; ++k) {
        const auto known = known_cells(spec, est);
        const auto tables = bernstein ? sweep_bernstein(spec, est, lf, known)
                                      : sweep_hoeffding(spec, est, lf, known);

        const auto traj = run_episode(spec, tables.policy, initial_state, rng,
                                      static_cast<std::uint64_t>(k));
        const auto v_pi = evaluate_policy(spec, tables.policy);
        const double regret = v_star_start - v_pi[0][static_cast<size_t>(s0)];
        cum += regret;

        EpisodeRecord ep;
        ep.episode = k + 1;
        ep.policy_hash = tables.policy.hash();
        ep.realized_return = traj.total_reward();
        ep.regret = regret;
        ep.cum_regret = cum;
        ep.optimistic = tables.v_upper[0][static_cast<size_t>(s0)] >= v_star_start - 1e-9 ? 1 : 0;
        record.episodes.push_back(ep);
        if (cfg.record_actions) record.action_log.push_back(flat_actions_of(traj, spec.dims));

        est.update_from_episode(traj);
    }
    record.estimator_digest = est.digest();
    return record;
}

}  // namespace

RunRecord run_fmdp_ch(const FmdpSpec& spec, const RunConfig& cfg) {
    return run_factored(spec, cfg, /*bernstein=*/false);
}

RunRecord run_fmdp_bf(const FmdpSpec& spec, const RunConfig& cfg) {
    return run_factored(spec, cfg, /*bernstein=*/true);
}

RunRecord run_flat_ucbvi_ch(const FmdpSpec& spec, const RunConfig& cfg) {
    require_valid(spec);
    if (cfg.episodes < 1) throw std::invalid_argument("episode budget must be >= 1");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw std::invalid_argument("delta outside (0,1)");

    const FmdpSpec flat = flatten_to_flat_mdp(spec);
    const auto initial_state = resolve_initial_state(spec, cfg);
    const FlatIndex s0 = encode_index(initial_state, spec.dims.state_dims);
    const auto exact = exact_optimal_values(flat);
    const double v_star_start = exact.v_star[0][static_cast<size_t>(s0)];
    const auto lf = LogFactors::for_spec(flat, cfg.episodes, cfg.delta);
    const CounterRng rng(cfg.seed);

    Estimators est(flat);
    RunRecord record;
    record.episodes.reserve(static_cast<size_t>(cfg.episodes));
    double cum = 0.0;
    for (std::int64_t k = 0; k < cfg.episodes; ++k) {
        const auto known = known_cells(flat, est);
        const auto tables = sweep_hoeffding(flat, est, lf, known);

        // act in the original factored environment; the flat state index and
        // the encoded factored state coincide
        const auto traj = run_episode(spec, tables.policy, initial_state, rng,
                                      static_cast<std::uint64_t>(k));

        Trajectory flat_traj;
        flat_traj.initial_state = {static_cast<int>(s0)};
        for (const auto& step : traj.steps) {
            TrajectoryStep fs;
            fs.state = {static_cast<int>(encode_index(step.state, spec.dims.state_dims))};
            fs.action = {static_cast<int>(encode_index(step.action, spec.dims.action_dims))};
            fs.reward_samples = {step.step_reward()};
            fs.next_state = {static_cast<int>(encode_index(step.next_state, spec.dims.state_dims))};
            flat_traj.steps.push_back(std::move(fs));
        }

        const auto v_pi = evaluate_policy(flat, tables.policy);
        const double regret = v_star_start - v_pi[0][static_cast<size_t>(s0)];
        cum += regret;

        EpisodeRecord ep;
        ep.episode = k + 1;
        ep.policy_hash = tables.policy.hash();
        ep.realized_return = traj.total_reward();
        ep.regret = regret;
        ep.cum_regret = cum;
        ep.optimistic = tables.v_upper[0][static_cast<size_t>(s0)] >= v_star_start - 1e-9 ? 1 : 0;
        record.episodes.push_back(ep);
        if (cfg.record_actions) record.action_log.push_back(flat_actions_of(traj, spec.dims));

        est.update_from_episode(flat_traj);
    }
    record.estimator_digest = est.digest();
    return record;
}

RunRecord run_algorithm(const FmdpSpec& spec, Algorithm algo, const RunConfig& cfg) {
    switch (algo) {
        case Algorithm::Hoeffding: return run_fmdp_ch(spec, cfg);
        case Algorithm::Bernstein: return run_fmdp_bf(spec, cfg);
        case Algorithm::FlatHoeffding: return run_flat_ucbvi_ch(spec, cfg);
    }
    throw std::logic_error("unreachable");
}

}  // namespace fmdp
