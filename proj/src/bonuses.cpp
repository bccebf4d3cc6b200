#include "fmdp/bonuses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fmdp {

namespace {

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("delta must lie in (0,1), got " + std::to_string(delta));
    }
}

void check_visits(std::int64_t n) {
    if (n < 1) throw std::domain_error("bonus undefined for unvisited cell (N = 0)");
}

}  // namespace

double log_factor_reward(int m, double total_steps, FlatIndex scope_card, double delta) {
    check_delta(delta);
    if (m < 1 || total_steps < 1 || scope_card < 1) {
        throw std::invalid_argument("log factor arguments must be positive");
    }
    return std::log(18.0 * m * total_steps * static_cast<double>(scope_card) / delta);
}

double log_factor_transition(int n, double total_steps, FlatIndex num_states,
                             FlatIndex num_actions, double delta) {
    check_delta(delta);
    if (n < 1 || total_steps < 1 || num_states < 1 || num_actions < 1) {
        throw std::invalid_argument("log factor arguments must be positive");
    }
    return std::log(18.0 * n * total_steps * static_cast<double>(num_states) *
                    static_cast<double>(num_actions) / delta);
}

LogFactors LogFactors::for_spec(const FmdpSpec& spec, std::int64_t episodes, double delta) {
    LogFactors lf;
    lf.delta = delta;
    lf.total_steps = static_cast<double>(episodes) * spec.horizon;
    const auto all = spec.dims.joint_dims();
    const int m = spec.num_reward_factors();
    for (const auto& rf : spec.rewards) {
        lf.reward.push_back(
            log_factor_reward(m, lf.total_steps, rf.scope.cardinality_in(all), delta));
    }
    lf.transition = log_factor_transition(spec.num_transition_factors(), lf.total_steps,
                                          spec.dims.state_count(), spec.dims.action_count(), delta);
    return lf;
}

double reward_bonus_hoeffding(double log_factor, std::int64_t n_visits) {
    check_visits(n_visits);
    return std::sqrt(2.0 * log_factor / static_cast<double>(n_visits));
}

double phi_term(int next_dim, double log_factor, std::int64_t n_visits) {
    check_visits(n_visits);
    const double n = static_cast<double>(n_visits);
    return std::sqrt(4.0 * next_dim * log_factor / n) + 4.0 * next_dim * log_factor / (3.0 * n);
}

double transition_bonus_hoeffding(int horizon, double log_factor, std::int64_t n_visits_i,
                                  std::span<const double> phis, int i) {
    check_visits(n_visits_i);
    const double h = static_cast<double>(horizon);
    double cross = 0.0;
    for (size_t j = 0; j < phis.size(); ++j) {
        if (static_cast<int>(j) != i) cross += phis[j];
    }
    return std::sqrt(2.0 * h * h * log_factor / static_cast<double>(n_visits_i)) +
           h * phis[static_cast<size_t>(i)] * cross;
}

double reward_bonus_bernstein(double sigma2, double log_factor, std::int64_t n_visits) {
    check_visits(n_visits);
    const double n = static_cast<double>(n_visits);
    return std::sqrt(2.0 * sigma2 * log_factor / n) + 8.0 * log_factor / (3.0 * n);
}

double transition_bonus_bernstein(double sigma2_next, double gap2, int horizon, double log_factor,
                                  int i, std::span<const int> next_dims,
                                  std::span<const std::int64_t> n_visits) {
    if (next_dims.size() != n_visits.size()) {
        throw std::invalid_argument("need one visit count per transition factor");
    }
    for (std::int64_t n : n_visits) check_visits(n);

    const double h = static_cast<double>(horizon);
    const double n_i = static_cast<double>(n_visits[static_cast<size_t>(i)]);
    double bonus = std::sqrt(4.0 * sigma2_next * log_factor / n_i) +
                   std::sqrt(2.0 * gap2 * log_factor / n_i);

    double correction = 0.0;
    const double phi_i = phi_term(next_dims[static_cast<size_t>(i)], log_factor,
                                  n_visits[static_cast<size_t>(i)]);
    for (size_t j = 0; j < next_dims.size(); ++j) {
        const double n_j = static_cast<double>(n_visits[j]);
        const double base = 4.0 * next_dims[j] * log_factor / n_j;
        correction += std::pow(base, 0.25) + std::sqrt(base / 3.0);
        bonus += h * phi_i * phi_term(next_dims[j], log_factor, n_visits[j]);
    }
    bonus += std::sqrt(16.0 * h * h * log_factor / n_i) * correction;
    return bonus;
}

}  // namespace fmdp
