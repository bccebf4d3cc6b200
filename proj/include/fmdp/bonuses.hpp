#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fmdp/spec.hpp"

namespace fmdp {

/// Planning-horizon log factors. They depend on the total step budget
/// T = K * H, so the episode budget must be fixed up front.
struct LogFactors {
    std::vector<double> reward;  // one per reward factor
    double transition = 0.0;
    double delta = 0.0;
    double total_steps = 0.0;

    static LogFactors for_spec(const FmdpSpec& spec, std::int64_t episodes, double delta);
};

/// ln(18 m T |X[Z_i^R]| / delta).
double log_factor_reward(int m, double total_steps, FlatIndex scope_card, double delta);

/// ln(18 n T S A / delta).
double log_factor_transition(int n, double total_steps, FlatIndex num_states,
                             FlatIndex num_actions, double delta);

/// sqrt(2 L / N). Requires N >= 1.
double reward_bonus_hoeffding(double log_factor, std::int64_t n_visits);

/// sqrt(4 |S_j| L / N) + 4 |S_j| L / (3 N). Requires N >= 1.
double phi_term(int next_dim, double log_factor, std::int64_t n_visits);

/// sqrt(2 H^2 L / N_i) + H * phi_i * sum_{j != i} phi_j. Requires N_i >= 1.
double transition_bonus_hoeffding(int horizon, double log_factor, std::int64_t n_visits_i,
                                  std::span<const double> phis, int i);

/// sqrt(2 sigma2 L / N) + 8 L / (3 N). Requires N >= 1.
double reward_bonus_bernstein(double sigma2, double log_factor, std::int64_t n_visits);

/// Variance-adaptive transition bonus for one factor:
///   sqrt(4 sigma2_next L / N_i) + sqrt(2 gap2 L / N_i)
///   + sqrt(16 H^2 L / N_i) * sum_j [ (4 |S_j| L / N_j)^{1/4} + sqrt(4 |S_j| L / (3 N_j)) ]
///   + sum_j H * phi_i * phi_j
/// with both sums over all factors j (including j = i). Requires every N >= 1.
double transition_bonus_bernstein(double sigma2_next, double gap2, int horizon, double log_factor,
                                  int i, std::span<const int> next_dims,
                                  std::span<const std::int64_t> n_visits);

}  // namespace fmdp
