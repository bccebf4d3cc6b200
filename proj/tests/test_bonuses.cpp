#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fmdp/bonuses.hpp"

using namespace fmdp;

TEST_CASE("reward log factor") {
    CHECK(log_factor_reward(2, 100, 6, 0.1) == doctest::Approx(12.283033686666302).epsilon(1e-12));
    CHECK(log_factor_reward(1, 1, 1, 1.0 - 1e-12) ==
          doctest::Approx(2.8903717578961647).epsilon(1e-9));
    CHECK(log_factor_reward(2, 200, 6, 0.1) > log_factor_reward(2, 100, 6, 0.1));
    CHECK_THROWS_AS(log_factor_reward(2, 100, 6, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(log_factor_reward(2, 100, 6, 1.0), std::invalid_argument);
}

TEST_CASE("transition log factor") {
    CHECK(log_factor_transition(2, 100, 4, 2, 0.1) ==
          doctest::Approx(12.570715759118083).epsilon(1e-12));
    CHECK(log_factor_transition(1, 1, 1, 1, 1.0 - 1e-12) ==
          doctest::Approx(2.8903717578961647).epsilon(1e-9));
    CHECK(log_factor_transition(2, 100, 8, 2, 0.1) > log_factor_transition(2, 100, 4, 2, 0.1));
}

TEST_CASE("Hoeffding reward bonus") {
    CHECK(reward_bonus_hoeffding(2.0, 8) == doctest::Approx(0.7071067811865475).epsilon(1e-12));
    CHECK(reward_bonus_hoeffding(2.0, 1) == doctest::Approx(2.0));
    double prev = reward_bonus_hoeffding(2.0, 1);
    for (std::int64_t n = 2; n <= 1 << 20; n *= 2) {
        const double b = reward_bonus_hoeffding(2.0, n);
        CHECK(b < prev);
        prev = b;
    }
    CHECK(prev < 1e-2);
    CHECK_THROWS_AS(reward_bonus_hoeffding(2.0, 0), std::domain_error);
}

TEST_CASE("phi term") {
    CHECK(phi_term(2, 2.0, 16) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(phi_term(1, 0.75, 3) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(phi_term(2, 2.0, 1 << 30) < 1e-3);
    CHECK_THROWS_AS(phi_term(2, 2.0, 0), std::domain_error);
}

TEST_CASE("Hoeffding transition bonus") {
    const std::vector<double> one_phi{1.0};
    CHECK(transition_bonus_hoeffding(2, 2.0, 16, one_phi, 0) == doctest::Approx(1.0));

    const std::vector<double> two_phis{1.0, 0.5};
    CHECK(transition_bonus_hoeffding(2, 2.0, 16, two_phis, 0) == doctest::Approx(2.0));

    CHECK(transition_bonus_hoeffding(0, 2.0, 16, two_phis, 0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(transition_bonus_hoeffding(2, 2.0, 0, one_phi, 0), std::domain_error);
}

TEST_CASE("Bernstein reward bonus") {
    CHECK(reward_bonus_bernstein(0.25, 2.0, 8) ==
          doctest::Approx(1.0202200572599404).epsilon(1e-12));
    CHECK(reward_bonus_bernstein(0.0, 2.0, 8) == doctest::Approx(8.0 * 2.0 / 24.0));
    // the variance part never exceeds the Hoeffding bonus for sigma2 <= 1
    for (std::int64_t n : {1, 2, 5, 17, 100}) {
        for (double s2 : {0.0, 0.1, 0.25}) {
            CHECK(reward_bonus_bernstein(s2, 2.0, n) <=
                  reward_bonus_hoeffding(2.0, n) + 8.0 * 2.0 / (3.0 * n) + 1e-12);
        }
    }
    CHECK_THROWS_AS(reward_bonus_bernstein(0.1, 2.0, 0), std::domain_error);
}

TEST_CASE("Bernstein transition bonus matches the worked value") {
    const std::vector<int> dims{2};
    const std::vector<std::int64_t> visits{16};
    const double b = transition_bonus_bernstein(1.0, 0.0, 2, 2.0, 0, dims, visits);
    CHECK(b == doctest::Approx(8.724082623343745).epsilon(1e-9));
}

TEST_CASE("Bernstein transition bonus vanishes asymptotically") {
    const std::vector<int> dims{2, 3};
    const std::vector<std::int64_t> huge{std::int64_t{1} << 40, std::int64_t{1} << 40};
    CHECK(transition_bonus_bernstein(0.0, 0.0, 3, 2.0, 0, dims, huge) < 1e-4);
}

TEST_CASE("Bernstein transition bonus is non-increasing in each visit count") {
    const std::vector<int> dims{2, 3};
    for (int which = 0; which < 2; ++which) {
        double prev = 1e300;
        for (std::int64_t n = 1; n <= 1 << 16; n *= 4) {
            std::vector<std::int64_t> visits{7, 9};
            visits[static_cast<size_t>(which)] = n;
            const double b = transition_bonus_bernstein(0.7, 0.3, 3, 1.5, which, dims, visits);
            CHECK(b <= prev + 1e-12);
            CHECK(b >= 0.0);
            CHECK(std::isfinite(b));
            prev = b;
        }
    }
    const std::vector<std::int64_t> with_zero{4, 0};
    CHECK_THROWS_AS(transition_bonus_bernstein(0.7, 0.3, 3, 1.5, 0, dims, with_zero),
                    std::domain_error);
}

TEST_CASE("flat reduction recovers the classic two-term bonus") {
    // With one reward factor and one transition factor the Hoeffding pair is
    // sqrt(2L/N) + sqrt(2H^2L/N): the phi cross term is an empty sum.
    const double L = 3.7;
    const int H = 4;
    for (std::int64_t n : {1, 3, 10, 111}) {
        const std::vector<double> phis{phi_term(5, L, n)};
        const double pair = reward_bonus_hoeffding(L, n) +
                            transition_bonus_hoeffding(H, L, n, phis, 0);
        const double flat = std::sqrt(2.0 * L / n) + std::sqrt(2.0 * H * H * L / n);
        CHECK(pair == doctest::Approx(flat).epsilon(1e-12));
    }
}
