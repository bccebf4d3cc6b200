#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fmdp/agents.hpp"
#include "fmdp/env.hpp"
#include "fmdp/experiment.hpp"
#include "fmdp/knapsack.hpp"
#include "fmdp/oracle.hpp"
#include "fmdp/planner.hpp"
#include "fmdp/spec.hpp"

namespace py = pybind11;

namespace {

fmdp::RunConfig make_run_config(std::int64_t episodes, double delta, std::uint64_t seed,
                                const fmdp::FactorVec& initial_state) {
    fmdp::RunConfig cfg;
    cfg.episodes = episodes;
    cfg.delta = delta;
    cfg.seed = seed;
    cfg.initial_state = initial_state;
    return cfg;
}

py::dict record_to_dict(const std::vector<fmdp::EpisodeRecord>& episodes,
                        std::uint64_t digest) {
    std::vector<double> regret, cum_regret, realized;
    std::vector<int> optimistic;
    for (const auto& ep : episodes) {
        regret.push_back(ep.regret);
        cum_regret.push_back(ep.cum_regret);
        realized.push_back(ep.realized_return);
        optimistic.push_back(ep.optimistic);
    }
    py::dict out;
    out["regret"] = regret;
    out["cum_regret"] = cum_regret;
    out["realized_return"] = realized;
    out["optimistic"] = optimistic;
    out["estimator_digest"] = digest;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Factored-MDP optimistic RL toolkit";

    py::class_<fmdp::FmdpSpec>(m, "FmdpSpec")
        .def_property_readonly("horizon", [](const fmdp::FmdpSpec& s) { return s.horizon; })
        .def_property_readonly("state_dims",
                               [](const fmdp::FmdpSpec& s) { return s.dims.state_dims; })
        .def_property_readonly("action_dims",
                               [](const fmdp::FmdpSpec& s) { return s.dims.action_dims; })
        .def_property_readonly("num_states",
                               [](const fmdp::FmdpSpec& s) { return s.dims.state_count(); })
        .def_property_readonly("num_actions",
                               [](const fmdp::FmdpSpec& s) { return s.dims.action_count(); })
        .def("to_json", [](const fmdp::FmdpSpec& s) { return fmdp::spec_to_json(s); })
        .def("flatten", &fmdp::flatten_to_flat_mdp);

    m.def("spec_from_json", &fmdp::spec_from_json, py::arg("text"));
    m.def("load_spec", &fmdp::load_spec_file, py::arg("path"));
    m.def("save_spec", &fmdp::save_spec_file, py::arg("spec"), py::arg("path"));
    m.def("validate_spec", [](const fmdp::FmdpSpec& spec) {
        return fmdp::validate_spec(spec).violations;
    });

    m.def("encode_index", [](const std::vector<int>& factors, const std::vector<int>& dims) {
        return fmdp::encode_index(factors, dims);
    });
    m.def("decode_index", [](fmdp::FlatIndex idx, const std::vector<int>& dims) {
        return fmdp::decode_index(idx, dims);
    });
    m.def("project_scope", [](const std::vector<int>& factors, const std::vector<int>& scope) {
        return fmdp::project_scope(factors, fmdp::Scope(scope));
    });

    m.def("gen_production_line", &fmdp::gen_production_line, py::arg("d"),
          py::arg("per_machine_states"), py::arg("actions"), py::arg("seed"));
    m.def("gen_tree_bandit_instance", &fmdp::gen_tree_bandit_instance, py::arg("num_factors"),
          py::arg("states_per_factor"), py::arg("actions_per_factor"), py::arg("gap"),
          py::arg("horizon"));
    m.def("gen_parallel_hard_mdps", &fmdp::gen_parallel_hard_mdps, py::arg("num_factors"),
          py::arg("states"), py::arg("actions"), py::arg("epsilon"), py::arg("horizon"),
          py::arg("seed"));
    m.def("gen_random_fmdp",
          [](const std::vector<int>& state_dims, const std::vector<int>& action_dims,
             const std::vector<std::vector<int>>& reward_scopes,
             const std::vector<std::vector<int>>& transition_scopes, int horizon,
             std::uint64_t seed) {
              fmdp::FactorDims dims{state_dims, action_dims};
              std::vector<fmdp::Scope> rs, ts;
              for (const auto& s : reward_scopes) rs.emplace_back(s);
              for (const auto& s : transition_scopes) ts.emplace_back(s);
              return fmdp::gen_random_fmdp(dims, rs, ts, horizon, seed);
          },
          py::arg("state_dims"), py::arg("action_dims"), py::arg("reward_scopes"),
          py::arg("transition_scopes"), py::arg("horizon"), py::arg("seed"));

    m.def("optimal_value",
          [](const fmdp::FmdpSpec& spec, const std::vector<int>& initial_state) {
              const auto ev = fmdp::exact_optimal_values(spec);
              const auto s0 = fmdp::encode_index(initial_state, spec.dims.state_dims);
              return ev.v_star[0][static_cast<size_t>(s0)];
          },
          py::arg("spec"), py::arg("initial_state"));

    m.def("factored_backup",
          [](const std::vector<std::vector<double>>& rows, const std::vector<double>& value) {
              fmdp::RowViews views(rows.begin(), rows.end());
              return fmdp::factored_backup(views, value);
          });
    m.def("nested_variance",
          [](const std::vector<std::vector<double>>& rows, const std::vector<double>& value) {
              fmdp::RowViews views(rows.begin(), rows.end());
              return fmdp::nested_variance(views, value);
          });

    m.def("decomposition_check",
          [](const std::vector<std::vector<double>>& rows_hat,
             const std::vector<std::vector<double>>& rows_true, const std::vector<double>& value) {
              const auto c = fmdp::decomposition_inequality_check(rows_hat, rows_true, value);
              py::dict out;
              out["l1_lhs"] = c.l1_lhs;
              out["l1_rhs"] = c.l1_rhs;
              out["value_lhs"] = c.value_lhs;
              out["value_rhs"] = c.value_rhs;
              out["ok"] = c.ok;
              return out;
          });

    m.def("run_ch",
          [](const fmdp::FmdpSpec& spec, std::int64_t episodes, double delta, std::uint64_t seed,
             const fmdp::FactorVec& initial_state) {
              const auto r = fmdp::run_fmdp_ch(spec, make_run_config(episodes, delta, seed,
                                                                     initial_state));
              return record_to_dict(r.episodes, r.estimator_digest);
          },
          py::arg("spec"), py::arg("episodes"), py::arg("delta") = 0.1, py::arg("seed") = 0,
          py::arg("initial_state") = fmdp::FactorVec{});
    m.def("run_bf",
          [](const fmdp::FmdpSpec& spec, std::int64_t episodes, double delta, std::uint64_t seed,
             const fmdp::FactorVec& initial_state) {
              const auto r = fmdp::run_fmdp_bf(spec, make_run_config(episodes, delta, seed,
                                                                     initial_state));
              return record_to_dict(r.episodes, r.estimator_digest);
          },
          py::arg("spec"), py::arg("episodes"), py::arg("delta") = 0.1, py::arg("seed") = 0,
          py::arg("initial_state") = fmdp::FactorVec{});
    m.def("run_flat_ch",
          [](const fmdp::FmdpSpec& spec, std::int64_t episodes, double delta, std::uint64_t seed,
             const fmdp::FactorVec& initial_state) {
              const auto r = fmdp::run_flat_ucbvi_ch(spec, make_run_config(episodes, delta, seed,
                                                                           initial_state));
              return record_to_dict(r.episodes, r.estimator_digest);
          },
          py::arg("spec"), py::arg("episodes"), py::arg("delta") = 0.1, py::arg("seed") = 0,
          py::arg("initial_state") = fmdp::FactorVec{});

    m.def("verify_suites", [](std::int64_t trials, std::uint64_t seed) {
        py::list out;
        for (const auto& s : fmdp::run_verification_suites(trials, seed)) {
            py::dict row;
            row["name"] = s.name;
            row["passed"] = s.passed;
            row["total"] = s.total;
            row["max_error"] = s.max_error;
            out.append(row);
        }
        return out;
    }, py::arg("trials") = 200, py::arg("seed") = 1);

    py::class_<fmdp::BudgetedMdp>(m, "BudgetedMdp")
        .def_property_readonly("num_states",
                               [](const fmdp::BudgetedMdp& b) { return b.num_states; })
        .def_property_readonly("num_actions",
                               [](const fmdp::BudgetedMdp& b) { return b.num_actions; })
        .def_property_readonly("horizon", [](const fmdp::BudgetedMdp& b) { return b.horizon; })
        .def("to_json", [](const fmdp::BudgetedMdp& b) { return fmdp::budgeted_to_json(b); });

    m.def("fig1_instance1", &fmdp::fig1_instance1);
    m.def("fig1_instance2", &fmdp::fig1_instance2);
    m.def("load_budgeted", &fmdp::load_budgeted_file, py::arg("path"));

    m.def("budgeted_optimal_value",
          [](const fmdp::BudgetedMdp& mdp, int state, const std::vector<double>& remaining) {
              const auto values = fmdp::budgeted_optimal_values(mdp);
              std::vector<int> units(remaining.size());
              for (size_t i = 0; i < remaining.size(); ++i) {
                  units[i] = static_cast<int>(
                      std::llround(remaining[i] * mdp.grid.unit_denominator));
              }
              return values.v_star[0][static_cast<size_t>(mdp.augmented_index(state, units))];
          },
          py::arg("mdp"), py::arg("state"), py::arg("remaining"));

    m.def("run_knapsack_bf",
          [](const fmdp::BudgetedMdp& mdp, int initial_state, std::int64_t episodes, double delta,
             std::uint64_t seed) {
              const auto r = fmdp::run_knapsack_bernstein(
                  mdp, initial_state, make_run_config(episodes, delta, seed, {}));
              auto out = record_to_dict(r.episodes, r.estimator_digest);
              out["constraint_violations"] = r.constraint_violations;
              return out;
          },
          py::arg("mdp"), py::arg("initial_state"), py::arg("episodes"), py::arg("delta") = 0.1,
          py::arg("seed") = 0);
}
