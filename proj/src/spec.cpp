#include "fmdp/spec.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fmdp {

namespace {
constexpr double kRowSumTol = 1e-12;
}

double FmdpSpec::mean_reward(std::span<const int> joint) const {
    const auto all = dims.joint_dims();
    double sum = 0.0;
    for (const auto& rf : rewards) {
        const auto cell = project_scope(joint, rf.scope);
        const auto cell_dims = rf.scope.dims_in(all);
        sum += rf.table[encode_index(cell, cell_dims)].mean();
    }
    return sum / static_cast<double>(rewards.size());
}

const std::vector<double>& FmdpSpec::transition_row(int j, std::span<const int> joint) const {
    const auto all = dims.joint_dims();
    const auto& tf = transitions[j];
    const auto cell = project_scope(joint, tf.scope);
    const auto cell_dims = tf.scope.dims_in(all);
    return tf.rows[encode_index(cell, cell_dims)];
}

std::vector<const std::vector<double>*> FmdpSpec::transition_rows(
    std::span<const int> joint) const {
    std::vector<const std::vector<double>*> out;
    out.reserve(transitions.size());
    for (int j = 0; j < num_transition_factors(); ++j) {
        out.push_back(&transition_row(j, joint));
    }
    return out;
}

SpecValidation validate_spec(const FmdpSpec& spec) {
    SpecValidation v;
    auto fail = [&v](const std::string& msg) { v.violations.push_back(msg); };

    for (size_t i = 0; i < spec.dims.state_dims.size(); ++i) {
        if (spec.dims.state_dims[i] < 1)
            fail("state factor " + std::to_string(i) + " has dimension < 1");
    }
    for (size_t i = 0; i < spec.dims.action_dims.size(); ++i) {
        if (spec.dims.action_dims[i] < 1)
            fail("action factor " + std::to_string(i) + " has dimension < 1");
    }
    if (spec.dims.state_dims.empty()) fail("spec has no state factors");
    if (spec.dims.action_dims.empty()) fail("spec has no action factors");
    if (spec.horizon < 1) fail("horizon must be >= 1");
    if (spec.rewards.empty()) fail("spec has no reward factors");
    if (spec.num_transition_factors() != spec.dims.num_state_factors()) {
        fail("spec has " + std::to_string(spec.num_transition_factors()) +
             " transition factors for " + std::to_string(spec.dims.num_state_factors()) +
             " state factors");
    }
    if (!v.ok()) return v;  // shape errors make the checks below unsafe

    const auto all = spec.dims.joint_dims();
    const int d = spec.dims.num_factors();

    for (size_t i = 0; i < spec.rewards.size(); ++i) {
        const auto& rf = spec.rewards[i];
        for (int z : rf.scope.indices) {
            if (z >= d) {
                fail("reward scope " + std::to_string(i) + " index " + std::to_string(z) +
                     " out of range");
                return v;
            }
        }
        const auto card = rf.scope.cardinality_in(all);
        if (static_cast<FlatIndex>(rf.table.size()) != card) {
            fail("reward table " + std::to_string(i) + " has " + std::to_string(rf.table.size()) +
                 " cells, scope cardinality is " + std::to_string(card));
            continue;
        }
        for (size_t c = 0; c < rf.table.size(); ++c) {
            const double mu = rf.table[c].mean();
            if (!(mu >= 0.0 && mu <= 1.0)) {
                fail("reward " + std::to_string(i) + " cell " + std::to_string(c) + " mean " +
                     std::to_string(mu) + " out of [0,1]");
            }
        }
    }

    for (size_t j = 0; j < spec.transitions.size(); ++j) {
        const auto& tf = spec.transitions[j];
        for (int z : tf.scope.indices) {
            if (z >= d) {
                fail("transition scope " + std::to_string(j) + " index " + std::to_string(z) +
                     " out of range");
                return v;
            }
        }
        const auto card = tf.scope.cardinality_in(all);
        if (static_cast<FlatIndex>(tf.rows.size()) != card) {
            fail("transition table " + std::to_string(j) + " has " + std::to_string(tf.rows.size()) +
                 " rows, scope cardinality is " + std::to_string(card));
            continue;
        }
        const size_t sj = static_cast<size_t>(spec.dims.state_dims[j]);
        for (size_t c = 0; c < tf.rows.size(); ++c) {
            const auto& row = tf.rows[c];
            if (row.size() != sj) {
                fail("transition " + std::to_string(j) + " row " + std::to_string(c) + " has " +
                     std::to_string(row.size()) + " entries, factor size is " + std::to_string(sj));
                continue;
            }
            double sum = 0.0;
            bool nonneg = true;
            for (double p : row) {
                if (p < 0.0) nonneg = false;
                sum += p;
            }
            if (!nonneg)
                fail("transition " + std::to_string(j) + " row " + std::to_string(c) +
                     " has a negative entry");
            if (std::abs(sum - 1.0) > kRowSumTol) {
                std::ostringstream os;
                os << "transition " << j << " row " << c << " sum " << sum << " != 1";
                fail(os.str());
            }
        }
    }
    return v;
}

void require_valid(const FmdpSpec& spec) {
    auto v = validate_spec(spec);
    if (v.ok()) return;
    std::string msg = "invalid spec:";
    for (const auto& s : v.violations) msg += "\n  " + s;
    throw std::invalid_argument(msg);
}

FmdpSpec flatten_to_flat_mdp(const FmdpSpec& spec) {
    require_valid(spec);
    const FlatIndex S = spec.dims.state_count();
    const FlatIndex A = spec.dims.action_count();
    const auto sdims = spec.dims.state_dims;

    FmdpSpec flat;
    flat.dims.state_dims = {static_cast<int>(S)};
    flat.dims.action_dims = {static_cast<int>(A)};
    flat.horizon = spec.horizon;

    RewardFactor reward;
    reward.scope = Scope({0, 1});
    reward.table.reserve(static_cast<size_t>(S * A));
    TransitionFactor transition;
    transition.scope = Scope({0, 1});
    transition.rows.reserve(static_cast<size_t>(S * A));

    const auto joint = spec.dims.joint_dims();
    for (FlatIndex s = 0; s < S; ++s) {
        const auto sv = decode_index(s, sdims);
        for (FlatIndex a = 0; a < A; ++a) {
            auto av = decode_index(a, spec.dims.action_dims);
            FactorVec x = sv;
            x.insert(x.end(), av.begin(), av.end());

            reward.table.push_back(RewardDist::bernoulli(spec.mean_reward(x)));

            const auto rows = spec.transition_rows(x);
            std::vector<double> flat_row(static_cast<size_t>(S));
            for (FlatIndex t = 0; t < S; ++t) {
                const auto tv = decode_index(t, sdims);
                double p = 1.0;
                for (size_t j = 0; j < rows.size(); ++j) p *= (*rows[j])[tv[j]];
                flat_row[static_cast<size_t>(t)] = p;
            }
            transition.rows.push_back(std::move(flat_row));
        }
    }
    flat.rewards.push_back(std::move(reward));
    flat.transitions.push_back(std::move(transition));
    return flat;
}

namespace {

using nlohmann::json;

json dist_to_json(const RewardDist& d) {
    json out;
    out["type"] = d.kind == RewardDist::Kind::Bernoulli ? "bernoulli" : "deterministic";
    out["value"] = d.value;
    return out;
}

RewardDist dist_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    const double value = j.at("value").get<double>();
    if (type == "bernoulli") return RewardDist::bernoulli(value);
    if (type == "deterministic") return RewardDist::deterministic(value);
    throw std::invalid_argument("unknown reward distribution type: " + type);
}

}  // namespace

std::string spec_to_json(const FmdpSpec& spec, int indent) {
    json j;
    j["state_dims"] = spec.dims.state_dims;
    j["action_dims"] = spec.dims.action_dims;
    j["horizon"] = spec.horizon;
    j["rewards"] = json::array();
    for (const auto& rf : spec.rewards) {
        json table = json::array();
        for (const auto& d : rf.table) table.push_back(dist_to_json(d));
        j["rewards"].push_back({{"scope", rf.scope.indices}, {"table", std::move(table)}});
    }
    j["transitions"] = json::array();
    for (const auto& tf : spec.transitions) {
        j["transitions"].push_back({{"scope", tf.scope.indices}, {"rows", tf.rows}});
    }
    return j.dump(indent);
}

FmdpSpec spec_from_json(const std::string& text) {
    json j = json::parse(text);
    FmdpSpec spec;
    spec.dims.state_dims = j.at("state_dims").get<std::vector<int>>();
    spec.dims.action_dims = j.at("action_dims").get<std::vector<int>>();
    spec.horizon = j.at("horizon").get<int>();
    for (const auto& r : j.at("rewards")) {
        RewardFactor rf;
        rf.scope = Scope(r.at("scope").get<std::vector<int>>());
        for (const auto& d : r.at("table")) rf.table.push_back(dist_from_json(d));
        spec.rewards.push_back(std::move(rf));
    }
    for (const auto& t : j.at("transitions")) {
        TransitionFactor tf;
        tf.scope = Scope(t.at("scope").get<std::vector<int>>());
        tf.rows = t.at("rows").get<std::vector<std::vector<double>>>();
        spec.transitions.push_back(std::move(tf));
    }
    require_valid(spec);
    return spec;
}

FmdpSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spec file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return spec_from_json(ss.str());
}

void save_spec_file(const FmdpSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write spec file: " + path);
    out << spec_to_json(spec) << "\n";
}

}  // namespace fmdp
