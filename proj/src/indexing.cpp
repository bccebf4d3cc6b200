#include "fmdp/indexing.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace fmdp {

std::vector<int> FactorDims::joint_dims() const {
    std::vector<int> dims = state_dims;
    dims.insert(dims.end(), action_dims.begin(), action_dims.end());
    return dims;
}

FlatIndex FactorDims::state_count() const { return table_size(state_dims); }

FlatIndex FactorDims::action_count() const { return table_size(action_dims); }

FlatIndex FactorDims::cell_count() const { return state_count() * action_count(); }

FactorVec FactorDims::state_part(const FactorVec& joint) const {
    return FactorVec(joint.begin(), joint.begin() + num_state_factors());
}

FactorVec FactorDims::action_part(const FactorVec& joint) const {
    return FactorVec(joint.begin() + num_state_factors(), joint.end());
}

Scope::Scope(std::vector<int> idx) : indices(std::move(idx)) {
    if (!std::is_sorted(indices.begin(), indices.end()) ||
        std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
        throw std::invalid_argument("scope indices must be strictly increasing");
    }
    if (!indices.empty() && indices.front() < 0) {
        throw std::invalid_argument("scope indices must be non-negative");
    }
}

std::vector<int> Scope::dims_in(std::span<const int> all_dims) const {
    std::vector<int> out;
    out.reserve(indices.size());
    for (int i : indices) {
        if (i >= static_cast<int>(all_dims.size())) {
            throw std::out_of_range("scope index " + std::to_string(i) +
                                    " exceeds factor count " + std::to_string(all_dims.size()));
        }
        out.push_back(all_dims[i]);
    }
    return out;
}

FlatIndex Scope::cardinality_in(std::span<const int> all_dims) const {
    auto dims = dims_in(all_dims);
    return table_size(dims);
}

FlatIndex table_size(std::span<const int> dims) {
    FlatIndex prod = 1;
    for (int d : dims) {
        if (d < 1) throw std::invalid_argument("factor dimension must be >= 1");
        if (prod > std::numeric_limits<FlatIndex>::max() / d) {
            throw std::overflow_error("factored table size overflows 64 bits");
        }
        prod *= d;
    }
    return prod;
}

FlatIndex encode_index(std::span<const int> factors, std::span<const int> dims) {
    if (factors.size() != dims.size()) {
        throw std::invalid_argument("factor vector length " + std::to_string(factors.size()) +
                                    " does not match dims length " + std::to_string(dims.size()));
    }
    FlatIndex idx = 0;
    for (size_t i = 0; i < dims.size(); ++i) {
        if (factors[i] < 0 || factors[i] >= dims[i]) {
            throw std::out_of_range("factor component " + std::to_string(i) + " = " +
                                    std::to_string(factors[i]) + " outside [0, " +
                                    std::to_string(dims[i]) + ")");
        }
        idx = idx * dims[i] + factors[i];
    }
    return idx;
}

FactorVec decode_index(FlatIndex idx, std::span<const int> dims) {
    if (idx < 0 || idx >= table_size(dims)) {
        throw std::out_of_range("flat index " + std::to_string(idx) + " outside table of size " +
                                std::to_string(table_size(dims)));
    }
    FactorVec out(dims.size());
    for (size_t i = dims.size(); i-- > 0;) {
        out[i] = static_cast<int>(idx % dims[i]);
        idx /= dims[i];
    }
    return out;
}

FactorVec project_scope(std::span<const int> factors, const Scope& scope) {
    FactorVec out;
    out.reserve(scope.indices.size());
    for (int i : scope.indices) {
        if (i >= static_cast<int>(factors.size())) {
            throw std::out_of_range("scope index " + std::to_string(i) +
                                    " exceeds factor vector length " +
                                    std::to_string(factors.size()));
        }
        out.push_back(factors[i]);
    }
    return out;
}

}  // namespace fmdp
