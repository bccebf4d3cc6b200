#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fmdp {

/// Flat mixed-radix index into a factored table (last factor fastest).
using FlatIndex = std::int64_t;

/// A factor vector: one integer component per factor.
using FactorVec = std::vector<int>;

/// Dimensions of the joint state-action factor space. State factors occupy
/// indices [0, n), action factors follow at [n, d).
struct FactorDims {
    std::vector<int> state_dims;
    std::vector<int> action_dims;

    int num_state_factors() const { return static_cast<int>(state_dims.size()); }
    int num_action_factors() const { return static_cast<int>(action_dims.size()); }
    int num_factors() const { return num_state_factors() + num_action_factors(); }

    /// Joint factor dimensions, state factors first.
    std::vector<int> joint_dims() const;

    /// Flat state cardinality S = prod |S_i|.
    FlatIndex state_count() const;
    /// Flat action cardinality A.
    FlatIndex action_count() const;
    /// Flat state-action cardinality X = S * A.
    FlatIndex cell_count() const;

    /// Splits a joint factor vector into (state part, action part).
    FactorVec state_part(const FactorVec& joint) const;
    FactorVec action_part(const FactorVec& joint) const;

    bool operator==(const FactorDims&) const = default;
};

/// Sorted set of factor indices a reward/transition component depends on.
struct Scope {
    std::vector<int> indices;

    Scope() = default;
    explicit Scope(std::vector<int> idx);

    int size() const { return static_cast<int>(indices.size()); }

    /// Dimensions of the scoped subspace, in scope order.
    std::vector<int> dims_in(std::span<const int> all_dims) const;
    /// Cardinality of the scoped subspace.
    FlatIndex cardinality_in(std::span<const int> all_dims) const;

    bool operator==(const Scope&) const = default;
};

/// Mixed-radix encode, last factor fastest. Throws std::out_of_range on a
/// component outside [0, dims[i]).
FlatIndex encode_index(std::span<const int> factors, std::span<const int> dims);

/// Inverse of encode_index. Throws std::out_of_range when idx >= prod(dims).
FactorVec decode_index(FlatIndex idx, std::span<const int> dims);

/// Selects the components of `factors` at the scope's indices, in scope order.
FactorVec project_scope(std::span<const int> factors, const Scope& scope);

/// prod(dims), guarding against overflow.
FlatIndex table_size(std::span<const int> dims);

}  // namespace fmdp
