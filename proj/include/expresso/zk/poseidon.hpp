#pragma once

#include <initializer_list>
#include <span>
#include <vector>

#include "expresso/zk/bn254.hpp"

namespace expresso::zk {

/// Poseidon permutation parameters (x^5 S-box) over Fr.
struct PoseidonParams {
    std::size_t width = 0;
    std::size_t full_rounds = 0;
    std::size_t partial_rounds = 0;
    std::vector<Fr> round_constants;  // (full + partial) * width, round-major
    std::vector<Fr> mds;              // width * width, row-major

    std::size_t rounds() const { return full_rounds + partial_rounds; }
    bool is_full_round(std::size_t r) const { return r < full_rounds / 2 || r >= full_rounds / 2 + partial_rounds; }
    const Fr& constant(std::size_t round, std::size_t lane) const { return round_constants[round * width + lane]; }
    const Fr& mds_at(std::size_t row, std::size_t col) const { return mds[row * width + col]; }
};

/// Width 3 (circomlib-compatible two-input hash) or width 6 (circuit hash).
const PoseidonParams& poseidon_params(std::size_t width);

void poseidon_permute(std::span<Fr> state, const PoseidonParams& params);

inline constexpr std::size_t kHashWidth = 6;
inline constexpr std::size_t kHashRate = kHashWidth - 1;

/// Sponge over the width-6 permutation: lane 0 starts at the input count, inputs are absorbed
/// into lanes 1..5 in zero-padded blocks, output is lane 0. Throws InvalidArgument on empty input.
Fr circuit_hash(std::span<const Fr> inputs);
Fr circuit_hash(std::initializer_list<Fr> inputs);

/// circomlib Poseidon: state [0, inputs...] through the width-(n+1) permutation, lane 0 out.
Fr poseidon_circom(std::span<const Fr> inputs);

}  // namespace expresso::zk
