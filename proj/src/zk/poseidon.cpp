#include "expresso/zk/poseidon.hpp"

#include "expresso/util/error.hpp"
#include "expresso/zk/poseidon_constants.hpp"

namespace expresso::zk {
namespace {

template <std::size_t NC, std::size_t NM>
PoseidonParams make_params(std::size_t width, std::size_t rf, std::size_t rp,
                           const std::array<std::string_view, NC>& constants,
                           const std::array<std::string_view, NM>& mds)
{
    PoseidonParams p;
    p.width = width;
    p.full_rounds = rf;
    p.partial_rounds = rp;
    for (auto c : constants) p.round_constants.push_back(Fr::from_hex(c));
    for (auto m : mds) p.mds.push_back(Fr::from_hex(m));
    return p;
}

Fr pow5(const Fr& x)
{
    const Fr x2 = x.square();
    return x2.square() * x;
}

}  // namespace

const PoseidonParams& poseidon_params(std::size_t width)
{
    static const PoseidonParams t3 = make_params(3, 8, 57, poseidon_tables::kConstantsT3, poseidon_tables::kMdsT3);
    static const PoseidonParams t6 = make_params(6, 8, 60, poseidon_tables::kConstantsT6, poseidon_tables::kMdsT6);
    if (width == 3) return t3;
    if (width == 6) return t6;
    throw Error(Errc::InvalidArgument, "unsupported Poseidon width " + std::to_string(width));
}

void poseidon_permute(std::span<Fr> state, const PoseidonParams& params)
{
    const std::size_t t = params.width;
    if (state.size() != t) throw Error(Errc::InvalidArgument, "Poseidon state width mismatch");
    std::vector<Fr> next(t);
    for (std::size_t r = 0; r < params.rounds(); ++r) {
        for (std::size_t i = 0; i < t; ++i) state[i] += params.constant(r, i);
        if (params.is_full_round(r)) {
            for (auto& s : state) s = pow5(s);
        } else {
            state[0] = pow5(state[0]);
        }
        for (std::size_t i = 0; i < t; ++i) {
            Fr acc = Fr::zero();
            for (std::size_t j = 0; j < t; ++j) acc += params.mds_at(i, j) * state[j];
            next[i] = acc;
        }
        std::copy(next.begin(), next.end(), state.begin());
    }
}

Fr circuit_hash(std::span<const Fr> inputs)
{
    if (inputs.empty()) throw Error(Errc::InvalidArgument, "circuit_hash needs at least one input");
    const auto& params = poseidon_params(kHashWidth);
    std::array<Fr, kHashWidth> state{};
    state[0] = Fr::from_u64(inputs.size());
    for (std::size_t k = 0; k < inputs.size(); k += kHashRate) {
        for (std::size_t i = 0; i < kHashRate && k + i < inputs.size(); ++i) state[1 + i] += inputs[k + i];
        poseidon_permute(state, params);
    }
    return state[0];
}

Fr circuit_hash(std::initializer_list<Fr> inputs)
{
    return circuit_hash(std::span<const Fr>(inputs.begin(), inputs.size()));
}

Fr poseidon_circom(std::span<const Fr> inputs)
{
    const auto& params = poseidon_params(inputs.size() + 1);
    std::vector<Fr> state(params.width);
    std::copy(inputs.begin(), inputs.end(), state.begin() + 1);
    poseidon_permute(state, params);
    return state[0];
}

}  // namespace expresso::zk
