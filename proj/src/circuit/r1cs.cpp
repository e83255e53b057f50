#include "expresso/circuit/r1cs.hpp"

#include "expresso/util/crypto.hpp"
#include "expresso/zk/encoding.hpp"

namespace expresso::circuit {
namespace {

constexpr std::uint32_t kMagic = 0x53433152;  // "R1CS"
constexpr std::uint32_t kFormatVersion = 1;

void write_lc(ByteWriter& w, const LinearCombination& lc)
{
    w.u32(static_cast<std::uint32_t>(lc.terms().size()));
    for (const auto& t : lc.terms()) {
        w.u32(t.index);
        zk::write_field(w, t.coeff);
    }
}

LinearCombination read_lc(ByteReader& r, std::uint32_t num_variables)
{
    const std::size_t n = r.count(36);
    LinearCombination lc;
    std::uint32_t prev = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t idx = r.u32();
        const Fr coeff = zk::read_field<Fr>(r);
        if (idx >= num_variables || (i > 0 && idx <= prev) || coeff.is_zero()) {
            throw Error(Errc::MalformedEncoding, "non-canonical linear combination");
        }
        prev = idx;
        lc += LinearCombination::variable(idx, coeff);
    }
    return lc;
}

}  // namespace

LinearCombination LinearCombination::variable(std::uint32_t index, const Fr& coeff)
{
    LinearCombination lc;
    if (!coeff.is_zero()) lc.terms_.push_back({index, coeff});
    return lc;
}

LinearCombination LinearCombination::constant(const Fr& value) { return variable(0, value); }

std::optional<std::uint32_t> LinearCombination::as_variable() const
{
    if (terms_.size() == 1 && terms_[0].coeff.is_one()) return terms_[0].index;
    return std::nullopt;
}

std::optional<Fr> LinearCombination::as_constant() const
{
    if (terms_.empty()) return Fr::zero();
    if (terms_.size() == 1 && terms_[0].index == 0) return terms_[0].coeff;
    return std::nullopt;
}

LinearCombination& LinearCombination::operator+=(const LinearCombination& o)
{
    if (o.terms_.empty()) return *this;
    std::vector<Term> merged;
    merged.reserve(terms_.size() + o.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
        if (j == o.terms_.size() || (i < terms_.size() && terms_[i].index < o.terms_[j].index)) {
            merged.push_back(terms_[i++]);
        } else if (i == terms_.size() || o.terms_[j].index < terms_[i].index) {
            merged.push_back(o.terms_[j++]);
        } else {
            const Fr sum = terms_[i].coeff + o.terms_[j].coeff;
            if (!sum.is_zero()) merged.push_back({terms_[i].index, sum});
            ++i;
            ++j;
        }
    }
    terms_ = std::move(merged);
    return *this;
}

LinearCombination& LinearCombination::operator-=(const LinearCombination& o) { return *this += o * -Fr::one(); }

LinearCombination& LinearCombination::operator*=(const Fr& k)
{
    if (k.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& t : terms_) t.coeff *= k;
    return *this;
}

Fr LinearCombination::evaluate(std::span<const Fr> witness) const
{
    Fr acc = Fr::zero();
    for (const auto& t : terms_) acc += t.coeff * witness[t.index];
    return acc;
}

std::size_t ConstraintSystem::nonzero_count() const
{
    std::size_t n = 0;
    for (const auto& c : constraints) n += c.a.terms().size() + c.b.terms().size() + c.c.terms().size();
    return n;
}

Bytes ConstraintSystem::serialize() const
{
    ByteWriter w;
    w.u32(kMagic);
    w.u32(kFormatVersion);
    w.str(program_name);
    w.raw(program_digest);
    w.u32(num_public);
    w.u32(num_variables);
    w.u32(static_cast<std::uint32_t>(constraints.size()));
    for (const auto& c : constraints) {
        write_lc(w, c.a);
        write_lc(w, c.b);
        write_lc(w, c.c);
    }
    return std::move(w).take();
}

ConstraintSystem ConstraintSystem::deserialize(ByteView bytes)
{
    ByteReader r(bytes);
    if (r.u32() != kMagic || r.u32() != kFormatVersion) throw Error(Errc::MalformedEncoding, "not an R1CS export");
    ConstraintSystem cs;
    cs.program_name = r.str();
    const auto d = r.raw(32);
    std::copy(d.begin(), d.end(), cs.program_digest.begin());
    cs.num_public = r.u32();
    cs.num_variables = r.u32();
    if (cs.num_variables < cs.num_public + 1) throw Error(Errc::MalformedEncoding, "variable count below public count");
    const std::size_t n = r.count(12);
    cs.constraints.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Constraint c;
        c.a = read_lc(r, cs.num_variables);
        c.b = read_lc(r, cs.num_variables);
        c.c = read_lc(r, cs.num_variables);
        cs.constraints.push_back(std::move(c));
    }
    r.expect_done();
    return cs;
}

Digest ConstraintSystem::digest() const { return sha256(serialize()); }

std::optional<std::size_t> first_unsatisfied(const ConstraintSystem& cs, std::span<const Fr> witness)
{
    if (witness.size() != cs.num_variables) {
        throw Error(Errc::LengthMismatch, "witness has " + std::to_string(witness.size()) + " entries, expected " +
                                              std::to_string(cs.num_variables));
    }
    for (std::size_t i = 0; i < cs.constraints.size(); ++i) {
        const auto& c = cs.constraints[i];
        if (!(c.a.evaluate(witness) * c.b.evaluate(witness) == c.c.evaluate(witness))) return i;
    }
    return std::nullopt;
}

bool evaluate(const ConstraintSystem& cs, std::span<const Fr> witness)
{
    const bool ok = !first_unsatisfied(cs, witness).has_value();
    return ok && witness[0].is_one();
}

}  // namespace expresso::circuit
