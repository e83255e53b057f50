#include "expresso/ceremony/phase2.hpp"

#include <list>
#include <mutex>
#include <sstream>

#include "expresso/util/crypto.hpp"
#include "expresso/zk/encoding.hpp"
#include "expresso/zk/fft.hpp"
#include "expresso/zk/groth16.hpp"
#include "expresso/zk/hash_to_curve.hpp"
#include "expresso/zk/msm.hpp"
#include "expresso/zk/pairing.hpp"
#include "expresso/zk/random.hpp"
#include "internal.hpp"

namespace expresso::ceremony {

namespace {

using zk::Limbs;

constexpr std::uint32_t kTranscriptMagic = 0x31525458;  // "XTR1"

template <class Affine>
Affine neg_any(const Affine& p)
{
    return p.infinity ? p : Affine{p.x, -p.y, false};
}

/// sum_k coeff_k * basis[row_k]; unit coefficients use additions, small ones short multiplications.
template <class Point>
Point sparse_sum(const std::vector<QapColumns::Entry>& entries, std::span<const typename Point::Affine> basis)
{
    static const Fr kOne = Fr::one();
    static const Fr kMinusOne = -Fr::one();
    Point acc;
    for (const auto& e : entries) {
        const auto& b = basis[e.row];
        if (e.coeff == kOne) {
            acc = acc.add_mixed(b);
        } else if (e.coeff == kMinusOne) {
            acc = acc.add_mixed(neg_any(b));
        } else {
            const Limbs pos = e.coeff.to_canonical();
            const Limbs negv = (-e.coeff).to_canonical();
            if (zk::limbs_bit_length(negv) < zk::limbs_bit_length(pos)) {
                acc += -Point(b).mul(negv);
            } else {
                acc += Point(b).mul(pos);
            }
        }
    }
    return acc;
}

template <class Point>
std::vector<typename Point::Affine> column_sums(const std::vector<std::vector<QapColumns::Entry>>& cols,
                                                std::span<const typename Point::Affine> basis)
{
    std::vector<Point> out(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) out[j] = sparse_sum<Point>(cols[j], basis);
    return Point::batch_to_affine(out);
}

/// Inverse FFT carried out in the group: L_i(tau) P from the monomial encodings tau^k P.
template <class Point>
std::vector<typename Point::Affine> group_ifft(std::span<const typename Point::Affine> monomial,
                                               const zk::EvaluationDomain& domain)
{
    const std::size_t n = domain.size();
    std::vector<Point> a(monomial.begin(), monomial.begin() + static_cast<std::ptrdiff_t>(n));
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const Fr omega_inv = domain.omega().inverse();
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const Fr step = omega_inv.pow(static_cast<std::uint64_t>(n / len));
        std::vector<Limbs> twiddle(len / 2);
        Fr w = Fr::one();
        for (auto& t : twiddle) {
            t = w.to_canonical();
            w *= step;
        }
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Point u = a[i + k];
                const Point v = k == 0 ? a[i + k + len / 2] : a[i + k + len / 2].mul(twiddle[k]);
                a[i + k] = u + v;
                a[i + k + len / 2] = u + (-v);
            }
        }
    }
    const Limbs n_inv = Fr::from_u64(n).inverse().to_canonical();
    for (auto& p : a) p = p.mul(n_inv);
    return Point::batch_to_affine(a);
}

G1Affine mul_affine(const G1Affine& p, const Fr& s) { return G1(p).mul(s.to_canonical()).to_affine(); }
G2Affine mul_affine(const G2Affine& p, const Fr& s) { return G2(p).mul(s.to_canonical()).to_affine(); }

void scale_range(std::vector<G1Affine>& v, std::size_t begin, std::size_t end, const Fr& s)
{
    const auto scaled = zk::scale_all<G1>(std::span<const G1Affine>(v).subspan(begin, end - begin), s.to_canonical());
    std::copy(scaled.begin(), scaled.end(), v.begin() + static_cast<std::ptrdiff_t>(begin));
}

ShareValues shares_from_seed(std::string_view domain, ByteView material, const Digest& prev_running,
                             std::uint32_t index)
{
    Sha256 h;
    h.update_framed(as_bytes(domain));
    h.update_framed(material);
    h.update_framed(prev_running);
    ByteWriter idx;
    idx.u32(index);
    h.update_framed(idx.bytes());
    Rng rng(h.finish());
    ShareValues out;
    for (auto& s : out.s) s = zk::random_nonzero<Fr>(rng);
    return out;
}

const char* share_name(Share s)
{
    switch (s) {
    case Share::Alpha: return "alpha";
    case Share::Beta: return "beta";
    case Share::Gamma: return "gamma";
    case Share::Delta: return "delta";
    }
    return "?";
}

}  // namespace

// ---- encodings and records ----

void TrapdoorEncodings::write(ByteWriter& w) const
{
    zk::write_g1(w, alpha_g1);
    zk::write_g1(w, beta_g1);
    zk::write_g1(w, delta_g1);
    zk::write_g2(w, beta_g2);
    zk::write_g2(w, gamma_g2);
    zk::write_g2(w, delta_g2);
}

TrapdoorEncodings TrapdoorEncodings::read(ByteReader& r)
{
    TrapdoorEncodings e;
    e.alpha_g1 = zk::read_g1(r);
    e.beta_g1 = zk::read_g1(r);
    e.delta_g1 = zk::read_g1(r);
    e.beta_g2 = zk::read_g2(r);
    e.gamma_g2 = zk::read_g2(r);
    e.delta_g2 = zk::read_g2(r);
    return e;
}

Bytes ContributionRecord::body() const
{
    ByteWriter w;
    w.u32(index);
    w.str(contributor_id);
    update.write(w);
    for (const auto& p : proofs) {
        zk::write_g1(w, p.s_g1);
        zk::write_g2(w, p.s_h);
    }
    w.raw(state_digest);
    return std::move(w).take();
}

void ContributionRecord::write(ByteWriter& w) const
{
    w.blob(body());
    w.raw(running_digest);
}

ContributionRecord ContributionRecord::read(ByteReader& outer)
{
    ByteReader r(outer.blob());
    ContributionRecord rec;
    rec.index = r.u32();
    rec.contributor_id = r.str();
    rec.update = TrapdoorEncodings::read(r);
    for (auto& p : rec.proofs) {
        p.s_g1 = zk::read_g1(r);
        p.s_h = zk::read_g2(r);
    }
    const auto sd = r.raw(32);
    std::copy(sd.begin(), sd.end(), rec.state_digest.begin());
    r.expect_done();
    const auto rd = outer.raw(32);
    std::copy(rd.begin(), rd.end(), rec.running_digest.begin());
    return rec;
}

Digest CeremonyTranscript::chain_start() const
{
    Sha256 h;
    h.update_framed(as_bytes(std::string_view("expresso.transcript")));
    h.update_framed(phase1_digest);
    h.update_framed(circuit_digest);
    ByteWriter w;
    w.u32(domain_size);
    h.update_framed(w.bytes());
    return h.finish();
}

Bytes CeremonyTranscript::serialize() const
{
    ByteWriter w;
    w.u32(kTranscriptMagic);
    w.raw(phase1_digest);
    w.raw(circuit_digest);
    w.u32(domain_size);
    w.u32(static_cast<std::uint32_t>(records.size()));
    for (const auto& r : records) r.write(w);
    w.u8(beacon ? 1 : 0);
    if (beacon) {
        w.blob(beacon->beacon);
        w.str(beacon->source);
        beacon->record.write(w);
    }
    w.raw(final_digest);
    return std::move(w).take();
}

CeremonyTranscript CeremonyTranscript::deserialize(ByteView bytes)
{
    ByteReader r(bytes);
    if (r.u32() != kTranscriptMagic) throw Error(Errc::MalformedEncoding, "not a ceremony transcript");
    auto digest = [&r] {
        Digest d{};
        const auto b = r.raw(32);
        std::copy(b.begin(), b.end(), d.begin());
        return d;
    };
    CeremonyTranscript t;
    t.phase1_digest = digest();
    t.circuit_digest = digest();
    t.domain_size = r.u32();
    const std::size_t count = r.count(36);
    for (std::size_t i = 0; i < count; ++i) t.records.push_back(ContributionRecord::read(r));
    const std::uint8_t has_beacon = r.u8();
    if (has_beacon > 1) throw Error(Errc::MalformedEncoding, "bad beacon flag");
    if (has_beacon) {
        BeaconRecord b;
        const auto raw = r.blob();
        b.beacon.assign(raw.begin(), raw.end());
        b.source = r.str();
        b.record = ContributionRecord::read(r);
        t.beacon = std::move(b);
    }
    t.final_digest = digest();
    r.expect_done();
    return t;
}

std::string CeremonyTranscript::manifest() const
{
    std::ostringstream out;
    out << "expresso ceremony transcript v1\n";
    out << "phase1 " << to_hex(phase1_digest) << "\n";
    out << "circuit " << to_hex(circuit_digest) << "\n";
    out << "domain " << domain_size << "\n";
    for (const auto& r : records) {
        out << "record " << r.index << " contributor=" << r.contributor_id << " state=" << to_hex(r.state_digest)
            << " chain=" << to_hex(r.running_digest) << "\n";
    }
    if (beacon) {
        out << "beacon source=" << beacon->source << " value=" << to_hex(beacon->beacon)
            << " chain=" << to_hex(beacon->record.running_digest) << "\n";
    } else {
        out << "beacon (none)\n";
    }
    out << "final " << to_hex(final_digest) << "\n";
    return out.str();
}

std::string TranscriptCheck::describe() const
{
    if (ok) return "transcript valid";
    switch (where) {
    case Where::Header: return "header: " + reason;
    case Where::Record: return "record " + std::to_string(record) + ": " + reason;
    case Where::Beacon: return "beacon: " + reason;
    case Where::Footer: return "footer: " + reason;
    case Where::None: break;
    }
    return reason;
}

// ---- derivations ----

ShareValues derive_contribution_shares(ByteView entropy, const Digest& prev_running, std::uint32_t index)
{
    return shares_from_seed("expresso.contribution", entropy, prev_running, index);
}

ShareValues derive_beacon_shares(ByteView beacon, const Digest& prev_running, std::uint32_t index)
{
    return shares_from_seed("expresso.beacon", beacon, prev_running, index);
}

G2 share_base_point(const Digest& prev_running, std::uint32_t index, Share share)
{
    ByteWriter w;
    w.str("expresso.share");
    w.raw(prev_running);
    w.u32(index);
    w.u8(static_cast<std::uint8_t>(share));
    return zk::hash_to_g2(w.bytes());
}

Digest beacon_running_digest(const Digest& prev, const BeaconRecord& b)
{
    Sha256 h;
    h.update_framed(prev);
    h.update_framed(as_bytes(std::string_view("beacon")));
    h.update_framed(b.beacon);
    h.update_framed(as_bytes(b.source));
    h.update_framed(b.record.body());
    return h.finish();
}

Digest final_transcript_digest(const Digest& beacon_running)
{
    Sha256 h;
    h.update_framed(as_bytes(std::string_view("expresso.transcript.final")));
    h.update_framed(beacon_running);
    return h.finish();
}

namespace {

Digest record_running_digest(const Digest& prev, const ContributionRecord& rec)
{
    Sha256 h;
    h.update_framed(prev);
    h.update_framed(rec.body());
    return h.finish();
}

}  // namespace

TrapdoorEncodings initial_encodings(const Phase1Parameters& phase1)
{
    TrapdoorEncodings e;
    e.alpha_g1 = phase1.alpha_tau_g1.at(0);
    e.beta_g1 = phase1.beta_tau_g1.at(0);
    e.beta_g2 = phase1.beta_g2;
    e.gamma_g2 = G2::generator().to_affine();
    e.delta_g1 = G1::generator().to_affine();
    e.delta_g2 = G2::generator().to_affine();
    return e;
}

QapColumns qap_columns(const circuit::ConstraintSystem& cs)
{
    QapColumns cols;
    cols.a.resize(cs.num_variables);
    cols.b.resize(cs.num_variables);
    cols.c.resize(cs.num_variables);
    for (std::size_t i = 0; i < cs.constraints.size(); ++i) {
        const auto row = static_cast<std::uint32_t>(i);
        for (const auto& t : cs.constraints[i].a.terms()) cols.a[t.index].push_back({row, t.coeff});
        for (const auto& t : cs.constraints[i].b.terms()) cols.b[t.index].push_back({row, t.coeff});
        for (const auto& t : cs.constraints[i].c.terms()) cols.c[t.index].push_back({row, t.coeff});
    }
    // input-consistency rows: A gets x_j at row m + j
    for (std::size_t j = 0; j <= cs.num_public; ++j) {
        cols.a[j].push_back({static_cast<std::uint32_t>(cs.constraints.size() + j), Fr::one()});
    }
    return cols;
}

LagrangeView lagrange_view(const Phase1Parameters& phase1, std::size_t n)
{
    if (phase1.degree < n) {
        throw Error(Errc::DegreeTooSmall, "circuit needs a domain of " + std::to_string(n) + " but phase 1 has degree " +
                                              std::to_string(phase1.degree));
    }
    LagrangeView v;
    if (phase1.degree == n) {
        v.g1 = phase1.lagrange_g1;
        v.g2 = phase1.lagrange_g2;
        v.alpha_g1 = phase1.alpha_lagrange_g1;
        v.beta_g1 = phase1.beta_lagrange_g1;
        return v;
    }
    // larger phase 1: interpolate the subdomain basis from the monomial powers
    const zk::EvaluationDomain domain(n);
    v.g1 = group_ifft<G1>(phase1.tau_powers_g1, domain);
    v.g2 = group_ifft<G2>(phase1.tau_powers_g2, domain);
    v.alpha_g1 = group_ifft<G1>(phase1.alpha_tau_g1, domain);
    v.beta_g1 = group_ifft<G1>(phase1.beta_tau_g1, domain);
    return v;
}

namespace {

std::shared_ptr<const Phase2Base> build_base(std::shared_ptr<const Phase1Parameters> phase1,
                                             const circuit::ConstraintSystem& cs, const Digest& phase1_digest,
                                             const Digest& circuit_digest)
{
    const std::size_t n = zk::qap_domain_size(cs);
    const LagrangeView lag = lagrange_view(*phase1, n);
    const QapColumns cols = qap_columns(cs);

    auto base = std::make_shared<Phase2Base>();
    base->phase1 = std::move(phase1);
    base->cs = std::make_shared<const circuit::ConstraintSystem>(cs);
    base->phase1_digest = phase1_digest;
    base->circuit_digest = circuit_digest;
    base->domain_size = static_cast<std::uint32_t>(n);
    base->a_query = column_sums<G1>(cols.a, lag.g1);
    base->b_g1_query = column_sums<G1>(cols.b, lag.g1);
    base->b_g2_query = column_sums<G2>(cols.b, lag.g2);
    base->x0 = column_sums<G1>(cols.a, lag.beta_g1);
    base->y0 = column_sums<G1>(cols.b, lag.alpha_g1);
    base->z0 = column_sums<G1>(cols.c, lag.g1);

    // tau^i Z(tau) = tau^(i+n) - tau^i
    const auto& t = base->phase1->tau_powers_g1;
    std::vector<G1> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h[i] = G1(t[i + n]).add_mixed(neg_any(t[i]));
    base->h0 = G1::batch_to_affine(h);
    return base;
}

}  // namespace

std::shared_ptr<const Phase2Base> phase2_base(std::shared_ptr<const Phase1Parameters> phase1,
                                              const circuit::ConstraintSystem& cs)
{
    // Small LRU keyed by (phase 1, circuit): pool generation runs many ceremonies on one pair.
    static std::mutex mu;
    static std::list<std::shared_ptr<const Phase2Base>> cache;
    constexpr std::size_t kCapacity = 3;

    const Digest p1 = phase1->digest();
    const Digest cd = cs.digest();
    {
        std::lock_guard lock(mu);
        for (auto it = cache.begin(); it != cache.end(); ++it) {
            if ((*it)->phase1_digest == p1 && (*it)->circuit_digest == cd) {
                auto hit = *it;
                cache.erase(it);
                cache.push_front(hit);
                return hit;
            }
        }
    }
    auto base = build_base(std::move(phase1), cs, p1, cd);
    std::lock_guard lock(mu);
    cache.push_front(base);
    if (cache.size() > kCapacity) cache.pop_back();
    return base;
}

std::pair<std::vector<G1Affine>, std::vector<G1Affine>> combine_queries(std::span<const G1Affine> x,
                                                                        std::span<const G1Affine> y,
                                                                        std::span<const G1Affine> z,
                                                                        std::size_t num_public)
{
    std::vector<G1> sum(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) sum[j] = G1(x[j]).add_mixed(y[j]).add_mixed(z[j]);
    auto all = G1::batch_to_affine(sum);
    std::vector<G1Affine> ic(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(num_public + 1));
    std::vector<G1Affine> l(all.begin() + static_cast<std::ptrdiff_t>(num_public + 1), all.end());
    return {std::move(ic), std::move(l)};
}

Digest combined_state_digest(const TrapdoorEncodings& enc, std::span<const G1Affine> ic,
                             std::span<const G1Affine> l, std::span<const G1Affine> h)
{
    ByteWriter w;
    w.str("expresso.phase2.state");
    enc.write(w);
    zk::write_g1_vector(w, ic);
    zk::write_g1_vector(w, l);
    zk::write_g1_vector(w, h);
    return sha256(w.bytes());
}

// ---- state ----

const circuit::ConstraintSystem& CeremonyState::constraint_system() const { return *base_->cs; }

Digest CeremonyState::state_digest() const
{
    const auto [ic, l] = combine_queries(x_, y_, z_, base_->cs->num_public);
    return combined_state_digest(enc_, ic, l, h_);
}

CeremonyState CeremonyState::begin(std::shared_ptr<const Phase1Parameters> phase1, const circuit::ConstraintSystem& cs)
{
    if (!phase1) throw Error(Errc::InvalidArgument, "phase-1 parameters required");
    CeremonyState s;
    s.base_ = phase2_base(phase1, cs);
    s.enc_ = initial_encodings(*phase1);
    s.x_ = s.base_->x0;
    s.y_ = s.base_->y0;
    s.z_ = s.base_->z0;
    s.h_ = s.base_->h0;
    s.transcript_.phase1_digest = s.base_->phase1_digest;
    s.transcript_.circuit_digest = s.base_->circuit_digest;
    s.transcript_.domain_size = s.base_->domain_size;
    return s;
}

CeremonyState CeremonyAccess::apply(const CeremonyState& prev, const ShareValues& sh, std::string contributor_id,
                                    std::uint32_t index, ContributionRecord& rec)
{
    const Fr& a = sh[Share::Alpha];
    const Fr& b = sh[Share::Beta];
    const Fr& g = sh[Share::Gamma];
    const Fr& d = sh[Share::Delta];
    const Fr d_inv = d.inverse();
    const Fr g_inv = g.inverse();
    const std::size_t pub_end = prev.base_->cs->num_public + 1;
    const std::size_t nv = prev.x_.size();

    CeremonyState next;
    next.base_ = prev.base_;
    next.enc_.alpha_g1 = mul_affine(prev.enc_.alpha_g1, a);
    next.enc_.beta_g1 = mul_affine(prev.enc_.beta_g1, b);
    next.enc_.beta_g2 = mul_affine(prev.enc_.beta_g2, b);
    next.enc_.gamma_g2 = mul_affine(prev.enc_.gamma_g2, g);
    next.enc_.delta_g1 = mul_affine(prev.enc_.delta_g1, d);
    next.enc_.delta_g2 = mul_affine(prev.enc_.delta_g2, d);

    next.x_ = prev.x_;
    next.y_ = prev.y_;
    next.z_ = prev.z_;
    scale_range(next.x_, 0, pub_end, b * g_inv);
    scale_range(next.y_, 0, pub_end, a * g_inv);
    scale_range(next.z_, 0, pub_end, g_inv);
    scale_range(next.x_, pub_end, nv, b * d_inv);
    scale_range(next.y_, pub_end, nv, a * d_inv);
    scale_range(next.z_, pub_end, nv, d_inv);
    next.h_ = zk::scale_all<G1>(std::span<const G1Affine>(prev.h_), d_inv.to_canonical());

    const Digest prev_running =
        prev.transcript_.records.empty() ? prev.transcript_.chain_start() : prev.transcript_.records.back().running_digest;
    rec = ContributionRecord{};
    rec.index = index;
    rec.contributor_id = std::move(contributor_id);
    rec.update = next.enc_;
    for (Share k : kShares) {
        const Fr& s = sh[k];
        auto& p = rec.proofs[static_cast<std::size_t>(k)];
        p.s_g1 = G1::generator().mul(s.to_canonical()).to_affine();
        p.s_h = share_base_point(prev_running, index, k).mul(s.to_canonical()).to_affine();
    }
    rec.state_digest = next.state_digest();
    rec.running_digest = record_running_digest(prev_running, rec);

    next.transcript_ = prev.transcript_;
    return next;
}

std::pair<CeremonyState, ContributionRecord> contribute(const CeremonyState& prev, std::string contributor_id,
                                                        ByteView entropy)
{
    if (contributor_id.empty()) throw Error(Errc::InvalidArgument, "contributor id must not be empty");
    if (entropy.empty()) throw Error(Errc::InvalidArgument, "contribution entropy must not be empty");
    if (!prev.base_ || prev.finalized()) throw Error(Errc::InvalidPriorState, "ceremony is finalized or uninitialized");
    const auto& recs = prev.transcript_.records;
    const std::size_t nv = prev.base_->cs->num_variables;
    const bool consistent = prev.x_.size() == nv && prev.y_.size() == nv && prev.z_.size() == nv &&
                            prev.h_.size() + 1 == prev.base_->domain_size &&
                            (recs.empty() ? prev.enc_ == initial_encodings(*prev.base_->phase1)
                                          : recs.back().update == prev.enc_);
    if (!consistent) throw Error(Errc::InvalidPriorState, "state does not match its transcript");

    const auto index = static_cast<std::uint32_t>(recs.size() + 1);
    const Digest prev_running = recs.empty() ? prev.transcript_.chain_start() : recs.back().running_digest;
    ShareValues shares = derive_contribution_shares(entropy, prev_running, index);
    ContributionRecord rec;
    CeremonyState next = CeremonyAccess::apply(prev, shares, std::move(contributor_id), index, rec);
    for (auto& s : shares.s) s = Fr::zero();
    next.transcript_.records.push_back(rec);
    return {std::move(next), std::move(rec)};
}

// ---- verification ----

std::string check_record(const ContributionRecord& rec, const TrapdoorEncodings& prev, const Digest& prev_running)
{
    const auto& n = rec.update;
    if (n.alpha_g1.infinity || n.beta_g1.infinity || n.delta_g1.infinity || n.beta_g2.infinity ||
        n.gamma_g2.infinity || n.delta_g2.infinity) {
        return "identity element in the updated encodings";
    }
    std::array<G2, 4> base;
    for (Share k : kShares) {
        const auto i = static_cast<std::size_t>(k);
        const auto& p = rec.proofs[i];
        if (p.s_g1.infinity || p.s_h.infinity) return std::string("degenerate ") + share_name(k) + " proof";
        base[i] = share_base_point(prev_running, rec.index, k);
        if (!zk::same_ratio(G1(p.s_g1), base[i], G1::generator(), G2(p.s_h))) {
            return std::string("knowledge proof for the ") + share_name(k) + " share fails";
        }
    }
    const auto& pa = rec.proofs[0];
    const auto& pb = rec.proofs[1];
    const auto& pg = rec.proofs[2];
    const auto& pd = rec.proofs[3];
    if (!zk::same_ratio(G1(n.alpha_g1), base[0], G1(prev.alpha_g1), G2(pa.s_h))) return "alpha update inconsistent";
    if (!zk::same_ratio(G1(n.beta_g1), base[1], G1(prev.beta_g1), G2(pb.s_h))) return "beta (G1) update inconsistent";
    if (!zk::same_ratio(G1(n.delta_g1), base[3], G1(prev.delta_g1), G2(pd.s_h))) return "delta (G1) update inconsistent";
    if (!zk::same_ratio(G1::generator(), G2(n.beta_g2), G1(pb.s_g1), G2(prev.beta_g2))) {
        return "beta (G2) update inconsistent";
    }
    if (!zk::same_ratio(G1::generator(), G2(n.gamma_g2), G1(pg.s_g1), G2(prev.gamma_g2))) {
        return "gamma update inconsistent";
    }
    if (!zk::same_ratio(G1::generator(), G2(n.delta_g2), G1(pd.s_g1), G2(prev.delta_g2))) {
        return "delta (G2) update inconsistent";
    }
    return {};
}

TranscriptCheck verify_transcript(const CeremonyTranscript& t, const Phase1Parameters& phase1)
{
    using W = TranscriptCheck::Where;
    auto fail = [](W where, std::uint32_t record, std::string reason) {
        return TranscriptCheck{false, where, record, std::move(reason)};
    };
    try {
        if (t.phase1_digest != phase1.digest()) return fail(W::Header, 0, "phase-1 digest mismatch");
        if (t.domain_size < 2 || (t.domain_size & (t.domain_size - 1)) != 0 || t.domain_size > phase1.degree) {
            return fail(W::Header, 0, "domain size incompatible with phase 1");
        }
        if (t.records.empty()) return fail(W::Header, 0, "no contributions");

        TrapdoorEncodings enc = initial_encodings(phase1);
        Digest running = t.chain_start();
        for (std::size_t i = 0; i < t.records.size(); ++i) {
            const auto& rec = t.records[i];
            const auto pos = static_cast<std::uint32_t>(i + 1);
            if (rec.index != pos) return fail(W::Record, pos, "record index " + std::to_string(rec.index) + " out of order");
            if (record_running_digest(running, rec) != rec.running_digest) {
                return fail(W::Record, pos, "running digest does not chain from the previous record");
            }
            if (auto why = check_record(rec, enc, running); !why.empty()) return fail(W::Record, pos, why);
            enc = rec.update;
            running = rec.running_digest;
        }

        if (!t.beacon) return fail(W::Beacon, 0, "beacon record missing");
        const auto& b = *t.beacon;
        const auto beacon_index = static_cast<std::uint32_t>(t.records.size() + 1);
        if (b.beacon.empty()) return fail(W::Beacon, 0, "empty beacon value");
        if (b.record.index != beacon_index) return fail(W::Beacon, 0, "beacon is not the last record");
        if (beacon_running_digest(running, b) != b.record.running_digest) {
            return fail(W::Beacon, 0, "running digest does not chain from the last contribution");
        }
        if (auto why = check_record(b.record, enc, running); !why.empty()) return fail(W::Beacon, 0, why);
        // the beacon's shares are public: recompute and compare
        const ShareValues s = derive_beacon_shares(b.beacon, running, beacon_index);
        TrapdoorEncodings expect;
        expect.alpha_g1 = mul_affine(enc.alpha_g1, s[Share::Alpha]);
        expect.beta_g1 = mul_affine(enc.beta_g1, s[Share::Beta]);
        expect.beta_g2 = mul_affine(enc.beta_g2, s[Share::Beta]);
        expect.gamma_g2 = mul_affine(enc.gamma_g2, s[Share::Gamma]);
        expect.delta_g1 = mul_affine(enc.delta_g1, s[Share::Delta]);
        expect.delta_g2 = mul_affine(enc.delta_g2, s[Share::Delta]);
        if (!(expect == b.record.update)) return fail(W::Beacon, 0, "encodings not derived from the beacon value");

        if (final_transcript_digest(b.record.running_digest) != t.final_digest) {
            return fail(W::Footer, 0, "final digest mismatch");
        }
    } catch (const std::exception& e) {
        return fail(W::Header, 0, std::string("malformed transcript: ") + e.what());
    }
    return {};
}

}  // namespace expresso::ceremony
