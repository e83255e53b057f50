#include "expresso/zk/encoding.hpp"

namespace expresso::zk {
namespace {

constexpr std::uint8_t kFlagSmall = 0x00;
constexpr std::uint8_t kFlagLarge = 0x01;
constexpr std::uint8_t kFlagIdentity = 0x02;

template <class F>
void write_point(ByteWriter& w, const AffinePoint<F>& p)
{
    if (p.infinity) {
        w.u8(kFlagIdentity);
        w.raw(Bytes(sizeof(F) == sizeof(Fq) ? 32 : 64, 0));
        return;
    }
    w.u8(p.y.is_lexicographically_largest() ? kFlagLarge : kFlagSmall);
    if constexpr (std::is_same_v<F, Fq>) {
        write_field(w, p.x);
    } else {
        write_field(w, p.x.c0);
        write_field(w, p.x.c1);
    }
}

template <class F, class Curve>
AffinePoint<F> read_point(ByteReader& r)
{
    const std::uint8_t flag = r.u8();
    if (flag > kFlagIdentity) throw Error(Errc::MalformedEncoding, "invalid point flag");
    F x;
    if constexpr (std::is_same_v<F, Fq>) {
        x = read_field<Fq>(r);
    } else {
        x.c0 = read_field<Fq>(r);
        x.c1 = read_field<Fq>(r);
    }
    if (flag == kFlagIdentity) {
        if (!x.is_zero()) throw Error(Errc::MalformedEncoding, "identity with non-zero payload");
        return AffinePoint<F>{};
    }
    const F rhs = x.square() * x + Curve::coeff_b();
    auto y = rhs.sqrt();
    if (!y) throw Error(Errc::MalformedEncoding, "point not on curve");
    if (y->is_lexicographically_largest() != (flag == kFlagLarge)) *y = -*y;
    return AffinePoint<F>{x, *y, false};
}

}  // namespace

void write_g1(ByteWriter& w, const G1Affine& p) { write_point(w, p); }
void write_g1(ByteWriter& w, const G1& p) { write_point(w, p.to_affine()); }
G1Affine read_g1(ByteReader& r) { return read_point<Fq, G1>(r); }

void write_g2(ByteWriter& w, const G2Affine& p) { write_point(w, p); }
void write_g2(ByteWriter& w, const G2& p) { write_point(w, p.to_affine()); }

G2Affine read_g2(ByteReader& r, SubgroupCheck check)
{
    const G2Affine p = read_point<Fq2, G2>(r);
    if (check == SubgroupCheck::Enforce && !in_prime_subgroup(G2(p))) {
        throw Error(Errc::MalformedEncoding, "G2 point outside the prime-order subgroup");
    }
    return p;
}

std::vector<G1Affine> to_affine(std::span<const G1> points) { return G1::batch_to_affine(points); }
std::vector<G2Affine> to_affine(std::span<const G2> points) { return G2::batch_to_affine(points); }

void write_g1_vector(ByteWriter& w, std::span<const G1Affine> points)
{
    w.u32(static_cast<std::uint32_t>(points.size()));
    for (const auto& p : points) write_g1(w, p);
}

void write_g1_vector(ByteWriter& w, std::span<const G1> points) { write_g1_vector(w, to_affine(points)); }

std::vector<G1Affine> read_g1_vector(ByteReader& r)
{
    const std::size_t n = r.count(kG1Bytes);
    std::vector<G1Affine> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(read_g1(r));
    return out;
}

void write_g2_vector(ByteWriter& w, std::span<const G2Affine> points)
{
    w.u32(static_cast<std::uint32_t>(points.size()));
    for (const auto& p : points) write_g2(w, p);
}

void write_g2_vector(ByteWriter& w, std::span<const G2> points) { write_g2_vector(w, to_affine(points)); }

std::vector<G2Affine> read_g2_vector(ByteReader& r, SubgroupCheck check)
{
    const std::size_t n = r.count(kG2Bytes);
    std::vector<G2Affine> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(read_g2(r, check));
    return out;
}

void write_fr_vector(ByteWriter& w, std::span<const Fr> values)
{
    w.u32(static_cast<std::uint32_t>(values.size()));
    for (const auto& v : values) write_field(w, v);
}

std::vector<Fr> read_fr_vector(ByteReader& r)
{
    const std::size_t n = r.count(32);
    std::vector<Fr> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(read_field<Fr>(r));
    return out;
}

}  // namespace expresso::zk
