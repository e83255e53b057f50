#pragma once

#include <span>
#include <vector>

#include "expresso/util/bytes.hpp"
#include "expresso/zk/curve.hpp"

namespace expresso::zk {

// Canonical encodings (see docs/FORMATS.md):
//   field element: 32 bytes little-endian, value < modulus
//   G1 point:      1 flag byte + x (32 bytes)            = 33 bytes
//   G2 point:      1 flag byte + x.c0 + x.c1 (64 bytes)  = 65 bytes
// Flag byte: 0x00 = y is the smaller root, 0x01 = y is the larger root, 0x02 = identity (x all zero).

inline constexpr std::size_t kG1Bytes = 33;
inline constexpr std::size_t kG2Bytes = 65;

enum class SubgroupCheck { Skip, Enforce };

template <class F>
void write_field(ByteWriter& w, const F& v)
{
    const auto b = v.to_bytes();
    w.raw(b);
}

template <class F>
F read_field(ByteReader& r)
{
    auto v = F::from_bytes(r.raw(32));
    if (!v) throw Error(Errc::MalformedEncoding, "non-canonical field element");
    return *v;
}

void write_g1(ByteWriter& w, const G1Affine& p);
void write_g1(ByteWriter& w, const G1& p);
G1Affine read_g1(ByteReader& r);

void write_g2(ByteWriter& w, const G2Affine& p);
void write_g2(ByteWriter& w, const G2& p);
G2Affine read_g2(ByteReader& r, SubgroupCheck check = SubgroupCheck::Enforce);

/// Length-prefixed vectors of points; projective inputs are batch-normalized first.
void write_g1_vector(ByteWriter& w, std::span<const G1Affine> points);
void write_g1_vector(ByteWriter& w, std::span<const G1> points);
std::vector<G1Affine> read_g1_vector(ByteReader& r);
void write_g2_vector(ByteWriter& w, std::span<const G2Affine> points);
void write_g2_vector(ByteWriter& w, std::span<const G2> points);
std::vector<G2Affine> read_g2_vector(ByteReader& r, SubgroupCheck check = SubgroupCheck::Skip);

void write_fr_vector(ByteWriter& w, std::span<const Fr> values);
std::vector<Fr> read_fr_vector(ByteReader& r);

std::vector<G1Affine> to_affine(std::span<const G1> points);
std::vector<G2Affine> to_affine(std::span<const G2> points);

}  // namespace expresso::zk
