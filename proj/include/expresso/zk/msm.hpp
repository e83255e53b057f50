#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "expresso/util/error.hpp"
#include "expresso/zk/curve.hpp"

namespace expresso::zk {

namespace detail {

inline std::size_t msm_window(std::size_t n)
{
    if (n < 32) return 3;
    std::size_t c = 0;
    while ((std::size_t{1} << c) < n) ++c;
    return std::max<std::size_t>(4, c * 69 / 100 + 1);
}

inline std::uint64_t window_digit(const Limbs& k, std::size_t start, std::size_t width)
{
    const std::size_t limb = start / 64;
    const std::size_t shift = start % 64;
    if (limb >= 4) return 0;
    std::uint64_t v = k[limb] >> shift;
    if (shift + width > 64 && limb + 1 < 4) v |= k[limb + 1] << (64 - shift);
    return v & ((std::uint64_t{1} << width) - 1);
}

}  // namespace detail

/// Pippenger bucket method: sum_i scalars[i] * bases[i].
template <class Point>
Point msm_limbs(std::span<const typename Point::Affine> bases, std::span<const Limbs> scalars)
{
    if (bases.size() != scalars.size()) throw Error(Errc::LengthMismatch, "msm: bases and scalars differ in length");
    const std::size_t n = bases.size();
    if (n == 0) return Point::identity();
    const std::size_t c = detail::msm_window(n);
    std::size_t max_bits = 0;
    for (const auto& s : scalars) max_bits = std::max(max_bits, limbs_bit_length(s));
    if (max_bits == 0) return Point::identity();

    std::vector<Point> buckets((std::size_t{1} << c) - 1);
    Point result;
    const std::size_t windows = (max_bits + c - 1) / c;
    for (std::size_t w = windows; w-- > 0;) {
        for (std::size_t i = 0; i < c; ++i) result = result.dbl();
        std::fill(buckets.begin(), buckets.end(), Point::identity());
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t d = detail::window_digit(scalars[i], w * c, c);
            if (d != 0) buckets[d - 1] = buckets[d - 1].add_mixed(bases[i]);
        }
        Point running, sum;
        for (std::size_t b = buckets.size(); b-- > 0;) {
            running += buckets[b];
            sum += running;
        }
        result += sum;
    }
    return result;
}

template <class Point, class Scalar>
Point msm(std::span<const typename Point::Affine> bases, std::span<const Scalar> scalars)
{
    std::vector<Limbs> limbs(scalars.size());
    for (std::size_t i = 0; i < scalars.size(); ++i) limbs[i] = scalars[i].to_canonical();
    return msm_limbs<Point>(bases, std::span<const Limbs>(limbs));
}

/// Precomputed multiples of a fixed base: table[w][j] = (j+1) * 2^(8w) * base.
template <class Point>
class FixedBaseTable {
public:
    static constexpr std::size_t kWindow = 8;
    static constexpr std::size_t kWindows = (256 + kWindow - 1) / kWindow;

    explicit FixedBaseTable(const Point& base)
    {
        std::vector<Point> all;
        all.reserve(kWindows * kPerWindow);
        Point window_base = base;
        for (std::size_t w = 0; w < kWindows; ++w) {
            Point acc = window_base;
            for (std::size_t j = 0; j < kPerWindow; ++j) {
                all.push_back(acc);
                acc += window_base;
            }
            window_base = acc;  // 256 * previous window base
        }
        table_ = Point::batch_to_affine(all);
    }

    Point mul(const Limbs& k) const
    {
        Point acc;
        for (std::size_t w = 0; w < kWindows; ++w) {
            const std::uint64_t d = detail::window_digit(k, w * kWindow, kWindow);
            if (d != 0) acc = acc.add_mixed(table_[w * kPerWindow + d - 1]);
        }
        return acc;
    }
    template <class Scalar>
    Point operator*(const Scalar& s) const
    {
        return mul(s.to_canonical());
    }

    /// Multiplies the base by every scalar and normalizes the results together.
    template <class Scalar>
    std::vector<typename Point::Affine> mul_all(std::span<const Scalar> scalars) const
    {
        std::vector<Point> out(scalars.size());
        for (std::size_t i = 0; i < scalars.size(); ++i) out[i] = (*this) * scalars[i];
        return Point::batch_to_affine(out);
    }

private:
    static constexpr std::size_t kPerWindow = (std::size_t{1} << kWindow) - 1;
    std::vector<typename Point::Affine> table_;
};

/// Multiplies every point by the same scalar.
template <class Point>
std::vector<typename Point::Affine> scale_all(std::span<const typename Point::Affine> points, const Limbs& k)
{
    const std::vector<int> naf = Point::wnaf(k, 5);
    std::vector<Point> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = Point(points[i]).mul_naf(naf);
    return Point::batch_to_affine(out);
}

}  // namespace expresso::zk
