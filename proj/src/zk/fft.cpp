#include "expresso/zk/fft.hpp"

#include <utility>

#include "expresso/util/error.hpp"

namespace expresso::zk {

EvaluationDomain::EvaluationDomain(std::size_t min_size)
{
    while (size_ < min_size) {
        size_ <<= 1;
        ++log_size_;
    }
    if (log_size_ > kMaxLogSize) throw Error(Errc::DegreeTooSmall, "domain exceeds the 2-adicity of Fr");
    // 5^((r-1) / 2^28) generates the 2^28-th roots of unity; square down to the domain size.
    Limbs e = Fr::kModulus;
    limbs_sub(e, Limbs{1, 0, 0, 0});
    for (std::size_t i = 0; i < kMaxLogSize; ++i) limbs_shr1(e);
    omega_ = coset_shift().pow(e);
    for (std::size_t i = log_size_; i < kMaxLogSize; ++i) omega_ = omega_.square();
    omega_inv_ = omega_.inverse();
    size_inv_ = Fr::from_u64(size_).inverse();
}

void EvaluationDomain::transform(std::span<Fr> a, const Fr& root) const
{
    if (a.size() != size_) throw Error(Errc::LengthMismatch, "FFT input length differs from domain size");
    const std::size_t n = size_;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    std::vector<Fr> twiddles(n / 2 + 1);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        Fr w_len = root;
        for (std::size_t k = len; k < n; k <<= 1) w_len = w_len.square();
        const std::size_t half = len / 2;
        twiddles[0] = Fr::one();
        for (std::size_t k = 1; k < half; ++k) twiddles[k] = twiddles[k - 1] * w_len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const Fr u = a[i + k];
                const Fr v = a[i + k + half] * twiddles[k];
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
}

void EvaluationDomain::ifft(std::span<Fr> values) const
{
    transform(values, omega_inv_);
    for (auto& v : values) v *= size_inv_;
}

void EvaluationDomain::coset_fft(std::span<Fr> coeffs) const
{
    const Fr g = coset_shift();
    Fr pow = Fr::one();
    for (auto& c : coeffs) {
        c *= pow;
        pow *= g;
    }
    fft(coeffs);
}

void EvaluationDomain::coset_ifft(std::span<Fr> values) const
{
    ifft(values);
    const Fr g_inv = coset_shift().inverse();
    Fr pow = Fr::one();
    for (auto& v : values) {
        v *= pow;
        pow *= g_inv;
    }
}

Fr EvaluationDomain::vanishing_at(const Fr& x) const
{
    return x.pow(static_cast<std::uint64_t>(size_)) - Fr::one();
}

std::vector<Fr> EvaluationDomain::lagrange_at(const Fr& x) const
{
    // L_i(x) = (x^n - 1) / n * omega^i / (x - omega^i)
    const Fr z = vanishing_at(x);
    if (z.is_zero()) throw Error(Errc::InvalidArgument, "evaluation point lies in the domain");
    std::vector<Fr> den(size_);
    std::vector<Fr> num(size_);
    Fr w = Fr::one();
    for (std::size_t i = 0; i < size_; ++i) {
        num[i] = w;
        den[i] = x - w;
        w *= omega_;
    }
    batch_inverse<Fr>(den);
    const Fr scale = z * size_inv_;
    for (std::size_t i = 0; i < size_; ++i) num[i] = num[i] * den[i] * scale;
    return num;
}

}  // namespace expresso::zk
