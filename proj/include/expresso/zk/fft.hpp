#pragma once

#include <span>
#include <vector>

#include "expresso/zk/bn254.hpp"

namespace expresso::zk {

/// Multiplicative subgroup of Fr of power-of-two order, used for QAP interpolation.
class EvaluationDomain {
public:
    static constexpr std::size_t kMaxLogSize = 28;

    /// Smallest power-of-two domain holding at least `min_size` points.
    explicit EvaluationDomain(std::size_t min_size);

    std::size_t size() const { return size_; }
    std::size_t log_size() const { return log_size_; }
    const Fr& omega() const { return omega_; }
    /// Multiplicative generator of Fr*, used as the coset shift.
    static Fr coset_shift() { return Fr::from_u64(5); }

    void fft(std::span<Fr> values) const { transform(values, omega_); }
    void ifft(std::span<Fr> values) const;
    void coset_fft(std::span<Fr> coeffs) const;
    void coset_ifft(std::span<Fr> values) const;

    /// Z(x) = x^n - 1.
    Fr vanishing_at(const Fr& x) const;
    /// L_0(x) .. L_{n-1}(x); requires x outside the domain.
    std::vector<Fr> lagrange_at(const Fr& x) const;

private:
    void transform(std::span<Fr> values, const Fr& root) const;

    std::size_t size_ = 1;
    std::size_t log_size_ = 0;
    Fr omega_, omega_inv_, size_inv_;
};

}  // namespace expresso::zk
