#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace surfzeta::group {

/// Exact arithmetic in the ring of cyclotomic integers Z[zeta_m], stored in the
/// power basis 1, zeta, ..., zeta^(phi(m)-1). Coefficients are int64 with
/// overflow detection (resource error).
class CyclotomicRing {
 public:
  static constexpr int kMaxDegree = 16;
  using Elem = std::array<std::int64_t, kMaxDegree>;

  explicit CyclotomicRing(int m);

  int order() const noexcept { return m_; }
  int degree() const noexcept { return phi_; }

  Elem zero() const { return Elem{}; }
  Elem one() const;
  Elem from_int(std::int64_t v) const;
  /// zeta^k for any integer k.
  Elem zeta_power(long k) const;

  Elem add(const Elem& x, const Elem& y) const;
  Elem sub(const Elem& x, const Elem& y) const;
  Elem neg(const Elem& x) const;
  Elem mul(const Elem& x, const Elem& y) const;
  /// Complex conjugation, zeta -> zeta^-1.
  Elem conj(const Elem& x) const;

  bool is_zero(const Elem& x) const;
  bool equal(const Elem& x, const Elem& y) const;

  /// Image under the embedding zeta -> exp(2 pi i j / m).
  std::complex<long double> embed(const Elem& x, int j = 1) const;

  /// Recovers integer coordinates of an algebraic integer from its values under
  /// all phi(m) embeddings; `values[t]` corresponds to the t-th unit of Z/m.
  Elem from_embeddings(const std::vector<std::complex<long double>>& values) const;
  const std::vector<int>& units() const noexcept { return units_; }

 private:
  int m_;
  int phi_;
  std::vector<std::int64_t> cyclo_;  // monic Phi_m, low degree first, size phi+1
  std::vector<Elem> conj_basis_;     // conj(zeta^k)
  std::vector<int> units_;
};

}  // namespace surfzeta::group
