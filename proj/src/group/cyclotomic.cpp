#include "surfzeta/group/cyclotomic.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "surfzeta/error.hpp"

namespace surfzeta::group {
namespace {

using Poly = std::vector<std::int64_t>;

// Exact division of integer polynomials (divisor monic).
Poly poly_div(Poly num, const Poly& den) {
  const std::size_t dn = den.size() - 1;
  if (num.size() - 1 < dn) return {0};
  Poly q(num.size() - dn, 0);
  for (std::size_t i = num.size() - 1; i + 1 > dn && i >= dn; --i) {
    const std::int64_t c = num[i];
    q[i - dn] = c;
    for (std::size_t k = 0; k <= dn; ++k) num[i - dn + k] -= c * den[k];
    if (i == dn) break;
  }
  return q;
}

Poly cyclotomic_poly(int m) {
  Poly p(static_cast<std::size_t>(m) + 1, 0);
  p[0] = -1;
  p[static_cast<std::size_t>(m)] = 1;
  for (int d = 1; d < m; ++d) {
    if (m % d == 0) p = poly_div(p, cyclotomic_poly(d));
  }
  return p;
}

inline std::int64_t checked(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) [[unlikely]] {
    throw Error(ErrorKind::resource, "cyclotomic coefficient overflow (word too long for exact arithmetic)");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

CyclotomicRing::CyclotomicRing(int m) : m_(m) {
  if (m < 3) throw Error(ErrorKind::input, "cyclotomic order must be >= 3");
  cyclo_ = cyclotomic_poly(m);
  phi_ = static_cast<int>(cyclo_.size()) - 1;
  if (phi_ > kMaxDegree) {
    throw Error(ErrorKind::resource, "cyclotomic degree " + std::to_string(phi_) + " exceeds supported maximum");
  }
  for (int j = 1; j < m; ++j) {
    if (std::gcd(j, m) == 1) units_.push_back(j);
  }
  for (int k = 0; k < phi_; ++k) conj_basis_.push_back(zeta_power(-k));
}

CyclotomicRing::Elem CyclotomicRing::one() const { return from_int(1); }

CyclotomicRing::Elem CyclotomicRing::from_int(std::int64_t v) const {
  Elem e{};
  e[0] = v;
  return e;
}

CyclotomicRing::Elem CyclotomicRing::zeta_power(long k) const {
  long r = k % m_;
  if (r < 0) r += m_;
  // Reduce x^r modulo Phi_m.
  std::vector<__int128> c(static_cast<std::size_t>(std::max<long>(r + 1, phi_)), 0);
  c[static_cast<std::size_t>(r)] = 1;
  for (long i = static_cast<long>(c.size()) - 1; i >= phi_; --i) {
    const __int128 lead = c[static_cast<std::size_t>(i)];
    if (lead == 0) continue;
    for (int t = 0; t <= phi_; ++t) c[static_cast<std::size_t>(i - phi_ + t)] -= lead * cyclo_[static_cast<std::size_t>(t)];
  }
  Elem e{};
  for (int t = 0; t < phi_; ++t) e[static_cast<std::size_t>(t)] = checked(c[static_cast<std::size_t>(t)]);
  return e;
}

CyclotomicRing::Elem CyclotomicRing::add(const Elem& x, const Elem& y) const {
  Elem r{};
  for (int i = 0; i < phi_; ++i) {
    if (__builtin_add_overflow(x[i], y[i], &r[i])) checked(static_cast<__int128>(x[i]) + y[i]);
  }
  return r;
}

CyclotomicRing::Elem CyclotomicRing::sub(const Elem& x, const Elem& y) const {
  Elem r{};
  for (int i = 0; i < phi_; ++i) {
    if (__builtin_sub_overflow(x[i], y[i], &r[i])) checked(static_cast<__int128>(x[i]) - y[i]);
  }
  return r;
}

CyclotomicRing::Elem CyclotomicRing::neg(const Elem& x) const {
  Elem r{};
  for (int i = 0; i < phi_; ++i) r[i] = -x[i];
  return r;
}

CyclotomicRing::Elem CyclotomicRing::mul(const Elem& x, const Elem& y) const {
  __int128 c[2 * kMaxDegree];
  const int top = 2 * phi_ - 1;
  for (int i = 0; i < top; ++i) c[i] = 0;
  for (int i = 0; i < phi_; ++i) {
    if (x[i] == 0) continue;
    const __int128 xi = x[i];
    for (int j = 0; j < phi_; ++j) c[i + j] += xi * y[j];
  }
  for (int i = top - 1; i >= phi_; --i) {
    const __int128 lead = c[i];
    if (lead == 0) continue;
    for (int t = 0; t < phi_; ++t) c[i - phi_ + t] -= lead * cyclo_[static_cast<std::size_t>(t)];
  }
  Elem r;
  for (int i = 0; i < phi_; ++i) r[i] = checked(c[i]);
  for (int i = phi_; i < kMaxDegree; ++i) r[i] = 0;
  return r;
}

CyclotomicRing::Elem CyclotomicRing::conj(const Elem& x) const {
  std::array<__int128, kMaxDegree> c{};
  for (int k = 0; k < phi_; ++k) {
    if (x[k] == 0) continue;
    for (int t = 0; t < phi_; ++t) c[t] += static_cast<__int128>(x[k]) * conj_basis_[static_cast<std::size_t>(k)][t];
  }
  Elem r{};
  for (int i = 0; i < phi_; ++i) r[i] = checked(c[i]);
  return r;
}

bool CyclotomicRing::is_zero(const Elem& x) const {
  for (int i = 0; i < phi_; ++i) {
    if (x[i] != 0) return false;
  }
  return true;
}

bool CyclotomicRing::equal(const Elem& x, const Elem& y) const {
  for (int i = 0; i < phi_; ++i) {
    if (x[i] != y[i]) return false;
  }
  return true;
}

std::complex<long double> CyclotomicRing::embed(const Elem& x, int j) const {
  std::complex<long double> acc = 0;
  const long double base = 2.0L * std::numbers::pi_v<long double> * j / m_;
  for (int k = 0; k < phi_; ++k) {
    if (x[k] != 0) acc += static_cast<long double>(x[k]) * std::polar(1.0L, base * k);
  }
  return acc;
}

CyclotomicRing::Elem CyclotomicRing::from_embeddings(const std::vector<std::complex<long double>>& values) const {
  const auto n = static_cast<std::size_t>(phi_);
  if (values.size() != n) throw Error(ErrorKind::input, "embedding vector has wrong size");
  // Vandermonde system V c = values with V[t][k] = zeta^(units[t] k); Gaussian elimination.
  using C = std::complex<long double>;
  std::vector<std::vector<C>> a(n, std::vector<C>(n + 1));
  for (std::size_t t = 0; t < n; ++t) {
    const long double base = 2.0L * std::numbers::pi_v<long double> * units_[t] / m_;
    for (std::size_t k = 0; k < n; ++k) a[t][k] = std::polar(1.0L, base * static_cast<long double>(k));
    a[t][n] = values[t];
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const C f = a[r][col] / a[col][col];
      for (std::size_t k = col; k <= n; ++k) a[r][k] -= f * a[col][k];
    }
  }
  Elem e{};
  for (std::size_t k = 0; k < n; ++k) {
    const C c = a[k][n] / a[k][k];
    const long double rounded = std::round(c.real());
    if (std::abs(c.real() - rounded) > 1e-6L || std::abs(c.imag()) > 1e-6L) {
      throw Error(ErrorKind::construction, "value is not a cyclotomic integer");
    }
    e[k] = static_cast<std::int64_t>(rounded);
  }
  return e;
}

}  // namespace surfzeta::group
