#include "surfzeta/replin/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace surfzeta::replin {
namespace {

double sign_of(double a, double b) { return b >= 0 ? std::abs(a) : -std::abs(a); }

void balance(Matrix& a) {
  const std::size_t n = a.rows();
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0;
      double c = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0 || r == 0) continue;
      double g = r / radix;
      double f = 1;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity transforms.
void hessenberg(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t m = 1; m + 1 < n; ++m) {
    double x = 0;
    std::size_t i = m;
    for (std::size_t j = m; j < n; ++j) {
      if (std::abs(a(j, m - 1)) > std::abs(x)) {
        x = a(j, m - 1);
        i = j;
      }
    }
    if (i != m) {
      for (std::size_t j = m - 1; j < n; ++j) std::swap(a(i, j), a(m, j));
      for (std::size_t j = 0; j < n; ++j) std::swap(a(j, i), a(j, m));
    }
    if (x == 0) continue;
    for (i = m + 1; i < n; ++i) {
      double y = a(i, m - 1);
      if (y == 0) continue;
      y /= x;
      a(i, m - 1) = 0;
      for (std::size_t j = m; j < n; ++j) a(i, j) -= y * a(m, j);
      for (std::size_t j = 0; j < n; ++j) a(j, m) += y * a(j, i);
    }
  }
}

// Francis double-shift QR on an upper Hessenberg matrix (destroys a).
std::vector<std::complex<double>> hqr(Matrix& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> wr(static_cast<std::size_t>(n)), wi(static_cast<std::size_t>(n));
  auto A = [&](int i, int j) -> double& { return a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)); };
  double anorm = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(A(i, j));
  }
  const long budget = 100L * n * n;
  long sweeps = 0;
  int nn = n - 1;
  double t = 0;
  double p = 0, q = 0, r = 0, s = 0, w = 0, x = 0, y = 0, z = 0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l > 0; --l) {
        s = std::abs(A(l - 1, l - 1)) + std::abs(A(l, l));
        if (s == 0) s = anorm;
        if (std::abs(A(l, l - 1)) + s == s) {
          A(l, l - 1) = 0;
          break;
        }
      }
      x = A(nn, nn);
      if (l == nn) {
        wr[static_cast<std::size_t>(nn)] = x + t;
        wi[static_cast<std::size_t>(nn)] = 0;
        --nn;
      } else {
        y = A(nn - 1, nn - 1);
        w = A(nn, nn - 1) * A(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + w;
          z = std::sqrt(std::abs(q));
          x += t;
          const auto u = static_cast<std::size_t>(nn);
          if (q >= 0) {
            z = p + sign_of(z, p);
            wr[u - 1] = wr[u] = x + z;
            if (z != 0) wr[u] = x - w / z;
            wi[u - 1] = wi[u] = 0;
          } else {
            wr[u - 1] = wr[u] = x + p;
            wi[u - 1] = -z;
            wi[u] = z;
          }
          nn -= 2;
        } else {
          if (++sweeps > budget) throw Error(ErrorKind::numeric, "QR iteration did not converge");
          if (its > 0 && its % 10 == 0) {
            // exceptional shift
            t += x;
            for (int i = 0; i <= nn; ++i) A(i, i) -= x;
            s = std::abs(A(nn, nn - 1)) + std::abs(A(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = A(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - w) / A(m + 1, m) + A(m, m + 1);
            q = A(m + 1, m + 1) - z - r - s;
            r = A(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(A(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(A(m - 1, m - 1)) + std::abs(z) + std::abs(A(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            A(i + 2, i) = 0;
            if (i != m) A(i + 2, i - 1) = 0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = A(k, k - 1);
              q = A(k + 1, k - 1);
              r = 0;
              if (k + 1 != nn) r = A(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            if ((s = sign_of(std::sqrt(p * p + q * q + r * r), p)) != 0) {
              if (k == m) {
                if (l != m) A(k, k - 1) = -A(k, k - 1);
              } else {
                A(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = A(k, j) + q * A(k + 1, j);
                if (k + 1 != nn) {
                  p += r * A(k + 2, j);
                  A(k + 2, j) -= p * z;
                }
                A(k + 1, j) -= p * y;
                A(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * A(i, k) + y * A(i, k + 1);
                if (k + 1 != nn) {
                  p += z * A(i, k + 2);
                  A(i, k + 2) -= p * r;
                }
                A(i, k + 1) -= p * q;
                A(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l + 1 < nn);
  }
  std::vector<std::complex<double>> out;
  for (int i = 0; i < n; ++i) out.emplace_back(wr[static_cast<std::size_t>(i)], wi[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::input, "eigenvalues of non-square matrix");
  if (m.rows() == 0) return {};
  for (double v : m.data()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::numeric, "non-finite matrix entry");
  }
  Matrix a = m;
  balance(a);
  hessenberg(a);
  return hqr(a);
}

Spectrum make_spectrum(const std::vector<std::complex<double>>& eig, double log_scale) {
  std::vector<std::complex<double>> sorted = eig;
  std::sort(sorted.begin(), sorted.end(), [](const auto& u, const auto& v) {
    const double au = std::abs(u);
    const double av = std::abs(v);
    if (au != av) return au > av;
    if (u.real() != v.real()) return u.real() > v.real();
    return u.imag() > v.imag();
  });
  Spectrum s;
  for (const auto& z : sorted) {
    const double lm = std::log(std::abs(z)) + log_scale;
    s.log_moduli.push_back(lm);
    s.phases.push_back(std::arg(z));
    s.eigenvalues.push_back(std::polar(std::exp(lm), std::arg(z)));
  }
  if (s.dimension() >= 2) {
    s.proximality_gap = std::exp(s.log_moduli[0] - s.log_moduli[1]);
  } else {
    s.proximality_gap = std::numeric_limits<double>::infinity();
  }
  if (!sorted.empty()) {
    s.top_is_real = std::abs(sorted[0].imag()) <= 1e-12 * std::max(1.0, std::abs(sorted[0]));
  }
  return s;
}

Spectrum spectrum(const Matrix& m, double log_scale) { return make_spectrum(eigenvalues(m), log_scale); }

ProximalityResult proximality_check(const Spectrum& s, double tol) {
  ProximalityResult r;
  if (s.dimension() == 0) {
    r.failure = ProximalityFailure{0, 0, "empty spectrum"};
    return r;
  }
  r.gap = s.proximality_gap;
  const double phase = s.phases[0];
  // real within tol: the phase is 0 or pi up to tol
  const bool real = std::abs(std::sin(phase)) <= tol;
  if (!real) {
    r.failure = ProximalityFailure{0, 0, "top eigenvalue is not real"};
    return r;
  }
  if (s.dimension() >= 2 && !(s.log_moduli[0] - s.log_moduli[1] >= std::log1p(tol))) {
    r.failure = ProximalityFailure{0, 1, "top eigenvalue is not strictly dominant"};
    return r;
  }
  r.proximal = true;
  return r;
}

namespace {

void require_proximal(const Spectrum& s, double tol) {
  const auto r = proximality_check(s, tol);
  if (!r.proximal) {
    throw Error(ErrorKind::domain, "non-proximal spectrum: " + r.failure->reason + " (lambda_" +
                                       std::to_string(r.failure->i + 1) + ", lambda_" + std::to_string(r.failure->j + 1) + ")");
  }
}

}  // namespace

double weight_top(const Spectrum& s, double tol) {
  require_proximal(s, tol);
  return s.log_moduli.front();
}

double weight_spread(const Spectrum& s, double tol) {
  require_proximal(s, tol);
  return s.log_moduli.front() - s.log_moduli.back();
}

std::vector<std::complex<double>> projective_multipliers(const Spectrum& s, double tol) {
  require_proximal(s, tol);
  std::vector<std::complex<double>> mu;
  for (std::size_t j = 1; j < s.dimension(); ++j) {
    mu.push_back(std::polar(std::exp(s.log_moduli[j] - s.log_moduli[0]), s.phases[j] - s.phases[0]));
  }
  return mu;
}

std::vector<double> projective_fixed_point(const Matrix& m, double tol) {
  const double scale = m.max_abs();
  if (scale == 0) throw Error(ErrorKind::domain, "zero matrix has no attracting fixed point");
  Matrix a = m;
  a *= 1.0 / scale;
  const auto s = spectrum(a);
  require_proximal(s, tol);
  const double lambda = s.eigenvalues[0].real();
  const std::size_t n = a.rows();
  // inverse iteration with the shift pushed slightly off the eigenvalue
  Matrix shifted = a;
  const double sigma = lambda * (1 + 1e-10) + (lambda == 0 ? 1e-12 : 0);
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= sigma;
  const Matrix solver = inverse(shifted);
  std::vector<double> v(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) v[i] += 0.1 * static_cast<double>(i);
  for (int it = 0; it < 6; ++it) {
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) x[i] += solver(i, j) * v[j];
    }
    const double norm = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i] = x[i] / norm;
  }
  for (double c : v) {
    if (c != 0) {
      if (c < 0) {
        for (auto& e : v) e = -e;
      }
      break;
    }
  }
  return v;
}

Matrix exterior_power(const Matrix& m, std::size_t k) {
  const std::size_t n = m.rows();
  if (k == 0 || k > n) throw Error(ErrorKind::input, "exterior power degree out of range");
  std::vector<std::vector<std::size_t>> subsets;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (cur.size() == k) {
      subsets.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  Matrix out(subsets.size(), subsets.size());
  Matrix minor(k, k);
  for (std::size_t r = 0; r < subsets.size(); ++r) {
    for (std::size_t c = 0; c < subsets.size(); ++c) {
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) minor(i, j) = m(subsets[r][i], subsets[c][j]);
      }
      out(r, c) = determinant(minor);
    }
  }
  return out;
}

}  // namespace surfzeta::replin
