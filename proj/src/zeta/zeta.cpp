#include "surfzeta/zeta/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <thread>

#include "surfzeta/error.hpp"

namespace surfzeta::zeta {
namespace {

constexpr double kPoleEps = 1e-14;
constexpr double kDegenerateEps = 1e-13;

cplx log_one_minus(cplx x) {
  const cplx f = 1.0 - x;
  if (std::abs(f) < kPoleEps) throw Error(ErrorKind::pole_proximity, "Euler factor vanishes: s is at a pole");
  return std::log(f);
}

bool close_mu(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12) return false;
  }
  return true;
}

// coefficients e_0..e_k of prod (1 + mu_i x)
std::vector<cplx> elementary_symmetric(const std::vector<cplx>& mu) {
  std::vector<cplx> e(mu.size() + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t k = i + 1; k > 0; --k) e[k] += mu[i] * e[k - 1];
  }
  return e;
}

// even and odd products of the truncated determinants
std::pair<cplx, cplx> det_products(const TraceTable& t, int N) {
  cplx even = 1.0, odd = 1.0;
  for (std::size_t j = 0; j <= t.j_max(); ++j) {
    const cplx v = fredholm_det(t, j, N).value;
    (j % 2 == 0 ? even : odd) *= v;
  }
  return {even, odd};
}

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double eps, int depth) {
  const double m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15 * eps) return left + right + diff / 15;
  return simpson(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) + simpson(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}

}  // namespace

ZetaData::ZetaData(const orbitdb::OrbitDatabase& db) : db_(&db) {
  const auto& rs = db.records;
  order_.resize(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) order_[i] = i;
  std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    const double wa = weight(a), wb = weight(b);
    return wa != wb ? wa < wb : a < b;
  });

  std::vector<std::size_t> by_class = order_;
  std::stable_sort(by_class.begin(), by_class.end(), [&](std::size_t a, std::size_t b) {
    if (rs[a].p != rs[b].p) return rs[a].p < rs[b].p;
    const double wa = weight(a), wb = weight(b);
    if (std::abs(wa - wb) > 1e-12 * wa) return wa < wb;
    for (std::size_t k = 0; k < rs[a].mu.size(); ++k) {
      if (rs[a].mu[k].real() != rs[b].mu[k].real()) return rs[a].mu[k].real() < rs[b].mu[k].real();
      if (rs[a].mu[k].imag() != rs[b].mu[k].imag()) return rs[a].mu[k].imag() < rs[b].mu[k].imag();
    }
    return false;
  });
  for (std::size_t i : by_class) {
    const auto& r = rs[i];
    const double w = weight(i);
    if (!entries_.empty()) {
      auto& e = entries_.back();
      if (e.p == r.p && std::abs(e.w - w) <= 1e-12 * w && close_mu(e.mu, r.mu)) {
        e.mult += 1;
        continue;
      }
    }
    entries_.push_back(SpectrumEntry{r.p, w, r.mu, 1.0});
  }
  std::stable_sort(entries_.begin(), entries_.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.w < b.w; });
}

cplx euler_zeta(const ZetaData& z, cplx s, double T) {
  cplx acc = 0.0;
  for (const auto& e : z.entries()) {
    if (e.w > T) break;
    acc -= e.mult * log_one_minus(std::exp(-s * e.w));
  }
  return std::exp(acc);
}

cplx euler_selberg(const ZetaData& z, cplx s, double T, int N_n) {
  if (N_n < 0) throw Error(ErrorKind::input, "N_n must be >= 0");
  cplx acc = 0.0;
  for (const auto& e : z.entries()) {
    if (e.w > T) break;
    const cplx q = std::exp(-s * e.w), step = std::exp(-e.w);
    cplx x = q;
    for (int n = 0; n <= N_n; ++n, x *= step) acc += e.mult * log_one_minus(x);
  }
  return std::exp(acc);
}

TraceBasis::TraceBasis(const ZetaData& z, int n_max) : n_max_(n_max), d_(z.dimension()) {
  if (n_max < 0) throw Error(ErrorKind::input, "trace table needs n_max >= 0");
  std::vector<cplx> mu_m;
  for (const auto& e : z.entries()) {
    if (e.p > n_max) continue;
    mu_m.assign(e.mu.begin(), e.mu.end());
    for (int m = 1; m * e.p <= n_max; ++m) {
      cplx den = 1.0;
      for (const auto& v : mu_m) {
        const cplx f = 1.0 - v;
        if (std::abs(f) < kDegenerateEps) throw Error(ErrorKind::degenerate_multiplier, "multiplier power is 1");
        den *= f;
      }
      const auto ej = elementary_symmetric(mu_m);
      n_.push_back(m * e.p);
      mw_.push_back(m * e.w);
      scale_.push_back(e.mult * e.p);
      for (std::size_t j = 0; j < d_; ++j) coef_.push_back(e.mult * e.p * ej[j] / den);
      for (std::size_t k = 0; k < mu_m.size(); ++k) mu_m[k] *= e.mu[k];
    }
  }
}

TraceTable::TraceTable(const ZetaData& z, cplx s, int n_max) : TraceTable(TraceBasis(z, n_max), s) {}

TraceTable::TraceTable(const TraceBasis& b, cplx s, std::span<const cplx> term_exp) : s_(s), n_max_(b.n_max_) {
  if (!term_exp.empty() && term_exp.size() != b.size()) throw Error(ErrorKind::input, "term exponentials do not match the basis");
  const std::size_t d = b.d_;
  t_.assign(d, std::vector<cplx>(static_cast<std::size_t>(n_max_) + 1, 0.0));
  rhs_.assign(static_cast<std::size_t>(n_max_) + 1, 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const cplx q = term_exp.empty() ? std::exp(-s * b.mw_[i]) : term_exp[i];
    const auto n = static_cast<std::size_t>(b.n_[i]);
    for (std::size_t j = 0; j < d; ++j) t_[j][n] += b.coef_[i * d + j] * q;
    rhs_[n] += b.scale_[i] * q;
  }
}

cplx TraceTable::at(std::size_t j, int n) const {
  if (j >= t_.size()) throw Error(ErrorKind::input, "form degree j out of range 0.." + std::to_string(t_.size() - 1));
  if (n < 1 || n > n_max_) throw Error(ErrorKind::input, "trace index n out of range");
  return t_[j][static_cast<std::size_t>(n)];
}

cplx TraceTable::weight_sum(int n) const {
  if (n < 1 || n > n_max_) throw Error(ErrorKind::input, "trace index n out of range");
  return rhs_[static_cast<std::size_t>(n)];
}

double TraceTable::alternating_residual() const {
  double worst = 0;
  for (int n = 1; n <= n_max_; ++n) {
    cplx alt = 0.0;
    for (std::size_t j = 0; j < t_.size(); ++j) alt += (j % 2 == 0 ? 1.0 : -1.0) * t_[j][static_cast<std::size_t>(n)];
    const cplx r = rhs_[static_cast<std::size_t>(n)];
    if (std::abs(r) == 0) {
      worst = std::max(worst, std::abs(alt));
      continue;
    }
    worst = std::max(worst, std::abs(alt - r) / std::abs(r));
  }
  return worst;
}

cplx trace(const ZetaData& z, cplx s, std::size_t j, int n) {
  if (j >= z.dimension()) throw Error(ErrorKind::input, "form degree j out of range");
  return TraceTable(z, s, n).at(j, n);
}

FredholmDet fredholm_det(const TraceTable& t, std::size_t j, int N) {
  if (N < 0 || N > t.n_max()) throw Error(ErrorKind::input, "determinant truncation exceeds the trace table");
  FredholmDet out;
  out.coeffs.assign(static_cast<std::size_t>(N) + 1, 0.0);
  out.coeffs[0] = 1.0;
  for (int m = 1; m <= N; ++m) {
    cplx acc = 0.0;
    for (int k = 1; k <= m; ++k) acc += out.coeffs[static_cast<std::size_t>(m - k)] * t.at(j, k);
    out.coeffs[static_cast<std::size_t>(m)] = -acc / static_cast<double>(m);
  }
  out.value = 0.0;
  for (const auto& c : out.coeffs) out.value += c;
  return out;
}

cplx fredholm_det_exp(const TraceTable& t, std::size_t j, int N) {
  if (N < 0 || N > t.n_max()) throw Error(ErrorKind::input, "determinant truncation exceeds the trace table");
  cplx acc = 0.0;
  for (int n = 1; n <= N; ++n) acc -= t.at(j, n) / static_cast<double>(n);
  return std::exp(acc);
}

cplx zeta_via_determinants(const ZetaData& z, cplx s, int N) { return zeta_via_determinants(TraceBasis(z, N), s); }

cplx zeta_via_determinants(const TraceBasis& b, cplx s) {
  const TraceTable t(b, s);
  const auto [even, odd] = det_products(t, b.n_max());
  if (std::abs(even) < 1e-300) throw Error(ErrorKind::pole_proximity, "even determinant product vanishes");
  return odd / even;
}

cplx selberg_via_determinants(const ZetaData& z, cplx s, int N, int K) {
  return selberg_via_determinants(TraceBasis(z, N), s, K);
}

cplx selberg_via_determinants(const TraceBasis& b, cplx s, int K) {
  if (K < 0) throw Error(ErrorKind::input, "K must be >= 0");
  // e^{-(s+k) m w} = e^{-s m w} (e^{-m w})^k
  const auto& mw = b.exponents();
  std::vector<cplx> ex(mw.size());
  std::vector<double> decay(mw.size());
  for (std::size_t i = 0; i < mw.size(); ++i) {
    ex[i] = std::exp(-s * mw[i]);
    decay[i] = std::exp(-mw[i]);
  }
  cplx acc = 1.0;
  for (int k = 0; k <= K; ++k) {
    const TraceTable t(b, s + static_cast<double>(k), ex);
    const auto [even, odd] = det_products(t, b.n_max());
    if (std::abs(odd) < 1e-300) throw Error(ErrorKind::pole_proximity, "odd determinant product vanishes");
    acc *= even / odd;
    for (std::size_t i = 0; i < ex.size(); ++i) ex[i] *= decay[i];
  }
  return acc;
}

EntropyEstimate entropy(const ZetaData& z, double tol) {
  const auto& db = z.db();
  const int n_max = db.n_max;
  if (n_max < 6) throw Error(ErrorKind::completeness, "entropy needs a database complete to length >= 6");
  if (db.records.empty()) throw Error(ErrorKind::completeness, "entropy needs a non-empty database");
  const auto& es = z.entries();

  // log F_n(s), F_n(s) = sum_{p | n} p e^{-s (n/p) w}
  auto log_f = [&](int n, double s) {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& e : es) {
      if (n % e.p == 0) top = std::max(top, -s * (n / e.p) * e.w);
    }
    double acc = 0;
    for (const auto& e : es) {
      if (n % e.p == 0) acc += e.mult * e.p * std::exp(-s * (n / e.p) * e.w - top);
    }
    return top + std::log(acc);
  };
  auto pressure = [&](int n, double s) { return log_f(n, s) - log_f(n - 1, s); };

  double w_max = 0;
  for (const auto& e : es) w_max = std::max(w_max, e.w);
  const double s_hi = 2.0 / w_max * std::log(static_cast<double>(db.records.size()));

  // the per-n pressure need not be monotone (period parity effects), so take the
  // first downward crossing on a fixed grid over [0, s_hi], then bisect
  auto root = [&](int n) -> double {
    constexpr int kSteps = 256;
    double lo = 0;
    if (!(pressure(n, lo) > 0)) return std::numeric_limits<double>::quiet_NaN();
    double hi = lo;
    bool found = false;
    for (int k = 1; k <= kSteps && !found; ++k) {
      hi = s_hi * k / kSteps;
      if (pressure(n, hi) < 0) {
        found = true;
      } else {
        lo = hi;
      }
    }
    if (!found) return std::numeric_limits<double>::quiet_NaN();
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
      const double mid = (lo + hi) / 2;
      (pressure(n, mid) > 0 ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
  };

  EntropyEstimate est;
  for (int n = 2; n <= n_max; ++n) est.diagnostics.push_back(root(n));
  // small even n can lack a crossing; use the two largest n that have one
  std::vector<int> found;
  for (int n = n_max; n >= 2 && found.size() < 2; --n) {
    if (!std::isnan(est.diagnostics[n - 2])) found.push_back(n);
  }
  if (found.empty() || found.front() < n_max - 1) {
    throw Error(ErrorKind::bracketing, "pressure has no sign change on [0, " + std::to_string(s_hi) + "]");
  }
  est.n_used = found.front();
  est.value = est.diagnostics[found.front() - 2];
  const double prev = found.size() > 1 ? est.diagnostics[found[1] - 2] : est.value;
  est.lo = std::min(prev, est.value);
  est.hi = std::max(prev, est.value);
  return est;
}

std::size_t count_pi(const ZetaData& z, double T) {
  const double limit = z.db().complete_weight();
  if (T > limit * (1 + 1e-12)) {
    throw Error(ErrorKind::completeness, "T = " + std::to_string(T) + " is beyond the complete weight " + std::to_string(limit));
  }
  const auto& order = z.by_weight();
  const auto it = std::upper_bound(order.begin(), order.end(), T, [&](double t, std::size_t i) { return t < z.weight(i); });
  return static_cast<std::size_t>(it - order.begin());
}

double li(double x) {
  if (!(x >= 2)) throw Error(ErrorKind::domain, "li(x) is defined here for x >= 2");
  if (x == 2) return 0;
  // u = e^t turns 1/log u du into e^t / t dt, which is smooth on [log 2, log x]
  const std::function<double(double)> f = [](double t) { return std::exp(t) / t; };
  const double a = std::log(2.0), b = std::log(x);
  // split so each piece carries comparable mass
  const int pieces = std::max(1, static_cast<int>(std::ceil(b - a)));
  double total = 0;
  for (int k = 0; k < pieces; ++k) {
    const double lo = a + (b - a) * k / pieces, hi = a + (b - a) * (k + 1) / pieces;
    const double flo = f(lo), fhi = f(hi), fm = f((lo + hi) / 2);
    const double whole = (hi - lo) / 6 * (flo + 4 * fm + fhi);
    total += simpson(f, lo, hi, flo, fm, fhi, whole, 1e-12 * std::abs(whole), 50);
  }
  return total;
}

std::vector<CountingRow> counting_report(const ZetaData& z, const std::vector<double>& T_list, double h) {
  std::vector<CountingRow> rows;
  for (double T : T_list) {
    CountingRow r;
    r.T = T;
    r.pi = count_pi(z, T);
    const double x = std::exp(h * T);
    r.li = x >= 2 ? li(x) : 0.0;
    r.ratio = r.li > 0 ? static_cast<double>(r.pi) / r.li : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(r);
  }
  return rows;
}

cplx ScanGrid::node(std::size_t i_re, std::size_t i_im) const {
  const double re = n_re > 1 ? re_min + (re_max - re_min) * static_cast<double>(i_re) / static_cast<double>(n_re - 1) : re_min;
  const double im = n_im > 1 ? im_min + (im_max - im_min) * static_cast<double>(i_im) / static_cast<double>(n_im - 1) : im_min;
  return {re, im};
}

std::pair<std::size_t, std::size_t> ScanGrid::argmin() const {
  std::size_t best = log_abs.size();
  for (std::size_t i = 0; i < log_abs.size(); ++i) {
    if (flag[i] != 0) continue;
    if (best == log_abs.size() || log_abs[i] < log_abs[best]) best = i;
  }
  if (best == log_abs.size()) throw Error(ErrorKind::numeric, "every scan node is flagged");
  return {best % n_re, best / n_re};
}

std::vector<std::pair<std::size_t, std::size_t>> ScanGrid::local_minima() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t j = 1; j + 1 < n_im; ++j) {
    for (std::size_t i = 1; i + 1 < n_re; ++i) {
      if (flag[j * n_re + i] != 0) continue;
      const double v = at(i, j);
      bool is_min = true;
      for (int dj = -1; dj <= 1 && is_min; ++dj) {
        for (int di = -1; di <= 1 && is_min; ++di) {
          if (di == 0 && dj == 0) continue;
          const std::size_t k = (j + static_cast<std::size_t>(dj)) * n_re + i + static_cast<std::size_t>(di);
          if (flag[k] == 0 && log_abs[k] < v) is_min = false;
        }
      }
      if (is_min) out.emplace_back(i, j);
    }
  }
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return at(a.first, a.second) < at(b.first, b.second); });
  return out;
}

ScanGrid scan(const ZetaData& z, double re_min, double re_max, double im_min, double im_max, std::size_t n_re,
              std::size_t n_im, const ScanOptions& opts) {
  if (n_re == 0 || n_im == 0 || !(re_min <= re_max) || !(im_min <= im_max)) throw Error(ErrorKind::input, "empty scan rectangle");
  ScanGrid g{re_min, re_max, im_min, im_max, n_re, n_im, {}, {}};
  g.log_abs.assign(n_re * n_im, 0.0);
  g.flag.assign(n_re * n_im, 0);
  const TraceBasis basis(z, opts.N);
  auto eval = [&](std::size_t k) {
    const cplx s = g.node(k % n_re, k / n_re);
    try {
      cplx v;
      switch (opts.which) {
        case ScanFunction::zeta: v = zeta_via_determinants(basis, s); break;
        case ScanFunction::selberg: v = selberg_via_determinants(basis, s, opts.K); break;
        case ScanFunction::det: v = fredholm_det(TraceTable(basis, s), opts.det_j, opts.N).value; break;
      }
      const double la = std::log(std::abs(v));
      g.log_abs[k] = la;
      if (!std::isfinite(la)) g.flag[k] = 1;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::pole_proximity) throw;
      g.log_abs[k] = std::numeric_limits<double>::quiet_NaN();
      g.flag[k] = 2;
    }
  };
  const unsigned threads = std::max(1U, opts.threads);
  if (threads == 1) {
    for (std::size_t k = 0; k < g.log_abs.size(); ++k) eval(k);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t k = t; k < g.log_abs.size(); k += threads) eval(k);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return g;
}

cplx l_euler_zeta(const ZetaData& z, const replin::UnitaryCharacter& chi, cplx s, double T) {
  const auto& rs = z.db().records;
  cplx acc = 0.0;
  for (std::size_t i : z.by_weight()) {
    const double w = z.weight(i);
    if (w > T) break;
    const cplx q = std::exp(-s * w);
    if (chi.mode() == replin::UnitaryCharacter::Mode::abelianization) {
      acc -= log_one_minus(chi.value_ab(rs[i].ab) * q);
    } else {
      auto m = chi.value_word(rs[i].word);
      m *= -q;
      for (std::size_t k = 0; k < m.rows(); ++k) m(k, k) += 1.0;
      const cplx det = replin::determinant(m);
      if (std::abs(det) < kPoleEps) throw Error(ErrorKind::pole_proximity, "twisted Euler factor vanishes");
      acc -= std::log(det);
    }
  }
  return std::exp(acc);
}

cplx l_euler_selberg(const ZetaData& z, const replin::UnitaryCharacter& chi, cplx s, double T, int N_n) {
  if (N_n < 0) throw Error(ErrorKind::input, "N_n must be >= 0");
  const auto& rs = z.db().records;
  cplx acc = 0.0;
  for (std::size_t i : z.by_weight()) {
    const double w = z.weight(i);
    if (w > T) break;
    const cplx q = std::exp(-s * w), step = std::exp(-w);
    if (chi.mode() == replin::UnitaryCharacter::Mode::abelianization) {
      const cplx c = chi.value_ab(rs[i].ab);
      cplx x = q;
      for (int n = 0; n <= N_n; ++n, x *= step) acc += log_one_minus(c * x);
    } else {
      const auto r = chi.value_word(rs[i].word);
      cplx x = q;
      for (int n = 0; n <= N_n; ++n, x *= step) {
        auto m = r;
        m *= -x;
        for (std::size_t k = 0; k < m.rows(); ++k) m(k, k) += 1.0;
        const cplx det = replin::determinant(m);
        if (std::abs(det) < kPoleEps) throw Error(ErrorKind::pole_proximity, "twisted Euler factor vanishes");
        acc += std::log(det);
      }
    }
  }
  return std::exp(acc);
}

}  // namespace surfzeta::zeta
