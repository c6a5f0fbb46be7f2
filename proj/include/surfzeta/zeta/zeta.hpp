#pragma once

#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "surfzeta/orbitdb/orbitdb.hpp"
#include "surfzeta/replin/character.hpp"

namespace surfzeta::zeta {

using cplx = std::complex<double>;
inline constexpr double kNoCutoff = std::numeric_limits<double>::infinity();

/// Classes sharing period, weight and multipliers, merged with a multiplicity.
/// Arithmetic groups have huge length multiplicities, so this is much smaller
/// than the record list.
struct SpectrumEntry {
  int p = 0;
  double w = 0;
  std::vector<cplx> mu;
  double mult = 0;
};

/// Read-only view of a database prepared for zeta evaluation: records ordered by
/// weight (the order in which logarithms are accumulated) and merged entries.
class ZetaData {
 public:
  explicit ZetaData(const orbitdb::OrbitDatabase& db);

  const orbitdb::OrbitDatabase& db() const noexcept { return *db_; }
  std::size_t dimension() const noexcept { return db_->d; }
  double weight(std::size_t record) const { return db_->records[record].weight(db_->weight_mode); }
  const std::vector<std::size_t>& by_weight() const noexcept { return order_; }
  const std::vector<SpectrumEntry>& entries() const noexcept { return entries_; }

 private:
  const orbitdb::OrbitDatabase* db_;
  std::vector<std::size_t> order_;
  std::vector<SpectrumEntry> entries_;
};

/// Ruelle zeta: prod over classes with weight <= T of (1 - e^{-s w})^{-1}.
cplx euler_zeta(const ZetaData& z, cplx s, double T = kNoCutoff);
/// Selberg zeta: prod_{n=0}^{N_n} prod_[g] (1 - e^{-(s+n) w}).
cplx euler_selberg(const ZetaData& z, cplx s, double T = kNoCutoff, int N_n = 40);

/// The s-independent part of the traces: one term per (entry, m) with m p <= n_max,
/// carrying mult p e_j(mu^m) / prod(1 - mu_i^m) for each j.
class TraceBasis {
 public:
  TraceBasis(const ZetaData& z, int n_max);

  int n_max() const noexcept { return n_max_; }
  std::size_t dimension() const noexcept { return d_; }
  std::size_t size() const noexcept { return n_.size(); }
  /// m w per term: the trace terms are coefficients times e^{-s m w}
  const std::vector<double>& exponents() const noexcept { return mw_; }

 private:
  friend class TraceTable;
  int n_max_;
  std::size_t d_;
  std::vector<int> n_;
  std::vector<double> mw_;     // m w
  std::vector<double> scale_;  // mult p
  std::vector<cplx> coef_;     // d per term
};

/// tr L^n_{s,j} for j = 0..d-1, n = 1..n_max. Traces for n beyond the database
/// length cutoff only contain the stored classes.
class TraceTable {
 public:
  TraceTable(const ZetaData& z, cplx s, int n_max);
  /// `term_exp`, if given, holds e^{-s m w} per basis term (lets callers reuse exponentials)
  TraceTable(const TraceBasis& b, cplx s, std::span<const cplx> term_exp = {});

  cplx s() const noexcept { return s_; }
  std::size_t j_max() const noexcept { return t_.size() - 1; }
  int n_max() const noexcept { return n_max_; }
  cplx at(std::size_t j, int n) const;
  /// sum_{p | n} p e^{-s (n/p) w} over classes: the right side of the alternating identity
  cplx weight_sum(int n) const;
  /// max over n of |sum_j (-1)^j tr - weight_sum| / |weight_sum|
  double alternating_residual() const;

 private:
  cplx s_;
  int n_max_;
  std::vector<std::vector<cplx>> t_;  // t_[j][n]
  std::vector<cplx> rhs_;
};

cplx trace(const ZetaData& z, cplx s, std::size_t j, int n);

struct FredholmDet {
  std::vector<cplx> coeffs;  // c_0 .. c_N
  cplx value;
};

/// det(I - L_{s,j}) truncated to N coefficients of the trace recursion.
FredholmDet fredholm_det(const TraceTable& t, std::size_t j, int N);
/// exp(-sum_{n<=N} tr/n), the other truncation of the same determinant
cplx fredholm_det_exp(const TraceTable& t, std::size_t j, int N);

/// prod_odd det / prod_even det. Pole-proximity error if the even product vanishes.
cplx zeta_via_determinants(const ZetaData& z, cplx s, int N);
cplx zeta_via_determinants(const TraceBasis& b, cplx s);
/// prod_{k=0}^{K} prod_j det(I - L_{s+k,j})^{(-1)^j}
cplx selberg_via_determinants(const ZetaData& z, cplx s, int N, int K = 20);
cplx selberg_via_determinants(const TraceBasis& b, cplx s, int K = 20);

struct EntropyEstimate {
  double value = 0;
  double lo = 0;
  double hi = 0;
  int n_used = 0;
  std::string estimator = "pressure-difference";
  std::vector<double> diagnostics;  // root of the per-n pressure for n = 2..n_used
};

/// Root of log(F_n(s)/F_{n-1}(s)) at n = n_max.
EntropyEstimate entropy(const ZetaData& z, double tol = 1e-13);

std::size_t count_pi(const ZetaData& z, double T);
/// Logarithmic integral from 2 to x, adaptive Simpson.
double li(double x);

struct CountingRow {
  double T = 0;
  std::size_t pi = 0;
  double li = 0;
  double ratio = 0;
};
std::vector<CountingRow> counting_report(const ZetaData& z, const std::vector<double>& T_list, double h);

enum class ScanFunction { zeta, selberg, det };

struct ScanOptions {
  ScanFunction which = ScanFunction::selberg;
  std::size_t det_j = 0;
  int N = 12;
  int K = 20;
  unsigned threads = 1;
};

struct ScanGrid {
  double re_min = 0, re_max = 0, im_min = 0, im_max = 0;
  std::size_t n_re = 0, n_im = 0;
  std::vector<double> log_abs;  // row-major in (im, re)
  std::vector<int> flag;        // 0 ok, 1 overflow or non-finite, 2 pole proximity

  cplx node(std::size_t i_re, std::size_t i_im) const;
  double at(std::size_t i_re, std::size_t i_im) const { return log_abs[i_im * n_re + i_re]; }
  /// grid indices of the smallest unflagged value
  std::pair<std::size_t, std::size_t> argmin() const;
  /// interior local minima, deepest first
  std::vector<std::pair<std::size_t, std::size_t>> local_minima() const;
};

ScanGrid scan(const ZetaData& z, double re_min, double re_max, double im_min, double im_max, std::size_t n_re,
              std::size_t n_im, const ScanOptions& opts = {});

/// Twisted Euler products; factors det(1 - e^{-s w} R_chi([g]))^{-1} (resp. ^{+1}).
cplx l_euler_zeta(const ZetaData& z, const replin::UnitaryCharacter& chi, cplx s, double T = kNoCutoff);
cplx l_euler_selberg(const ZetaData& z, const replin::UnitaryCharacter& chi, cplx s, double T = kNoCutoff,
                     int N_n = 40);

}  // namespace surfzeta::zeta
