// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Databases are built once and shared between criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "surfzeta/error.hpp"
#include "surfzeta/group/automaton.hpp"
#include "surfzeta/group/ball.hpp"
#include "surfzeta/orbitdb/orbitdb.hpp"
#include "surfzeta/replin/character.hpp"
#include "surfzeta/replin/representation.hpp"
#include "surfzeta/zeta/zeta.hpp"

using namespace surfzeta;
using zeta::cplx;

namespace {

// tolerances, pinned
constexpr double kTolLemma = 1e-9;
constexpr double kTolAlternating = 1e-10;
constexpr double kTolRatioIdentity = 1e-8;
constexpr double kTolCrossMethod = 1e-4;
constexpr double kEntropyLo = 1.9, kEntropyHi = 2.1;
constexpr double kTolLift = 1e-9;
constexpr double kCountLo = 0.8, kCountHi = 1.2;
constexpr double kTolTrivialChar = 1e-12;
constexpr double kTolLi = 1e-3;
constexpr double kAutomatonSeconds = 60;
constexpr double kCrossMethodSeconds = 600;

// growth series of the genus-2 surface group, (1+2z+2z^2+2z^3+z^4)/(1-6z-6z^2-6z^3+z^4)
const std::vector<std::uint64_t> kSpheres = {1, 8, 56, 392, 2736, 19096, 133288, 930328, 6493536};
// li(10^6) - li(2), mpmath at 30 digits
constexpr double kLiMillion = 78626.5039956821;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %-32s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void guarded(int id, const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("threw: ") + e.what());
  }
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

orbitdb::OrbitDatabase restrict_length(const orbitdb::OrbitDatabase& db, int n) {
  orbitdb::OrbitDatabase out;
  out.cutoff = {orbitdb::Cutoff::Mode::length, static_cast<double>(n)};
  out.n_max = n;
  out.rep_digest = db.rep_digest;
  out.weight_mode = db.weight_mode;
  out.genus = db.genus;
  out.d = db.d;
  for (const auto& r : db.records) {
    if (static_cast<int>(r.word.size()) <= n) out.records.push_back(r);
  }
  return out;
}

bool all_proximal(const orbitdb::OrbitDatabase& db, const replin::Representation& rep, std::size_t& checked) {
  checked = 0;
  for (const auto& r : db.records) {
    if (!replin::proximality_check(rep.word_spectrum(r.word)).proximal) return false;
    ++checked;
  }
  return true;
}

}  // namespace

int main() {
  const auto t_all = Clock::now();
  group::GroupPresentation p(2);
  const auto rep2 = replin::fuchsian_octagon(2);
  const auto rep3 = replin::symmetric_power_lift(rep2, 3);
  const auto rep4 = replin::symmetric_power_lift(rep2, 4);

  // 1. automaton validity
  std::optional<group::CodingAutomaton> automaton;
  guarded(1, "automaton validity", [&] {
    const auto t0 = Clock::now();
    automaton.emplace(group::build_coding_automaton(p));
    const auto paths = automaton->path_counts(8);
    const auto bfs = group::sphere_sizes(p, 8);
    const double secs = since(t0);
    const bool ok = paths == bfs && bfs == kSpheres && paths[2] == 56 && secs < kAutomatonSeconds;
    report(1, "automaton validity", ok,
           fmt("paths==BFS==growth series for n<=8, S(2)=%g, S(8)=%g, %.1f s", static_cast<double>(paths[2]),
               static_cast<double>(paths[8]), secs));
  });
  if (!automaton) automaton.emplace(group::build_coding_automaton(p));

  std::printf("building databases: d=2 n<=9, d=3 n<=8, d=4 n<=7\n");
  std::fflush(stdout);
  auto t0 = Clock::now();
  const auto db9 = orbitdb::enumerate_primitive_classes(*automaton, p, rep2, {orbitdb::Cutoff::Mode::length, 9});
  std::printf("  d=2 n<=9: %zu classes, %.1f s\n", db9.records.size(), since(t0));
  t0 = Clock::now();
  const auto db3 = orbitdb::enumerate_primitive_classes(*automaton, p, rep3, {orbitdb::Cutoff::Mode::length, 8});
  std::printf("  d=3 n<=8: %zu classes, %.1f s\n", db3.records.size(), since(t0));
  t0 = Clock::now();
  const auto db4 = orbitdb::enumerate_primitive_classes(*automaton, p, rep4, {orbitdb::Cutoff::Mode::length, 7});
  std::printf("  d=4 n<=7: %zu classes, %.1f s\n", db4.records.size(), since(t0));
  std::fflush(stdout);

  const zeta::ZetaData z9(db9);
  const auto db8 = restrict_length(db9, 8);
  const zeta::ZetaData z8(db8);
  const zeta::ZetaData z3(db3);
  const auto h9 = zeta::entropy(z9);
  const auto h8 = zeta::entropy(z8);
  std::printf("entropy estimates: n=8 %.12f, n=9 %.12f\n", h8.value, h9.value);

  // 2. multiplier product identity
  guarded(2, "multiplier product identity", [&] {
    double worst2 = 0, worst3 = 0;
    for (const auto& r : db9.records) worst2 = std::max(worst2, orbitdb::multiplier_residual(r, 2));
    for (const auto& r : db3.records) worst3 = std::max(worst3, orbitdb::multiplier_residual(r, 3));
    report(2, "multiplier product identity", worst2 <= kTolLemma && worst3 <= kTolLemma,
           fmt("max rel residual d=2 %.2e (%g classes), d=3 %.2e (%g classes)", worst2,
               static_cast<double>(db9.records.size()), worst3, static_cast<double>(db3.records.size())));
  });

  // 3. alternating trace identity
  guarded(3, "alternating trace identity", [&] {
    const double h = h9.value;
    const std::vector<cplx> ss = {{h + 1, 0}, {h + 0.5, 2}, {h + 1.5, -3}, {h + 2, 10}, {h + 0.25, 0.7}};
    double worst = 0;
    for (cplx s : ss) worst = std::max(worst, zeta::TraceTable(z9, s, 8).alternating_residual());
    report(3, "alternating trace identity", worst <= kTolAlternating, fmt("n<=8, 5 values of s, max rel %.2e", worst));
  });

  // 4. zeta = Z(s+1)/Z(s), untwisted and twisted
  guarded(4, "zeta/Selberg ratio identity", [&] {
    const double h = h9.value;
    const auto chi = replin::UnitaryCharacter::abelianization(2, {0.1, 0.25, 0.4, 0.7});
    double worst = 0, worst_l = 0;
    for (cplx s : {cplx(h + 1, 0), cplx(h + 1, 0.7)}) {
      worst = std::max(worst, rel(zeta::euler_selberg(z9, s + 1.0, zeta::kNoCutoff, 40) / zeta::euler_selberg(z9, s, zeta::kNoCutoff, 40),
                                  zeta::euler_zeta(z9, s)));
      worst_l = std::max(worst_l, rel(zeta::l_euler_selberg(z9, chi, s + 1.0, zeta::kNoCutoff, 40) /
                                          zeta::l_euler_selberg(z9, chi, s, zeta::kNoCutoff, 40),
                                      zeta::l_euler_zeta(z9, chi, s)));
    }
    report(4, "zeta/Selberg ratio identity", worst <= kTolRatioIdentity && worst_l <= kTolRatioIdentity,
           fmt("N_n=40, max rel untwisted %.2e, twisted %.2e", worst, worst_l));
  });

  // 5. Euler product vs determinant ratio
  guarded(5, "Euler vs determinants", [&] {
    const auto t = Clock::now();
    const auto db = orbitdb::enumerate_primitive_classes(*automaton, p, rep2, {orbitdb::Cutoff::Mode::length, 8});
    const zeta::ZetaData z(db);
    const auto h = zeta::entropy(z);
    const cplx s(h.value + 1, 0);
    const cplx e = zeta::euler_zeta(z, s);
    const cplx d = zeta::zeta_via_determinants(z, s, 12);
    const double secs = since(t);
    const double r = rel(d, e);
    report(5, "Euler vs determinants", r <= kTolCrossMethod && secs < kCrossMethodSeconds,
           fmt("n_max=8, N=12, s=%.6f: rel %.2e, %.1f s end to end", s.real(), r, secs));
  });

  // 6. entropy anchor
  guarded(6, "entropy anchor", [&] {
    report(6, "entropy anchor", h9.value >= kEntropyLo && h9.value <= kEntropyHi,
           fmt("h_est=%.6f at n_max=9 (bracket %.6f..%.6f)", h9.value, h9.lo, h9.hi));
  });

  // 7. symmetric-power scaling
  guarded(7, "symmetric-power scaling", [&] {
    std::map<std::vector<group::Letter>, double> base;
    for (const auto& r : db8.records) base[r.word] = r.d_top;
    bool same = db3.records.size() == base.size();
    double worst = 0;
    for (const auto& r : db3.records) {
      const auto it = base.find(r.word);
      if (it == base.end()) {
        same = false;
        break;
      }
      worst = std::max(worst, std::abs(r.d_top - 2 * it->second) / (2 * it->second));
    }
    const auto h3 = zeta::entropy(z3);
    const double halving = std::abs(h3.value - h8.value / 2) / (h8.value / 2);
    report(7, "symmetric-power scaling", same && worst <= kTolLift && halving <= kTolLift,
           fmt("n<=8: max rel weight error %.2e; h(d=3)=%.12f vs h(d=2)/2=%.12f (rel %.2e)", worst, h3.value,
               h8.value / 2, halving));
  });

  // 8. proximality
  guarded(8, "proximality", [&] {
    std::size_t c2 = 0, c3 = 0, c4 = 0;
    const bool ok = all_proximal(db9, rep2, c2) && all_proximal(db3, rep3, c3) && all_proximal(db4, rep4, c4);
    report(8, "proximality", ok,
           fmt("proximal: d=2 %g/%g (n<=9), d=3 %g (n<=8), d=4 %g (n<=7)", static_cast<double>(c2),
               static_cast<double>(db9.records.size()), static_cast<double>(c3), static_cast<double>(c4)));
  });

  // 9. counting; T values fixed in advance: the largest complete T and two steps below it
  guarded(9, "counting vs li", [&] {
    const double tc = db9.complete_weight();
    const auto rows = zeta::counting_report(z9, {tc - 2, tc - 1, tc}, h9.value);
    const bool in_band = rows[2].ratio >= kCountLo && rows[2].ratio <= kCountHi;
    const bool monotone = std::abs(rows[1].ratio - 1) < std::abs(rows[0].ratio - 1) &&
                          std::abs(rows[2].ratio - 1) < std::abs(rows[1].ratio - 1);
    std::string detail = fmt("T_c=%.4f; ratios %.4f, %.4f, ", tc, rows[0].ratio, rows[1].ratio);
    detail += fmt("%.4f; in band: ", rows[2].ratio) + (in_band ? "yes" : "no") + "; monotone toward 1: " + (monotone ? "yes" : "no");
    report(9, "counting vs li", in_band && monotone, detail);
  });

  // 10. zero localization
  guarded(10, "zero localization", [&] {
    const double h = h9.value;
    const auto t = Clock::now();
    zeta::ScanOptions opts;
    opts.which = zeta::ScanFunction::selberg;
    opts.N = 9;
    opts.K = 20;
    const auto g = zeta::scan(z9, h - 0.3, h + 0.3, -0.3, 0.3, 41, 41, opts);
    const auto [i, j] = g.argmin();
    const cplx s = g.node(i, j);
    const double cell_re = 0.6 / 40, cell_im = 0.6 / 40;
    const bool ok = std::abs(s.real() - h) <= cell_re * (1 + 1e-9) && std::abs(s.imag()) <= cell_im * (1 + 1e-9);
    report(10, "zero localization", ok,
           fmt("41x41 determinant Selberg, N=9, K=20: argmin %.5f%+.5fi, h_est %.5f (cell %.4f)", s.real(), s.imag(), h,
               cell_re) +
               fmt(", %.1f s", since(t)));
  });

  // 11. trivial character reduction
  guarded(11, "trivial character reduction", [&] {
    const auto triv = replin::UnitaryCharacter::trivial(2);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> re(h8.value + 0.5, h8.value + 3), im(-20, 20);
    double worst = 0;
    for (int k = 0; k < 10; ++k) {
      const cplx s(re(rng), im(rng));
      worst = std::max(worst, rel(zeta::l_euler_zeta(z8, triv, s), zeta::euler_zeta(z8, s)));
      worst = std::max(worst, rel(zeta::l_euler_selberg(z8, triv, s), zeta::euler_selberg(z8, s)));
    }
    report(11, "trivial character reduction", worst <= kTolTrivialChar, fmt("10 random s, max rel %.2e", worst));
  });

  // 12. li oracle
  guarded(12, "li oracle", [&] {
    const double v = zeta::li(1e6);
    const double r = std::abs(v - kLiMillion) / kLiMillion;
    const bool zero = zeta::li(2.0) == 0.0;
    report(12, "li oracle", r <= kTolLi && zero, fmt("li(1e6)=%.6f (rel %.2e), li(2)=%g", v, r, zeta::li(2.0)));
  });

  std::printf("%d of 12 criteria failed, %.1f s total\n", failures, since(t_all));
  return failures == 0 ? 0 : 1;
}
