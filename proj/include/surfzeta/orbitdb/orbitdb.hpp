#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "surfzeta/group/automaton.hpp"
#include "surfzeta/group/presentation.hpp"
#include "surfzeta/replin/representation.hpp"

namespace surfzeta::orbitdb {

using group::Letter;

enum class WeightMode { top, spread };
const char* to_string(WeightMode m) noexcept;
WeightMode parse_weight_mode(const std::string& s);

struct Cutoff {
  enum class Mode { length, weight };
  Mode mode = Mode::length;
  double value = 0;
};

struct PrimitiveClassRecord {
  std::vector<Letter> word;  // canonical cyclic word: a least rotation
  int p = 0;
  double d_top = 0;
  double d_spread = 0;
  std::vector<std::complex<double>> mu;
  std::vector<int> ab;
  std::uint64_t fp = 0;

  double weight(WeightMode m) const noexcept { return m == WeightMode::top ? d_top : d_spread; }
};

class OrbitDatabase {
 public:
  std::vector<PrimitiveClassRecord> records;
  Cutoff cutoff;
  /// Every primitive class of word length <= n_max is present (before weight filtering).
  int n_max = 0;
  std::string rep_digest;
  WeightMode weight_mode = WeightMode::top;
  int genus = 2;
  std::size_t d = 2;

  /// Largest weight up to which the database is treated as complete: the
  /// smallest weight among classes of length n_max (classes beyond n_max are
  /// assumed heavier), or the weight cutoff itself.
  double complete_weight() const;
  double max_weight() const;
};

struct EnumerateOptions {
  WeightMode weight_mode = WeightMode::top;
  double proximality_tol = 1e-6;
  int conjugator_radius = 3;
  unsigned threads = 1;
  std::size_t max_records = 20'000'000;
};

/// Statistics of the closed-path enumeration.
struct EnumerationStats {
  std::size_t lyndon_cycles = 0;   // distinct primitive closed-path labels
  std::size_t merged = 0;          // labels found conjugate to another label
  std::size_t powers_dropped = 0;  // labels conjugate to a proper power
};

/// Enumerates primitive closed paths of the start-deleted coding graph up to the
/// cutoff, canonicalizes them by least rotation, merges labels that represent
/// the same conjugacy class (exact test: equal trace and finite-quotient cycle
/// types, then a short conjugator),
/// and attaches spectral data. Hard domain error on a non-proximal class.
OrbitDatabase enumerate_primitive_classes(const group::CodingAutomaton& a, const group::GroupPresentation& p,
                                          const replin::Representation& rep, const Cutoff& cutoff,
                                          const EnumerateOptions& opts = {}, EnumerationStats* stats = nullptr);

/// Independent oracle: all cyclically reduced words up to n_max, exact conjugacy
/// union-find, primitives kept. Checks that conjugation invariants (under `rep`
/// and a twist-deformed auxiliary representation drawn from `seed`) agree across
/// each class; disagreement is a consistency error.
OrbitDatabase brute_force_classes(const group::GroupPresentation& p, const replin::Representation& rep, int n_max,
                                  std::uint64_t seed = 1, WeightMode weight_mode = WeightMode::top);

/// Spectral data for one class word; domain error if not proximal.
PrimitiveClassRecord make_record(const group::GroupPresentation& p, const replin::Representation& rep,
                                 std::vector<Letter> word, double proximality_tol = 1e-6);

/// Lemma-stuff residual |prod|mu_j| - e^{-d d_top}| / e^{-d d_top}.
double multiplier_residual(const PrimitiveClassRecord& r, std::size_t d);

/// JSON-lines: one header line then one record per line. `extra_header` is a
/// JSON object merged into the header (config digest, version, ...).
void save(const OrbitDatabase& db, const std::string& path, const group::GroupPresentation& p,
          const std::string& extra_header = "{}");
/// Staleness error if `expected_digest` is non-empty and differs from the file;
/// corruption error if any record breaks the multiplier identity.
OrbitDatabase load(const std::string& path, const group::GroupPresentation& p, const std::string& expected_digest = "");

}  // namespace surfzeta::orbitdb
