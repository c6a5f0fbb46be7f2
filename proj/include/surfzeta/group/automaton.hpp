#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "surfzeta/group/presentation.hpp"

namespace surfzeta::group {

struct Edge {
  int from = 0;
  int to = 0;
  Letter label = 0;
};

/// Deterministic coding graph: paths from the start vertex spell the
/// shortlex-least geodesic words, one per group element. Every vertex other
/// than the start has a single incoming label.
class CodingAutomaton {
 public:
  CodingAutomaton() = default;
  CodingAutomaton(int genus, int num_vertices, int start, const std::vector<Edge>& edges);

  int genus() const noexcept { return genus_; }
  int num_letters() const noexcept { return 4 * genus_; }
  int num_vertices() const noexcept { return num_vertices_; }
  int start() const noexcept { return start_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Target of the x-edge out of v, or -1.
  int next(int v, Letter x) const { return delta_[static_cast<std::size_t>(v) * static_cast<std::size_t>(num_letters()) + x]; }

  std::optional<int> aperiodicity_n() const noexcept { return aperiodicity_n_; }
  void set_aperiodicity_n(std::optional<int> n) { aperiodicity_n_ = n; }

  /// Throws validation error if an edge ends at the start vertex or two edges join the same ordered pair.
  void check_invariants() const;

  /// Number of paths of length n out of the start vertex, n = 0..n_max.
  std::vector<std::uint64_t> path_counts(int n_max) const;

  /// tr(A^n) of the start-deleted adjacency matrix, n = 1..n_max (index 0 unused).
  std::vector<std::uint64_t> closed_path_counts(int n_max) const;

  bool accepts(const std::vector<Letter>& w) const;

  std::string to_json(const GroupPresentation& p) const;
  static CodingAutomaton from_json(const std::string& text, const GroupPresentation& p);

 private:
  void index();

  int genus_ = 0;
  int num_vertices_ = 0;
  int start_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> delta_;
  std::optional<int> aperiodicity_n_;
};

struct AutomatonOptions {
  /// Word differences are tracked inside the ball of this radius.
  int difference_radius = 4;
  /// Cap on subset-construction states.
  std::size_t state_budget = 2'000'000;
};

CodingAutomaton build_coding_automaton(const GroupPresentation& p, const AutomatonOptions& opts = {});

/// Smallest N with every ordered pair of non-start vertices joined by a path of
/// length exactly N, or nullopt when the start-deleted graph is not primitive.
std::optional<int> compute_aperiodicity(const CodingAutomaton& a);

struct AutomatonReport {
  struct Row {
    int n = 0;
    std::uint64_t paths = 0;
    std::uint64_t sphere = 0;
    std::int64_t cycle_classes = -1;  // primitive classes read off closed paths
    std::int64_t brute_classes = -1;  // primitive classes from the conjugacy oracle
  };
  std::vector<Row> rows;
  std::optional<int> aperiodicity_n;
  bool pass = true;
  int first_failure = -1;
  std::string message;
};

/// Compares path counts with BFS sphere sizes and closed-path class counts with
/// the brute-force conjugacy oracle up to n_max. Throws validation error on the
/// first mismatch when `throw_on_failure`.
AutomatonReport validate_automaton(const CodingAutomaton& a, const GroupPresentation& p, int n_max,
                                   bool throw_on_failure = true);

}  // namespace surfzeta::group
