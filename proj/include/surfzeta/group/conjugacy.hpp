#pragma once

#include <memory>
#include <span>
#include <vector>

#include "surfzeta/group/ball.hpp"
#include "surfzeta/group/presentation.hpp"

namespace surfzeta::group {

struct ConjugacyOptions {
  /// Conjugators of length <= this radius are tried when testing minimality and joining words.
  int conjugator_radius = 2;
};

/// Exact conjugacy test for cyclic words of equal minimal length: u ~ v iff some
/// rotation of u conjugated by a word of length <= radius equals v.
class ConjugacyTester {
 public:
  ConjugacyTester(const ExactSurfaceRep& rep, int radius);
  bool conjugate(std::span<const Letter> u, std::span<const Letter> v) const;

 private:
  const ExactSurfaceRep* rep_;
  Ball ball_;
  std::vector<ExactSurfaceRep::Element> inv_;
};

struct ConjugacyClassInfo {
  std::vector<Letter> canonical;
  /// Minimal-length cyclic words (as least rotations) found in the class.
  std::vector<std::vector<Letter>> members;
  bool primitive = true;
};

/// All conjugacy classes of minimal word length exactly n (see below).
std::vector<ConjugacyClassInfo> brute_force_classes_of_length(const GroupPresentation& p, int n,
                                                              const ConjugacyOptions& opts = {});

/// Primitive conjugacy classes of minimal word length exactly n, for n = 1..n_max,
/// found by brute force: all cyclically reduced words of length n, minimality
/// tested against the ball of shorter elements after conjugating rotations by
/// short words, and classes formed by union-find over short conjugations with
/// exact element identity. Each class is represented by the lexicographically
/// least rotation among its minimal-length words. Index 0 is empty.
std::vector<std::vector<std::vector<Letter>>> brute_force_primitive_classes(const GroupPresentation& p, int n_max,
                                                                            const ConjugacyOptions& opts = {});

}  // namespace surfzeta::group
