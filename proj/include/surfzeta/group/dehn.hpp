#pragma once

#include <vector>

#include "surfzeta/group/presentation.hpp"

namespace surfzeta::group {

/// Dehn's algorithm for the one-relator surface presentation: repeatedly
/// replaces the leftmost-longest subword that is more than half of a cyclic
/// rotation of the relator (or its inverse) by the shorter complement, freely
/// reducing after every replacement. Solves the word problem (output is empty
/// iff the input represents 1). The output is not always geodesic: chains of
/// exact half-relators can hide a shortening, see shortlex_normal_form.
class DehnReducer {
 public:
  explicit DehnReducer(const GroupPresentation& p);

  Word reduce(const Word& w) const;
  std::vector<Letter> reduce(std::vector<Letter> letters) const;
  bool is_identity(std::vector<Letter> letters) const { return reduce(std::move(letters)).empty(); }

 private:
  int relator_length_;
  // For each letter, the (up to two) cyclic relator words of R or R^-1 starting with it.
  std::vector<std::vector<std::vector<Letter>>> rotations_by_first_;
};

Word dehn_reduce(const GroupPresentation& p, const Word& w);

}  // namespace surfzeta::group
