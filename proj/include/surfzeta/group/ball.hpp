#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "surfzeta/error.hpp"
#include "surfzeta/group/exact_rep.hpp"

namespace surfzeta::group {

/// Resource error that carries the counts computed before the budget ran out.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, std::vector<std::uint64_t> partial)
      : Error(ErrorKind::resource, what), partial_(std::move(partial)) {}
  const std::vector<std::uint64_t>& partial() const noexcept { return partial_; }

 private:
  std::vector<std::uint64_t> partial_;
};

/// Number of elements of word length exactly n for n = 0..n_max, by BFS with
/// exact element identity. `budget` bounds the size of any single sphere.
std::vector<std::uint64_t> sphere_sizes(const GroupPresentation& p, int n_max,
                                        std::uint64_t budget = 50'000'000);

/// All elements of word length <= radius, in shortlex order of their
/// shortlex-least geodesic words.
class Ball {
 public:
  Ball(const ExactSurfaceRep& rep, int radius);

  int radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<Letter>& word(std::size_t i) const { return words_[i]; }
  int length(std::size_t i) const { return static_cast<int>(words_[i].size()); }
  const ExactSurfaceRep::Element& element(std::size_t i) const { return elems_[i]; }

  /// Index of the element, or -1 when it lies outside the ball.
  std::int64_t find(const ExactSurfaceRep::Element& e) const;
  std::int64_t find(const ElementKey& k) const;

  /// Index of element(i) * x, or -1 when outside the ball.
  std::int64_t right(std::size_t i, Letter x) const { return right_[i * letters_ + x]; }

 private:
  int radius_;
  std::size_t letters_;
  const ExactSurfaceRep* rep_;
  std::vector<std::vector<Letter>> words_;
  std::vector<ExactSurfaceRep::Element> elems_;
  std::unordered_map<ElementKey, std::int64_t, ElementKeyHash> index_;
  std::vector<std::int64_t> right_;
};

}  // namespace surfzeta::group
