#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "surfzeta/group/presentation.hpp"
#include "surfzeta/replin/matrix.hpp"

namespace surfzeta::replin {

/// Unitary representation R_chi of the surface group used to twist the zeta
/// functions. Abelianization mode: N = 1, chi(g) = exp(2 pi i <theta, ab(g)>).
/// Explicit mode: one N x N unitary matrix per generator.
class UnitaryCharacter {
 public:
  enum class Mode { abelianization, explicit_matrices };

  static UnitaryCharacter trivial(int genus);
  static UnitaryCharacter abelianization(int genus, std::vector<double> theta);
  /// `mats` holds one matrix per letter (inverses included); validated against tol.
  static UnitaryCharacter explicit_matrices(int genus, std::vector<CMatrix> mats, double tol = 1e-8);

  Mode mode() const noexcept { return mode_; }
  std::size_t dimension() const noexcept { return n_; }
  int genus() const noexcept { return genus_; }
  const std::vector<double>& theta() const noexcept { return theta_; }
  bool is_trivial() const;

  /// exp(2 pi i sum theta_k ab_k); abelianization mode only.
  std::complex<double> value_ab(std::span<const int> ab) const;
  /// R_chi(w) as an N x N matrix (1 x 1 in abelianization mode).
  CMatrix value_word(std::span<const group::Letter> w) const;

  std::string to_json(const group::GroupPresentation& p) const;
  static UnitaryCharacter from_json(const std::string& text, const group::GroupPresentation& p);

 private:
  Mode mode_ = Mode::abelianization;
  int genus_ = 2;
  std::size_t n_ = 1;
  std::vector<double> theta_;
  std::vector<CMatrix> mats_;
};

}  // namespace surfzeta::replin
