#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "surfzeta/group/presentation.hpp"
#include "surfzeta/replin/matrix.hpp"
#include "surfzeta/replin/spectrum.hpp"

namespace surfzeta::replin {

using group::Letter;

/// Product matrix together with a separately tracked log scale:
/// the true value is exp(log_scale) * m.
struct ScaledMatrix {
  Matrix m;
  double log_scale = 0;
};

/// Validated representation of the genus-g surface group into SL(d, R).
class Representation {
 public:
  /// `gens` holds one matrix per letter (inverses included).
  Representation(int genus, std::vector<Matrix> gens, double tolerance = 1e-8);

  int genus() const noexcept { return genus_; }
  std::size_t dimension() const noexcept { return d_; }
  int relator_sign() const noexcept { return relator_sign_; }
  double relator_residual() const noexcept { return relator_residual_; }
  double tolerance() const noexcept { return tol_; }
  const Matrix& generator(Letter x) const { return gens_[x]; }

  /// Ordered product; renormalizes whenever an entry exceeds 1e100.
  ScaledMatrix evaluate(std::span<const Letter> w) const;
  Matrix evaluate_plain(std::span<const Letter> w) const;

  /// Spectrum of rho(w). Moduli are recomputed from the top eigenvalues of the
  /// exterior powers of rho(w) (evaluated as products of exterior powers of the
  /// generators), which keeps the small eigenvalues accurate to relative
  /// precision for long words. Used for d <= 6; larger d falls back to QR on rho(w).
  Spectrum word_spectrum(std::span<const Letter> w) const;

  std::string to_json(const group::GroupPresentation& p) const;
  /// 64-bit FNV-1a digest of the canonical JSON, hex encoded.
  std::string digest() const;

 private:
  int genus_;
  std::size_t d_;
  double tol_;
  std::vector<Matrix> gens_;
  std::vector<std::vector<Matrix>> ext_;  // ext_[k][x] = exterior power k+2 of generator x
  std::vector<double> log_abs_det_;
  int relator_sign_ = 1;
  double relator_residual_ = 0;
};

/// Validates and completes a representation from per-symbol matrices. Either
/// every non-inverse generator or every generator must be present.
Representation load_representation(const group::GroupPresentation& p, std::size_t d,
                                   const std::map<std::string, Matrix>& matrices, double tol = 1e-8);

/// Representation file: {dimension, genus, matrices: {symbol: row-major}, tolerance}.
Representation representation_from_json(const std::string& text, const group::GroupPresentation& p);

/// Side pairings of the regular 4g-gon with angles 2pi/4g (exact construction, genus <= 8).
Representation fuchsian_octagon(int genus);

/// Action on homogeneous polynomials of degree d-1 in the basis x^{d-1}, x^{d-2} y, ..., y^{d-1}:
/// e_i -> (a x + c y)^{d-1-i} (b x + d y)^i.
Representation symmetric_power_lift(const Representation& rep2, std::size_t d);
Matrix symmetric_power(const Matrix& g, std::size_t d);

/// Generic deformation of a d=2 representation by twists along every a_i and b_i
/// (b_i -> b_i a_i^t, a_i -> a_i b_i^s) and along the separating curves [a1,b1]...[ak,bk].
/// Twist parameters are drawn from the seed.
Representation twisted_deformation(const Representation& rep2, std::uint64_t seed);

}  // namespace surfzeta::replin
