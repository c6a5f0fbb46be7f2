#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "surfzeta/replin/matrix.hpp"

namespace surfzeta::replin {

/// All eigenvalues of a real square matrix: balancing, Hessenberg reduction and
/// Francis double-shift QR. Numeric error when the sweep budget (100 d^2) runs out.
std::vector<std::complex<double>> eigenvalues(const Matrix& m);

/// Eigenvalues sorted by descending modulus (ties: descending real, then imaginary part).
/// `log_moduli` carries log|lambda_i| and stays finite where the eigenvalues themselves
/// would overflow.
struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;
  std::vector<double> log_moduli;
  std::vector<double> phases;
  double proximality_gap = 0;  // |lambda_1| / |lambda_2|
  bool top_is_real = false;

  std::size_t dimension() const noexcept { return log_moduli.size(); }
};

/// Builds a sorted Spectrum from eigenvalues of `m` scaled by e^log_scale.
Spectrum spectrum(const Matrix& m, double log_scale = 0.0);
Spectrum make_spectrum(const std::vector<std::complex<double>>& eig, double log_scale = 0.0);

struct ProximalityFailure {
  std::size_t i = 0;
  std::size_t j = 1;
  std::string reason;
};

/// Gap |lambda_1|/|lambda_2| if proximal (|lambda_1| >= (1+tol)|lambda_2| and
/// lambda_1 real within tol), otherwise the violating pair.
struct ProximalityResult {
  bool proximal = false;
  double gap = 0;
  std::optional<ProximalityFailure> failure;
};
ProximalityResult proximality_check(const Spectrum& s, double tol = 1e-6);

/// log|lambda_1|; domain error if not proximal.
double weight_top(const Spectrum& s, double tol = 1e-6);
/// log(|lambda_1| / |lambda_d|); domain error if not proximal.
double weight_spread(const Spectrum& s, double tol = 1e-6);
/// lambda_{j+1} / lambda_1 for j = 1..d-1; domain error if not proximal.
std::vector<std::complex<double>> projective_multipliers(const Spectrum& s, double tol = 1e-6);

/// Unit top eigenvector with first nonzero coordinate positive; domain error if not proximal.
std::vector<double> projective_fixed_point(const Matrix& m, double tol = 1e-6);

/// Matrix of the k-th exterior power on the basis of increasing index subsets (lexicographic).
Matrix exterior_power(const Matrix& m, std::size_t k);

}  // namespace surfzeta::replin
