#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "surfzeta/error.hpp"
#include "surfzeta/group/presentation.hpp"
#include "surfzeta/replin/character.hpp"
#include "surfzeta/replin/representation.hpp"
#include "surfzeta/replin/spectrum.hpp"

using namespace surfzeta;
using namespace surfzeta::replin;
using group::GroupPresentation;

namespace {

Matrix mat(std::size_t n, std::initializer_list<double> v) {
  Matrix m(n, n);
  std::size_t k = 0;
  for (double x : v) m(k / n, k % n) = x, ++k;
  return m;
}

}  // namespace

TEST_CASE("eigenvalues of small dense matrices") {
  auto ev = eigenvalues(mat(3, {2, 0, 0, 0, -3, 0, 0, 0, 0.5}));
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return std::abs(a) > std::abs(b); });
  CHECK(ev[0].real() == doctest::Approx(-3));
  CHECK(ev[1].real() == doctest::Approx(2));
  CHECK(ev[2].real() == doctest::Approx(0.5));
  // rotation: e^{+-i pi/3}
  const double c = 0.5, s = std::sqrt(3.0) / 2;
  const auto rot = eigenvalues(mat(2, {c, -s, s, c}));
  CHECK(std::abs(rot[0].imag()) == doctest::Approx(s));
}

TEST_CASE("proximality and weights") {
  const auto sp = spectrum(mat(3, {4, 1, 0, 0, 1, 0, 0, 0, 0.25}));
  CHECK(proximality_check(sp).proximal);
  CHECK(weight_top(sp) == doctest::Approx(std::log(4.0)));
  CHECK(weight_spread(sp) == doctest::Approx(std::log(4.0) - std::log(0.25)));
  const auto mu = projective_multipliers(sp);
  REQUIRE(mu.size() == 2);
  CHECK(std::abs(mu[0]) == doctest::Approx(0.25));
  CHECK(std::abs(mu[1]) == doctest::Approx(1.0 / 16));

  const auto ell = spectrum(mat(2, {0, -1, 1, 0}));
  const auto pr = proximality_check(ell);
  CHECK_FALSE(pr.proximal);
  REQUIRE(pr.failure.has_value());
  CHECK_THROWS_AS(weight_top(ell), Error);
}

TEST_CASE("exterior powers") {
  const auto m = mat(3, {2, 0, 0, 0, 3, 0, 0, 0, 5});
  const auto e2 = exterior_power(m, 2);
  CHECK(e2.rows() == 3);
  double prod = 1;
  for (std::size_t i = 0; i < 3; ++i) prod *= e2(i, i);
  CHECK(prod == doctest::Approx(6.0 * 10 * 15));
  CHECK(exterior_power(m, 3)(0, 0) == doctest::Approx(30));
}

TEST_CASE("octagon representation") {
  GroupPresentation p(2);
  const auto rep = fuchsian_octagon(2);
  CHECK(rep.dimension() == 2);
  CHECK(rep.relator_residual() < 1e-12);
  // a1 pairs sides a quarter turn apart: rotation by pi/2 about the centre after a half
  // turn about a side midpoint at inradius r, cosh r = cot(pi/8), so cosh(l/2) = sin(pi/4) cosh r
  const double cosh_half = std::sin(std::numbers::pi / 4) / std::tan(std::numbers::pi / 8);
  const auto a1 = rep.word_spectrum(p.parse("a1").letters);
  CHECK(weight_top(a1) == doctest::Approx(std::acosh(cosh_half)).epsilon(1e-12));
  const auto b2 = rep.word_spectrum(p.parse("b2").letters);
  CHECK(weight_top(b2) == doctest::Approx(weight_top(a1)).epsilon(1e-12));
  for (int g = 3; g <= 5; ++g) CHECK(fuchsian_octagon(g).relator_residual() < 1e-10);
}

TEST_CASE("symmetric power lifts scale weights by d-1") {
  GroupPresentation p(2);
  const auto rep2 = fuchsian_octagon(2);
  const auto w = p.parse("a1b1A2b2").letters;
  const double w2 = weight_top(rep2.word_spectrum(w));
  for (std::size_t d = 3; d <= 5; ++d) {
    const auto rep = symmetric_power_lift(rep2, d);
    CHECK(rep.dimension() == d);
    if (d <= 4) CHECK(rep.relator_residual() < 1e-9);
    const auto sp = rep.word_spectrum(w);
    CHECK(proximality_check(sp).proximal);
    CHECK(weight_top(sp) == doctest::Approx((d - 1) * w2).epsilon(1e-12));
  }
  // Sym^2 of diag(2, 1/2) is diag(4, 1, 1/4)
  const auto s = symmetric_power(mat(2, {2, 0, 0, 0.5}), 3);
  CHECK(s(0, 0) == doctest::Approx(4));
  CHECK(s(1, 1) == doctest::Approx(1));
  CHECK(s(2, 2) == doctest::Approx(0.25));
}

TEST_CASE("long words keep small eigenvalues accurate") {
  GroupPresentation p(2);
  const auto rep = symmetric_power_lift(fuchsian_octagon(2), 4);
  std::vector<group::Letter> w;
  for (int k = 0; k < 12; ++k) {
    for (auto x : p.parse("a1b2").letters) w.push_back(x);
  }
  const auto sp = rep.word_spectrum(w);
  double sum = 0;
  for (double l : sp.log_moduli) sum += l;
  CHECK(std::abs(sum) < 1e-8 * sp.log_moduli[0]);  // det = 1
  CHECK(sp.log_moduli[3] == doctest::Approx(-sp.log_moduli[0]).epsilon(1e-10));
}

TEST_CASE("representation validation") {
  GroupPresentation p(2);
  std::vector<Matrix> gens(8, Matrix::identity(2));
  gens[0] = mat(2, {2, 0, 0, 0.5});
  gens[1] = mat(2, {0.5, 0, 0, 2});
  gens[2] = mat(2, {1, 1, 0, 1});  // breaks the relator
  gens[3] = mat(2, {1, -1, 0, 1});
  CHECK_THROWS_AS(Representation(2, gens), Error);
  gens[2] = gens[3] = Matrix::identity(2);
  CHECK_NOTHROW(Representation(2, gens));  // commuting: relator holds
  gens[1] = mat(2, {3, 0, 0, 0.5});        // not an inverse
  CHECK_THROWS_AS(Representation(2, gens), Error);
}

TEST_CASE("representation json round trip and digest") {
  GroupPresentation p(2);
  const auto rep = fuchsian_octagon(2);
  const auto back = representation_from_json(rep.to_json(p), p);
  CHECK(back.digest() == rep.digest());
  CHECK(symmetric_power_lift(rep, 3).digest() != rep.digest());
  CHECK_THROWS_AS(representation_from_json("{\"dimension\": 2}", p), Error);
}

TEST_CASE("twisted deformation stays a representation") {
  GroupPresentation p(2);
  const auto rep = fuchsian_octagon(2);
  const auto t = twisted_deformation(rep, 7);
  CHECK(t.relator_residual() < 1e-9);
  CHECK(t.digest() != rep.digest());
  CHECK(twisted_deformation(rep, 7).digest() == t.digest());
}

TEST_CASE("unitary characters") {
  GroupPresentation p(2);
  const auto triv = UnitaryCharacter::trivial(2);
  CHECK(triv.is_trivial());
  const auto chi = UnitaryCharacter::abelianization(2, {0.1, 0.25, 0.4, 0.7});
  CHECK_FALSE(chi.is_trivial());
  const std::vector<int> ab = {1, 0, 0, -2};
  const auto v = chi.value_ab(ab);
  const double phase = 2 * std::numbers::pi * (0.1 - 2 * 0.7);
  CHECK(v.real() == doctest::Approx(std::cos(phase)));
  CHECK(v.imag() == doctest::Approx(std::sin(phase)));
  // relator is in the commutator subgroup
  const auto r = chi.value_word(p.relator());
  CHECK(std::abs(r(0, 0) - 1.0) < 1e-12);
  CHECK_THROWS_AS(UnitaryCharacter::abelianization(2, {0.1}), Error);
  const auto back = UnitaryCharacter::from_json(chi.to_json(p), p);
  CHECK(back.theta() == chi.theta());
}
