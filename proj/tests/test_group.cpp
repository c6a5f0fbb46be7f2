#include <doctest.h>

#include <algorithm>
#include <set>

#include "surfzeta/error.hpp"
#include "surfzeta/group/automaton.hpp"
#include "surfzeta/group/ball.hpp"
#include "surfzeta/group/conjugacy.hpp"
#include "surfzeta/group/cyclotomic.hpp"
#include "surfzeta/group/dehn.hpp"
#include "surfzeta/group/exact_rep.hpp"
#include "surfzeta/group/presentation.hpp"

using namespace surfzeta;
using namespace surfzeta::group;

namespace {

// coefficients of (1+2z+2z^2+2z^3+z^4) / (1-6z-6z^2-6z^3+z^4), the genus-2 growth series
const std::vector<std::uint64_t> kGenus2Spheres = {1, 8, 56, 392, 2736, 19096, 133288, 930328, 6493536};

}  // namespace

TEST_CASE("presentation round trip and relator") {
  GroupPresentation p(2);
  CHECK(p.num_letters() == 8);
  const auto w = p.parse("a1B2b1A2");
  CHECK(p.format(w) == "a1B2b1A2");
  CHECK(inverse(Letter{0}) == 1);
  CHECK(inverse(Letter{5}) == 4);
  // a1 b1 A1 B1 a2 b2 A2 B2
  CHECK(p.format(p.relator()) == "a1b1A1B1a2b2A2B2");
  CHECK_THROWS_AS(p.parse("c1"), Error);
  CHECK_THROWS_AS(GroupPresentation(1), Error);
}

TEST_CASE("word utilities") {
  GroupPresentation p(2);
  auto w = p.parse("b1a1a1").letters;
  CHECK(p.format(least_rotation(w)) == "a1a1b1");
  CHECK(is_proper_power(p.parse("a1b1a1b1").letters));
  CHECK_FALSE(is_proper_power(p.parse("a1b1a1B1").letters));
  CHECK(p.format(cyclic_reduce(p.parse("A1b1a2a1").letters)) == "b1a2");
  CHECK(p.format(inverse_word(p.parse("a1b2").letters)) == "B2A1");
  const auto ab = p.exponent_sums(p.parse("a1a1B2").letters);
  CHECK(ab == std::vector<int>{2, 0, 0, -1});
}

TEST_CASE("dehn reduction kills relator conjugates and keeps geodesics") {
  GroupPresentation p(2);
  DehnReducer r(p);
  CHECK(r.is_identity(p.relator()));
  CHECK(r.is_identity(p.parse("a2a1b1A1B1a2b2A2B2A2").letters));
  // more than half the relator gets replaced by the shorter complement
  CHECK(r.reduce(p.parse("a1b1A1B1a2").letters).size() == 3);
  CHECK(r.reduce(p.parse("a1b1a2").letters).size() == 3);
}

TEST_CASE("cyclotomic ring arithmetic") {
  CyclotomicRing R(8);
  CHECK(R.degree() == 4);
  const auto z = R.zeta_power(1);
  auto acc = R.one();
  for (int k = 0; k < 8; ++k) acc = R.mul(acc, z);
  CHECK(R.equal(acc, R.one()));
  CHECK(R.equal(R.mul(R.zeta_power(2), R.zeta_power(2)), R.from_int(-1)));
  CHECK(R.is_zero(R.sub(R.add(z, R.one()), R.add(R.one(), z))));
  const auto e = R.embed(R.add(z, R.conj(z)));  // 2 cos(pi/4)
  CHECK(static_cast<double>(e.real()) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("exact representation satisfies the relator") {
  for (int g = 2; g <= 4; ++g) {
    GroupPresentation p(g);
    ExactSurfaceRep rep(p);
    CHECK(rep.is_identity(rep.evaluate(p.relator())));
    CHECK_FALSE(rep.is_identity(rep.evaluate(p.parse("a1b1").letters)));
  }
}

TEST_CASE("sphere sizes match the growth series") {
  GroupPresentation p(2);
  const auto s = sphere_sizes(p, 6);
  CHECK(s == std::vector<std::uint64_t>(kGenus2Spheres.begin(), kGenus2Spheres.begin() + 7));
  CHECK_THROWS_AS(sphere_sizes(p, 6, 1000), BudgetError);
  try {
    sphere_sizes(p, 6, 1000);
  } catch (const BudgetError& e) {
    // the sphere that crossed the budget is still reported
    CHECK(e.partial() == std::vector<std::uint64_t>{1, 8, 56, 392, 2736});
  }
}

TEST_CASE("coding automaton: size, path counts, primitivity") {
  GroupPresentation p(2);
  const auto a = build_coding_automaton(p);
  CHECK(a.num_vertices() == 37);
  CHECK(a.edges().size() == 248);
  a.check_invariants();
  const auto c = a.path_counts(8);
  CHECK(c == kGenus2Spheres);
  CHECK(a.aperiodicity_n().has_value());
  CHECK(a.accepts(p.parse("a1b1").letters));
  CHECK_FALSE(a.accepts(p.parse("a1A1").letters));
  // five relator letters equal three: not geodesic
  CHECK_FALSE(a.accepts(p.parse("a1b1A1B1a2").letters));
}

TEST_CASE("automaton json round trip") {
  GroupPresentation p(2);
  const auto a = build_coding_automaton(p);
  const auto b = CodingAutomaton::from_json(a.to_json(p), p);
  CHECK(b.num_vertices() == a.num_vertices());
  CHECK(b.path_counts(6) == a.path_counts(6));
}

TEST_CASE("genus 3 automaton matches BFS") {
  GroupPresentation p(3);
  const auto a = build_coding_automaton(p);
  CHECK(a.path_counts(4) == sphere_sizes(p, 4));
}

TEST_CASE("validation report passes to n=5") {
  GroupPresentation p(2);
  const auto a = build_coding_automaton(p);
  const auto rep = validate_automaton(a, p, 5);
  CHECK(rep.pass);
  CHECK(rep.rows.size() == 6);
  CHECK(rep.rows[2].paths == 56);
  for (std::size_t n = 1; n < rep.rows.size(); ++n) CHECK(rep.rows[n].cycle_classes == rep.rows[n].brute_classes);
}

TEST_CASE("conjugacy tester") {
  GroupPresentation p(2);
  ExactSurfaceRep rep(p);
  ConjugacyTester t(rep, 3);
  const auto u = p.parse("a1b1a2").letters;
  const auto rot = p.parse("b1a2a1").letters;
  CHECK(t.conjugate(u, rot));
  CHECK_FALSE(t.conjugate(u, inverse_word(u)));
  CHECK_FALSE(t.conjugate(u, p.parse("a1b1b2").letters));
}

TEST_CASE("brute-force primitive class counts") {
  GroupPresentation p(2);
  const auto cls = brute_force_primitive_classes(p, 3);
  // length 2: xy with y not x or x^-1, up to rotation, 8*6/2
  CHECK(cls[1].size() == 8);
  CHECK(cls[2].size() == 24);
  std::set<std::vector<Letter>> seen(cls[3].begin(), cls[3].end());
  CHECK(seen.size() == cls[3].size());
}
