#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "surfzeta/error.hpp"
#include "surfzeta/group/automaton.hpp"
#include "surfzeta/group/conjugacy.hpp"
#include "surfzeta/group/exact_rep.hpp"
#include "surfzeta/orbitdb/orbitdb.hpp"
#include "surfzeta/replin/representation.hpp"

using namespace surfzeta;
using namespace surfzeta::orbitdb;
using group::GroupPresentation;

namespace {

std::map<std::vector<group::Letter>, int> as_multiset(const OrbitDatabase& db) {
  std::map<std::vector<group::Letter>, int> m;
  for (const auto& r : db.records) ++m[r.word];
  return m;
}

struct Fixture {
  GroupPresentation p{2};
  replin::Representation rep = replin::fuchsian_octagon(2);
  group::CodingAutomaton a = group::build_coding_automaton(p);
};

std::filesystem::path tmp(const std::string& name) { return std::filesystem::temp_directory_path() / ("surfzeta_test_" + name); }

}  // namespace

TEST_CASE_FIXTURE(Fixture, "enumeration equals the brute-force class list") {
  const auto db = enumerate_primitive_classes(a, p, rep, {Cutoff::Mode::length, 5});
  const auto bf = brute_force_classes(p, rep, 5);
  CHECK(db.n_max == 5);
  REQUIRE(db.records.size() == bf.records.size());
  // representatives may differ (least automaton label vs least minimal word), so match
  // each brute-force class to an enumerated one by exact conjugacy
  group::ExactSurfaceRep exact(p);
  group::ConjugacyTester tester(exact, 3);
  std::map<std::pair<std::size_t, long long>, std::vector<std::size_t>> bucket;
  for (std::size_t i = 0; i < db.records.size(); ++i) {
    bucket[{db.records[i].word.size(), std::llround(db.records[i].d_top * 1e8)}].push_back(i);
  }
  std::vector<bool> used(db.records.size(), false);
  std::size_t matched = 0;
  for (const auto& r : bf.records) {
    auto& cand = bucket[{r.word.size(), std::llround(r.d_top * 1e8)}];
    for (std::size_t i : cand) {
      if (!used[i] && tester.conjugate(db.records[i].word, r.word)) {
        used[i] = true;
        ++matched;
        break;
      }
    }
  }
  CHECK(matched == bf.records.size());
  // words shared by both lists are the same classes
  const auto m = as_multiset(bf);
  std::size_t shared = 0;
  for (const auto& r : db.records) shared += m.count(r.word);
  CHECK(shared > db.records.size() / 2);
}

TEST_CASE_FIXTURE(Fixture, "closed-path labels that coincide in the group are merged at n=6") {
  EnumerationStats st;
  const auto db = enumerate_primitive_classes(a, p, rep, {Cutoff::Mode::length, 6}, {}, &st);
  CHECK(st.merged == 4);
  std::size_t n6 = 0;
  for (const auto& r : db.records) n6 += r.word.size() == 6;
  // brute force count of primitive length-6 classes
  const auto bf = group::brute_force_primitive_classes(p, 6);
  CHECK(n6 == bf[6].size());
  CHECK(n6 == 19204);
}

TEST_CASE_FIXTURE(Fixture, "record invariants") {
  const auto db = enumerate_primitive_classes(a, p, rep, {Cutoff::Mode::length, 4});
  std::vector<std::uint64_t> fps;
  for (const auto& r : db.records) {
    CHECK(r.p == static_cast<int>(r.word.size()));
    CHECK(r.word == group::least_rotation(r.word));
    CHECK(multiplier_residual(r, 2) < 1e-12);
    CHECK(r.d_spread == doctest::Approx(2 * r.d_top).epsilon(1e-12));
    fps.push_back(r.fp);
  }
  std::sort(fps.begin(), fps.end());
  CHECK(std::adjacent_find(fps.begin(), fps.end()) == fps.end());
}

TEST_CASE_FIXTURE(Fixture, "weight cutoff") {
  const auto db = enumerate_primitive_classes(a, p, rep, {Cutoff::Mode::weight, 4.0});
  CHECK(db.complete_weight() == 4.0);
  for (const auto& r : db.records) CHECK(r.d_top <= 4.0);
  const auto by_len = enumerate_primitive_classes(a, p, rep, {Cutoff::Mode::length, static_cast<double>(db.n_max)});
  std::size_t n = 0;
  for (const auto& r : by_len.records) n += r.d_top <= 4.0;
  CHECK(n == db.records.size());
}

TEST_CASE_FIXTURE(Fixture, "save and load") {
  const auto db = enumerate_primitive_classes(a, p, rep, {Cutoff::Mode::length, 4});
  const auto path = tmp("db.jsonl");
  save(db, path.string(), p, R"({"note": "x"})");
  const auto back = load(path.string(), p, rep.digest());
  REQUIRE(back.records.size() == db.records.size());
  for (std::size_t i = 0; i < db.records.size(); ++i) {
    CHECK(back.records[i].word == db.records[i].word);
    CHECK(back.records[i].d_top == db.records[i].d_top);
    CHECK(back.records[i].mu == db.records[i].mu);
  }
  CHECK(back.n_max == 4);

  const auto lift = replin::symmetric_power_lift(rep, 3);
  try {
    load(path.string(), p, lift.digest());
    FAIL("expected staleness");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::staleness);
  }

  // break one multiplier
  std::ifstream in(path);
  std::string header, line, text;
  std::getline(in, header);
  text = header + "\n";
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      const auto k = line.find("\"d_top\":");
      line.replace(k, 8, "\"d_top\":9.5,\"x\":");
      first = false;
    }
    text += line + "\n";
  }
  in.close();
  const auto bad = tmp("bad.jsonl");
  std::ofstream(bad) << text;
  CHECK_THROWS_AS(load(bad.string(), p), Error);
  std::filesystem::remove(path);
  std::filesystem::remove(bad);
}

TEST_CASE_FIXTURE(Fixture, "non-proximal word is a domain error") {
  std::vector<replin::Matrix> gens(8, replin::Matrix::identity(2));
  replin::Matrix r(2, 2);
  r(0, 1) = -1;
  r(1, 0) = 1;
  gens[0] = r;
  gens[1] = replin::inverse(r);
  const replin::Representation ell(2, gens);
  try {
    make_record(p, ell, p.parse("a1").letters);
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
}

TEST_CASE_FIXTURE(Fixture, "lifts keep every class proximal") {
  const auto lift = replin::symmetric_power_lift(rep, 4);
  const auto db = enumerate_primitive_classes(a, p, lift, {Cutoff::Mode::length, 4});
  const auto base = enumerate_primitive_classes(a, p, rep, {Cutoff::Mode::length, 4});
  REQUIRE(db.records.size() == base.records.size());
  for (std::size_t i = 0; i < db.records.size(); ++i) {
    CHECK(db.records[i].d_top == doctest::Approx(3 * base.records[i].d_top).epsilon(1e-10));
    CHECK(multiplier_residual(db.records[i], 4) < 1e-9);
  }
}
