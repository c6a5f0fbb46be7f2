#include "surfzeta/orbitdb/orbitdb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "surfzeta/error.hpp"
#include "surfzeta/group/conjugacy.hpp"
#include "surfzeta/group/exact_rep.hpp"

namespace surfzeta::orbitdb {
namespace {

using json = nlohmann::json;

struct Fnv {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void bytes(const void* data, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 0x100000001b3ULL;
    }
  }
  template <class T>
  void value(const T& v) {
    bytes(&v, sizeof v);
  }
};

std::int64_t rounded(double v) { return std::llround(v * 1e9); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Lyndon words labelling closed paths at `v` in the start-deleted graph, length <= n_max.
void lyndon_cycles_at(const group::CodingAutomaton& a, int v, int n_max, const std::vector<int>& dist_to_v,
                      std::vector<std::vector<Letter>>& out) {
  std::vector<Letter> w;
  auto rec = [&](auto&& self, int u, int period) -> void {
    const int len = static_cast<int>(w.size());
    if (len > 0 && u == v && period == len) out.push_back(w);
    if (len == n_max) return;
    for (int x = 0; x < a.num_letters(); ++x) {
      // prenecklace condition: the next letter is >= the letter one period back
      if (len > 0 && x < w[static_cast<std::size_t>(len - period)]) continue;
      const int t = a.next(u, static_cast<Letter>(x));
      if (t < 0 || t == a.start()) continue;
      const int back = dist_to_v[static_cast<std::size_t>(t)];
      if (back < 0 || len + 1 + back > n_max) continue;
      const int np = (len > 0 && x == w[static_cast<std::size_t>(len - period)]) ? period : len + 1;
      w.push_back(static_cast<Letter>(x));
      self(self, t, np);
      w.pop_back();
    }
  };
  rec(rec, v, 1);
}

std::vector<int> distances_to(const group::CodingAutomaton& a, int v) {
  std::vector<std::vector<int>> preds(static_cast<std::size_t>(a.num_vertices()));
  for (const auto& e : a.edges()) {
    if (e.from != a.start() && e.to != a.start()) preds[static_cast<std::size_t>(e.to)].push_back(e.from);
  }
  std::vector<int> dist(static_cast<std::size_t>(a.num_vertices()), -1);
  dist[static_cast<std::size_t>(v)] = 0;
  std::vector<int> queue{v};
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const int u = queue[h];
    for (int q : preds[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(q)] < 0) {
        dist[static_cast<std::size_t>(q)] = dist[static_cast<std::size_t>(u)] + 1;
        queue.push_back(q);
      }
    }
  }
  return dist;
}

// homomorphisms onto random permutation groups; the invariant hashes the cycle types
class PermutationQuotients {
 public:
  PermutationQuotients(int genus, int count, int degree, std::uint64_t seed) : degree_(degree) {
    std::mt19937_64 rng(seed);
    for (int c = 0; c < count; ++c) homs_.push_back(random_hom(genus, rng));
  }

  std::uint64_t invariant(std::span<const Letter> w) const {
    Fnv h;
    std::vector<int> cur(static_cast<std::size_t>(degree_)), lens;
    std::vector<char> seen;
    for (const auto& gens : homs_) {
      std::iota(cur.begin(), cur.end(), 0);
      for (Letter x : w) {
        const auto& g = gens[x];
        for (auto& v : cur) v = g[static_cast<std::size_t>(v)];
      }
      seen.assign(cur.size(), 0);
      lens.clear();
      for (std::size_t s = 0; s < cur.size(); ++s) {
        int len = 0;
        for (std::size_t t = s; !seen[t]; t = static_cast<std::size_t>(cur[t])) {
          seen[t] = 1;
          ++len;
        }
        if (len > 0) lens.push_back(len);
      }
      std::sort(lens.begin(), lens.end());
      for (int l : lens) h.value(l);
      h.value(-1);
    }
    return h.h;
  }

 private:
  using Perm = std::vector<int>;

  Perm compose(const Perm& x, const Perm& y) const {  // apply x, then y
    Perm out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = y[static_cast<std::size_t>(x[i])];
    return out;
  }
  static Perm invert(const Perm& x) {
    Perm out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[static_cast<std::size_t>(x[i])] = static_cast<int>(i);
    return out;
  }
  static std::vector<std::vector<int>> cycles(const Perm& x) {
    std::vector<std::vector<int>> out;
    std::vector<char> seen(x.size(), 0);
    for (std::size_t s = 0; s < x.size(); ++s) {
      if (seen[s]) continue;
      out.emplace_back();
      for (std::size_t t = s; !seen[t]; t = static_cast<std::size_t>(x[t])) {
        seen[t] = 1;
        out.back().push_back(static_cast<int>(t));
      }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
    return out;
  }

  std::vector<Perm> random_hom(int genus, std::mt19937_64& rng) const {
    auto random_perm = [&] {
      Perm x(static_cast<std::size_t>(degree_));
      std::iota(x.begin(), x.end(), 0);
      std::shuffle(x.begin(), x.end(), rng);
      return x;
    };
    // words act on the right: w = x1 x2 ... means apply x1 first
    for (int attempt = 0; attempt < 100000; ++attempt) {
      std::vector<Perm> gens(static_cast<std::size_t>(4 * genus));
      Perm prefix(static_cast<std::size_t>(degree_));
      std::iota(prefix.begin(), prefix.end(), 0);
      for (int i = 0; i + 1 < genus; ++i) {
        const Perm a = random_perm(), b = random_perm();
        gens[static_cast<std::size_t>(4 * i)] = a;
        gens[static_cast<std::size_t>(4 * i + 2)] = b;
        prefix = compose(compose(compose(compose(prefix, a), b), invert(a)), invert(b));
      }
      // a b A B = z with z = prefix^-1 means a^-1 o b o a = zb as maps,
      // so a sends each cycle of zb onto a cycle of b of the same length
      const Perm z = invert(prefix);
      const Perm b = random_perm();
      const Perm zb = compose(z, b);
      const auto cb = cycles(b), czb = cycles(zb);
      if (cb.size() != czb.size()) continue;
      bool match = true;
      for (std::size_t c = 0; c < cb.size(); ++c) match = match && cb[c].size() == czb[c].size();
      if (!match) continue;
      Perm a(static_cast<std::size_t>(degree_));
      for (std::size_t c = 0; c < cb.size(); ++c) {
        for (std::size_t t = 0; t < cb[c].size(); ++t) a[static_cast<std::size_t>(czb[c][t])] = cb[c][t];
      }
      gens[static_cast<std::size_t>(4 * genus - 4)] = a;
      gens[static_cast<std::size_t>(4 * genus - 2)] = b;
      for (int x = 0; x < 4 * genus; x += 2) gens[static_cast<std::size_t>(x + 1)] = invert(gens[static_cast<std::size_t>(x)]);
      Perm r(static_cast<std::size_t>(degree_));
      std::iota(r.begin(), r.end(), 0);
      const group::GroupPresentation p(genus);
      for (Letter x : p.relator()) r = compose(r, gens[x]);
      if (std::is_sorted(r.begin(), r.end())) return gens;
    }
    throw Error(ErrorKind::construction, "no permutation quotient found");
  }

  int degree_;
  std::vector<std::vector<Perm>> homs_;
};

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  threads = std::max(1U, threads);
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

const char* to_string(WeightMode m) noexcept { return m == WeightMode::top ? "top" : "spread"; }

WeightMode parse_weight_mode(const std::string& s) {
  if (s == "top") return WeightMode::top;
  if (s == "spread") return WeightMode::spread;
  throw Error(ErrorKind::config, "weight_mode must be 'top' or 'spread', got '" + s + "'");
}

double OrbitDatabase::complete_weight() const {
  if (cutoff.mode == Cutoff::Mode::weight) return cutoff.value;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    if (r.p == n_max) best = std::min(best, r.weight(weight_mode));
  }
  return best;
}

double OrbitDatabase::max_weight() const {
  double best = 0;
  for (const auto& r : records) best = std::max(best, r.weight(weight_mode));
  return best;
}

PrimitiveClassRecord make_record(const group::GroupPresentation& p, const replin::Representation& rep,
                                 std::vector<Letter> word, double proximality_tol) {
  PrimitiveClassRecord r;
  const auto s = rep.word_spectrum(word);
  const auto prox = replin::proximality_check(s, proximality_tol);
  if (!prox.proximal) {
    throw Error(ErrorKind::domain, "class " + p.format(word) + " is not proximal: " + prox.failure->reason);
  }
  r.p = static_cast<int>(word.size());
  r.d_top = replin::weight_top(s, proximality_tol);
  r.d_spread = replin::weight_spread(s, proximality_tol);
  r.mu = replin::projective_multipliers(s, proximality_tol);
  r.ab = p.exponent_sums(word);
  Fnv h;
  h.value(r.p);
  h.bytes(word.data(), word.size());
  h.value(rounded(r.d_top));
  h.value(rounded(r.d_spread));
  for (int v : r.ab) h.value(v);
  r.fp = h.h;
  r.word = std::move(word);
  return r;
}

double multiplier_residual(const PrimitiveClassRecord& r, std::size_t d) {
  double log_prod = 0;
  for (const auto& m : r.mu) log_prod += std::log(std::abs(m));
  const double expected = -static_cast<double>(d) * r.d_top;
  return std::abs(std::expm1(log_prod - expected));
}

OrbitDatabase enumerate_primitive_classes(const group::CodingAutomaton& a, const group::GroupPresentation& p,
                                          const replin::Representation& rep, const Cutoff& cutoff,
                                          const EnumerateOptions& opts, EnumerationStats* stats) {
  if (a.genus() != p.genus() || rep.genus() != p.genus()) throw Error(ErrorKind::input, "genus mismatch between inputs");
  OrbitDatabase db;
  db.cutoff = cutoff;
  db.rep_digest = rep.digest();
  db.weight_mode = opts.weight_mode;
  db.genus = p.genus();
  db.d = rep.dimension();

  int n_max = 0;
  if (cutoff.mode == Cutoff::Mode::length) {
    if (cutoff.value < 0) throw Error(ErrorKind::input, "length cutoff must be >= 0");
    n_max = static_cast<int>(cutoff.value);
  } else {
    double min_gen = std::numeric_limits<double>::infinity();
    for (int x = 0; x < p.num_letters(); x += 2) {
      const std::vector<Letter> w{static_cast<Letter>(x)};
      min_gen = std::min(min_gen, make_record(p, rep, w, opts.proximality_tol).weight(opts.weight_mode));
    }
    n_max = cutoff.value < min_gen ? 0 : static_cast<int>(std::ceil(cutoff.value / min_gen));
  }
  db.n_max = n_max;
  if (n_max == 0) return db;

  // 1. primitive closed-path labels, partitioned by base vertex
  std::vector<int> bases;
  for (int v = 0; v < a.num_vertices(); ++v) {
    if (v != a.start()) bases.push_back(v);
  }
  std::vector<std::vector<std::vector<Letter>>> per_base(bases.size());
  parallel_for(bases.size(), opts.threads, [&](std::size_t i) {
    lyndon_cycles_at(a, bases[i], n_max, distances_to(a, bases[i]), per_base[i]);
  });
  std::vector<std::vector<Letter>> words;
  for (auto& chunk : per_base) {
    for (auto& w : chunk) words.push_back(std::move(w));
    chunk.clear();
    chunk.shrink_to_fit();
    if (words.size() > 2 * opts.max_records) throw Error(ErrorKind::resource, "closed-path enumeration exceeded the record budget");
  }
  std::sort(words.begin(), words.end(), [](const auto& u, const auto& v) {
    return u.size() != v.size() ? u.size() < v.size() : u < v;
  });
  words.erase(std::unique(words.begin(), words.end()), words.end());
  if (words.size() > opts.max_records) throw Error(ErrorKind::resource, "class count exceeds the record budget");

  // 2. merge labels of the same conjugacy class
  const group::ExactSurfaceRep exact(p);
  // exact SL2 traces cannot separate u from its image under the hyperelliptic
  // involution, so labels are also keyed by cycle types in random finite quotients
  const PermutationQuotients quotients(p.genus(), 3, 14, 0x5eed);
  struct Keyed {
    std::size_t len;
    group::ElementKey key;
    std::uint64_t perm;
    std::size_t index;
  };
  std::vector<Keyed> keyed(words.size());
  parallel_for(words.size(), opts.threads, [&](std::size_t i) {
    keyed[i] = Keyed{words[i].size(), exact.trace_key(exact.evaluate(words[i])), quotients.invariant(words[i]), i};
  });
  auto same_bucket = [](const Keyed& x, const Keyed& y) { return x.len == y.len && x.key == y.key && x.perm == y.perm; };
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& x, const Keyed& y) {
    if (x.len != y.len) return x.len < y.len;
    if (x.key.hi != y.key.hi) return x.key.hi < y.key.hi;
    if (x.key.lo != y.key.lo) return x.key.lo < y.key.lo;
    if (x.perm != y.perm) return x.perm < y.perm;
    return x.index < y.index;
  });
  const group::ConjugacyTester tester(exact, opts.conjugator_radius);
  UnionFind uf(words.size());
  std::size_t merged = 0;
  for (std::size_t lo = 0; lo < keyed.size();) {
    std::size_t hi = lo + 1;
    while (hi < keyed.size() && same_bucket(keyed[hi], keyed[lo])) ++hi;
    for (std::size_t i = lo; i < hi; ++i) {
      const auto& u = words[keyed[i].index];
      const auto ab_u = p.exponent_sums(u);
      const bool ab_zero = std::all_of(ab_u.begin(), ab_u.end(), [](int v) { return v == 0; });
      const auto u_inv = group::least_rotation(group::inverse_word(u));
      for (std::size_t j = i + 1; j < hi; ++j) {
        const auto& v = words[keyed[j].index];
        if (v == u_inv) continue;  // g is never conjugate to g^-1 here
        if (uf.find(keyed[i].index) == uf.find(keyed[j].index)) continue;
        if (p.exponent_sums(v) != ab_u) continue;
        if (ab_zero && tester.conjugate(u_inv, v)) continue;
        if (tester.conjugate(u, v)) {
          uf.join(keyed[i].index, keyed[j].index);
          ++merged;
        }
      }
    }
    lo = hi;
  }

  // 3. drop labels conjugate to a proper power u^k
  std::unordered_map<group::ElementKey, std::vector<std::vector<Letter>>, group::ElementKeyHash> power_keys;
  for (const auto& u : words) {
    for (std::size_t k = 2; k * u.size() <= static_cast<std::size_t>(n_max); ++k) {
      std::vector<Letter> pw;
      for (std::size_t t = 0; t < k; ++t) pw.insert(pw.end(), u.begin(), u.end());
      power_keys[exact.trace_key(exact.evaluate(pw))].push_back(std::move(pw));
    }
  }
  std::vector<bool> drop(words.size(), false);
  std::size_t powers_dropped = 0;
  for (const auto& k : keyed) {
    const auto it = power_keys.find(k.key);
    if (it == power_keys.end()) continue;
    for (const auto& pw : it->second) {
      if (pw.size() == words[k.index].size() && quotients.invariant(pw) == k.perm && tester.conjugate(pw, words[k.index])) {
        drop[k.index] = true;
        ++powers_dropped;
        break;
      }
    }
  }

  // 4. one record per class, canonical word = least label in the class
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (uf.find(i) == i) reps.push_back(i);
  }
  std::vector<bool> class_dropped(words.size(), false);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (drop[i]) class_dropped[uf.find(i)] = true;
  }
  std::erase_if(reps, [&](std::size_t i) { return class_dropped[i]; });
  // union-find roots are the smallest index, and words are sorted, so the root is the least label

  db.records.resize(reps.size());
  parallel_for(reps.size(), opts.threads, [&](std::size_t i) {
    db.records[i] = make_record(p, rep, words[reps[i]], opts.proximality_tol);
  });
  words.clear();
  if (cutoff.mode == Cutoff::Mode::weight) {
    std::erase_if(db.records, [&](const PrimitiveClassRecord& r) { return r.weight(opts.weight_mode) > cutoff.value; });
  }
  std::vector<std::uint64_t> fps;
  for (const auto& r : db.records) fps.push_back(r.fp);
  std::sort(fps.begin(), fps.end());
  if (std::adjacent_find(fps.begin(), fps.end()) != fps.end()) throw Error(ErrorKind::consistency, "fingerprint collision in database");
  if (stats != nullptr) *stats = EnumerationStats{keyed.size(), merged, powers_dropped};
  return db;
}

OrbitDatabase brute_force_classes(const group::GroupPresentation& p, const replin::Representation& rep, int n_max,
                                  std::uint64_t seed, WeightMode weight_mode) {
  if (n_max > 6) throw Error(ErrorKind::resource, "brute-force classes limited to n_max <= 6");
  OrbitDatabase db;
  db.cutoff = Cutoff{Cutoff::Mode::length, static_cast<double>(n_max)};
  db.n_max = n_max;
  db.rep_digest = rep.digest();
  db.weight_mode = weight_mode;
  db.genus = p.genus();
  db.d = rep.dimension();
  const auto aux = replin::twisted_deformation(replin::fuchsian_octagon(p.genus()), seed);
  auto invariants = [&](const std::vector<Letter>& w) {
    const auto s = rep.word_spectrum(w);
    const auto t = aux.word_spectrum(w);
    return std::array<double, 3>{s.log_moduli.front(), s.log_moduli.front() - s.log_moduli.back(), t.log_moduli.front()};
  };
  for (int n = 1; n <= n_max; ++n) {
    for (auto& info : group::brute_force_classes_of_length(p, n)) {
      if (!info.primitive) continue;
      const auto ref = invariants(info.canonical);
      for (const auto& m : info.members) {
        const auto got = invariants(m);
        for (std::size_t k = 0; k < 3; ++k) {
          if (std::abs(got[k] - ref[k]) > 1e-8 * std::max(1.0, std::abs(ref[k]))) {
            throw Error(ErrorKind::consistency, "conjugation invariants disagree inside the class of " + p.format(info.canonical));
          }
        }
      }
      db.records.push_back(make_record(p, rep, info.canonical));
    }
  }
  return db;
}

void save(const OrbitDatabase& db, const std::string& path, const group::GroupPresentation& p, const std::string& extra_header) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::input, "cannot write " + path);
  json header = json::parse(extra_header);
  header["type"] = "header";
  header["format"] = "surfzeta-orbitdb";
  header["cutoff"] = {{"mode", db.cutoff.mode == Cutoff::Mode::length ? "length" : "weight"}, {"value", db.cutoff.value}};
  header["n_max"] = db.n_max;
  header["rep_digest"] = db.rep_digest;
  header["weight_mode"] = to_string(db.weight_mode);
  header["genus"] = db.genus;
  header["d"] = db.d;
  header["records"] = db.records.size();
  out << header.dump() << '\n';
  for (const auto& r : db.records) {
    json j;
    j["word"] = p.format(r.word);
    j["p"] = r.p;
    j["d_top"] = r.d_top;
    j["d_spread"] = r.d_spread;
    json mu = json::array();
    for (const auto& m : r.mu) mu.push_back(json::array({m.real(), m.imag()}));
    j["mu"] = mu;
    j["ab"] = r.ab;
    j["fp"] = hex64(r.fp);
    out << j.dump() << '\n';
  }
  if (!out) throw Error(ErrorKind::resource, "failed while writing " + path);
}

OrbitDatabase load(const std::string& path, const group::GroupPresentation& p, const std::string& expected_digest) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::input, "cannot read " + path);
  OrbitDatabase db;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::corruption, "empty database file " + path);
  try {
    const auto h = json::parse(line);
    if (h.value("type", "") != "header") throw Error(ErrorKind::corruption, "database header missing");
    db.cutoff.mode = h.at("cutoff").at("mode").get<std::string>() == "length" ? Cutoff::Mode::length : Cutoff::Mode::weight;
    db.cutoff.value = h.at("cutoff").at("value").get<double>();
    db.n_max = h.at("n_max").get<int>();
    db.rep_digest = h.at("rep_digest").get<std::string>();
    db.weight_mode = parse_weight_mode(h.at("weight_mode").get<std::string>());
    db.genus = h.at("genus").get<int>();
    db.d = h.at("d").get<std::size_t>();
    if (db.genus != p.genus()) throw Error(ErrorKind::staleness, "database genus does not match presentation");
    if (!expected_digest.empty() && expected_digest != db.rep_digest) {
      throw Error(ErrorKind::staleness, "database was built from a different representation (digest " + db.rep_digest +
                                            ", expected " + expected_digest + ")");
    }
    const auto expected_records = h.at("records").get<std::size_t>();
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto j = json::parse(line);
      PrimitiveClassRecord r;
      r.word = p.parse(j.at("word").get<std::string>()).letters;
      r.p = j.at("p").get<int>();
      r.d_top = j.at("d_top").get<double>();
      r.d_spread = j.at("d_spread").get<double>();
      for (const auto& m : j.at("mu")) r.mu.emplace_back(m.at(0).get<double>(), m.at(1).get<double>());
      r.ab = j.at("ab").get<std::vector<int>>();
      r.fp = std::stoull(j.at("fp").get<std::string>(), nullptr, 16);
      if (static_cast<int>(r.word.size()) != r.p || r.mu.size() + 1 != db.d) {
        throw Error(ErrorKind::corruption, "record on line " + std::to_string(lineno) + " has inconsistent sizes");
      }
      if (!(multiplier_residual(r, db.d) <= 1e-9)) {
        throw Error(ErrorKind::corruption, "record on line " + std::to_string(lineno) + " (" + p.format(r.word) +
                                               ") breaks prod|mu| = exp(-d d_top)");
      }
      db.records.push_back(std::move(r));
    }
    if (db.records.size() != expected_records) throw Error(ErrorKind::corruption, "database record count does not match header");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::corruption, std::string("malformed database: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(ErrorKind::corruption, "malformed fingerprint in database");
  }
  return db;
}

}  // namespace surfzeta::orbitdb
