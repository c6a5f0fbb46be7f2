#include "surfzeta/group/automaton.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "surfzeta/error.hpp"
#include "surfzeta/group/ball.hpp"
#include "surfzeta/group/conjugacy.hpp"

namespace surfzeta::group {
namespace {

using json = nlohmann::json;

struct VecHash {
  std::size_t operator()(const std::vector<std::int32_t>& v) const noexcept {
    std::size_t h = v.size();
    for (auto x : v) h = h * 1000003U ^ static_cast<std::size_t>(x);
    return h;
  }
};

// Moore partition refinement on a partial DFA (missing transitions = -1).
std::vector<int> refine(const std::vector<int>& delta, std::size_t letters, std::vector<int> cls) {
  const std::size_t n = cls.size();
  for (;;) {
    std::map<std::vector<int>, int> sig_ids;
    std::vector<int> next(n);
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<int> sig{cls[s]};
      for (std::size_t x = 0; x < letters; ++x) {
        const int t = delta[s * letters + x];
        sig.push_back(t < 0 ? -1 : cls[static_cast<std::size_t>(t)]);
      }
      auto [it, inserted] = sig_ids.emplace(std::move(sig), static_cast<int>(sig_ids.size()));
      next[s] = it->second;
    }
    const auto count = [](const std::vector<int>& c) { return std::set<int>(c.begin(), c.end()).size(); };
    if (count(next) == count(cls)) return next;
    cls = std::move(next);
  }
}

int moebius(int n) {
  int result = 1;
  for (int q = 2; q * q <= n; ++q) {
    if (n % q != 0) continue;
    n /= q;
    if (n % q == 0) return 0;
    result = -result;
  }
  if (n > 1) result = -result;
  return result;
}

}  // namespace

CodingAutomaton::CodingAutomaton(int genus, int num_vertices, int start, const std::vector<Edge>& edges)
    : genus_(genus), num_vertices_(num_vertices), start_(start), edges_(edges) {
  index();
}

void CodingAutomaton::index() {
  delta_.assign(static_cast<std::size_t>(num_vertices_) * static_cast<std::size_t>(num_letters()), -1);
  for (const auto& e : edges_) {
    if (e.from < 0 || e.from >= num_vertices_ || e.to < 0 || e.to >= num_vertices_ || e.label >= num_letters()) {
      throw Error(ErrorKind::validation, "automaton edge out of range");
    }
    auto& slot = delta_[static_cast<std::size_t>(e.from) * static_cast<std::size_t>(num_letters()) + e.label];
    if (slot >= 0) throw Error(ErrorKind::validation, "automaton is not deterministic");
    slot = e.to;
  }
}

void CodingAutomaton::check_invariants() const {
  std::set<std::pair<int, int>> pairs;
  for (const auto& e : edges_) {
    if (e.to == start_) {
      throw Error(ErrorKind::validation, "edge terminates at the start vertex (from " + std::to_string(e.from) + ")");
    }
    if (!pairs.emplace(e.from, e.to).second) {
      throw Error(ErrorKind::validation, "two edges join vertex " + std::to_string(e.from) + " to " + std::to_string(e.to));
    }
  }
}

std::vector<std::uint64_t> CodingAutomaton::path_counts(int n_max) const {
  std::vector<std::uint64_t> cur(static_cast<std::size_t>(num_vertices_), 0);
  cur[static_cast<std::size_t>(start_)] = 1;
  std::vector<std::uint64_t> out{1};
  for (int n = 1; n <= n_max; ++n) {
    std::vector<std::uint64_t> nxt(cur.size(), 0);
    for (const auto& e : edges_) nxt[static_cast<std::size_t>(e.to)] += cur[static_cast<std::size_t>(e.from)];
    out.push_back(std::accumulate(nxt.begin(), nxt.end(), std::uint64_t{0}));
    cur = std::move(nxt);
  }
  return out;
}

std::vector<std::uint64_t> CodingAutomaton::closed_path_counts(int n_max) const {
  std::vector<std::uint64_t> out(static_cast<std::size_t>(n_max) + 1, 0);
  const auto nv = static_cast<std::size_t>(num_vertices_);
  for (std::size_t v = 0; v < nv; ++v) {
    if (static_cast<int>(v) == start_) continue;
    std::vector<std::uint64_t> cur(nv, 0);
    cur[v] = 1;
    for (int n = 1; n <= n_max; ++n) {
      std::vector<std::uint64_t> nxt(nv, 0);
      for (const auto& e : edges_) {
        if (e.from == start_) continue;
        nxt[static_cast<std::size_t>(e.to)] += cur[static_cast<std::size_t>(e.from)];
      }
      out[static_cast<std::size_t>(n)] += nxt[v];
      cur = std::move(nxt);
    }
  }
  return out;
}

bool CodingAutomaton::accepts(const std::vector<Letter>& w) const {
  int v = start_;
  for (Letter x : w) {
    if (x >= num_letters()) return false;
    v = next(v, x);
    if (v < 0) return false;
  }
  return true;
}

std::string CodingAutomaton::to_json(const GroupPresentation& p) const {
  json j;
  j["genus"] = genus_;
  j["start"] = start_;
  std::vector<int> verts(static_cast<std::size_t>(num_vertices_));
  std::iota(verts.begin(), verts.end(), 0);
  j["vertices"] = verts;
  json edges = json::array();
  for (const auto& e : edges_) edges.push_back(json::array({e.from, e.to, p.symbol(e.label)}));
  j["edges"] = edges;
  j["aperiodicity_N"] = aperiodicity_n_ ? json(*aperiodicity_n_) : json(nullptr);
  return j.dump();
}

CodingAutomaton CodingAutomaton::from_json(const std::string& text, const GroupPresentation& p) {
  try {
    const auto j = json::parse(text);
    if (j.at("genus").get<int>() != p.genus()) throw Error(ErrorKind::input, "automaton genus does not match presentation");
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      edges.push_back(Edge{e.at(0).get<int>(), e.at(1).get<int>(), p.parse_symbol(e.at(2).get<std::string>())});
    }
    CodingAutomaton a(p.genus(), static_cast<int>(j.at("vertices").size()), j.at("start").get<int>(), edges);
    if (!j.at("aperiodicity_N").is_null()) a.set_aperiodicity_n(j.at("aperiodicity_N").get<int>());
    return a;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::input, std::string("malformed automaton JSON: ") + e.what());
  }
}

CodingAutomaton build_coding_automaton(const GroupPresentation& p, const AutomatonOptions& opts) {
  if (opts.difference_radius < 1) throw Error(ErrorKind::input, "difference radius must be >= 1");
  const ExactSurfaceRep rep(p);
  const Ball ball(rep, opts.difference_radius);
  const auto L = static_cast<std::size_t>(p.num_letters());
  const std::size_t nd = ball.size();

  // step[(d*L + x)*L + y] = index of x^-1 d y; pad[d*L + x] = index of x^-1 d.
  std::vector<std::int32_t> step(nd * L * L, -1);
  std::vector<std::int32_t> pad(nd * L, -1);
  for (std::size_t d = 0; d < nd; ++d) {
    for (std::size_t x = 0; x < L; ++x) {
      const auto left = rep.mul(rep.generator(inverse(static_cast<Letter>(x))), ball.element(d));
      const auto li = ball.find(left);
      pad[d * L + x] = static_cast<std::int32_t>(li);
      for (std::size_t y = 0; y < L; ++y) {
        step[(d * L + x) * L + y] = static_cast<std::int32_t>(ball.find(rep.mul(left, rep.generator(static_cast<Letter>(y)))));
      }
    }
  }

  // NFA state = d * 4 + c with c: 0 equal so far, 1 v smaller, 2 v larger, 3 v ended.
  // A DFA state is the set of NFA states reachable by some comparison word v.
  std::vector<std::vector<std::int32_t>> sets{{0}};
  std::unordered_map<std::vector<std::int32_t>, int, VecHash> ids{{sets[0], 0}};
  std::vector<int> delta;
  std::vector<char> flags(nd * 4);
  for (std::size_t q = 0; q < sets.size(); ++q) {
    for (std::size_t x = 0; x < L; ++x) {
      std::vector<std::int32_t> next;
      for (const std::int32_t s : sets[q]) {
        const auto d = static_cast<std::size_t>(s / 4);
        const int c = s % 4;
        const std::int32_t dp = pad[d * L + x];
        if (dp >= 0) next.push_back(dp * 4 + 3);
        if (c == 3) continue;
        for (std::size_t y = 0; y < L; ++y) {
          const std::int32_t dn = step[(d * L + x) * L + y];
          if (dn < 0) continue;
          const int cn = c != 0 ? c : (y < x ? 1 : (y > x ? 2 : 0));
          next.push_back(dn * 4 + cn);
        }
      }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      // Reject when a shorter or shortlex-smaller word reaches the same element.
      const bool dead = std::any_of(next.begin(), next.end(), [](std::int32_t s) { return s == 1 || s == 3; });
      if (dead) {
        delta.push_back(-1);
        continue;
      }
      for (auto s : next) flags[static_cast<std::size_t>(s)] = 1;
      std::erase_if(next, [&](std::int32_t s) { return s == 2 || (s % 4 == 2 && flags[static_cast<std::size_t>(s - 1)]); });
      for (auto s : next) flags[static_cast<std::size_t>(s)] = 0;
      for (auto s : next) flags[static_cast<std::size_t>(s)] = 0;
      auto [it, inserted] = ids.emplace(next, static_cast<int>(sets.size()));
      if (inserted) {
        if (sets.size() >= opts.state_budget) {
          throw Error(ErrorKind::construction, "word-difference automaton exceeded its state budget; try a different difference radius");
        }
        sets.push_back(std::move(next));
      }
      delta.push_back(it->second);
    }
  }
  const std::size_t raw = sets.size();
  sets.clear();

  // Split every state by its incoming letter so each vertex has one incoming label.
  std::map<std::pair<int, int>, int> split_ids{{{0, -1}, 0}};
  std::vector<std::pair<int, int>> split{{0, -1}};
  std::vector<int> split_delta;
  for (std::size_t q = 0; q < split.size(); ++q) {
    for (std::size_t x = 0; x < L; ++x) {
      const int t = delta[static_cast<std::size_t>(split[q].first) * L + x];
      if (t < 0) {
        split_delta.push_back(-1);
        continue;
      }
      const std::pair<int, int> key{t, static_cast<int>(x)};
      auto [it, inserted] = split_ids.emplace(key, static_cast<int>(split.size()));
      if (inserted) split.push_back(key);
      split_delta.push_back(it->second);
    }
  }
  (void)raw;
  std::vector<int> init(split.size());
  for (std::size_t q = 0; q < split.size(); ++q) init[q] = split[q].second + 1;
  const auto cls = refine(split_delta, L, init);

  // Renumber classes in BFS order from the start.
  std::vector<int> rep_of;  // class -> representative state
  std::map<int, int> order;
  std::vector<int> queue{0};
  order[cls[0]] = 0;
  rep_of.push_back(0);
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const auto q = static_cast<std::size_t>(queue[h]);
    for (std::size_t x = 0; x < L; ++x) {
      const int t = split_delta[q * L + x];
      if (t < 0) continue;
      if (order.emplace(cls[static_cast<std::size_t>(t)], static_cast<int>(rep_of.size())).second) {
        rep_of.push_back(t);
        queue.push_back(t);
      }
    }
  }
  std::vector<Edge> edges;
  for (std::size_t v = 0; v < rep_of.size(); ++v) {
    const auto q = static_cast<std::size_t>(rep_of[v]);
    for (std::size_t x = 0; x < L; ++x) {
      const int t = split_delta[q * L + x];
      if (t < 0) continue;
      edges.push_back(Edge{static_cast<int>(v), order.at(cls[static_cast<std::size_t>(t)]), static_cast<Letter>(x)});
    }
  }
  CodingAutomaton a(p.genus(), static_cast<int>(rep_of.size()), 0, edges);
  a.check_invariants();
  a.set_aperiodicity_n(compute_aperiodicity(a));
  return a;
}

std::optional<int> compute_aperiodicity(const CodingAutomaton& a) {
  std::vector<int> verts;
  for (int v = 0; v < a.num_vertices(); ++v) {
    if (v != a.start()) verts.push_back(v);
  }
  const std::size_t n = verts.size();
  if (n == 0) return std::nullopt;
  std::vector<int> pos(static_cast<std::size_t>(a.num_vertices()), -1);
  for (std::size_t i = 0; i < n; ++i) pos[static_cast<std::size_t>(verts[i])] = static_cast<int>(i);
  const std::size_t words = (n + 63) / 64;
  using Rows = std::vector<std::vector<std::uint64_t>>;
  Rows adj(n, std::vector<std::uint64_t>(words, 0));
  for (const auto& e : a.edges()) {
    const int i = pos[static_cast<std::size_t>(e.from)];
    const int j = pos[static_cast<std::size_t>(e.to)];
    if (i < 0 || j < 0) continue;
    adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j) / 64] |= std::uint64_t{1} << (static_cast<std::size_t>(j) % 64);
  }
  auto full = [&](const Rows& m) {
    for (const auto& row : m) {
      for (std::size_t w = 0; w < words; ++w) {
        const std::size_t bits = (w + 1 == words && n % 64 != 0) ? n % 64 : 64;
        const std::uint64_t mask = bits == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
        if ((row[w] & mask) != mask) return false;
      }
    }
    return true;
  };
  Rows cur = adj;
  const std::size_t bound = (n - 1) * (n - 1) + 1;  // Wielandt
  for (std::size_t k = 1; k <= bound; ++k) {
    if (full(cur)) return static_cast<int>(k);
    Rows nxt(n, std::vector<std::uint64_t>(words, 0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if ((cur[i][j / 64] >> (j % 64)) & 1U) {
          for (std::size_t w = 0; w < words; ++w) nxt[i][w] |= adj[j][w];
        }
      }
    }
    if (nxt == cur && k > 1) break;
    cur = std::move(nxt);
  }
  return std::nullopt;
}

AutomatonReport validate_automaton(const CodingAutomaton& a, const GroupPresentation& p, int n_max, bool throw_on_failure) {
  AutomatonReport rep;
  auto fail = [&](int n, const std::string& msg) {
    if (rep.pass) {
      rep.pass = false;
      rep.first_failure = n;
      rep.message = msg;
    }
  };
  if (a.genus() != p.genus()) throw Error(ErrorKind::input, "automaton genus does not match presentation");
  a.check_invariants();
  rep.aperiodicity_n = a.aperiodicity_n();
  if (n_max < 0) throw Error(ErrorKind::input, "n_max must be >= 0");
  const auto paths = a.path_counts(n_max);
  const auto spheres = sphere_sizes(p, n_max);
  const auto closed = a.closed_path_counts(n_max);
  const int brute_n = std::min(n_max, 6);
  const auto brute = brute_force_primitive_classes(p, brute_n);
  for (int n = 0; n <= n_max; ++n) {
    AutomatonReport::Row row;
    row.n = n;
    row.paths = paths[static_cast<std::size_t>(n)];
    row.sphere = spheres[static_cast<std::size_t>(n)];
    if (row.paths != row.sphere) fail(n, "path count differs from sphere size at n = " + std::to_string(n));
    if (n >= 1) {
      std::int64_t total = 0;
      for (int d = 1; d <= n; ++d) {
        if (n % d == 0) total += moebius(n / d) * static_cast<std::int64_t>(closed[static_cast<std::size_t>(d)]);
      }
      row.cycle_classes = total / n;
      if (n <= brute_n) {
        row.brute_classes = static_cast<std::int64_t>(brute[static_cast<std::size_t>(n)].size());
        if (row.cycle_classes != row.brute_classes) {
          fail(n, "closed-path class count differs from brute force at n = " + std::to_string(n));
        }
      }
    }
    rep.rows.push_back(row);
  }
  if (!rep.pass && throw_on_failure) throw Error(ErrorKind::validation, rep.message);
  return rep;
}

}  // namespace surfzeta::group
