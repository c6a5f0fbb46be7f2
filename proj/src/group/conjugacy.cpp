#include "surfzeta/group/conjugacy.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "surfzeta/error.hpp"
#include "surfzeta/group/ball.hpp"

namespace surfzeta::group {
namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

void cyclically_reduced_words(int letters, int n, std::vector<std::vector<Letter>>& out) {
  std::vector<Letter> w(static_cast<std::size_t>(n));
  auto rec = [&](auto&& self, int i) -> void {
    if (i == n) {
      if (n == 1 || w[static_cast<std::size_t>(n - 1)] != inverse(w[0])) out.push_back(w);
      return;
    }
    for (int x = 0; x < letters; ++x) {
      if (i > 0 && static_cast<Letter>(x) == inverse(w[static_cast<std::size_t>(i - 1)])) continue;
      w[static_cast<std::size_t>(i)] = static_cast<Letter>(x);
      self(self, i + 1);
    }
  };
  rec(rec, 0);
}

}  // namespace

ConjugacyTester::ConjugacyTester(const ExactSurfaceRep& rep, int radius) : rep_(&rep), ball_(rep, radius) {
  for (std::size_t c = 0; c < ball_.size(); ++c) inv_.push_back(rep.inverse_of(ball_.element(c)));
}

bool ConjugacyTester::conjugate(std::span<const Letter> u, std::span<const Letter> v) const {
  if (u.size() != v.size()) return false;
  const auto& rep = *rep_;
  const auto target = rep.evaluate(v);
  auto e = rep.evaluate(u);
  for (std::size_t r = 0; r < u.size(); ++r) {
    if (r > 0) e = rep.mul(rep.mul(rep.generator(inverse(u[r - 1])), e), rep.generator(u[r - 1]));
    for (std::size_t c = 0; c < ball_.size(); ++c) {
      if (rep.equal(rep.mul(rep.mul(ball_.element(c), e), inv_[c]), target)) return true;
    }
  }
  return false;
}

std::vector<ConjugacyClassInfo> brute_force_classes_of_length(const GroupPresentation& p, int n,
                                                              const ConjugacyOptions& opts) {
  if (n < 1) throw Error(ErrorKind::input, "class length must be >= 1");
  if (n > 7) throw Error(ErrorKind::resource, "brute-force class enumeration limited to length <= 7");
  const ExactSurfaceRep rep(p);
  const Ball shorter(rep, n - 1);
  const Ball conj(rep, opts.conjugator_radius);
  std::vector<ExactSurfaceRep::Element> conj_inv;
  for (std::size_t c = 0; c < conj.size(); ++c) conj_inv.push_back(rep.inverse_of(conj.element(c)));

  // Only necklaces (words equal to their least rotation); rotations are
  // handled by evaluating every cyclic shift.
  std::vector<std::vector<Letter>> words;
  cyclically_reduced_words(p.num_letters(), n, words);
  std::erase_if(words, [](const std::vector<Letter>& w) { return least_rotation(w) != w; });

  auto is_shorter = [&](const ExactSurfaceRep::Element& e) {
    const auto idx = shorter.find(e);
    return idx >= 0 && shorter.length(static_cast<std::size_t>(idx)) < n;
  };

  std::vector<std::size_t> minimal;
  std::vector<std::vector<ExactSurfaceRep::Element>> rotations;
  for (std::size_t wi = 0; wi < words.size(); ++wi) {
    const auto& w = words[wi];
    std::vector<ExactSurfaceRep::Element> rots;
    rots.push_back(rep.evaluate(w));
    for (std::size_t r = 1; r < w.size(); ++r) {
      // shift left by one: x^-1 e x
      const Letter x = w[r - 1];
      rots.push_back(rep.mul(rep.mul(rep.generator(inverse(x)), rots.back()), rep.generator(x)));
    }
    bool ok = true;
    for (std::size_t r = 0; r < rots.size() && ok; ++r) {
      if (is_shorter(rots[r])) ok = false;
      for (std::size_t c = 1; c < conj.size() && ok; ++c) {
        if (is_shorter(rep.mul(rep.mul(conj.element(c), rots[r]), conj_inv[c]))) ok = false;
      }
    }
    if (ok) {
      minimal.push_back(wi);
      rotations.push_back(std::move(rots));
    }
  }

  std::unordered_map<ElementKey, std::size_t, ElementKeyHash> owner;
  UnionFind uf(minimal.size());
  for (std::size_t i = 0; i < minimal.size(); ++i) {
    for (const auto& e : rotations[i]) {
      auto [it, inserted] = owner.emplace(rep.key(e), i);
      if (!inserted) uf.join(i, it->second);
    }
  }
  for (std::size_t i = 0; i < minimal.size(); ++i) {
    for (const auto& e : rotations[i]) {
      for (std::size_t c = 1; c < conj.size(); ++c) {
        const auto it = owner.find(rep.key(rep.mul(rep.mul(conj.element(c), e), conj_inv[c])));
        if (it != owner.end()) uf.join(i, it->second);
      }
    }
  }

  std::unordered_map<std::size_t, std::size_t> slot;
  std::vector<ConjugacyClassInfo> out;
  for (std::size_t i = 0; i < minimal.size(); ++i) {
    const std::size_t root = uf.find(i);
    auto [it, inserted] = slot.emplace(root, out.size());
    if (inserted) out.emplace_back();
    auto& info = out[it->second];
    const auto& w = words[minimal[i]];
    info.members.push_back(w);
    if (info.canonical.empty() || w < info.canonical) info.canonical = w;
    if (is_proper_power(w)) info.primitive = false;
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.canonical < y.canonical; });
  return out;
}

std::vector<std::vector<std::vector<Letter>>> brute_force_primitive_classes(const GroupPresentation& p, int n_max,
                                                                            const ConjugacyOptions& opts) {
  if (n_max < 0) throw Error(ErrorKind::input, "n_max must be >= 0");
  std::vector<std::vector<std::vector<Letter>>> result(static_cast<std::size_t>(n_max) + 1);
  for (int n = 1; n <= n_max; ++n) {
    for (auto& info : brute_force_classes_of_length(p, n, opts)) {
      if (info.primitive) result[static_cast<std::size_t>(n)].push_back(std::move(info.canonical));
    }
  }
  return result;
}


}  // namespace surfzeta::group
