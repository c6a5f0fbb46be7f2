#include "surfzeta/group/ball.hpp"

#include <algorithm>

namespace surfzeta::group {
namespace {

bool key_less(const ElementKey& x, const ElementKey& y) { return x.hi != y.hi ? x.hi < y.hi : x.lo < y.lo; }

}  // namespace

std::vector<std::uint64_t> sphere_sizes(const GroupPresentation& p, int n_max, std::uint64_t budget) {
  if (n_max < 0) throw Error(ErrorKind::input, "n_max must be >= 0");
  const ExactSurfaceRep rep(p);
  std::vector<std::uint64_t> sizes{1};
  if (n_max == 0) return sizes;

  // Spheres are kept as sorted key vectors; only the current sphere keeps elements.
  std::vector<ElementKey> prev_keys;
  std::vector<ElementKey> cur_keys{rep.key(rep.identity())};
  std::vector<ExactSurfaceRep::Element> cur{rep.identity()};
  for (int n = 1; n <= n_max; ++n) {
    std::vector<std::pair<ElementKey, std::uint32_t>> cand;
    cand.reserve(cur.size() * static_cast<std::size_t>(p.num_letters() - 1));
    for (std::size_t i = 0; i < cur.size(); ++i) {
      for (int x = 0; x < p.num_letters(); ++x) {
        cand.emplace_back(rep.key(rep.mul(cur[i], rep.generator(static_cast<Letter>(x)))),
                          static_cast<std::uint32_t>(i * static_cast<std::size_t>(p.num_letters()) + static_cast<std::size_t>(x)));
      }
    }
    std::sort(cand.begin(), cand.end(), [](const auto& u, const auto& v) {
      return key_less(u.first, v.first) || (u.first == v.first && u.second < v.second);
    });
    cand.erase(std::unique(cand.begin(), cand.end(), [](const auto& u, const auto& v) { return u.first == v.first; }),
               cand.end());
    std::vector<ElementKey> next_keys;
    std::vector<ExactSurfaceRep::Element> next;
    const bool keep = n < n_max;
    for (const auto& [k, origin] : cand) {
      if (std::binary_search(prev_keys.begin(), prev_keys.end(), k, key_less)) continue;
      if (std::binary_search(cur_keys.begin(), cur_keys.end(), k, key_less)) continue;
      next_keys.push_back(k);
      if (keep) {
        const std::size_t i = origin / static_cast<std::uint32_t>(p.num_letters());
        const auto x = static_cast<Letter>(origin % static_cast<std::uint32_t>(p.num_letters()));
        next.push_back(rep.mul(cur[i], rep.generator(x)));
      }
    }
    sizes.push_back(next_keys.size());
    if (next_keys.size() > budget && n < n_max) {
      throw BudgetError("sphere size budget exceeded at n = " + std::to_string(n), sizes);
    }
    prev_keys = std::move(cur_keys);
    cur_keys = std::move(next_keys);
    cur = std::move(next);
  }
  return sizes;
}

Ball::Ball(const ExactSurfaceRep& rep, int radius)
    : radius_(radius), letters_(static_cast<std::size_t>(rep.presentation().num_letters())), rep_(&rep) {
  if (radius < 0) throw Error(ErrorKind::input, "ball radius must be >= 0");
  words_.push_back({});
  elems_.push_back(rep.identity());
  index_.emplace(rep.key(rep.identity()), 0);
  std::size_t begin = 0;
  for (int n = 1; n <= radius; ++n) {
    const std::size_t end = words_.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t x = 0; x < letters_; ++x) {
        auto e = rep.mul(elems_[i], rep.generator(static_cast<Letter>(x)));
        auto [it, inserted] = index_.emplace(rep.key(e), static_cast<std::int64_t>(words_.size()));
        if (!inserted) continue;
        auto w = words_[i];
        w.push_back(static_cast<Letter>(x));
        words_.push_back(std::move(w));
        elems_.push_back(e);
      }
    }
    begin = end;
  }
  right_.assign(words_.size() * letters_, -1);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    for (std::size_t x = 0; x < letters_; ++x) {
      right_[i * letters_ + x] = find(rep.mul(elems_[i], rep.generator(static_cast<Letter>(x))));
    }
  }
}

std::int64_t Ball::find(const ExactSurfaceRep::Element& e) const { return find(rep_->key(e)); }

std::int64_t Ball::find(const ElementKey& k) const {
  const auto it = index_.find(k);
  return it == index_.end() ? -1 : it->second;
}

}  // namespace surfzeta::group
