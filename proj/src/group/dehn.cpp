#include "surfzeta/group/dehn.hpp"

namespace surfzeta::group {

DehnReducer::DehnReducer(const GroupPresentation& p)
    : relator_length_(static_cast<int>(p.relator().size())),
      rotations_by_first_(static_cast<std::size_t>(p.num_letters())) {
  const auto& r = p.relator();
  const auto rinv = inverse_word(r);
  const std::size_t n = r.size();
  for (const auto* base : {&r, &rinv}) {
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<Letter> rot(n);
      for (std::size_t i = 0; i < n; ++i) rot[i] = (*base)[(k + i) % n];
      rotations_by_first_[rot[0]].push_back(std::move(rot));
    }
  }
}

std::vector<Letter> DehnReducer::reduce(std::vector<Letter> w) const {
  free_reduce_in_place(w);
  const std::size_t half = static_cast<std::size_t>(relator_length_) / 2;
  for (;;) {
    std::size_t best_pos = 0;
    std::size_t best_len = 0;
    const std::vector<Letter>* best_rot = nullptr;
    for (std::size_t i = 0; i < w.size() && best_rot == nullptr; ++i) {
      for (const auto& rot : rotations_by_first_[w[i]]) {
        std::size_t len = 0;
        while (len < rot.size() && i + len < w.size() && w[i + len] == rot[len]) ++len;
        if (len > half && len > best_len) {
          best_len = len;
          best_pos = i;
          best_rot = &rot;
        }
      }
    }
    if (best_rot == nullptr) return w;
    // rot = u v with u = w[pos, pos+len) and u v = 1, so u = v^-1.
    std::vector<Letter> replacement;
    replacement.reserve(best_rot->size() - best_len);
    for (std::size_t i = best_rot->size(); i > best_len; --i) {
      replacement.push_back(inverse((*best_rot)[i - 1]));
    }
    std::vector<Letter> next;
    next.reserve(w.size());
    next.insert(next.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(best_pos));
    next.insert(next.end(), replacement.begin(), replacement.end());
    next.insert(next.end(), w.begin() + static_cast<std::ptrdiff_t>(best_pos + best_len), w.end());
    free_reduce_in_place(next);
    w = std::move(next);
  }
}

Word DehnReducer::reduce(const Word& w) const { return Word{reduce(w.letters), true}; }

Word dehn_reduce(const GroupPresentation& p, const Word& w) {
  p.check(w.letters);
  return DehnReducer(p).reduce(w);
}

}  // namespace surfzeta::group
