#include "surfzeta/group/presentation.hpp"

#include <algorithm>
#include <cctype>

#include "surfzeta/error.hpp"

namespace surfzeta::group {

GroupPresentation::GroupPresentation(int genus) : genus_(genus) {
  if (genus < 2) {
    throw Error(ErrorKind::input, "genus >= 2 required, got " + std::to_string(genus));
  }
  if (genus > 60) {
    throw Error(ErrorKind::input, "genus too large for 8-bit letters: " + std::to_string(genus));
  }
  for (int i = 0; i < genus; ++i) {
    const auto a = static_cast<Letter>(4 * i);
    const auto b = static_cast<Letter>(4 * i + 2);
    relator_.insert(relator_.end(), {a, b, inverse(a), inverse(b)});
  }
}

std::string GroupPresentation::symbol(Letter x) const {
  if (x >= num_letters()) {
    throw Error(ErrorKind::input, "letter index " + std::to_string(x) + " out of range");
  }
  const int pair = x >> 1;
  const bool inv = (x & 1U) != 0;
  const char base = (pair % 2 == 0) ? 'a' : 'b';
  const char c = inv ? static_cast<char>(std::toupper(base)) : base;
  return std::string(1, c) + std::to_string(pair / 2 + 1);
}

Letter GroupPresentation::parse_symbol(std::string_view s) const {
  if (s.size() < 2) {
    throw Error(ErrorKind::input, "bad generator symbol '" + std::string(s) + "'");
  }
  const char c = s[0];
  int pair_offset = 0;
  bool inv = false;
  switch (c) {
    case 'a': break;
    case 'A': inv = true; break;
    case 'b': pair_offset = 1; break;
    case 'B': pair_offset = 1; inv = true; break;
    default: throw Error(ErrorKind::input, "bad generator symbol '" + std::string(s) + "'");
  }
  int index = 0;
  for (char d : s.substr(1)) {
    if (!std::isdigit(static_cast<unsigned char>(d))) {
      throw Error(ErrorKind::input, "bad generator symbol '" + std::string(s) + "'");
    }
    index = index * 10 + (d - '0');
  }
  if (index < 1 || index > genus_) {
    throw Error(ErrorKind::input, "generator index out of range in '" + std::string(s) + "'");
  }
  return static_cast<Letter>(2 * (2 * (index - 1) + pair_offset) + (inv ? 1 : 0));
}

Word GroupPresentation::parse(std::string_view text) const {
  Word w;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '.' || c == '*') {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    w.letters.push_back(parse_symbol(text.substr(i, j - i)));
    i = j;
  }
  return w;
}

std::string GroupPresentation::format(std::span<const Letter> letters) const {
  std::string out;
  for (Letter x : letters) out += symbol(x);
  return out;
}

void GroupPresentation::check(std::span<const Letter> letters) const {
  for (Letter x : letters) {
    if (x >= num_letters()) {
      throw Error(ErrorKind::input, "invalid generator index " + std::to_string(x));
    }
  }
}

std::vector<int> GroupPresentation::exponent_sums(std::span<const Letter> letters) const {
  std::vector<int> ab(static_cast<std::size_t>(2 * genus_), 0);
  for (Letter x : letters) ab[x >> 1] += (x & 1U) ? -1 : 1;
  return ab;
}

void free_reduce_in_place(std::vector<Letter>& letters) {
  std::size_t out = 0;
  for (Letter x : letters) {
    if (out > 0 && letters[out - 1] == inverse(x)) {
      --out;
    } else {
      letters[out++] = x;
    }
  }
  letters.resize(out);
}

Word free_reduce(const GroupPresentation& p, const Word& w) {
  p.check(w.letters);
  Word r{w.letters, true};
  free_reduce_in_place(r.letters);
  return r;
}

std::vector<Letter> cyclic_reduce(std::vector<Letter> letters) {
  free_reduce_in_place(letters);
  std::size_t lo = 0;
  std::size_t hi = letters.size();
  while (hi - lo >= 2 && letters[lo] == inverse(letters[hi - 1])) {
    ++lo;
    --hi;
  }
  return {letters.begin() + static_cast<std::ptrdiff_t>(lo),
          letters.begin() + static_cast<std::ptrdiff_t>(hi)};
}

std::vector<Letter> inverse_word(std::span<const Letter> letters) {
  std::vector<Letter> r(letters.rbegin(), letters.rend());
  for (auto& x : r) x = inverse(x);
  return r;
}

bool is_proper_power(std::span<const Letter> letters) {
  const std::size_t n = letters.size();
  for (std::size_t period = 1; period < n; ++period) {
    if (n % period != 0) continue;
    bool ok = true;
    for (std::size_t i = period; i < n && ok; ++i) ok = letters[i] == letters[i - period];
    if (ok) return true;
  }
  return false;
}

std::vector<Letter> least_rotation(std::span<const Letter> s) {
  const std::size_t n = s.size();
  std::size_t best = 0;
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const Letter x = s[(r + i) % n];
      const Letter y = s[(best + i) % n];
      if (x != y) {
        if (x < y) best = r;
        break;
      }
    }
  }
  std::vector<Letter> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = s[(best + i) % n];
  return out;
}

}  // namespace surfzeta::group
