#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace surfzeta::group {

/// Generator index. For genus g there are 4g letters, ordered
/// a1 < A1 < b1 < B1 < a2 < ... (capital = inverse), so inverse(x) == x ^ 1.
using Letter = std::uint8_t;

struct Word {
  std::vector<Letter> letters;
  bool reduced = false;

  std::size_t size() const noexcept { return letters.size(); }
  bool empty() const noexcept { return letters.empty(); }
  bool operator==(const Word& other) const noexcept { return letters == other.letters; }
};

constexpr Letter inverse(Letter x) noexcept { return static_cast<Letter>(x ^ 1U); }

/// Standard one-relator presentation of the closed orientable genus-g surface
/// group, relator a1 b1 A1 B1 ... ag bg Ag Bg.
class GroupPresentation {
 public:
  explicit GroupPresentation(int genus);

  int genus() const noexcept { return genus_; }
  int num_letters() const noexcept { return 4 * genus_; }
  const std::vector<Letter>& relator() const noexcept { return relator_; }

  /// "a1", "A1", "b1", ...
  std::string symbol(Letter x) const;
  Letter parse_symbol(std::string_view symbol) const;

  /// Whitespace- or comma-separated symbols; also accepts the compact form "a1b1A1".
  Word parse(std::string_view text) const;
  std::string format(std::span<const Letter> letters) const;
  std::string format(const Word& w) const { return format(std::span<const Letter>(w.letters)); }

  /// Throws an input error when a letter is out of range.
  void check(std::span<const Letter> letters) const;

  /// Exponent sums in the order (a1, b1, a2, b2, ...).
  std::vector<int> exponent_sums(std::span<const Letter> letters) const;

 private:
  int genus_;
  std::vector<Letter> relator_;
};

/// Freely reduce a word (cancel adjacent x x^-1 pairs).
Word free_reduce(const GroupPresentation& p, const Word& w);
void free_reduce_in_place(std::vector<Letter>& letters);

/// Cyclic free reduction: additionally cancels first/last inverse pairs.
std::vector<Letter> cyclic_reduce(std::vector<Letter> letters);

std::vector<Letter> inverse_word(std::span<const Letter> letters);

/// True when the cyclic word is a proper power u^k, k >= 2.
bool is_proper_power(std::span<const Letter> letters);

/// Lexicographically least rotation.
std::vector<Letter> least_rotation(std::span<const Letter> letters);

}  // namespace surfzeta::group
