#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "surfzeta/group/cyclotomic.hpp"
#include "surfzeta/group/presentation.hpp"

namespace surfzeta::group {

/// 128-bit element key; collisions are treated as impossible.
struct ElementKey {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;
  bool operator==(const ElementKey&) const = default;
};

struct ElementKeyHash {
  std::size_t operator()(const ElementKey& k) const noexcept { return static_cast<std::size_t>(k.lo ^ (k.hi * 0x9e3779b97f4a7c15ULL)); }
};

/// Faithful representation of the genus-g surface group by side pairings of the
/// regular 4g-gon with all angles 2pi/4g, computed exactly. Elements of SU(1,1)
/// are written [[A, beta B], [beta conj(B), conj(A)]] with A, B in Z[zeta_{4g}]
/// and beta^2 = cot^2(pi/4g) - 1 also in the ring, so products stay exact.
/// Equality is modulo sign (the group sits in PSU(1,1)).
class ExactSurfaceRep {
 public:
  struct Element {
    CyclotomicRing::Elem a{};
    CyclotomicRing::Elem b{};
  };

  explicit ExactSurfaceRep(const GroupPresentation& p);

  const CyclotomicRing& ring() const noexcept { return ring_; }
  const GroupPresentation& presentation() const noexcept { return p_; }

  Element identity() const;
  const Element& generator(Letter x) const { return gens_[x]; }
  Element mul(const Element& x, const Element& y) const;
  Element inverse_of(const Element& x) const;
  Element evaluate(std::span<const Letter> letters) const;

  bool is_identity(const Element& x) const;
  bool equal(const Element& x, const Element& y) const;
  ElementKey key(const Element& x) const;
  /// Key of the trace A + conj(A) up to sign; a conjugacy invariant.
  ElementKey trace_key(const Element& x) const;

  /// Real trace |A + conj(A)| up to the sign ambiguity, under the standard embedding.
  long double abs_trace(const Element& x) const;

  /// The element as a real 2x2 matrix in SL(2,R), row-major, via the Cayley transform.
  std::array<long double, 4> to_sl2r(const Element& x) const;

 private:
  GroupPresentation p_;
  CyclotomicRing ring_;
  CyclotomicRing::Elem beta2_{};
  long double beta_ = 0;
  std::vector<Element> gens_;
};

}  // namespace surfzeta::group
