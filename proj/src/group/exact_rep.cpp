#include "surfzeta/group/exact_rep.hpp"

#include <cmath>
#include <numbers>

#include "surfzeta/error.hpp"

namespace surfzeta::group {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

ExactSurfaceRep::ExactSurfaceRep(const GroupPresentation& p) : p_(p), ring_(4 * p.genus()) {
  const int g = p.genus();
  const int m = 4 * g;
  if (ring_.degree() > CyclotomicRing::kMaxDegree) {
    throw Error(ErrorKind::resource, "exact representation limited to genus <= 8");
  }
  // alpha = cot(pi/m) = i (zeta + 1) / (zeta - 1), with i = zeta^g.
  std::vector<std::complex<long double>> conj_alpha;
  for (int j : ring_.units()) {
    const auto z = std::polar(1.0L, 2.0L * std::numbers::pi_v<long double> * j / m);
    const auto i_j = std::polar(1.0L, 2.0L * std::numbers::pi_v<long double> * g * j / m);
    conj_alpha.push_back(i_j * (z + 1.0L) / (z - 1.0L));
  }
  const auto alpha = ring_.from_embeddings(conj_alpha);
  beta2_ = ring_.sub(ring_.mul(alpha, alpha), ring_.one());
  beta_ = std::sqrt(ring_.embed(beta2_).real());

  // Side i of the polygon has its midpoint in direction zeta^i. The pairing
  // sending side l to side k is A = alpha i zeta^((k-l)/2), B = -i zeta^((k+l)/2).
  auto pairing = [&](int l, int k) {
    Element e;
    e.a = ring_.mul(alpha, ring_.zeta_power(g + (k - l) / 2));
    e.b = ring_.zeta_power(-g + (k + l) / 2);
    return e;
  };

  // Find a labelling of the sides for which the relator holds. By symmetry all
  // a_j share a direction and so do all b_j; offsets and reflections cover the
  // conventions for reading the boundary.
  for (int offset = 0; offset < 4; ++offset) {
    for (int reflect = 0; reflect < 2; ++reflect) {
      for (int dir = 0; dir < 4; ++dir) {
        std::vector<Element> gens(static_cast<std::size_t>(4 * g));
        for (int j = 0; j < g; ++j) {
          for (int t = 0; t < 2; ++t) {
            int l = 4 * j + offset + t;
            int k = l + 2;
            if (reflect != 0) {
              l = -l;
              k = -k;
            }
            l = ((l % m) + m) % m;
            k = ((k % m) + m) % m;
            // keep k - l even and use the representative with |k - l| = 2
            int kk = k;
            if (kk - l > 2) kk -= m;
            if (l - kk > 2) kk += m;
            const bool flip = ((dir >> t) & 1) != 0;
            const auto gen = flip ? pairing(kk, l) : pairing(l, kk);
            const auto letter = static_cast<std::size_t>(4 * j + 2 * t);
            gens[letter] = gen;
            gens[letter + 1] = inverse_of(gen);
          }
        }
        gens_ = gens;
        if (is_identity(evaluate(p_.relator()))) return;
      }
    }
  }
  throw Error(ErrorKind::construction, "no side-pairing labelling satisfies the surface relator");
}

ExactSurfaceRep::Element ExactSurfaceRep::identity() const { return Element{ring_.one(), ring_.zero()}; }

ExactSurfaceRep::Element ExactSurfaceRep::mul(const Element& x, const Element& y) const {
  // [[A1, bB1], [b~B1, ~A1]] [[A2, bB2], [b~B2, ~A2]]
  Element r;
  r.a = ring_.add(ring_.mul(x.a, y.a), ring_.mul(beta2_, ring_.mul(x.b, ring_.conj(y.b))));
  r.b = ring_.add(ring_.mul(x.a, y.b), ring_.mul(x.b, ring_.conj(y.a)));
  return r;
}

ExactSurfaceRep::Element ExactSurfaceRep::inverse_of(const Element& x) const {
  return Element{ring_.conj(x.a), ring_.neg(x.b)};
}

ExactSurfaceRep::Element ExactSurfaceRep::evaluate(std::span<const Letter> letters) const {
  Element r = identity();
  for (Letter x : letters) r = mul(r, gens_[x]);
  return r;
}

bool ExactSurfaceRep::is_identity(const Element& x) const {
  if (!ring_.is_zero(x.b)) return false;
  return ring_.equal(x.a, ring_.one()) || ring_.equal(x.a, ring_.neg(ring_.one()));
}

bool ExactSurfaceRep::equal(const Element& x, const Element& y) const {
  if (ring_.equal(x.a, y.a) && ring_.equal(x.b, y.b)) return true;
  return ring_.equal(x.a, ring_.neg(y.a)) && ring_.equal(x.b, ring_.neg(y.b));
}

ElementKey ExactSurfaceRep::key(const Element& x) const {
  const int n = ring_.degree();
  std::int64_t sign = 1;
  for (int i = 0; i < n; ++i) {
    if (x.a[i] != 0) {
      sign = x.a[i] < 0 ? -1 : 1;
      break;
    }
  }
  ElementKey k{0x6a09e667f3bcc908ULL, 0xbb67ae8584caa73bULL};
  auto feed = [&](std::int64_t v) {
    const auto u = static_cast<std::uint64_t>(v * sign);
    k.hi = splitmix(k.hi ^ u);
    k.lo = splitmix(k.lo + u * 0xff51afd7ed558ccdULL);
  };
  for (int i = 0; i < n; ++i) feed(x.a[i]);
  for (int i = 0; i < n; ++i) feed(x.b[i]);
  return k;
}

ElementKey ExactSurfaceRep::trace_key(const Element& x) const {
  const auto t = ring_.add(x.a, ring_.conj(x.a));
  const int n = ring_.degree();
  std::int64_t sign = 1;
  for (int i = 0; i < n; ++i) {
    if (t[i] != 0) {
      sign = t[i] < 0 ? -1 : 1;
      break;
    }
  }
  ElementKey k{0x3c6ef372fe94f82bULL, 0xa54ff53a5f1d36f1ULL};
  for (int i = 0; i < n; ++i) {
    const auto u = static_cast<std::uint64_t>(t[i] * sign);
    k.hi = splitmix(k.hi ^ u);
    k.lo = splitmix(k.lo + u * 0xff51afd7ed558ccdULL);
  }
  return k;
}

long double ExactSurfaceRep::abs_trace(const Element& x) const { return std::abs(2.0L * ring_.embed(x.a).real()); }

std::array<long double, 4> ExactSurfaceRep::to_sl2r(const Element& x) const {
  const auto p = ring_.embed(x.a);
  const auto q = beta_ * ring_.embed(x.b);
  return {p.real() - q.imag(), q.real() - p.imag(), q.real() + p.imag(), p.real() + q.imag()};
}

}  // namespace surfzeta::group
