#include "surfzeta/replin/representation.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include <json.hpp>

#include "surfzeta/group/exact_rep.hpp"

namespace surfzeta::replin {
namespace {

using json = nlohmann::json;

double frobenius(const Matrix& m) {
  double acc = 0;
  for (double v : m.data()) acc += v * v;
  return std::sqrt(acc);
}

void renormalize(Matrix& m, double& log_scale) {
  const double big = m.max_abs();
  if (big > 1e100) {
    m *= 1.0 / big;
    log_scale += std::log(big);
  }
}

}  // namespace

Representation::Representation(int genus, std::vector<Matrix> gens, double tolerance)
    : genus_(genus), d_(gens.empty() ? 0 : gens[0].rows()), tol_(tolerance), gens_(std::move(gens)) {
  const group::GroupPresentation p(genus);
  if (gens_.size() != static_cast<std::size_t>(p.num_letters())) {
    throw Error(ErrorKind::validation, "representation needs one matrix per generator letter");
  }
  if (d_ < 2) throw Error(ErrorKind::validation, "representation dimension must be >= 2");
  for (std::size_t x = 0; x < gens_.size(); ++x) {
    const auto& m = gens_[x];
    if (m.rows() != d_ || m.cols() != d_) throw Error(ErrorKind::validation, "generator " + p.symbol(static_cast<Letter>(x)) + " has the wrong shape");
    for (double v : m.data()) {
      if (!std::isfinite(v)) throw Error(ErrorKind::validation, "generator " + p.symbol(static_cast<Letter>(x)) + " has a non-finite entry");
    }
    const double det = determinant(m);
    if (std::abs(det - 1.0) > tol_) {
      throw Error(ErrorKind::validation, "determinant check failed for " + p.symbol(static_cast<Letter>(x)) +
                                             ": det = " + std::to_string(det) + ", residual " + std::to_string(std::abs(det - 1.0)));
    }
    log_abs_det_.push_back(std::log(std::abs(det)));
  }
  for (std::size_t x = 0; x < gens_.size(); x += 2) {
    const Matrix prod = gens_[x] * gens_[x + 1];
    const double res = distance_to_scalar(prod, 1.0);
    const double scale = std::max(1.0, frobenius(gens_[x]) * frobenius(gens_[x + 1]));
    if (res > tol_ * scale) {
      throw Error(ErrorKind::validation, "inverse check failed for " + p.symbol(static_cast<Letter>(x)) + ": residual " + std::to_string(res));
    }
  }
  const Matrix r = evaluate_plain(p.relator());
  const double plus = distance_to_scalar(r, 1.0);
  const double minus = distance_to_scalar(r, -1.0);
  relator_sign_ = plus <= minus ? 1 : -1;
  relator_residual_ = std::min(plus, minus);
  // rounding in the product grows with the entry sizes along the relator
  double growth = 1;
  for (Letter x : p.relator()) growth *= std::max(1.0, gens_[x].max_abs());
  if (relator_residual_ > tol_ * growth) {
    throw Error(ErrorKind::validation, "relator check failed: residual " + std::to_string(relator_residual_));
  }
  if (d_ >= 3 && d_ <= 6) {
    for (std::size_t k = 2; k < d_; ++k) {
      std::vector<Matrix> layer;
      for (const auto& g : gens_) layer.push_back(exterior_power(g, k));
      ext_.push_back(std::move(layer));
    }
  }
}

ScaledMatrix Representation::evaluate(std::span<const Letter> w) const {
  ScaledMatrix out{Matrix::identity(d_), 0.0};
  for (Letter x : w) {
    out.m = out.m * gens_[x];
    renormalize(out.m, out.log_scale);
  }
  return out;
}

Matrix Representation::evaluate_plain(std::span<const Letter> w) const {
  Matrix m = Matrix::identity(d_);
  for (Letter x : w) m = m * gens_[x];
  return m;
}

Spectrum Representation::word_spectrum(std::span<const Letter> w) const {
  const auto base = evaluate(w);
  const auto eig = eigenvalues(base.m);
  Spectrum s = make_spectrum(eig, base.log_scale);
  if (d_ > 6) return s;

  // log of the top eigenvalue modulus of the k-th exterior power, k = 0..d
  std::vector<double> top(d_ + 1, 0.0);
  std::vector<bool> known(d_ + 1, false);
  known[0] = known[1] = known[d_] = true;
  top[1] = s.log_moduli[0];
  double log_det = 0;
  for (Letter x : w) log_det += log_abs_det_[x];
  top[d_] = log_det;
  auto exterior_top = [&](std::size_t k) {
    const auto& layer = ext_[k - 2];
    ScaledMatrix acc{Matrix::identity(layer[0].rows()), 0.0};
    for (Letter x : w) {
      acc.m = acc.m * layer[x];
      renormalize(acc.m, acc.log_scale);
    }
    const auto e = eigenvalues(acc.m);
    double best = 0;
    for (const auto& z : e) best = std::max(best, std::abs(z));
    return std::log(best) + acc.log_scale;
  };

  // Blocks: complex conjugate pairs (adjacent after sorting) or single eigenvalues.
  std::size_t k = 0;
  std::vector<double> refined(d_);
  while (k < d_) {
    const bool pair = k + 1 < d_ && s.eigenvalues[k].imag() != 0.0 &&
                      std::abs(s.eigenvalues[k] - std::conj(s.eigenvalues[k + 1])) <= 1e-12 * std::abs(s.eigenvalues[k]) + 1e-300;
    const std::size_t size = pair ? 2 : 1;
    const std::size_t end = k + size;
    if (!known[end]) {
      top[end] = exterior_top(end);
      known[end] = true;
    }
    const double lo = top[k];
    const double hi = top[end];
    for (std::size_t i = k; i < end; ++i) refined[i] = (hi - lo) / static_cast<double>(size);
    k = end;
  }
  Spectrum r;
  for (std::size_t i = 0; i < d_; ++i) {
    r.log_moduli.push_back(refined[i]);
    r.phases.push_back(s.phases[i]);
    r.eigenvalues.push_back(std::polar(std::exp(refined[i]), s.phases[i]));
  }
  r.proximality_gap = std::exp(r.log_moduli[0] - r.log_moduli[1]);
  r.top_is_real = s.top_is_real;
  return r;
}

std::string Representation::to_json(const group::GroupPresentation& p) const {
  json j;
  j["dimension"] = d_;
  j["genus"] = genus_;
  j["tolerance"] = tol_;
  json mats = json::object();
  for (std::size_t x = 0; x < gens_.size(); x += 2) mats[p.symbol(static_cast<Letter>(x))] = gens_[x].data();
  j["matrices"] = mats;
  return j.dump();
}

std::string Representation::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::string text = to_json(group::GroupPresentation(genus_));
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Representation load_representation(const group::GroupPresentation& p, std::size_t d,
                                   const std::map<std::string, Matrix>& matrices, double tol) {
  std::vector<Matrix> gens(static_cast<std::size_t>(p.num_letters()));
  std::vector<bool> have(gens.size(), false);
  for (const auto& [sym, m] : matrices) {
    const Letter x = p.parse_symbol(sym);
    if (m.rows() != d || m.cols() != d) throw Error(ErrorKind::validation, "matrix for " + sym + " is not " + std::to_string(d) + "x" + std::to_string(d));
    gens[x] = m;
    have[x] = true;
  }
  for (std::size_t x = 0; x < gens.size(); x += 2) {
    if (!have[x] && !have[x + 1]) {
      throw Error(ErrorKind::validation, "missing matrix for generator " + p.symbol(static_cast<Letter>(x)));
    }
    if (have[x] && have[x + 1]) continue;
    const std::size_t src = have[x] ? x : x + 1;
    const std::size_t dst = have[x] ? x + 1 : x;
    const double det = determinant(gens[src]);
    if (std::abs(det - 1.0) > tol) {
      throw Error(ErrorKind::validation, "determinant check failed for " + p.symbol(static_cast<Letter>(src)) + ": residual " +
                                             std::to_string(std::abs(det - 1.0)));
    }
    gens[dst] = inverse(gens[src]);
  }
  return Representation(p.genus(), std::move(gens), tol);
}

Representation representation_from_json(const std::string& text, const group::GroupPresentation& p) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::input, std::string("malformed representation JSON: ") + e.what());
  }
  try {
    const auto d = j.at("dimension").get<std::size_t>();
    if (j.contains("genus") && j.at("genus").get<int>() != p.genus()) {
      throw Error(ErrorKind::validation, "representation genus does not match presentation");
    }
    const double tol = j.value("tolerance", 1e-8);
    std::map<std::string, Matrix> mats;
    for (const auto& [sym, arr] : j.at("matrices").items()) {
      const auto vals = arr.get<std::vector<double>>();
      if (vals.size() != d * d) throw Error(ErrorKind::validation, "matrix for " + sym + " needs " + std::to_string(d * d) + " entries");
      Matrix m(d, d);
      m.data() = vals;
      mats.emplace(sym, std::move(m));
    }
    return load_representation(p, d, mats, tol);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::input, std::string("bad representation file: ") + e.what());
  }
}

Representation fuchsian_octagon(int genus) {
  const group::GroupPresentation p(genus);
  const group::ExactSurfaceRep exact(p);
  std::vector<Matrix> gens;
  for (int x = 0; x < p.num_letters(); ++x) {
    const auto e = exact.to_sl2r(exact.generator(static_cast<Letter>(x)));
    Matrix m(2, 2);
    for (std::size_t i = 0; i < 4; ++i) m.data()[i] = static_cast<double>(e[i]);
    gens.push_back(std::move(m));
  }
  Representation rep(genus, std::move(gens), 1e-8);
  for (int x = 0; x < p.num_letters(); ++x) {
    const auto& m = rep.generator(static_cast<Letter>(x));
    if (std::abs(m(0, 0) + m(1, 1)) <= 2.0) throw Error(ErrorKind::construction, "side pairing is not hyperbolic");
  }
  return rep;
}

Matrix symmetric_power(const Matrix& g, std::size_t d) {
  if (g.rows() != 2 || g.cols() != 2) throw Error(ErrorKind::input, "symmetric power needs a 2x2 matrix");
  if (d < 1) throw Error(ErrorKind::input, "symmetric power dimension must be >= 1");
  const double a = g(0, 0), b = g(0, 1), c = g(1, 0), dd = g(1, 1);
  Matrix out(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    // coefficients in t = y/x of (a + c t)^{d-1-i} (b + dd t)^i
    std::vector<double> poly{1.0};
    auto times = [&](double u, double v) {
      std::vector<double> next(poly.size() + 1, 0.0);
      for (std::size_t k = 0; k < poly.size(); ++k) {
        next[k] += poly[k] * u;
        next[k + 1] += poly[k] * v;
      }
      poly = std::move(next);
    };
    for (std::size_t k = 0; k + 1 + i < d; ++k) times(a, c);
    for (std::size_t k = 0; k < i; ++k) times(b, dd);
    for (std::size_t j = 0; j < d; ++j) out(j, i) = poly[j];
  }
  return out;
}

Representation symmetric_power_lift(const Representation& rep2, std::size_t d) {
  if (rep2.dimension() != 2) throw Error(ErrorKind::input, "symmetric power lift needs a d=2 representation");
  if (d < 2) throw Error(ErrorKind::input, "lift dimension must be >= 2");
  const group::GroupPresentation p(rep2.genus());
  std::vector<Matrix> gens;
  for (int x = 0; x < p.num_letters(); ++x) gens.push_back(symmetric_power(rep2.generator(static_cast<Letter>(x)), d));
  // tolerance scales with the entry growth of the lift
  return Representation(rep2.genus(), std::move(gens), std::max(rep2.tolerance(), 1e-8));
}

namespace {

// real power h^t of a hyperbolic h, sign fixed so that tr h > 2
Matrix hyperbolic_power(Matrix h, double t) {
  double tr = h(0, 0) + h(1, 1);
  if (tr < 0) {
    h *= -1.0;
    tr = -tr;
  }
  if (tr <= 2.0) throw Error(ErrorKind::construction, "twist curve is not hyperbolic");
  const double ell = std::acosh(tr / 2.0);
  // h^t = (sinh(t l) h - sinh((t - 1) l) I) / sinh(l)
  Matrix out = h;
  out *= std::sinh(t * ell);
  for (std::size_t i = 0; i < 2; ++i) out(i, i) -= std::sinh((t - 1) * ell);
  out *= 1.0 / std::sinh(ell);
  return out;
}

}  // namespace

Representation twisted_deformation(const Representation& rep2, std::uint64_t seed) {
  if (rep2.dimension() != 2) throw Error(ErrorKind::input, "twist deformation needs a d=2 representation");
  const int g = rep2.genus();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.15, 0.85);
  std::vector<Matrix> gens;
  for (int x = 0; x < 4 * g; ++x) gens.push_back(rep2.generator(static_cast<Letter>(x)));
  auto set = [&](int x, const Matrix& m) {
    gens[static_cast<std::size_t>(x)] = m;
    gens[static_cast<std::size_t>(x ^ 1)] = inverse(m);
  };
  // twists along each a_i then b_i: b_i -> b_i a_i^t, a_i -> a_i b_i^s
  for (int i = 0; i < g; ++i) {
    const auto a = static_cast<std::size_t>(4 * i), b = static_cast<std::size_t>(4 * i + 2);
    set(static_cast<int>(b), gens[b] * hyperbolic_power(gens[a], dist(rng)));
    set(static_cast<int>(a), gens[a] * hyperbolic_power(gens[b], dist(rng)));
  }
  // twist along the separating curves c_k = [a1,b1]...[ak,bk]: conjugate the first k handles
  Matrix c = Matrix::identity(2);
  for (int k = 0; k + 1 < g; ++k) {
    const auto at = [&](int x) -> const Matrix& { return gens[static_cast<std::size_t>(x)]; };
    c = c * at(4 * k) * at(4 * k + 2) * at(4 * k + 1) * at(4 * k + 3);
    const Matrix ct = hyperbolic_power(c, dist(rng));
    const Matrix ct_inv = inverse(ct);
    for (int x = 0; x < 4 * (k + 1); x += 2) set(x, ct * gens[static_cast<std::size_t>(x)] * ct_inv);
  }
  return Representation(g, std::move(gens), rep2.tolerance());
}

}  // namespace surfzeta::replin
