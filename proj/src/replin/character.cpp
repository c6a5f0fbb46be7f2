#include "surfzeta/replin/character.hpp"

#include <numbers>

#include <json.hpp>

namespace surfzeta::replin {
namespace {

using json = nlohmann::json;
using cd = std::complex<double>;

CMatrix adjoint(const CMatrix& m) {
  CMatrix r(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) r(j, i) = std::conj(m(i, j));
  }
  return r;
}

}  // namespace

UnitaryCharacter UnitaryCharacter::trivial(int genus) {
  return abelianization(genus, std::vector<double>(static_cast<std::size_t>(2 * genus), 0.0));
}

UnitaryCharacter UnitaryCharacter::abelianization(int genus, std::vector<double> theta) {
  if (theta.size() != static_cast<std::size_t>(2 * genus)) {
    throw Error(ErrorKind::input, "theta needs " + std::to_string(2 * genus) + " entries");
  }
  UnitaryCharacter c;
  c.mode_ = Mode::abelianization;
  c.genus_ = genus;
  c.n_ = 1;
  c.theta_ = std::move(theta);
  return c;
}

UnitaryCharacter UnitaryCharacter::explicit_matrices(int genus, std::vector<CMatrix> mats, double tol) {
  const group::GroupPresentation p(genus);
  if (mats.size() != static_cast<std::size_t>(p.num_letters())) {
    throw Error(ErrorKind::validation, "character needs one matrix per generator letter");
  }
  const std::size_t n = mats[0].rows();
  for (std::size_t x = 0; x < mats.size(); ++x) {
    const auto& m = mats[x];
    if (m.rows() != n || m.cols() != n) throw Error(ErrorKind::validation, "character matrices have inconsistent shapes");
    const double res = distance_to_scalar(m * adjoint(m), cd(1.0));
    if (res > tol) {
      throw Error(ErrorKind::validation, "character matrix for " + p.symbol(static_cast<group::Letter>(x)) +
                                             " is not unitary: residual " + std::to_string(res));
    }
  }
  UnitaryCharacter c;
  c.mode_ = Mode::explicit_matrices;
  c.genus_ = genus;
  c.n_ = n;
  c.mats_ = std::move(mats);
  const double rel = distance_to_scalar(c.value_word(p.relator()), cd(1.0));
  if (rel > tol) throw Error(ErrorKind::validation, "character relator residual " + std::to_string(rel) + " exceeds tolerance");
  return c;
}

bool UnitaryCharacter::is_trivial() const {
  if (mode_ == Mode::abelianization) {
    for (double t : theta_) {
      if (t - std::round(t) != 0.0) return false;
    }
    return true;
  }
  for (const auto& m : mats_) {
    if (distance_to_scalar(m, cd(1.0)) != 0.0) return false;
  }
  return true;
}

std::complex<double> UnitaryCharacter::value_ab(std::span<const int> ab) const {
  if (mode_ != Mode::abelianization) throw Error(ErrorKind::input, "value_ab needs an abelianization character");
  if (ab.size() != theta_.size()) throw Error(ErrorKind::input, "abelianization vector has the wrong length");
  double phase = 0;
  for (std::size_t k = 0; k < ab.size(); ++k) phase += theta_[k] * ab[k];
  phase -= std::floor(phase);
  return std::polar(1.0, 2.0 * std::numbers::pi * phase);
}

CMatrix UnitaryCharacter::value_word(std::span<const group::Letter> w) const {
  if (mode_ == Mode::abelianization) {
    const group::GroupPresentation p(genus_);
    const auto ab = p.exponent_sums(w);
    CMatrix m(1, 1);
    m(0, 0) = value_ab(ab);
    return m;
  }
  CMatrix m = CMatrix::identity(n_);
  for (auto x : w) m = m * mats_[x];
  return m;
}

std::string UnitaryCharacter::to_json(const group::GroupPresentation& p) const {
  json j;
  j["N"] = n_;
  if (mode_ == Mode::abelianization) {
    j["mode"] = "abelianization";
    j["theta"] = theta_;
  } else {
    j["mode"] = "explicit";
    json mats = json::object();
    for (std::size_t x = 0; x < mats_.size(); x += 2) {
      json rows = json::array();
      for (const auto& z : mats_[x].data()) rows.push_back(json::array({z.real(), z.imag()}));
      mats[p.symbol(static_cast<group::Letter>(x))] = rows;
    }
    j["matrices"] = mats;
  }
  return j.dump();
}

UnitaryCharacter UnitaryCharacter::from_json(const std::string& text, const group::GroupPresentation& p) {
  try {
    const auto j = json::parse(text);
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "abelianization" || mode == "theta") {
      return abelianization(p.genus(), j.at("theta").get<std::vector<double>>());
    }
    if (mode != "explicit") throw Error(ErrorKind::input, "unknown character mode '" + mode + "'");
    const auto n = j.at("N").get<std::size_t>();
    const double tol = j.value("tolerance", 1e-8);
    std::vector<CMatrix> mats(static_cast<std::size_t>(p.num_letters()));
    std::vector<bool> have(mats.size(), false);
    for (const auto& [sym, arr] : j.at("matrices").items()) {
      const auto x = p.parse_symbol(sym);
      if (arr.size() != n * n) throw Error(ErrorKind::validation, "character matrix for " + sym + " needs N*N entries");
      CMatrix m(n, n);
      for (std::size_t k = 0; k < n * n; ++k) {
        const auto& e = arr.at(k);
        m.data()[k] = e.is_array() ? cd(e.at(0).get<double>(), e.at(1).get<double>()) : cd(e.get<double>(), 0.0);
      }
      mats[x] = std::move(m);
      have[x] = true;
    }
    for (std::size_t x = 0; x < mats.size(); x += 2) {
      if (!have[x] && !have[x + 1]) throw Error(ErrorKind::validation, "missing character matrix for " + p.symbol(static_cast<group::Letter>(x)));
      if (!have[x]) mats[x] = adjoint(mats[x + 1]);
      if (!have[x + 1]) mats[x + 1] = adjoint(mats[x]);
    }
    return explicit_matrices(p.genus(), std::move(mats), tol);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::input, std::string("bad character file: ") + e.what());
  }
}

}  // namespace surfzeta::replin
