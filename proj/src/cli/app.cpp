#include "surfzeta/cli/app.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "surfzeta/error.hpp"
#include "surfzeta/group/automaton.hpp"
#include "surfzeta/group/ball.hpp"
#include "surfzeta/orbitdb/orbitdb.hpp"
#include "surfzeta/replin/character.hpp"
#include "surfzeta/replin/representation.hpp"
#include "surfzeta/zeta/zeta.hpp"

#ifndef SURFZETA_VERSION
#define SURFZETA_VERSION "dev"
#endif

namespace surfzeta::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
using zeta::cplx;

std::string fnv_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::input:
    case ErrorKind::config:
    case ErrorKind::staleness: return kConfigError;
    case ErrorKind::resource: return kResourceError;
    default: return kValidationError;
  }
}

struct Context {
  RunConfig cfg;
  std::string digest;
  std::string command;
  group::GroupPresentation p;
  fs::path out_dir;
  std::ostream* out;

  std::optional<replin::Representation> rep_;
  std::optional<group::CodingAutomaton> automaton_;
  std::optional<orbitdb::OrbitDatabase> db_;
  std::optional<zeta::ZetaData> zeta_;

  Context(RunConfig c, std::string cmd, std::ostream& o)
      : cfg(std::move(c)), digest(cfg.digest()), command(std::move(cmd)), p(cfg.genus), out(&o) {
    out_dir = cfg.output_dir;
  }

  json meta() const {
    return {{"tool", "surfzeta"}, {"version", SURFZETA_VERSION}, {"config_digest", digest}, {"command", command}};
  }
  std::string csv_header() const {
    return "# surfzeta " SURFZETA_VERSION " config_digest=" + digest + " command=" + command + "\n";
  }

  fs::path write(const std::string& name, const std::string& body) const {
    fs::create_directories(out_dir);
    const fs::path path = out_dir / name;
    std::ofstream f(path);
    if (!f) throw Error(ErrorKind::config, "cannot write " + path.string());
    f << body;
    if (!f) throw Error(ErrorKind::resource, "failed while writing " + path.string());
    *out << "wrote " << path.string() << "\n";
    return path;
  }
  fs::path write_json(const std::string& name, json body) const {
    body["meta"] = meta();
    return write(name, body.dump(2) + "\n");
  }

  const replin::Representation& rep() {
    if (rep_) return *rep_;
    if (cfg.rep_source == "fuchsian-octagon") {
      auto base = replin::fuchsian_octagon(cfg.genus);
      rep_.emplace(cfg.d == 2 ? std::move(base) : replin::symmetric_power_lift(base, cfg.d));
    } else if (cfg.rep_source == "file") {
      rep_.emplace(replin::representation_from_json(read_file(cfg.rep_path), p));
      if (rep_->dimension() != cfg.d) {
        throw Error(ErrorKind::config, "representation file has dimension " + std::to_string(rep_->dimension()) +
                                           " but the config asks for d = " + std::to_string(cfg.d));
      }
    } else {
      const auto base = replin::representation_from_json(read_file(cfg.rep_path), p);
      rep_.emplace(replin::symmetric_power_lift(base, cfg.d));
    }
    return *rep_;
  }

  const group::CodingAutomaton& automaton() {
    if (automaton_) return *automaton_;
    if (!cfg.automaton_path.empty()) {
      automaton_.emplace(group::CodingAutomaton::from_json(read_file(cfg.automaton_path), p));
      automaton_->check_invariants();
    } else {
      group::AutomatonOptions opts;
      opts.difference_radius = cfg.automaton_radius;
      automaton_.emplace(group::build_coding_automaton(p, opts));
    }
    return *automaton_;
  }

  const orbitdb::OrbitDatabase& db() {
    if (db_) return *db_;
    if (!cfg.database_path.empty()) {
      db_.emplace(orbitdb::load(cfg.database_path, p, rep().digest()));
      return *db_;
    }
    orbitdb::EnumerateOptions opts;
    opts.weight_mode = orbitdb::parse_weight_mode(cfg.weight_mode);
    opts.threads = cfg.threads;
    const orbitdb::Cutoff cut{cfg.cutoff_mode == "length" ? orbitdb::Cutoff::Mode::length : orbitdb::Cutoff::Mode::weight,
                              cfg.cutoff_value};
    orbitdb::EnumerationStats stats;
    const auto t0 = std::chrono::steady_clock::now();
    db_.emplace(orbitdb::enumerate_primitive_classes(automaton(), p, rep(), cut, opts, &stats));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    *out << "enumerated " << db_->records.size() << " primitive classes (n_max " << db_->n_max << ", "
         << stats.merged << " merged labels) in " << num(secs) << " s\n";
    return *db_;
  }

  const zeta::ZetaData& zd() {
    if (!zeta_) zeta_.emplace(db());
    return *zeta_;
  }

  replin::UnitaryCharacter character() {
    if (cfg.character_source == "theta") return replin::UnitaryCharacter::abelianization(cfg.genus, cfg.theta);
    if (cfg.character_source == "file") return replin::UnitaryCharacter::from_json(read_file(cfg.character_path), p);
    return replin::UnitaryCharacter::trivial(cfg.genus);
  }

  std::vector<cplx> s_values(double h) const {
    std::vector<cplx> s;
    for (const auto& v : cfg.s_list) s.emplace_back(v.re, v.im);
    if (s.empty()) s = {cplx(h + 1, 0), cplx(h + 1, 0.7)};
    return s;
  }
};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); }

std::string csv_row(cplx s, cplx v, const std::string& method, const std::string& trunc) {
  return num(s.real()) + "," + num(s.imag()) + "," + num(v.real()) + "," + num(v.imag()) + "," + method + "," + trunc + "\n";
}

// ---- subcommands ----

int cmd_automaton(Context& c) {
  const auto& a = c.automaton();
  const auto report = group::validate_automaton(a, c.p, c.cfg.validate_n, false);
  auto body = json::parse(a.to_json(c.p));
  c.write_json("automaton.json", body);
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"n", r.n}, {"paths", r.paths}, {"sphere", r.sphere}, {"cycle_classes", r.cycle_classes},
                    {"brute_classes", r.brute_classes}});
  }
  json rep = {{"pass", report.pass}, {"rows", rows}, {"message", report.message}};
  rep["aperiodicity_N"] = report.aperiodicity_n ? json(*report.aperiodicity_n) : json(nullptr);
  rep["first_failure"] = report.first_failure;
  c.write_json("automaton_report.json", rep);
  *c.out << "automaton: " << a.num_vertices() << " vertices, " << a.edges().size() << " edges; validation "
         << (report.pass ? "passed" : "FAILED: " + report.message) << "\n";
  return report.pass ? kOk : kValidationError;
}

int cmd_orbits(Context& c) {
  const auto& db = c.db();
  json extra = c.meta();
  fs::create_directories(c.out_dir);
  orbitdb::save(db, (c.out_dir / "orbits.jsonl").string(), c.p, extra.dump());
  *c.out << "wrote " << (c.out_dir / "orbits.jsonl").string() << "\n";
  return kOk;
}

json entropy_json(const zeta::EntropyEstimate& h) {
  json diag = json::array();
  for (double v : h.diagnostics) diag.push_back(std::isnan(v) ? json(nullptr) : json(v));
  return {{"value", h.value}, {"bracket", {h.lo, h.hi}}, {"n_used", h.n_used}, {"estimator", h.estimator},
          {"per_n_roots_from_n2", diag}};
}

int cmd_entropy(Context& c) {
  const auto h = zeta::entropy(c.zd());
  c.write_json("entropy.json", entropy_json(h));
  *c.out << "entropy estimate " << num(h.value) << " in [" << num(h.lo) << ", " << num(h.hi) << "]\n";
  return kOk;
}

int cmd_zeta(Context& c) {
  const auto& z = c.zd();
  const double h = c.cfg.s_list.empty() ? zeta::entropy(z).value : std::nan("");
  std::string csv = c.csv_header() + "s_re,s_im,value_re,value_im,method,truncation\n";
  json checks = json::array();
  const int n_tr = std::min(c.db().n_max, c.cfg.N);
  for (const cplx s : c.s_values(h)) {
    const cplx e = zeta::euler_zeta(z, s);
    const cplx d = zeta::zeta_via_determinants(z, s, c.cfg.N);
    const cplx zs = zeta::euler_selberg(z, s, zeta::kNoCutoff, c.cfg.N_n);
    const cplx zs1 = zeta::euler_selberg(z, s + 1.0, zeta::kNoCutoff, c.cfg.N_n);
    const cplx zd = zeta::selberg_via_determinants(z, s, c.cfg.N, c.cfg.K);
    csv += csv_row(s, e, "euler_zeta", "all_records");
    csv += csv_row(s, d, "determinant_zeta", "N=" + std::to_string(c.cfg.N));
    csv += csv_row(s, zs, "euler_selberg", "N_n=" + std::to_string(c.cfg.N_n));
    csv += csv_row(s, zd, "determinant_selberg", "N=" + std::to_string(c.cfg.N) + ";K=" + std::to_string(c.cfg.K));
    const zeta::TraceTable t(z, s, n_tr);
    checks.push_back({{"s", {s.real(), s.imag()}},
                      {"euler_vs_determinant_rel", rel(e, d)},
                      {"identity_zeta_vs_selberg_ratio_rel", rel(e, zs1 / zs)},
                      {"alternating_trace_residual", t.alternating_residual()}});
  }
  c.write("zeta.csv", csv);
  json diag = {{"checks", checks}};
  if (!std::isnan(h)) diag["entropy_estimate"] = h;
  c.write_json("zeta_diagnostics.json", diag);
  return kOk;
}

int cmd_lfun(Context& c) {
  const auto& z = c.zd();
  const auto chi = c.character();
  const double h = c.cfg.s_list.empty() ? zeta::entropy(z).value : std::nan("");
  std::string csv = c.csv_header() + "s_re,s_im,value_re,value_im,method,truncation\n";
  json checks = json::array();
  for (const cplx s : c.s_values(h)) {
    const cplx l = zeta::l_euler_zeta(z, chi, s);
    const cplx ls = zeta::l_euler_selberg(z, chi, s, zeta::kNoCutoff, c.cfg.N_n);
    const cplx ls1 = zeta::l_euler_selberg(z, chi, s + 1.0, zeta::kNoCutoff, c.cfg.N_n);
    csv += csv_row(s, l, "l_euler_zeta", "all_records");
    csv += csv_row(s, ls, "l_euler_selberg", "N_n=" + std::to_string(c.cfg.N_n));
    checks.push_back({{"s", {s.real(), s.imag()}}, {"identity_l_vs_selberg_ratio_rel", rel(l, ls1 / ls)},
                      {"untwisted_rel", rel(l, zeta::euler_zeta(z, s))}});
  }
  c.write("lfun.csv", csv);
  c.write_json("lfun_diagnostics.json", {{"character", json::parse(chi.to_json(c.p))}, {"checks", checks}});
  return kOk;
}

int cmd_count(Context& c) {
  const auto& z = c.zd();
  const auto h = zeta::entropy(z);
  std::vector<double> T = c.cfg.count_T;
  const double tc = c.db().complete_weight();
  if (T.empty()) T = {tc - 2, tc - 1, tc};
  const auto rows = zeta::counting_report(z, T, h.value);
  std::string csv = c.csv_header() + "T,pi,li,ratio\n";
  for (const auto& r : rows) csv += num(r.T) + "," + std::to_string(r.pi) + "," + num(r.li) + "," + num(r.ratio) + "\n";
  c.write("count.csv", csv);
  c.write_json("count_diagnostics.json", {{"entropy", entropy_json(h)}, {"complete_weight", tc}});
  return kOk;
}

int cmd_scan(Context& c) {
  const auto& z = c.zd();
  const auto& g = c.cfg.grid;
  double h = std::nan("");
  if (!g.re_min || !g.re_max) h = zeta::entropy(z).value;
  zeta::ScanOptions opts;
  opts.which = g.function == "zeta" ? zeta::ScanFunction::zeta
               : g.function == "det" ? zeta::ScanFunction::det
                                     : zeta::ScanFunction::selberg;
  opts.det_j = g.j;
  opts.N = c.cfg.N;
  opts.K = c.cfg.K;
  opts.threads = c.cfg.threads;
  const auto grid = zeta::scan(z, g.re_min.value_or(h - 0.3), g.re_max.value_or(h + 0.3), g.im_min.value_or(-0.3),
                               g.im_max.value_or(0.3), g.n_re, g.n_im, opts);
  std::string csv = c.csv_header() + "s_re,s_im,log_abs,flag\n";
  for (std::size_t j = 0; j < grid.n_im; ++j) {
    for (std::size_t i = 0; i < grid.n_re; ++i) {
      const cplx s = grid.node(i, j);
      csv += num(s.real()) + "," + num(s.imag()) + "," + num(grid.at(i, j)) + "," + std::to_string(grid.flag[j * grid.n_re + i]) + "\n";
    }
  }
  c.write("scan.csv", csv);
  json minima = json::array();
  const auto mins = grid.local_minima();
  for (std::size_t k = 0; k < std::min<std::size_t>(10, mins.size()); ++k) {
    const cplx s = grid.node(mins[k].first, mins[k].second);
    minima.push_back({{"s", {s.real(), s.imag()}}, {"log_abs", grid.at(mins[k].first, mins[k].second)}});
  }
  const auto [ai, aj] = grid.argmin();
  const cplx sm = grid.node(ai, aj);
  json diag = {{"function", g.function}, {"argmin", {sm.real(), sm.imag()}}, {"local_minima", minima}};
  if (!std::isnan(h)) diag["entropy_estimate"] = h;
  c.write_json("scan_diagnostics.json", diag);
  *c.out << "deepest node " << num(sm.real()) << " + " << num(sm.imag()) << "i\n";
  return kOk;
}

int cmd_limitset(Context& c) {
  const auto& rep = c.rep();
  std::mt19937_64 rng(c.cfg.seed);
  const int letters = c.p.num_letters();
  std::string csv = c.csv_header() + "word";
  for (std::size_t k = 0; k < rep.dimension(); ++k) csv += ",x" + std::to_string(k);
  csv += "\n";
  int skipped = 0;
  for (int i = 0; i < c.cfg.limitset_samples; ++i) {
    std::vector<group::Letter> w;
    while (static_cast<int>(w.size()) < c.cfg.limitset_length) {
      const auto x = static_cast<group::Letter>(rng() % static_cast<std::uint64_t>(letters));
      if (!w.empty() && x == group::inverse(w.back())) continue;
      if (static_cast<int>(w.size()) + 1 == c.cfg.limitset_length && x == group::inverse(w.front())) continue;
      w.push_back(x);
    }
    try {
      const auto v = replin::projective_fixed_point(rep.evaluate(w).m);
      csv += c.p.format(w);
      for (double x : v) csv += "," + num(x);
      csv += "\n";
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::domain) throw;
      ++skipped;
    }
  }
  c.write("limitset.csv", csv);
  if (skipped > 0) *c.out << skipped << " non-proximal samples skipped\n";
  return kOk;
}

int cmd_verify(Context& c) {
  json checks = json::array();
  bool all = true;
  auto check = [&](const std::string& name, double value, double tol, bool pass) {
    checks.push_back({{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", pass}});
    all = all && pass;
    *c.out << (pass ? "PASS " : "FAIL ") << name << " value=" << num(value) << " tol=" << num(tol) << "\n";
  };

  const auto& a = c.automaton();
  const auto report = group::validate_automaton(a, c.p, std::min(c.cfg.validate_n, 5), false);
  check("automaton_counts_vs_oracles", report.first_failure, 0, report.pass);

  const auto& db = c.db();
  double lemma = 0;
  for (const auto& r : db.records) lemma = std::max(lemma, orbitdb::multiplier_residual(r, db.d));
  check("multiplier_product_identity", lemma, 1e-9, lemma <= 1e-9);

  const auto& rep = c.rep();
  std::mt19937_64 rng(c.cfg.seed);
  double conj = 0;
  for (int i = 0; i < 50 && !db.records.empty(); ++i) {
    const auto& r = db.records[rng() % db.records.size()];
    auto w = r.word;
    std::rotate(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(rng() % w.size()), w.end());
    const double d = replin::weight_top(rep.word_spectrum(w));
    conj = std::max(conj, std::abs(d - r.d_top) / r.d_top);
  }
  check("weight_conjugation_invariance", conj, 1e-9, conj <= 1e-9);

  const auto& z = c.zd();
  const auto h = zeta::entropy(z);
  check("entropy_bracket_contains_value", h.hi - h.lo, 0, h.lo <= h.value && h.value <= h.hi);

  double alt = 0;
  const int n_tr = std::min(db.n_max, 8);
  for (const cplx s : {cplx(h.value + 1, 0), cplx(h.value + 1.5, 1), cplx(h.value + 2, -2), cplx(h.value + 0.5, 3),
                       cplx(h.value + 3, 0.25)}) {
    alt = std::max(alt, zeta::TraceTable(z, s, n_tr).alternating_residual());
  }
  check("alternating_trace_identity", alt, 1e-10, alt <= 1e-10);

  const cplx s1(h.value + 1, 0);
  const double id14 = rel(zeta::euler_zeta(z, s1), zeta::euler_selberg(z, s1 + 1.0, zeta::kNoCutoff, c.cfg.N_n) /
                                                        zeta::euler_selberg(z, s1, zeta::kNoCutoff, c.cfg.N_n));
  check("zeta_selberg_ratio_identity", id14, 1e-8, id14 <= 1e-8);

  const double cross = rel(zeta::euler_zeta(z, s1), zeta::zeta_via_determinants(z, s1, c.cfg.N));
  check("euler_vs_determinant", cross, 1e-4, cross <= 1e-4);

  const auto triv = replin::UnitaryCharacter::trivial(c.cfg.genus);
  const double tr = rel(zeta::euler_zeta(z, s1), zeta::l_euler_zeta(z, triv, s1));
  check("trivial_character_reduction", tr, 1e-12, tr <= 1e-12);

  c.write_json("verify.json", {{"pass", all}, {"checks", checks}});
  return all ? kOk : kValidationError;
}

void add_overrides(CLI::App& sub, RunConfig& flags, std::vector<std::string>& touched) {
  auto mark = [&touched](const std::string& key) { return [&touched, key](const auto&) { touched.push_back(key); }; };
  sub.add_option_function<int>("--genus", [&, m = mark("genus")](int v) { flags.genus = v; m(v); }, "surface genus (>= 2)");
  sub.add_option_function<std::string>("--rep", [&, m = mark("rep_source")](const std::string& v) { flags.rep_source = v; m(v); },
                                       "fuchsian-octagon | file | symmetric-power");
  sub.add_option_function<std::string>("--rep-file", [&, m = mark("rep_path")](const std::string& v) { flags.rep_path = v; m(v); },
                                       "representation JSON file");
  sub.add_option_function<std::size_t>("--dim", [&, m = mark("d")](std::size_t v) { flags.d = v; m(v); }, "dimension d");
  sub.add_option_function<std::string>("--weight-mode", [&, m = mark("weight_mode")](const std::string& v) { flags.weight_mode = v; m(v); },
                                       "top | spread");
  sub.add_option_function<double>("--n-max", [&, m = mark("n_max")](double v) { flags.cutoff_mode = "length"; flags.cutoff_value = v; m(v); },
                                  "length cutoff");
  sub.add_option_function<double>("--T-max", [&, m = mark("T_max")](double v) { flags.cutoff_mode = "weight"; flags.cutoff_value = v; m(v); },
                                  "weight cutoff");
  sub.add_option_function<int>("--N", [&, m = mark("N")](int v) { flags.N = v; m(v); }, "determinant coefficients");
  sub.add_option_function<int>("--Nn", [&, m = mark("N_n")](int v) { flags.N_n = v; m(v); }, "Selberg n-product truncation");
  sub.add_option_function<int>("--K", [&, m = mark("K")](int v) { flags.K = v; m(v); }, "shifts in the determinant Selberg product");
  sub.add_option_function<std::vector<std::string>>(
      "--s",
      [&, m = mark("s_list")](const std::vector<std::string>& v) {
        flags.s_list.clear();
        for (const auto& item : v) {
          SValue s;
          if (std::sscanf(item.c_str(), "%lf,%lf", &s.re, &s.im) < 1) throw CLI::ValidationError("--s", "expected re[,im]");
          flags.s_list.push_back(s);
        }
        m(v);
      },
      "evaluation points re[,im]");
  sub.add_option_function<std::vector<double>>("--theta", [&, m = mark("theta")](const std::vector<double>& v) {
    flags.character_source = "theta";
    flags.theta = v;
    m(v);
  }, "abelianization character phases")->delimiter(',');
  sub.add_option_function<std::string>("--character-file", [&, m = mark("character")](const std::string& v) {
    flags.character_source = "file";
    flags.character_path = v;
    m(v);
  }, "character JSON file");
  sub.add_option_function<std::string>("--database", [&, m = mark("database")](const std::string& v) { flags.database_path = v; m(v); },
                                       "reuse a saved orbit database");
  sub.add_option_function<std::string>("--automaton-file", [&, m = mark("automaton_path")](const std::string& v) { flags.automaton_path = v; m(v); },
                                       "use a saved automaton");
  sub.add_option_function<std::string>("--output-dir", [&, m = mark("output_dir")](const std::string& v) { flags.output_dir = v; m(v); },
                                       "output directory");
  sub.add_option_function<std::uint64_t>("--seed", [&, m = mark("seed")](std::uint64_t v) { flags.seed = v; m(v); }, "random seed");
  sub.add_option_function<unsigned>("--threads", [&, m = mark("threads")](unsigned v) { flags.threads = v; m(v); }, "worker cap");
}

void apply_overrides(RunConfig& cfg, const RunConfig& flags, const std::vector<std::string>& touched) {
  for (const auto& key : touched) {
    if (key == "genus") cfg.genus = flags.genus;
    else if (key == "rep_source") cfg.rep_source = flags.rep_source;
    else if (key == "rep_path") cfg.rep_path = flags.rep_path;
    else if (key == "d") cfg.d = flags.d;
    else if (key == "weight_mode") cfg.weight_mode = flags.weight_mode;
    else if (key == "n_max" || key == "T_max") {
      cfg.cutoff_mode = flags.cutoff_mode;
      cfg.cutoff_value = flags.cutoff_value;
    } else if (key == "N") cfg.N = flags.N;
    else if (key == "N_n") cfg.N_n = flags.N_n;
    else if (key == "K") cfg.K = flags.K;
    else if (key == "s_list") cfg.s_list = flags.s_list;
    else if (key == "theta") {
      cfg.character_source = "theta";
      cfg.theta = flags.theta;
    } else if (key == "character") {
      cfg.character_source = "file";
      cfg.character_path = flags.character_path;
    } else if (key == "database") cfg.database_path = flags.database_path;
    else if (key == "automaton_path") cfg.automaton_path = flags.automaton_path;
    else if (key == "output_dir") cfg.output_dir = flags.output_dir;
    else if (key == "seed") cfg.seed = flags.seed;
    else if (key == "threads") cfg.threads = flags.threads;
  }
}

}  // namespace

std::string RunConfig::to_json() const {
  json s = json::array();
  for (const auto& v : s_list) s.push_back({v.re, v.im});
  json grid_j = {{"n_re", grid.n_re}, {"n_im", grid.n_im}, {"function", grid.function}, {"j", grid.j}};
  if (grid.re_min) grid_j["re_min"] = *grid.re_min;
  if (grid.re_max) grid_j["re_max"] = *grid.re_max;
  if (grid.im_min) grid_j["im_min"] = *grid.im_min;
  if (grid.im_max) grid_j["im_max"] = *grid.im_max;
  json j = {
      {"genus", genus},
      {"representation", {{"source", rep_source}, {"path", rep_path}, {"d", d}}},
      {"weight_mode", weight_mode},
      {"cutoff", {{"mode", cutoff_mode}, {"value", cutoff_value}}},
      {"truncations", {{"N", N}, {"N_n", N_n}, {"K", K}}},
      {"s_list", s},
      {"grid", grid_j},
      {"count_T", count_T},
      {"character", {{"source", character_source}, {"theta", theta}, {"path", character_path}}},
      {"automaton", {{"path", automaton_path}, {"difference_radius", automaton_radius}, {"validate_n", validate_n}}},
      {"database", database_path},
      {"seed", seed},
      {"limitset", {{"samples", limitset_samples}, {"length", limitset_length}}},
  };
  // output_dir and threads do not change numeric payloads, so they stay out of the digest
  return j.dump();
}

std::string RunConfig::digest() const { return fnv_hex(to_json()); }

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::config, "config must be a JSON object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& k = it.key();
      const auto& v = it.value();
      if (k == "genus") c.genus = v.get<int>();
      else if (k == "representation") {
        c.rep_source = v.value("source", c.rep_source);
        c.rep_path = v.value("path", c.rep_path);
        c.d = v.value("d", c.d);
      } else if (k == "weight_mode") c.weight_mode = v.get<std::string>();
      else if (k == "cutoff") {
        c.cutoff_mode = v.value("mode", c.cutoff_mode);
        c.cutoff_value = v.value("value", c.cutoff_value);
      } else if (k == "truncations") {
        c.N = v.value("N", c.N);
        c.N_n = v.value("N_n", c.N_n);
        c.K = v.value("K", c.K);
        if (v.contains("n_max")) {
          c.cutoff_mode = "length";
          c.cutoff_value = v.at("n_max").get<double>();
        }
      } else if (k == "s_list") {
        for (const auto& s : v) {
          if (s.is_number()) c.s_list.push_back({s.get<double>(), 0});
          else c.s_list.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
        }
      } else if (k == "grid") {
        if (v.contains("re_min")) c.grid.re_min = v.at("re_min").get<double>();
        if (v.contains("re_max")) c.grid.re_max = v.at("re_max").get<double>();
        if (v.contains("im_min")) c.grid.im_min = v.at("im_min").get<double>();
        if (v.contains("im_max")) c.grid.im_max = v.at("im_max").get<double>();
        c.grid.n_re = v.value("n_re", c.grid.n_re);
        c.grid.n_im = v.value("n_im", c.grid.n_im);
        c.grid.function = v.value("function", c.grid.function);
        c.grid.j = v.value("j", c.grid.j);
      } else if (k == "count_T") c.count_T = v.get<std::vector<double>>();
      else if (k == "character") {
        c.character_source = v.value("source", c.character_source);
        if (v.contains("theta")) c.theta = v.at("theta").get<std::vector<double>>();
        c.character_path = v.value("path", c.character_path);
      } else if (k == "automaton") {
        c.automaton_path = v.value("path", c.automaton_path);
        c.automaton_radius = v.value("difference_radius", c.automaton_radius);
        c.validate_n = v.value("validate_n", c.validate_n);
      } else if (k == "database") c.database_path = v.get<std::string>();
      else if (k == "output_dir") c.output_dir = v.get<std::string>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "threads") c.threads = v.get<unsigned>();
      else if (k == "limitset") {
        c.limitset_samples = v.value("samples", c.limitset_samples);
        c.limitset_length = v.value("length", c.limitset_length);
      } else {
        throw Error(ErrorKind::config, "unknown config key '" + k + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("bad config value: ") + e.what());
  }
  return c;
}

void validate_config(const RunConfig& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::config, msg); };
  if (c.genus < 2) fail("genus >= 2 required (surface groups of genus g >= 2), got " + std::to_string(c.genus));
  if (c.genus > 8) fail("genus <= 8 supported by the exact backend");
  if (c.rep_source != "fuchsian-octagon" && c.rep_source != "file" && c.rep_source != "symmetric-power") {
    fail("representation source must be fuchsian-octagon, file or symmetric-power");
  }
  if (c.rep_source != "fuchsian-octagon" && c.rep_path.empty()) fail("representation source '" + c.rep_source + "' needs a path");
  if (c.rep_source != "fuchsian-octagon" && !fs::exists(c.rep_path)) fail("representation file not found: " + c.rep_path);
  if (c.d < 2 || c.d > 8) fail("dimension d must be in [2, 8]");
  if (c.weight_mode != "top" && c.weight_mode != "spread") fail("weight_mode must be top or spread");
  if (c.cutoff_mode != "length" && c.cutoff_mode != "weight") fail("cutoff mode must be length or weight");
  if (c.cutoff_mode == "length" && (c.cutoff_value < 0 || c.cutoff_value > 12 || c.cutoff_value != std::floor(c.cutoff_value))) {
    fail("length cutoff must be an integer in [0, 12]");
  }
  if (c.cutoff_mode == "weight" && !(c.cutoff_value >= 0 && c.cutoff_value <= 50)) fail("weight cutoff must be in [0, 50]");
  if (c.N < 0 || c.N > 40) fail("N must be in [0, 40]");
  if (c.N_n < 0 || c.N_n > 500) fail("N_n must be in [0, 500]");
  if (c.K < 0 || c.K > 200) fail("K must be in [0, 200]");
  if (c.grid.n_re < 1 || c.grid.n_im < 1 || c.grid.n_re * c.grid.n_im > 1'000'000) fail("grid resolution out of range");
  if (c.grid.function != "zeta" && c.grid.function != "selberg" && c.grid.function != "det") fail("grid function must be zeta, selberg or det");
  if (c.grid.j >= c.d) fail("grid determinant index j must be < d");
  if (c.character_source != "none" && c.character_source != "theta" && c.character_source != "file") {
    fail("character source must be none, theta or file");
  }
  if (c.character_source == "theta" && c.theta.size() != static_cast<std::size_t>(2 * c.genus)) {
    fail("theta needs 2g = " + std::to_string(2 * c.genus) + " entries");
  }
  if (c.character_source == "file" && !fs::exists(c.character_path)) fail("character file not found: " + c.character_path);
  if (!c.database_path.empty() && !fs::exists(c.database_path)) fail("database file not found: " + c.database_path);
  if (!c.automaton_path.empty() && !fs::exists(c.automaton_path)) fail("automaton file not found: " + c.automaton_path);
  if (c.automaton_radius < 2 || c.automaton_radius > 8) fail("automaton difference_radius must be in [2, 8]");
  if (c.validate_n < 0 || c.validate_n > 6) fail("automaton validate_n must be in [0, 6]");
  if (c.threads < 1 || c.threads > 256) fail("threads must be in [1, 256]");
  if (c.limitset_samples < 0 || c.limitset_length < 1) fail("limitset samples/length out of range");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"surfzeta: zeta functions of surface group representations"};
  app.set_version_flag("--version", SURFZETA_VERSION);
  app.require_subcommand(1);
  std::string config_path;
  RunConfig flags;
  std::vector<std::string> touched;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"automaton", "build and validate the coding automaton"},
      {"orbits", "enumerate primitive classes and write the database"},
      {"entropy", "estimate the entropy"},
      {"zeta", "evaluate the zeta functions by Euler product and by determinants"},
      {"lfun", "evaluate twisted L-functions"},
      {"count", "orbit counting report"},
      {"scan", "log|F(s)| on a grid"},
      {"limitset", "sample attracting fixed points"},
      {"verify", "run the invariant battery"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "JSON config file");
    add_overrides(*sub, flags, touched);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  std::string command;
  for (const auto* sub : app.get_subcommands()) command = sub->get_name();

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : parse_config(read_file(config_path));
    if (const char* env = std::getenv("SURFZETA_OUTPUT_DIR"); env != nullptr && *env != '\0') cfg.output_dir = env;
    apply_overrides(cfg, flags, touched);
    validate_config(cfg);
    Context c(std::move(cfg), command, out);
    if (command == "automaton") return cmd_automaton(c);
    if (command == "orbits") return cmd_orbits(c);
    if (command == "entropy") return cmd_entropy(c);
    if (command == "zeta") return cmd_zeta(c);
    if (command == "lfun") return cmd_lfun(c);
    if (command == "count") return cmd_count(c);
    if (command == "scan") return cmd_scan(c);
    if (command == "limitset") return cmd_limitset(c);
    return cmd_verify(c);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::bad_alloc&) {
    err << "resource error: out of memory\n";
    return kResourceError;
  } catch (const fs::filesystem_error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace surfzeta::cli
