#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace surfzeta::cli {

enum ExitCode { kOk = 0, kConfigError = 1, kValidationError = 2, kResourceError = 3 };

struct SValue {
  double re = 0;
  double im = 0;
};

struct GridConfig {
  std::optional<double> re_min, re_max, im_min, im_max;  // default: h_est +- 0.3, +-0.3
  std::size_t n_re = 41, n_im = 41;
  std::string function = "selberg";  // zeta | selberg | det
  std::size_t j = 0;
};

struct RunConfig {
  int genus = 2;
  std::string rep_source = "fuchsian-octagon";  // fuchsian-octagon | file | symmetric-power
  std::string rep_path;                         // file, or base d=2 file for symmetric-power
  std::size_t d = 2;
  std::string weight_mode = "top";
  std::string cutoff_mode = "length";
  double cutoff_value = 8;
  int N = 12;
  int N_n = 40;
  int K = 20;
  std::vector<SValue> s_list;  // default: h_est + 1 and h_est + 1 + 0.7i
  GridConfig grid;
  std::vector<double> count_T;  // default: T_c - 2, T_c - 1, T_c
  std::string character_source = "none";  // none | theta | file
  std::vector<double> theta;
  std::string character_path;
  std::string automaton_path;  // use this automaton instead of building one
  int automaton_radius = 4;
  int validate_n = 5;
  std::string database_path;  // reuse a saved database instead of enumerating
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  unsigned threads = 1;
  int limitset_samples = 2000;
  int limitset_length = 12;

  /// Canonical JSON of every field; the config digest hashes this text.
  std::string to_json() const;
  std::string digest() const;
};

/// Parses a config file body; unknown keys are config errors.
RunConfig parse_config(const std::string& text);
/// Range and consistency checks; throws config errors.
void validate_config(const RunConfig& c);

/// Runs one subcommand. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace surfzeta::cli
