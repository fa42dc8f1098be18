#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "chargegrid/lemmas.hpp"

namespace chargegrid::cli {

using analytic::QuadratureConfig;

enum class Mode { Analytic, Mc, Compare, SweepTc, OracleCheck, X1X2Check };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);

// "min:max:steps", inclusive of both ends.
struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  int steps = 2;

  std::vector<double> values() const;
  std::string to_string() const;
  static GridSpec parse(const std::string& text);
};

struct RunConfig {
  Mode mode = Mode::Compare;
  std::string preset;
  ModelParams params;
  double d_h = 2000.0;
  double d_v = 3000.0;
  std::optional<GridSpec> x_grid;  // default: 25 points over [0, d_h + d_v]
  std::uint64_t n = 100000;
  std::uint64_t seed = 1;
  std::string out;  // empty: standard output
  double tol_sigma = 3.0;
  int workers = 1;
  analytic::Formulation formulation = analytic::Formulation::LeafExact;
  QuadratureConfig quadrature;
  GridSpec trip_grid{1000.0, 7000.0, 7};  // sweep-tc trip lengths, split in the d_h : d_v ratio
  std::vector<double> p_values{0.05, 0.1, 0.2};
  int margin = 1;

  std::vector<double> xs() const;
  void validate() const;
};

// Invalid configuration; `line` is 1-based when the problem can be traced to a config file line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::optional<int> line = std::nullopt);
  std::optional<int> line() const { return line_; }

 private:
  std::optional<int> line_;
};

struct Preset {
  const char* name;
  double lambda;
  double d_h;
  double d_v;
};

const std::vector<Preset>& presets();
void apply_preset(RunConfig& cfg, const std::string& name);

// Applies the keys of one layer. Unknown keys and ill-typed values throw ConfigError; `text`, when
// given, is the raw file the layer was parsed from and is used to find line numbers.
void apply_layer(RunConfig& cfg, const nlohmann::json& layer, const std::string* text = nullptr);

nlohmann::json parse_config_text(const std::string& text);

// defaults < preset < config file < flags. The preset comes from the flags if set there,
// otherwise from the config file.
RunConfig resolve_config(const std::optional<std::string>& config_path,
                         const nlohmann::json& flag_layer);

RunConfig load_config(const std::string& path);

// Writes the mode's output to cfg.out (or `stdout_sink`); diagnostics go to `diag`.
// Returns the process exit status.
int run(const RunConfig& cfg, std::ostream& stdout_sink, std::ostream& diag);

// Entry point shared by the executable and the tests.
int main_with_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chargegrid::cli
