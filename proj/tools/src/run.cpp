#include "chargegrid_cli/run.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "chargegrid/distributions.hpp"
#include "chargegrid/oracle.hpp"
#include "chargegrid/policy.hpp"

namespace chargegrid::cli {

using nlohmann::json;

namespace {

struct ModeName {
  Mode mode;
  const char* name;
};
constexpr ModeName kModes[] = {{Mode::Analytic, "analytic"},       {Mode::Mc, "mc"},
                               {Mode::Compare, "compare"},         {Mode::SweepTc, "sweep-tc"},
                               {Mode::OracleCheck, "oracle-check"}, {Mode::X1X2Check, "x1x2-check"}};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::optional<int> line_of_key(const std::string* text, const std::string& key) {
  if (!text) return std::nullopt;
  const auto pos = text->find("\"" + key + "\"");
  if (pos == std::string::npos) return std::nullopt;
  return 1 + static_cast<int>(std::count(text->begin(), text->begin() + static_cast<long>(pos), '\n'));
}

template <class T>
T read_value(const json& j, const std::string& key, const std::string* text) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + key + "' has the wrong type", line_of_key(text, key));
  }
}

double read_number(const json& j, const std::string& key, const std::string* text) {
  if (!j.is_number()) throw ConfigError("field '" + key + "' must be a number", line_of_key(text, key));
  return j.get<double>();
}

std::uint64_t read_count(const json& j, const std::string& key, const std::string* text) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw ConfigError("field '" + key + "' must be a non-negative integer", line_of_key(text, key));
  return j.get<std::uint64_t>();
}

GridSpec read_grid(const json& j, const std::string& key, const std::string* text) {
  try {
    return GridSpec::parse(read_value<std::string>(j, key, text));
  } catch (const ConfigError& e) {
    throw ConfigError("field '" + key + "': " + e.what(), line_of_key(text, key));
  }
}

// Validation failures name the offending field; map them back to a line where possible.
// Keys set by flags have no file line.
void validate_with_lines(const RunConfig& cfg, const std::string* text, const json& flag_layer) {
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    if (e.line() || !text) throw;
    const std::string msg = e.what();
    const auto q1 = msg.find('\'');
    const auto q2 = q1 == std::string::npos ? q1 : msg.find('\'', q1 + 1);
    if (q2 == std::string::npos) throw;
    const std::string key = msg.substr(q1 + 1, q2 - q1 - 1);
    if (flag_layer.contains(key)) throw;
    throw ConfigError(msg, line_of_key(text, key));
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      os_ = &fallback;
      return;
    }
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw std::runtime_error("cannot write output file '" + path + "'");
    os_ = &file_;
  }
  std::ostream& os() { return *os_; }
  void finish(const std::string& path) {
    os_->flush();
    if (!*os_) throw std::runtime_error("write failed for '" + (path.empty() ? "stdout" : path) + "'");
  }

 private:
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

policy::RunOptions run_options(const RunConfig& cfg) {
  policy::RunOptions o;
  o.seed = cfg.seed;
  o.workers = cfg.workers;
  return o;
}

void write_cdf_header(std::ostream& os) {
  os << "x,analytic_total";
  for (Event e : kAllEvents) os << ",analytic_" << to_string(e);
  os << ",mc_value,mc_stderr,abs_diff,pass\n";
}

int run_cdf(const RunConfig& cfg, std::ostream& os) {
  const auto xs = cfg.xs();
  const bool with_analytic = cfg.mode != Mode::Mc;
  const bool with_mc = cfg.mode != Mode::Analytic;
  std::vector<policy::EstimateResult> mc;
  if (with_mc) mc = policy::estimate_cdf_dn(cfg.params, cfg.d_h, cfg.d_v, xs, cfg.n, run_options(cfg));
  write_cdf_header(os);
  bool all_pass = true;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    os << num(xs[k]);
    analytic::LemmaBreakdown b;
    if (with_analytic) {
      b = analytic::cdf_dn({cfg.params, cfg.d_h, cfg.d_v, xs[k]}, cfg.quadrature, cfg.formulation);
      os << ',' << num(b.total);
      for (double t : b.terms) os << ',' << num(t);
    } else {
      os << std::string(9, ',');
    }
    if (with_mc) os << ',' << num(mc[k].value) << ',' << num(mc[k].std_error);
    else os << ",,";
    if (with_mc && with_analytic) {
      const double diff = std::abs(b.total - mc[k].value);
      const bool pass = diff <= cfg.tol_sigma * mc[k].std_error + 10.0 * cfg.quadrature.abs_tol;
      all_pass = all_pass && pass;
      os << ',' << num(diff) << ',' << (pass ? 1 : 0) << '\n';
    } else {
      os << ",,\n";
    }
  }
  return all_pass ? 0 : 1;
}

int run_sweep(const RunConfig& cfg, std::ostream& os) {
  os << "trip_distance,p,analytic,mc_value,mc_stderr\n";
  const double share_h = cfg.d_h / (cfg.d_h + cfg.d_v);
  for (double p : cfg.p_values) {
    ModelParams params{cfg.params.lambda, p};
    for (double trip : cfg.trip_grid.values()) {
      const double dh = trip * share_h, dv = trip - dh;
      const double an = analytic::prob_tc(params, dh, dv);
      const auto mc = policy::estimate_prob_tc(params, dh, dv, cfg.n, run_options(cfg));
      os << num(trip) << ',' << num(p) << ',' << num(an) << ',' << num(mc.value) << ','
         << num(mc.std_error) << '\n';
    }
  }
  return 0;
}

int run_oracle(const RunConfig& cfg, std::ostream& os, std::ostream& diag) {
  oracle::CrossCheckOptions o{cfg.seed, cfg.workers, cfg.margin};
  const auto rep = oracle::cross_check(cfg.params, cfg.d_h, cfg.d_v, cfg.n, o);
  for (const auto& d : rep.discrepancies) os << oracle::to_json_line(d) << '\n';
  diag << "trials=" << rep.trials << " passes_agreement=" << num(rep.passes_agreement())
       << " d_n_agreement=" << num(rep.d_n_agreement()) << " inconsistencies=" << rep.inconsistencies
       << " discrepancies=" << rep.discrepancies.size() << '\n';
  return rep.inconsistencies == 0 ? 0 : 1;
}

int run_x1x2(const RunConfig& cfg, std::ostream& os) {
  os << "axis,x,analytic,mc_value,mc_stderr,abs_diff,pass\n";
  bool all_pass = true;
  for (int axis = 1; axis <= 2; ++axis) {
    const double span = axis == 1 ? cfg.d_h : cfg.d_v;
    const auto sample = policy::rejection_sample_gap(cfg.params, span, cfg.n, run_options(cfg));
    std::vector<double> xs;
    if (cfg.x_grid) {
      for (double x : cfg.x_grid->values())
        if (x <= span) xs.push_back(x);
    } else {
      for (int k = 1; k <= 20; ++k) xs.push_back(span * k / 20.0);
    }
    for (double x : xs) {
      const double an = axis == 1 ? analytic::cdf_x1(cfg.params, span, x, cfg.quadrature)
                                  : analytic::cdf_x2(cfg.params, span, x, cfg.quadrature);
      const auto est = policy::bernoulli_estimate(
          static_cast<std::uint64_t>(std::llround(sample.cdf(x) * static_cast<double>(sample.size()))),
          sample.size(), cfg.seed);
      const double diff = std::abs(an - est.value);
      const bool pass = diff <= cfg.tol_sigma * est.std_error + 10.0 * cfg.quadrature.abs_tol;
      all_pass = all_pass && pass;
      os << (axis == 1 ? "X1" : "X2") << ',' << num(x) << ',' << num(an) << ',' << num(est.value)
         << ',' << num(est.std_error) << ',' << num(diff) << ',' << (pass ? 1 : 0) << '\n';
    }
  }
  return all_pass ? 0 : 1;
}

}  // namespace

const char* to_string(Mode m) {
  for (const auto& e : kModes)
    if (e.mode == m) return e.name;
  return "?";
}

Mode mode_from_string(const std::string& s) {
  for (const auto& e : kModes)
    if (s == e.name) return e.mode;
  throw ConfigError("unknown mode '" + s + "'");
}

ConfigError::ConfigError(const std::string& what, std::optional<int> line)
    : std::runtime_error(line ? "line " + std::to_string(*line) + ": " + what : what), line_(line) {}

std::vector<double> GridSpec::values() const {
  std::vector<double> out;
  if (steps == 1) return {min};
  for (int k = 0; k < steps; ++k) out.push_back(min + (max - min) * k / (steps - 1));
  return out;
}

std::string GridSpec::to_string() const { return num(min) + ":" + num(max) + ":" + std::to_string(steps); }

GridSpec GridSpec::parse(const std::string& text) {
  GridSpec g;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &g.min, &g.max, &g.steps, &tail) != 3)
    throw ConfigError("grid must look like min:max:steps, got '" + text + "'");
  if (g.steps < 1) throw ConfigError("grid needs at least one step");
  if (g.max < g.min) throw ConfigError("grid max below min");
  return g;
}

std::vector<double> RunConfig::xs() const {
  if (x_grid) return x_grid->values();
  return GridSpec{0.0, d_h + d_v, 25}.values();
}

void RunConfig::validate() const {
  if (!(params.lambda > 0.0) || !std::isfinite(params.lambda))
    throw ConfigError("'lambda' must be positive");
  if (!(params.p >= 0.0 && params.p <= 1.0)) throw ConfigError("'p' must lie in [0, 1]");
  if (!(d_h > 0.0) || !std::isfinite(d_h)) throw ConfigError("'dh' must be positive");
  if (!(d_v > 0.0) || !std::isfinite(d_v)) throw ConfigError("'dv' must be positive");
  if (x_grid && x_grid->min < 0.0) throw ConfigError("'x_grid' must start at x >= 0");
  if (n == 0) throw ConfigError("'n' must be >= 1");
  if (!(tol_sigma > 0.0)) throw ConfigError("'tol_sigma' must be positive");
  if (workers < 1) throw ConfigError("'workers' must be >= 1");
  if (margin < 1) throw ConfigError("'margin' must be >= 1");
  for (double p : p_values)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("'p_values' entries must lie in [0, 1]");
  if (trip_grid.min <= 0.0) throw ConfigError("'trip_grid' must start above 0");
  try {
    quadrature.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("'quadrature': ") + e.what());
  }
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> list{{"manhattan", 0.016, 2000.0, 3000.0},
                                        {"chicago", 0.006, 4000.0, 5000.0},
                                        {"manhattan-tc", 0.011, 2000.0, 3000.0}};
  return list;
}

void apply_preset(RunConfig& cfg, const std::string& name) {
  for (const Preset& p : presets()) {
    if (name == p.name) {
      cfg.preset = name;
      cfg.params.lambda = p.lambda;
      cfg.d_h = p.d_h;
      cfg.d_v = p.d_v;
      return;
    }
  }
  throw ConfigError("unknown preset '" + name + "'");
}

void apply_layer(RunConfig& cfg, const json& layer, const std::string* text) {
  if (!layer.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, v] : layer.items()) {
    if (key == "preset") {
      try {
        apply_preset(cfg, read_value<std::string>(v, key, text));
      } catch (const ConfigError& e) {
        if (e.line()) throw;
        throw ConfigError(e.what(), line_of_key(text, key));
      }
    } else if (key == "mode") {
      cfg.mode = mode_from_string(read_value<std::string>(v, key, text));
    } else if (key == "lambda") {
      cfg.params.lambda = read_number(v, key, text);
    } else if (key == "p") {
      cfg.params.p = read_number(v, key, text);
    } else if (key == "dh") {
      cfg.d_h = read_number(v, key, text);
    } else if (key == "dv") {
      cfg.d_v = read_number(v, key, text);
    } else if (key == "x_grid") {
      cfg.x_grid = read_grid(v, key, text);
    } else if (key == "n") {
      cfg.n = read_count(v, key, text);
    } else if (key == "seed") {
      cfg.seed = read_count(v, key, text);
    } else if (key == "out") {
      cfg.out = read_value<std::string>(v, key, text);
    } else if (key == "tol_sigma") {
      cfg.tol_sigma = read_number(v, key, text);
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(read_count(v, key, text));
    } else if (key == "margin") {
      cfg.margin = static_cast<int>(read_count(v, key, text));
    } else if (key == "formulation") {
      try {
        cfg.formulation = analytic::formulation_from_string(read_value<std::string>(v, key, text));
      } catch (const ParameterError& e) {
        throw ConfigError(e.what(), line_of_key(text, key));
      }
    } else if (key == "trip_grid") {
      cfg.trip_grid = read_grid(v, key, text);
    } else if (key == "p_values") {
      if (!v.is_array()) throw ConfigError("field 'p_values' must be an array", line_of_key(text, key));
      cfg.p_values.clear();
      for (const auto& e : v) cfg.p_values.push_back(read_number(e, key, text));
    } else if (key == "quadrature") {
      if (!v.is_object())
        throw ConfigError("field 'quadrature' must be an object", line_of_key(text, key));
      for (const auto& [qk, qv] : v.items()) {
        if (qk == "abs_tol") cfg.quadrature.abs_tol = read_number(qv, qk, text);
        else if (qk == "rel_tol") cfg.quadrature.rel_tol = read_number(qv, qk, text);
        else if (qk == "max_depth") cfg.quadrature.max_depth = static_cast<int>(read_count(qv, qk, text));
        else if (qk == "tail_exponent") cfg.quadrature.tail_exponent = read_number(qv, qk, text);
        else throw ConfigError("unknown key 'quadrature." + qk + "'", line_of_key(text, qk));
      }
    } else {
      throw ConfigError("unknown key '" + key + "'", line_of_key(text, key));
    }
  }
}

json parse_config_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw ConfigError(std::string("malformed JSON: ") + e.what(), line);
  }
}

RunConfig resolve_config(const std::optional<std::string>& config_path, const json& flag_layer) {
  RunConfig cfg;
  std::string text;
  json file_layer = json::object();
  if (config_path) {
    text = read_file(*config_path);
    file_layer = parse_config_text(text);
    if (!file_layer.is_object()) throw ConfigError("config must be a JSON object", 1);
  }
  // The preset is applied first so every explicit value lands on top of it.
  if (flag_layer.contains("preset")) {
    apply_layer(cfg, json{{"preset", flag_layer["preset"]}});
  } else if (file_layer.contains("preset")) {
    apply_layer(cfg, json{{"preset", file_layer["preset"]}}, &text);
  }
  json file_rest = file_layer, flag_rest = flag_layer;
  file_rest.erase("preset");
  flag_rest.erase("preset");
  apply_layer(cfg, file_rest, config_path ? &text : nullptr);
  apply_layer(cfg, flag_rest);
  validate_with_lines(cfg, config_path ? &text : nullptr, flag_rest);
  return cfg;
}

RunConfig load_config(const std::string& path) { return resolve_config(path, json::object()); }

int run(const RunConfig& cfg, std::ostream& stdout_sink, std::ostream& diag) {
  cfg.validate();
  Sink sink(cfg.out, stdout_sink);
  int status = 0;
  switch (cfg.mode) {
    case Mode::Analytic:
    case Mode::Mc:
    case Mode::Compare:
      status = run_cdf(cfg, sink.os());
      break;
    case Mode::SweepTc:
      status = run_sweep(cfg, sink.os());
      break;
    case Mode::OracleCheck:
      status = run_oracle(cfg, sink.os(), diag);
      break;
    case Mode::X1X2Check:
      status = run_x1x2(cfg, sink.os());
      break;
  }
  sink.finish(cfg.out);
  return status;
}

int main_with_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Charging-road distance and coverage on a Manhattan Poisson line grid"};
  app.require_subcommand(1);
  json flags = json::object();
  std::optional<std::string> config_path;

  auto num_flag = [&](const char* name, const char* key, const char* help) {
    app.add_option_function<double>(name, [&flags, key](double v) { flags[key] = v; }, help);
  };
  auto int_flag = [&](const char* name, const char* key, const char* help) {
    app.add_option_function<std::uint64_t>(name, [&flags, key](std::uint64_t v) { flags[key] = v; }, help);
  };
  auto str_flag = [&](const char* name, const char* key, const char* help) {
    app.add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
  };
  num_flag("--lambda", "lambda", "road density per meter on each axis");
  num_flag("--p", "p", "charging fraction");
  num_flag("--dh", "dh", "horizontal trip extent in meters");
  num_flag("--dv", "dv", "vertical trip extent in meters");
  str_flag("--x-grid", "x_grid", "threshold grid min:max:steps (meters)");
  int_flag("--n", "n", "Monte-Carlo trials (accepted samples for x1x2-check)");
  int_flag("--seed", "seed", "master seed");
  str_flag("--preset", "preset", "manhattan | chicago | manhattan-tc");
  app.add_option_function<std::string>("--config", [&](const std::string& v) { config_path = v; },
                                       "JSON config file");
  str_flag("--out", "out", "output file (default stdout)");
  num_flag("--tol-sigma", "tol_sigma", "pass band in standard errors");
  int_flag("--workers", "workers", "worker threads");
  str_flag("--formulation", "formulation", "leaf-exact | published");
  str_flag("--trip-grid", "trip_grid", "sweep-tc trip lengths min:max:steps (meters)");
  app.add_option_function<std::vector<double>>(
      "--p-values", [&](const std::vector<double>& v) { flags["p_values"] = v; },
      "sweep-tc charging fractions")->delimiter(',');
  int_flag("--margin", "margin", "oracle roads kept beyond the span per side");

  Mode mode = Mode::Compare;
  for (const auto& m : kModes) {
    auto* sub = app.add_subcommand(m.name);
    sub->fallthrough();
    sub->callback([&mode, m] { mode = m.mode; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    RunConfig cfg = resolve_config(config_path, flags);
    cfg.mode = mode;
    return run(cfg, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace chargegrid::cli
