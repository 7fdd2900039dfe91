#include "rotorwave/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "rotorwave/errors.hpp"

namespace rotorwave {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + v + "' is not a number");
  }
  if (used != v.size()) throw ConfigError(key + ": '" + v + "' is not a number");
  if (!std::isfinite(out)) throw ConfigError(key + ": value must be finite");
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + v + "' is not an integer");
  }
  if (used != v.size()) throw ConfigError(key + ": '" + v + "' is not an integer");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long out = 0;
  try {
    out = std::stoull(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + v + "' is not an unsigned integer");
  }
  if (used != v.size() || v.find('-') != std::string::npos)
    throw ConfigError(key + ": '" + v + "' is not an unsigned integer");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> parts;
  std::string cur;
  std::stringstream ss(v);
  while (std::getline(ss, cur, ',')) parts.push_back(trim(cur));
  return parts;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const std::string& p : split_list(v)) out.push_back(parse_double(key, p));
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const std::string& p : split_list(v)) {
    long long x = parse_int(key, p);
    out.push_back(static_cast<int>(x));
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  return out;
}

std::string fmt_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(v[i]);
  }
  return out;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (kv.count(key)) throw ConfigError("duplicate key '" + key + "'");
    kv[key] = val;
  }

  RunConfig c;
  auto take = [&kv](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    return &it->second;
  };
  std::vector<std::string> seen;
  auto used = [&seen](const std::string& key) { seen.push_back(key); };

  struct DoubleKey {
    const char* key;
    double* slot;
  };
  const DoubleKey doubles[] = {
      {"molecule.A_cm1", &c.molecule.A_cm1},
      {"molecule.B_cm1", &c.molecule.B_cm1},
      {"molecule.C_cm1", &c.molecule.C_cm1},
      {"molecule.mu_debye", &c.molecule.mu_debye},
      {"ensemble.temperature_K", &c.ensemble.temperature_K},
      {"ensemble.population_cutoff", &c.ensemble.population_cutoff},
      {"pulse.carrier_THz", &c.pulse.carrier_THz},
      {"pulse.fwhm_ps", &c.pulse.fwhm_ps},
      {"pulse.center_ps", &c.pulse.center_ps},
      {"propagation.dt_ps", &c.propagation.dt_ps},
      {"propagation.t_start_ps", &c.propagation.t_start_ps},
      {"propagation.t_end_ps", &c.propagation.t_end_ps},
      {"propagation.sample_every_ps", &c.propagation.sample_every_ps},
  };
  for (const DoubleKey& d : doubles) {
    if (const std::string* v = take(d.key)) {
      *d.slot = parse_double(d.key, *v);
      used(d.key);
    }
  }

  if (const std::string* v = take("pulse.peak_field_MV_cm")) {
    c.pulse.has_peak_field = true;
    c.pulse.peak_field_MV_cm = parse_double("pulse.peak_field_MV_cm", *v);
    used("pulse.peak_field_MV_cm");
  }
  if (const std::string* v = take("pulse.intensity_W_cm2")) {
    c.pulse.has_intensity = true;
    c.pulse.intensity_W_cm2 = parse_double("pulse.intensity_W_cm2", *v);
    used("pulse.intensity_W_cm2");
  }

  if (const std::string* v = take("ensemble.truncation_rule")) {
    c.ensemble.truncation_rule = *v;
    used("ensemble.truncation_rule");
  }
  if (const std::string* v = take("ensemble.jmax_ceiling")) {
    c.ensemble.jmax_ceiling =
        static_cast<int>(parse_int("ensemble.jmax_ceiling", *v));
    used("ensemble.jmax_ceiling");
  }
  if (const std::string* v = take("propagation.method")) {
    c.propagation.method = *v;
    used("propagation.method");
  }
  if (const std::string* v = take("propagation.j_buffer")) {
    c.propagation.j_buffer = static_cast<int>(parse_int("propagation.j_buffer", *v));
    used("propagation.j_buffer");
  }
  if (const std::string* v = take("rpwf.n_realizations")) {
    c.rpwf.n_realizations = static_cast<int>(parse_int("rpwf.n_realizations", *v));
    used("rpwf.n_realizations");
  }
  if (const std::string* v = take("rpwf.master_seed")) {
    c.rpwf.master_seed = parse_u64("rpwf.master_seed", *v);
    used("rpwf.master_seed");
  }
  if (const std::string* v = take("rpwf.batches")) {
    c.rpwf.batches = static_cast<int>(parse_int("rpwf.batches", *v));
    used("rpwf.batches");
  }
  if (const std::string* v = take("rpwf.synthesis")) {
    c.rpwf.synthesis = *v;
    used("rpwf.synthesis");
  }
  if (const std::string* v = take("output.directory")) {
    c.output.directory = *v;
    used("output.directory");
  }
  if (const std::string* v = take("output.format")) {
    c.output.format = *v;
    used("output.format");
  }
  if (const std::string* v = take("dynamics.mode")) {
    c.dynamics.mode = *v;
    used("dynamics.mode");
  }
  if (const std::string* v = take("scan.temperatures_K")) {
    c.scan.temperatures_K = parse_double_list("scan.temperatures_K", *v);
    used("scan.temperatures_K");
  }
  if (const std::string* v = take("scan.realization_counts")) {
    c.scan.realization_counts = parse_int_list("scan.realization_counts", *v);
    used("scan.realization_counts");
  }
  if (const std::string* v = take("scan.dynamic")) {
    c.scan.dynamic = parse_bool("scan.dynamic", *v);
    used("scan.dynamic");
  }
  if (const std::string* v = take("scan.dynamic_temperatures_K")) {
    c.scan.dynamic_temperatures_K =
        parse_double_list("scan.dynamic_temperatures_K", *v);
    used("scan.dynamic_temperatures_K");
  }
  if (const std::string* v = take("scan.dynamic_realization_counts")) {
    c.scan.dynamic_realization_counts =
        parse_int_list("scan.dynamic_realization_counts", *v);
    used("scan.dynamic_realization_counts");
  }

  for (const auto& [key, val] : kv) {
    bool known = false;
    for (const std::string& s : seen)
      if (s == key) known = true;
    if (!known) throw ConfigError("unknown key '" + key + "'");
  }
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void RunConfig::validate() const {
  require(molecule.A_cm1 > 0.0, "molecule.A_cm1 must be positive");
  require(molecule.B_cm1 > 0.0, "molecule.B_cm1 must be positive");
  require(molecule.C_cm1 > 0.0, "molecule.C_cm1 must be positive");
  require(molecule.A_cm1 >= molecule.B_cm1 && molecule.B_cm1 >= molecule.C_cm1,
          "molecule constants must satisfy A_cm1 >= B_cm1 >= C_cm1");
  require(molecule.mu_debye > 0.0, "molecule.mu_debye must be positive");

  require(ensemble.temperature_K > 0.0, "ensemble.temperature_K must be positive");
  require(ensemble.truncation_rule == "cumulative" ||
              ensemble.truncation_rule == "floor",
          "ensemble.truncation_rule must be 'cumulative' or 'floor'");
  if (ensemble.population_cutoff >= 0.0)
    require(ensemble.population_cutoff > 0.0 && ensemble.population_cutoff < 1.0,
            "ensemble.population_cutoff must lie in (0, 1)");
  require(ensemble.jmax_ceiling >= 1, "ensemble.jmax_ceiling must be >= 1");

  require(!(pulse.has_peak_field && pulse.has_intensity),
          "pulse.peak_field_MV_cm and pulse.intensity_W_cm2 are mutually exclusive");
  if (pulse.has_peak_field)
    require(pulse.peak_field_MV_cm > 0.0, "pulse.peak_field_MV_cm must be positive");
  if (pulse.has_intensity)
    require(pulse.intensity_W_cm2 > 0.0, "pulse.intensity_W_cm2 must be positive");
  require(pulse.carrier_THz > 0.0, "pulse.carrier_THz must be positive");
  require(pulse.fwhm_ps > 0.0, "pulse.fwhm_ps must be positive");

  require(propagation.dt_ps > 0.0, "propagation.dt_ps must be positive");
  require(propagation.sample_every_ps >= propagation.dt_ps,
          "propagation.sample_every_ps must be >= propagation.dt_ps");
  require(propagation.t_end_ps > propagation.t_start_ps,
          "propagation.t_end_ps must exceed propagation.t_start_ps");
  require(propagation.method == "split" || propagation.method == "rk4",
          "propagation.method must be 'split' or 'rk4'");
  require(propagation.j_buffer >= 1, "propagation.j_buffer must be >= 1");

  require(rpwf.n_realizations >= 1, "rpwf.n_realizations must be >= 1");
  require(rpwf.batches >= 1, "rpwf.batches must be >= 1");
  require(rpwf.synthesis == "direct" || rpwf.synthesis == "gram",
          "rpwf.synthesis must be 'direct' or 'gram'");

  require(!output.directory.empty(), "output.directory must not be empty");
  require(output.format == "csv", "output.format must be 'csv'");

  require(dynamics.mode == "exact" || dynamics.mode == "rpwf" ||
              dynamics.mode == "both",
          "dynamics.mode must be 'exact', 'rpwf', or 'both'");

  for (double t : scan.temperatures_K)
    require(t > 0.0, "scan.temperatures_K entries must be positive");
  for (int n : scan.realization_counts)
    require(n >= 1, "scan.realization_counts entries must be >= 1");
  for (double t : scan.dynamic_temperatures_K)
    require(t > 0.0, "scan.dynamic_temperatures_K entries must be positive");
  for (int n : scan.dynamic_realization_counts)
    require(n >= 1, "scan.dynamic_realization_counts entries must be >= 1");
}

RotorConstants RunConfig::rotor_constants() const {
  RotorConstants rc;
  rc.A = molecule.A_cm1;
  rc.B = molecule.B_cm1;
  rc.C = molecule.C_cm1;
  rc.mu = molecule.mu_debye;
  return rc;
}

ThermalConfig RunConfig::thermal_config() const {
  ThermalConfig tc;
  tc.temperature_K = ensemble.temperature_K;
  tc.jmax_ceiling = ensemble.jmax_ceiling;
  if (ensemble.truncation_rule == "floor") {
    tc.rule = TruncationRule::WeightFloor;
    if (ensemble.population_cutoff >= 0.0)
      tc.weight_floor = ensemble.population_cutoff;
  } else {
    tc.rule = TruncationRule::CumulativePopulation;
    if (ensemble.population_cutoff >= 0.0)
      tc.cumulative_cutoff = ensemble.population_cutoff;
  }
  return tc;
}

PulseConfig RunConfig::pulse_config() const {
  PulseConfig pc;
  if (pulse.has_peak_field)
    pc.peak_intensity_W_cm2 = field_to_intensity_W_cm2(pulse.peak_field_MV_cm);
  else if (pulse.has_intensity)
    pc.peak_intensity_W_cm2 = pulse.intensity_W_cm2;
  else
    pc.peak_intensity_W_cm2 = 2e9;
  pc.carrier_THz = pulse.carrier_THz;
  pc.fwhm_ps = pulse.fwhm_ps;
  pc.center_ps = pulse.center_ps;
  return pc;
}

PropagationConfig RunConfig::propagation_config() const {
  PropagationConfig pc;
  pc.dt_ps = propagation.dt_ps;
  pc.sample_every_ps = propagation.sample_every_ps;
  pc.t_start_ps = propagation.t_start_ps;
  pc.t_end_ps = propagation.t_end_ps;
  pc.method = propagation.method == "rk4" ? PropagationMethod::Rk4
                                          : PropagationMethod::SplitOperator;
  pc.j_buffer = propagation.j_buffer;
  return pc;
}

std::string serialize_config(const RunConfig& c) {
  std::string out;
  auto put = [&out](const std::string& key, const std::string& val) {
    out += key;
    out += " = ";
    out += val;
    out += "\n";
  };
  put("molecule.A_cm1", fmt(c.molecule.A_cm1));
  put("molecule.B_cm1", fmt(c.molecule.B_cm1));
  put("molecule.C_cm1", fmt(c.molecule.C_cm1));
  put("molecule.mu_debye", fmt(c.molecule.mu_debye));
  put("ensemble.temperature_K", fmt(c.ensemble.temperature_K));
  put("ensemble.truncation_rule", c.ensemble.truncation_rule);
  if (c.ensemble.population_cutoff >= 0.0)
    put("ensemble.population_cutoff", fmt(c.ensemble.population_cutoff));
  put("ensemble.jmax_ceiling", std::to_string(c.ensemble.jmax_ceiling));
  if (c.pulse.has_peak_field)
    put("pulse.peak_field_MV_cm", fmt(c.pulse.peak_field_MV_cm));
  if (c.pulse.has_intensity)
    put("pulse.intensity_W_cm2", fmt(c.pulse.intensity_W_cm2));
  put("pulse.carrier_THz", fmt(c.pulse.carrier_THz));
  put("pulse.fwhm_ps", fmt(c.pulse.fwhm_ps));
  put("pulse.center_ps", fmt(c.pulse.center_ps));
  put("propagation.dt_ps", fmt(c.propagation.dt_ps));
  put("propagation.t_start_ps", fmt(c.propagation.t_start_ps));
  put("propagation.t_end_ps", fmt(c.propagation.t_end_ps));
  put("propagation.method", c.propagation.method);
  put("propagation.sample_every_ps", fmt(c.propagation.sample_every_ps));
  put("propagation.j_buffer", std::to_string(c.propagation.j_buffer));
  put("rpwf.n_realizations", std::to_string(c.rpwf.n_realizations));
  put("rpwf.master_seed", std::to_string(c.rpwf.master_seed));
  put("rpwf.batches", std::to_string(c.rpwf.batches));
  put("rpwf.synthesis", c.rpwf.synthesis);
  put("output.directory", c.output.directory);
  put("output.format", c.output.format);
  put("dynamics.mode", c.dynamics.mode);
  if (!c.scan.temperatures_K.empty())
    put("scan.temperatures_K", fmt_list(c.scan.temperatures_K));
  if (!c.scan.realization_counts.empty())
    put("scan.realization_counts", fmt_list(c.scan.realization_counts));
  put("scan.dynamic", c.scan.dynamic ? "true" : "false");
  if (!c.scan.dynamic_temperatures_K.empty())
    put("scan.dynamic_temperatures_K", fmt_list(c.scan.dynamic_temperatures_K));
  if (!c.scan.dynamic_realization_counts.empty())
    put("scan.dynamic_realization_counts",
        fmt_list(c.scan.dynamic_realization_counts));
  return out;
}

double field_to_intensity_W_cm2(double field_MV_cm) {
  const double unit = intensity_to_field_MV_cm(1.0);
  return (field_MV_cm / unit) * (field_MV_cm / unit);
}

}  // namespace rotorwave
