#include "kinfault/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace kinfault {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) out.push_back(trim(part));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (v.empty() || res.ec != std::errc() || res.ptr != end) {
    throw std::invalid_argument("expected a number, got '" + v + "'");
  }
  return out;
}

template <typename Int>
Int to_integer(const std::string& v) {
  Int out = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (v.empty() || res.ec != std::errc() || res.ptr != end) {
    throw std::invalid_argument("expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("expected true or false, got '" + v + "'");
}

EtaSpacing to_spacing(const std::string& v) {
  if (v == "linear") return EtaSpacing::linear;
  if (v == "log") return EtaSpacing::log;
  throw std::invalid_argument("expected linear or log, got '" + v + "'");
}

InitialState to_initial_state(const std::string& v) {
  if (v == "zero") return InitialState::zero;
  if (v == "first_sample") return InitialState::first_sample;
  throw std::invalid_argument("expected zero or first_sample, got '" + v + "'");
}

DerivativeSource to_source(const std::string& v) {
  if (v == "aie") return DerivativeSource::aie;
  if (v == "analytic") return DerivativeSource::analytic;
  throw std::invalid_argument("expected aie or analytic, got '" + v + "'");
}

using Setter = std::function<void(Scenario&, const std::string&)>;

void add_diff_keys(std::map<std::string, Setter>& keys, const std::string& prefix,
                   DifferentiatorSettings Scenario::*member) {
  auto at = [member](Scenario& s) -> DifferentiatorSettings& { return s.*member; };
  keys[prefix + ".n_e"] = [at](Scenario& s, const std::string& v) { at(s).rls.n_e = to_integer<int>(v); };
  keys[prefix + ".n_f"] = [at](Scenario& s, const std::string& v) { at(s).rls.n_f = to_integer<int>(v); };
  keys[prefix + ".R_z"] = [at](Scenario& s, const std::string& v) { at(s).rls.R_z = to_double(v); };
  keys[prefix + ".R_d"] = [at](Scenario& s, const std::string& v) { at(s).rls.R_d = to_double(v); };
  keys[prefix + ".R_theta"] = [at](Scenario& s, const std::string& v) {
    at(s).rls.R_theta_scale = to_double(v);
  };
  keys[prefix + ".eta_low"] = [at](Scenario& s, const std::string& v) { at(s).ase.eta_low = to_double(v); };
  keys[prefix + ".eta_high"] = [at](Scenario& s, const std::string& v) { at(s).ase.eta_high = to_double(v); };
  keys[prefix + ".grid_points"] = [at](Scenario& s, const std::string& v) {
    at(s).ase.grid_points = to_integer<int>(v);
  };
  keys[prefix + ".alpha"] = [at](Scenario& s, const std::string& v) { at(s).ase.alpha = to_double(v); };
  keys[prefix + ".eta_spacing"] = [at](Scenario& s, const std::string& v) {
    at(s).ase.spacing = to_spacing(v);
  };
  keys[prefix + ".initial_state"] = [at](Scenario& s, const std::string& v) {
    at(s).init = to_initial_state(v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> keys = [] {
    std::map<std::string, Setter> k;
    k["name"] = [](Scenario& s, const std::string& v) { s.name = v; };
    k["seed"] = [](Scenario& s, const std::string& v) { s.seed = to_integer<std::uint64_t>(v); };
    k["delta"] = [](Scenario& s, const std::string& v) { s.delta = to_integer<std::size_t>(v); };
    k["sustain_steps"] = [](Scenario& s, const std::string& v) {
      s.sustain_steps = to_integer<std::size_t>(v);
    };
    k["output_dir"] = [](Scenario& s, const std::string& v) { s.output_dir = v; };
    k["derivatives"] = [](Scenario& s, const std::string& v) { s.derivatives = to_source(v); };
    k["parallel"] = [](Scenario& s, const std::string& v) { s.parallel = to_bool(v); };
    k["trajectory.sample_time"] = [](Scenario& s, const std::string& v) {
      s.trajectory.sample_time = to_double(v);
    };
    k["trajectory.k_first"] = [](Scenario& s, const std::string& v) {
      s.trajectory.k_first = to_integer<long>(v);
    };
    k["trajectory.k_last"] = [](Scenario& s, const std::string& v) {
      s.trajectory.k_last = to_integer<long>(v);
    };
    k["trajectory.heading"] = [](Scenario& s, const std::string& v) {
      s.trajectory.heading = parse_heading_mode(v);
    };
    k["noise.sigma_r"] = [](Scenario& s, const std::string& v) { s.noise.sigma_r = to_double(v); };
    k["noise.sigma_omega"] = [](Scenario& s, const std::string& v) { s.noise.sigma_omega = to_double(v); };
    k["noise.sigma_A"] = [](Scenario& s, const std::string& v) { s.noise.sigma_A_g = to_double(v); };
    k["noise.sigma_theta"] = [](Scenario& s, const std::string& v) { s.noise.sigma_theta = to_double(v); };
    k["faults"] = [](Scenario& s, const std::string& v) {
      s.faults.clear();
      if (v.empty() || v == "none") return;
      for (const auto& item : split(v, ',')) s.faults.push_back(parse_fault(item));
    };
    add_diff_keys(k, "diff_single", &Scenario::diff_single);
    add_diff_keys(k, "diff_double", &Scenario::diff_double);
    return k;
  }();
  return keys;
}

void check(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what);
}

void validate_diff(const DifferentiatorSettings& d, const std::string& prefix) {
  try {
    d.rls.validate();
    d.ase.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(prefix + ": " + e.what());
  }
}

}  // namespace

std::string to_string(DerivativeSource s) { return s == DerivativeSource::aie ? "aie" : "analytic"; }

void Scenario::validate() const {
  try {
    trajectory.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("trajectory: ") + e.what());
  }
  try {
    noise.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }
  check(faults.size() <= 1, "faults", "at most one fault may be configured");
  for (const auto& f : faults) {
    try {
      f.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("faults: ") + e.what());
    }
  }
  validate_diff(diff_single, "diff_single");
  validate_diff(diff_double, "diff_double");
  check(delta >= 1, "delta", "must be >= 1");
  check(static_cast<long>(2 * delta) < trajectory.steps(), "delta", "2 * delta must be shorter than the run");
  check(sustain_steps >= 1, "sustain_steps", "must be >= 1");
  check(!output_dir.empty(), "output_dir", "must not be empty");
}

DifferentiatorSettings reference_single_settings() {
  DifferentiatorSettings d;
  d.rls = RlsConfig{12, 15, 1.0, 1e-4, 1e-5};
  d.ase = AseConfig{1e-6, 1e2, 100, 0.5, EtaSpacing::linear};
  return d;
}

DifferentiatorSettings reference_double_settings() {
  DifferentiatorSettings d;
  d.rls = RlsConfig{20, 18, 1.0, 1e-7, 1e-5};
  d.ase = AseConfig{1e-6, 1.0, 100, 0.5, EtaSpacing::linear};
  return d;
}

DifferentiatorSettings default_single_settings() {
  DifferentiatorSettings d = reference_single_settings();
  d.ase.spacing = EtaSpacing::log;
  return d;
}

DifferentiatorSettings default_double_settings() {
  DifferentiatorSettings d = reference_double_settings();
  d.rls.n_e = 6;
  d.rls.R_d = 1e-6;
  d.rls.R_theta_scale = 1e-6;
  d.ase.spacing = EtaSpacing::log;
  return d;
}

std::vector<std::string> preset_names() { return {"example1", "example2", "healthy"}; }

std::string preset_description(const std::string& name) {
  if (name == "example1") return "z rate gyro bias of 1 rad/s from t = 40 s";
  if (name == "example2") return "x accelerometer drift of 0.05 g/s from t = 40 s";
  if (name == "healthy") return "no fault";
  throw ConfigError("unknown preset '" + name + "'");
}

Scenario preset(const std::string& name) {
  Scenario s;
  s.diff_single = default_single_settings();
  s.diff_double = default_double_settings();
  s.name = name;
  s.output_dir = "out/" + name;
  if (name == "example1") {
    s.faults = {FaultSpec{Sensor::z_gyro, FaultKind::bias, 1.0, 40.0}};
  } else if (name == "example2") {
    s.faults = {FaultSpec{Sensor::x_accel, FaultKind::drift, 0.05, 40.0}};
  } else if (name == "healthy") {
    s.faults.clear();
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return s;
}

FaultSpec parse_fault(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 4) {
    throw std::invalid_argument("fault must be sensor:kind:magnitude:start_time, got '" + text + "'");
  }
  FaultSpec f{parse_sensor(parts[0]), parse_fault_kind(parts[1]), to_double(parts[2]),
              to_double(parts[3])};
  f.validate();
  return f;
}

std::string format_fault(const FaultSpec& f) {
  std::ostringstream out;
  out.precision(17);
  out << to_string(f.sensor) << ':' << to_string(f.kind) << ':' << f.magnitude << ':' << f.start_time;
  return out.str();
}

Scenario parse_config_text(const std::string& text, const std::string& origin) {
  struct Entry {
    int line;
    std::string key;
    std::string value;
  };
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    Entry e{line_no, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
    if (e.key.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    if (std::any_of(entries.begin(), entries.end(), [&](const Entry& x) { return x.key == e.key; })) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + e.key + "'");
    }
    entries.push_back(std::move(e));
  }

  Scenario s;
  s.diff_single = default_single_settings();
  s.diff_double = default_double_settings();
  for (const auto& e : entries) {
    if (e.key != "preset") continue;
    try {
      s = preset(e.value);
    } catch (const ConfigError& err) {
      throw ConfigError(origin + ":" + std::to_string(e.line) + ": preset: " + err.what());
    }
  }

  const auto& keys = setters();
  for (const auto& e : entries) {
    if (e.key == "preset") continue;
    const auto it = keys.find(e.key);
    if (it == keys.end()) {
      throw ConfigError(origin + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "'");
    }
    try {
      it->second(s, e.value);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(origin + ":" + std::to_string(e.line) + ": " + e.key + ": " + err.what());
    }
  }
  s.validate();
  return s;
}

Scenario parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

}  // namespace kinfault
