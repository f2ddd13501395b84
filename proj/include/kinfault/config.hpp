// Scenario description, built-in presets and the flat key = value config
// format.
//
//   # comment
//   preset = example1              # optional base, applied first
//   seed = 7
//   noise.sigma_omega = 0.001
//   faults = z_gyro:bias:1:40      # sensor:kind:magnitude:start_time, or "none"
//   diff_double.R_d = 1e-7
//   diff_double.initial_state = zero  # or first_sample
#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinfault/differentiator.hpp"
#include "kinfault/simulator.hpp"

namespace kinfault {

struct DifferentiatorSettings {
  RlsConfig rls;
  AseConfig ase;
  InitialState init = InitialState::first_sample;
};

/// Where the nine derivative signals come from.
///   aie:      the adaptive differentiators (normal operation)
///   analytic: closed-form truth derivatives, for checking the residual
///             plumbing against exact kinematics
enum class DerivativeSource { aie, analytic };

std::string to_string(DerivativeSource s);

struct Scenario {
  std::string name = "custom";
  TrajectoryConfig trajectory;
  NoiseConfig noise;
  std::vector<FaultSpec> faults;
  DifferentiatorSettings diff_single;
  DifferentiatorSettings diff_double;
  std::size_t delta = 250;
  std::size_t sustain_steps = 50;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  DerivativeSource derivatives = DerivativeSource::aie;
  bool parallel = false;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reference single-differentiation tuning: n_e 12, n_f 15, R_z 1,
/// R_d 1e-4, R_theta 1e-5 I, 100 linearly spaced eta in [1e-6, 1e2].
DifferentiatorSettings reference_single_settings();
/// Reference double-differentiation tuning: n_e 20, n_f 18, R_z 1,
/// R_d 1e-7, R_theta 1e-5 I, 100 linearly spaced eta in [1e-6, 1].
DifferentiatorSettings reference_double_settings();

/// Tuning used by the presets. Single: the reference values with a log eta
/// grid. Double: n_e 6, n_f 18, R_d 1e-6, R_theta 1e-6 I, log eta grid over
/// [1e-6, 1].
DifferentiatorSettings default_single_settings();
DifferentiatorSettings default_double_settings();

std::vector<std::string> preset_names();
std::string preset_description(const std::string& name);
/// Throws ConfigError for an unknown name.
Scenario preset(const std::string& name);

/// Parses config text. `origin` prefixes error messages.
Scenario parse_config_text(const std::string& text, const std::string& origin = "<config>");
Scenario parse_config(const std::filesystem::path& path);

FaultSpec parse_fault(const std::string& text);
std::string format_fault(const FaultSpec& f);

}  // namespace kinfault
