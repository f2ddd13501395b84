// End-to-end scenario run: truth, sensors, faults, nine differentiators,
// residuals, metrics, cutoffs and verdicts.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "kinfault/config.hpp"
#include "kinfault/detector.hpp"
#include "kinfault/parallel.hpp"
#include "kinfault/simulator.hpp"

namespace kinfault {

struct StepRecord {
  long k = 0;
  double t = 0.0;
  SensorSample sensors;
  ChannelArray inputs{};            // signal fed to each channel
  ChannelArray derivatives{};
  std::array<StepTrace, kChannelCount> traces{};  // empty when derivatives are analytic
  ResidualTerms terms;
  std::optional<MetricArray> metrics;  // k > delta
  std::optional<FlagArray> flags;      // after the cutoffs freeze
  std::optional<Verdict> verdict;
};

enum class RunStatus { completed, diverged, failed };

std::string to_string(RunStatus s);

struct RunSummary {
  RunStatus status = RunStatus::completed;
  std::string message;
  std::optional<long> failure_step;
  long steps_run = 0;
  long freeze_step = 0;
  std::optional<MetricArray> cutoffs;
  std::optional<MetricArray> final_metrics;
  std::array<std::optional<long>, kMetricCount> first_ac{};
  std::optional<Verdict> sustained_verdict;
  std::optional<long> sustained_step;
  std::array<long, 7> verdict_counts{};  // indexed by Verdict
  long classified_steps = 0;
};

struct RunResult {
  Scenario scenario;
  std::vector<StepRecord> steps;
  RunSummary summary;
};

/// Channel inputs for one sensor sample: r_x, r_y, omega_z, R_x, R_y in the
/// order the bank expects.
ChannelArray channel_inputs(const SensorSample& s);

/// Closed-form values of the nine derivative channels at a truth sample.
ChannelArray analytic_derivatives(const TruthSample& truth);

DerivativeSet to_derivative_set(const ChannelArray& d);

/// Runs every step. Divergence and numerical failures stop the run and are
/// reported in the summary; configuration errors throw.
RunResult run_scenario(const Scenario& scenario);

/// Runs independent scenarios, across OpenMP threads when `parallel` is set.
std::vector<RunResult> run_batch(const std::vector<Scenario>& scenarios, bool parallel);

}  // namespace kinfault
