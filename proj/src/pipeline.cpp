#include "kinfault/pipeline.hpp"

#include <exception>

namespace kinfault {

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::diverged: return "diverged";
    case RunStatus::failed: return "failed";
  }
  return "?";
}

ChannelArray channel_inputs(const SensorSample& s) {
  const Vec3 R = earth_position(s);
  return {s.r.x(), s.r.y(), s.omega.z(), R.x(), R.y(), s.r.x(), s.r.y(), R.x(), R.y()};
}

ChannelArray analytic_derivatives(const TruthSample& truth) {
  return {truth.r_dot.x(), truth.r_dot.y(), truth.omega_dot, truth.R_dot.x(), truth.R_dot.y(),
          truth.r_ddot.x(), truth.r_ddot.y(), truth.R_ddot.x(), truth.R_ddot.y()};
}

DerivativeSet to_derivative_set(const ChannelArray& d) {
  DerivativeSet s;
  s.rx_dot = d[0];
  s.ry_dot = d[1];
  s.omega_dot = d[2];
  s.Rx_dot = d[3];
  s.Ry_dot = d[4];
  s.rx_ddot = d[5];
  s.ry_ddot = d[6];
  s.Rx_ddot = d[7];
  s.Ry_ddot = d[8];
  return s;
}

RunResult run_scenario(const Scenario& scenario) {
  scenario.validate();
  RunResult result;
  result.scenario = scenario;
  RunSummary& summary = result.summary;

  const auto& traj = scenario.trajectory;
  SensorModel sensors(scenario.noise, scenario.seed);
  DifferentiatorBank bank(scenario.diff_single, scenario.diff_double, traj.sample_time);
  std::vector<WindowedRms> windows(kMetricCount, WindowedRms(scenario.delta));
  Cutoffs cutoffs;
  SustainedVerdict sustained(scenario.sustain_steps);
  const bool use_aie = scenario.derivatives == DerivativeSource::aie;
  const long delta = static_cast<long>(scenario.delta);
  summary.freeze_step = traj.k_first - 1 + 2 * delta;

  result.steps.reserve(static_cast<std::size_t>(traj.steps()));
  for (long k = traj.k_first; k <= traj.k_last; ++k) {
    const long index = k - traj.k_first + 1;
    StepRecord rec;
    rec.k = k;
    try {
      const TruthSample truth = figure8_truth(k, traj);
      rec.t = truth.t;
      rec.sensors = sensors.measure(truth);
      for (const auto& f : scenario.faults) rec.sensors = inject_fault(rec.sensors, f);
      rec.inputs = channel_inputs(rec.sensors);
      if (use_aie) {
        rec.derivatives = bank.step(rec.inputs, scenario.parallel);
        for (std::size_t c = 0; c < kChannelCount; ++c) rec.traces[c] = bank[c].last_trace();
      } else {
        rec.derivatives = analytic_derivatives(truth);
      }
    } catch (const DivergenceError& e) {
      summary.status = RunStatus::diverged;
      summary.message = e.what();
      summary.failure_step = k;
      break;
    } catch (const std::exception& e) {
      summary.status = RunStatus::failed;
      summary.message = e.what();
      summary.failure_step = k;
      break;
    }

    rec.terms = build_residual_terms(rec.sensors, to_derivative_set(rec.derivatives));
    const MetricArray residuals = planar_residuals(rec.terms);
    for (std::size_t m = 0; m < kMetricCount; ++m) windows[m].push(residuals[m]);

    if (index > delta) {
      MetricArray e{};
      for (std::size_t m = 0; m < kMetricCount; ++m) e[m] = windows[m].value();
      rec.metrics = e;
      summary.final_metrics = e;
      if (index == 2 * delta) {
        cutoffs.freeze(e);
        summary.cutoffs = cutoffs.values();
      }
      if (index > 2 * delta) {
        const FlagArray flags = cutoffs.flags(e);
        rec.flags = flags;
        const Verdict v = classify(flags);
        rec.verdict = v;
        ++summary.classified_steps;
        ++summary.verdict_counts[static_cast<std::size_t>(v)];
        sustained.observe(k, v);
        for (std::size_t m = 0; m < kMetricCount; ++m) {
          if (flags[m] && !summary.first_ac[m]) summary.first_ac[m] = k;
        }
      }
    }
    result.steps.push_back(std::move(rec));
    ++summary.steps_run;
  }
  summary.sustained_verdict = sustained.verdict();
  summary.sustained_step = sustained.step();
  return result;
}

std::vector<RunResult> run_batch(const std::vector<Scenario>& scenarios, bool parallel) {
  std::vector<RunResult> out(scenarios.size());
  std::vector<std::exception_ptr> errors(scenarios.size());
  const long n = static_cast<long>(scenarios.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = run_scenario(scenarios[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace kinfault
