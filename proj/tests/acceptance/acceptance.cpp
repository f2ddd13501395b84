// Acceptance checks. One line per criterion:
//   [PASS] <n> <title>: <measured values>
//   [FAIL] <n> <title>: <measured values>
// plus [INFO] lines for probes that have no pass/fail threshold.
// Exit status is 1 if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kinfault/config.hpp"
#include "kinfault/detector.hpp"
#include "kinfault/differentiator.hpp"
#include "kinfault/pipeline.hpp"
#include "kinfault/traces.hpp"

using namespace kinfault;
namespace fs = std::filesystem;

namespace {

// Thresholds
constexpr long kFaultStep = 4000;
constexpr long kExample1Window = 500;
constexpr long kExample2Window = 1500;
constexpr double kPreFaultHealthyShare = 0.95;
constexpr double kRuntimeLimitSeconds = 60.0;
constexpr std::uint64_t kHealthySeeds[] = {1, 2, 3};
constexpr double kExactKinematicsTol = 1e-9;
constexpr double kRlsBatchTol = 1e-8;
constexpr int kRlsSequenceLength = 30;
constexpr double kSingleRmseTarget = 0.05;
constexpr double kDoubleRmseTarget = 0.5;
constexpr double kAseContractRelTol = 1e-12;

int failures = 0;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void report(int id, const std::string& title, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
}

void info(const std::string& title, const std::string& detail) {
  std::printf("[INFO] %s: %s\n", title.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string status_text(const RunResult& r) {
  std::string s = to_string(r.summary.status);
  if (r.summary.failure_step) s += " at step " + std::to_string(*r.summary.failure_step);
  return s;
}

std::string sustained_text(const RunSummary& s) {
  if (!s.sustained_verdict) return "none";
  return to_string(*s.sustained_verdict) + " from step " + std::to_string(*s.sustained_step);
}

// Most frequent flag patterns over k in [from, to].
std::string pattern_histogram(const RunResult& r, long from, long to, std::size_t top = 4) {
  std::map<std::string, int> counts;
  for (const auto& s : r.steps) {
    if (s.k >= from && s.k <= to && s.flags) ++counts[flag_pattern(*s.flags)];
  }
  std::vector<std::pair<int, std::string>> sorted;
  for (const auto& [p, n] : counts) sorted.emplace_back(n, p);
  std::sort(sorted.rbegin(), sorted.rend());
  std::string out;
  for (std::size_t i = 0; i < std::min(top, sorted.size()); ++i) {
    if (!out.empty()) out += " ";
    out += sorted[i].second + "x" + std::to_string(sorted[i].first);
  }
  return out.empty() ? "-" : out;
}

bool sustained_within(const RunSummary& s, Verdict want, long window) {
  return s.status == RunStatus::completed && s.sustained_verdict && *s.sustained_verdict == want &&
         *s.sustained_step > kFaultStep && *s.sustained_step <= kFaultStep + window;
}

void criterion_example1(std::vector<RunResult>& runs) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult r = run_scenario(preset("example1"));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  long classified = 0, healthy = 0;
  for (const auto& s : r.steps) {
    if (s.verdict && s.k <= kFaultStep) {
      ++classified;
      healthy += *s.verdict == Verdict::all_healthy;
    }
  }
  const double share = classified ? static_cast<double>(healthy) / classified : 0.0;
  const bool stabilized = sustained_within(r.summary, Verdict::z_gyro_faulty, kExample1Window);
  const bool pass = stabilized && share >= kPreFaultHealthyShare && secs <= kRuntimeLimitSeconds;
  report(1, "example1 gives 011100 and ZGyroFaulty within 500 steps of step 4000", pass,
         status_text(r) + "; sustained " + sustained_text(r.summary) + "; patterns after 4000: " +
             pattern_histogram(r, kFaultStep + 1, r.scenario.trajectory.k_last) +
             "; pre-fault AllHealthy share " + fmt("%.4f", share) + " (need >= 0.95); runtime " +
             fmt("%.2f", secs) + " s (limit 60)");
  runs.push_back(std::move(r));
}

void criterion_example2(std::vector<RunResult>& runs) {
  RunResult r = run_scenario(preset("example2"));
  const bool pass = sustained_within(r.summary, Verdict::x_accel_faulty, kExample2Window);
  report(2, "example2 gives 001010 and XAccelFaulty within 1500 steps of step 4000", pass,
         status_text(r) + "; sustained " + sustained_text(r.summary) + "; patterns after 4000: " +
             pattern_histogram(r, kFaultStep + 1, r.scenario.trajectory.k_last));
  runs.push_back(std::move(r));
}

void criterion_healthy(std::vector<RunResult>& runs) {
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed : kHealthySeeds) {
    Scenario s = preset("healthy");
    s.seed = seed;
    RunResult r = run_scenario(s);
    const long healthy = r.summary.verdict_counts[static_cast<std::size_t>(Verdict::all_healthy)];
    const bool ok = r.summary.status == RunStatus::completed && r.summary.classified_steps > 0 &&
                    healthy == r.summary.classified_steps;
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += "seed " + std::to_string(seed) + " " + status_text(r) + " " + std::to_string(healthy) + "/" +
              std::to_string(r.summary.classified_steps) + " AllHealthy";
    runs.push_back(std::move(r));
  }
  report(3, "healthy preset is AllHealthy at every classified step for 3 seeds", pass, detail);
}

void criterion_exact_kinematics() {
  double worst = 0.0;
  for (auto mode : {HeadingMode::radial, HeadingMode::velocity}) {
    Scenario s = preset("healthy");
    s.trajectory.heading = mode;
    s.noise = NoiseConfig{0.0, 0.0, 0.0, 0.0};
    s.derivatives = DerivativeSource::analytic;
    const RunResult r = run_scenario(s);
    if (r.summary.status != RunStatus::completed) worst = INFINITY;
    for (const auto& st : r.steps) {
      const auto& t = st.terms;
      worst = std::max({worst, (t.L_s - t.R_s).cwiseAbs().maxCoeff(), (t.L_d - t.R_d).cwiseAbs().maxCoeff(),
                        (t.L_a - t.R_a).cwiseAbs().maxCoeff()});
    }
  }
  report(4, "noise-free analytic derivatives give max |L - R| < 1e-9", worst < kExactKinematicsTol,
         "max |L - R| = " + fmt("%.3e", worst) + " over both heading modes, all axes and steps");
}

void criterion_rls_batch() {
  // Direct batch solution of the regularized normal equations for every prefix.
  auto run = [](int l, double R_z, double R_d, double R_theta, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    RetrospectiveRls rls(l, R_z, R_d, R_theta);
    MatrixXd normal = MatrixXd::Identity(l, l) * R_theta;
    VectorXd rhs = VectorXd::Zero(l);
    double worst = 0.0;
    for (int k = 0; k < kRlsSequenceLength; ++k) {
      RowVectorXd pf(l), ph(l);
      for (int i = 0; i < l; ++i) {
        pf(i) = n(rng);
        ph(i) = n(rng);
      }
      const double z = n(rng), df = n(rng);
      rls.update(z, pf, df, ph);
      normal += R_z * pf.transpose() * pf + R_d * ph.transpose() * ph;
      rhs -= R_z * pf.transpose() * (z - df);
      const VectorXd batch = normal.colPivHouseholderQr().solve(rhs);
      worst = std::max(worst, (rls.theta() - batch).cwiseAbs().maxCoeff());
    }
    return worst;
  };
  const auto s = reference_single_settings().rls;
  const auto d = reference_double_settings().rls;
  const double w1 = run(s.l_theta(), s.R_z, s.R_d, s.R_theta_scale, 101);
  const double w2 = run(d.l_theta(), d.R_z, d.R_d, d.R_theta_scale, 202);
  const double w3 = run(5, 1.0, 0.3, 0.1, 303);
  const double worst = std::max({w1, w2, w3});
  report(5, "recursive theta equals the batch minimizer on every prefix of 30 steps", worst < kRlsBatchTol,
         "max |theta_rls - theta_batch| = " + fmt("%.3e", worst) + " (tolerance 1e-8)");
}

struct SineResult {
  bool completed = true;
  std::string note;
  double rmse = NAN;
};

SineResult sine_rmse(int order, const DifferentiatorSettings& st) {
  Differentiator d(IntegratorModel::of_order(order, 0.01), st.rls, st.ase, st.init);
  double ss = 0.0;
  long n = 0;
  SineResult out;
  try {
    for (long k = 1; k <= 6000; ++k) {
      const double t = 0.01 * static_cast<double>(k);
      const double v = d.step(std::sin(2 * t));
      if (k >= 500) {
        const double truth = order == 1 ? 2 * std::cos(2 * t) : -4 * std::sin(2 * t);
        ss += (v - truth) * (v - truth);
        ++n;
      }
    }
  } catch (const DivergenceError& e) {
    out.completed = false;
    out.note = std::string("diverged: ") + e.what();
    return out;
  }
  out.rmse = std::sqrt(ss / static_cast<double>(n));
  return out;
}

std::string sine_text(const SineResult& r) {
  return r.completed ? "RMSE " + fmt("%.4f", r.rmse) : r.note;
}

void criterion_sine_accuracy() {
  const SineResult single = sine_rmse(1, reference_single_settings());
  const SineResult dbl = sine_rmse(2, reference_double_settings());
  const bool pass = single.completed && single.rmse <= kSingleRmseTarget && dbl.completed &&
                    dbl.rmse <= kDoubleRmseTarget;
  report(6, "noiseless sin(2t) with the example tuning: single RMSE <= 0.05, double RMSE <= 0.5", pass,
         "single " + sine_text(single) + "; double " + sine_text(dbl));

  const SineResult ps = sine_rmse(1, default_single_settings());
  const SineResult pd = sine_rmse(2, default_double_settings());
  info("noiseless sin(2t) with the preset tuning", "single " + sine_text(ps) + "; double " + sine_text(pd));
}

void criterion_ase_contract(const std::vector<RunResult>& runs) {
  long steps = 0, case1 = 0, case2 = 0, bad = 0;
  double worst = 0.0;
  for (const auto& r : runs) {
    for (const auto& st : r.steps) {
      for (const auto& t : st.traces) {
        ++steps;
        if (!(t.v2 >= 0.0)) ++bad;
        if (t.positive_set) {
          ++case1;
          const double gap = std::abs(t.s_hat - (t.predicted_variance + t.v2));
          worst = std::max(worst, gap / std::max(1.0, t.s_hat));
          if (gap > kAseContractRelTol * std::max(1.0, t.s_hat)) ++bad;
        } else {
          ++case2;
          if (t.v2 != 0.0) ++bad;
        }
      }
    }
  }
  report(7, "V2 >= 0 everywhere, Case 1 matches S_hat exactly, Case 2 sets V2 = 0", bad == 0 && steps > 0,
         std::to_string(steps) + " differentiator steps over " + std::to_string(runs.size()) + " runs; " +
             std::to_string(case1) + " Case 1, " + std::to_string(case2) + " Case 2, " + std::to_string(bad) +
             " violations; max relative Case 1 gap " + fmt("%.1e", worst));
}

void criterion_classifier() {
  const std::map<std::string, Verdict> rows = {
      {"000000", Verdict::all_healthy},    {"110011", Verdict::compass_faulty},
      {"111111", Verdict::radar_faulty},   {"011100", Verdict::z_gyro_faulty},
      {"001010", Verdict::x_accel_faulty}, {"000101", Verdict::y_accel_faulty},
  };
  int named = 0, indeterminate = 0, wrong = 0;
  for (int bits = 0; bits < 64; ++bits) {
    FlagArray f{};
    for (std::size_t i = 0; i < kMetricCount; ++i) f[i] = (bits >> (5 - i)) & 1;
    const Verdict v = classify(f);
    const auto it = rows.find(flag_pattern(f));
    if (it != rows.end()) {
      named += v == it->second;
      wrong += v != it->second;
    } else {
      indeterminate += v == Verdict::indeterminate;
      wrong += v != Verdict::indeterminate;
    }
  }
  report(8, "all 64 flag patterns map to the 6 signatures or Indeterminate",
         named == 6 && indeterminate == 58 && wrong == 0,
         std::to_string(named) + " named, " + std::to_string(indeterminate) + " Indeterminate, " +
             std::to_string(wrong) + " wrong");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void criterion_determinism() {
  const fs::path root = fs::temp_directory_path() / "kinfault_acceptance_determinism";
  fs::remove_all(root);
  int compared = 0, differing = 0;
  for (const auto& name : preset_names()) {
    for (int pass = 0; pass < 2; ++pass) {
      write_traces(run_scenario(preset(name)), root / name / std::to_string(pass));
    }
    for (const char* f :
         {"sensors.csv", "derivatives.csv", "residuals.csv", "metrics.csv", "diagnostic.csv", "summary.txt"}) {
      ++compared;
      const std::string a = slurp(root / name / "0" / f);
      if (a.empty() || a != slurp(root / name / "1" / f)) ++differing;
    }
  }
  fs::remove_all(root);
  report(9, "two runs of each preset with the same seed give byte-identical outputs", differing == 0,
         std::to_string(compared) + " files compared, " + std::to_string(differing) + " differ");
}

void compass_probe(FaultKind kind, double magnitude, const std::string& title) {
  Scenario s = preset("healthy");
  s.name = "compass-probe";
  s.faults = {FaultSpec{Sensor::compass, kind, magnitude, 40.0}};
  const RunResult r = run_scenario(s);
  info(title, status_text(r) + "; sustained " + sustained_text(r.summary) + "; patterns after 4000: " +
                  pattern_histogram(r, kFaultStep + 1, s.trajectory.k_last));
}

void cutoff_probe(const std::vector<RunResult>& runs) {
  bool positive = true;
  double smallest = INFINITY;
  for (const auto& r : runs) {
    if (!r.summary.cutoffs) {
      positive = false;
      continue;
    }
    for (double c : *r.summary.cutoffs) {
      positive = positive && c > 0.0;
      smallest = std::min(smallest, c);
    }
  }
  info("cutoffs on noisy runs", std::string(positive ? "all" : "not all") + " strictly positive, smallest " +
                                    fmt("%.4g", smallest));
}

}  // namespace

int main() {
  std::vector<RunResult> runs;
  try {
    criterion_example1(runs);
    criterion_example2(runs);
    criterion_healthy(runs);
    criterion_exact_kinematics();
    criterion_rls_batch();
    criterion_sine_accuracy();
    criterion_ase_contract(runs);
    criterion_classifier();
    criterion_determinism();
    compass_probe(FaultKind::bias, 0.1, "compass bias 0.1 rad at 40 s (signature 110011)");
    compass_probe(FaultKind::drift, 0.5, "compass drift 0.5 rad/s at 40 s (signature 110011)");
    cutoff_probe(runs);
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance harness aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
