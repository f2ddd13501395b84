#include "kinfault/traces.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kinfault {

namespace {

class CsvFile {
 public:
  explicit CsvFile(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  ~CsvFile() = default;

  CsvFile& cell(const std::string& s) {
    if (!first_) out_ << ',';
    out_ << s;
    first_ = false;
    return *this;
  }
  CsvFile& num(double v) { return cell(format_double(v)); }
  CsvFile& integer(long v) { return cell(std::to_string(v)); }
  CsvFile& empty(int n = 1) {
    for (int i = 0; i < n; ++i) cell("");
    return *this;
  }
  void end_row() {
    out_ << '\n';
    first_ = true;
  }
  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("failed writing " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  bool first_ = true;
};

const char* const kAxes[] = {"x", "y", "z"};

void write_sensors(const RunResult& run, const std::filesystem::path& dir) {
  CsvFile f(dir / "sensors.csv");
  for (const char* h : {"k", "t", "theta", "r_x", "r_y", "omega_z", "A_x", "A_y"}) f.cell(h);
  f.end_row();
  for (const auto& s : run.steps) {
    const auto& m = s.sensors;
    f.integer(s.k).num(s.t).num(m.theta).num(m.r.x()).num(m.r.y()).num(m.omega.z()).num(m.A.x()).num(
        m.A.y());
    f.end_row();
  }
  f.close();
}

void write_derivatives(const RunResult& run, const std::filesystem::path& dir) {
  CsvFile f(dir / "derivatives.csv");
  f.cell("k").cell("t");
  for (const char* name : kChannelNames) {
    f.cell(name).cell(std::string(name) + "_eta").cell(std::string(name) + "_v2");
  }
  f.end_row();
  const bool aie = run.scenario.derivatives == DerivativeSource::aie;
  for (const auto& s : run.steps) {
    f.integer(s.k).num(s.t);
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      f.num(s.derivatives[c]);
      if (aie) {
        f.num(s.traces[c].eta).num(s.traces[c].v2);
      } else {
        f.empty(2);
      }
    }
    f.end_row();
  }
  f.close();
}

void write_residuals(const RunResult& run, const std::filesystem::path& dir) {
  CsvFile f(dir / "residuals.csv");
  f.cell("k").cell("t");
  for (const char* side : {"L_s", "R_s", "L_d", "R_d", "L_a", "R_a"}) {
    for (const char* a : kAxes) f.cell(std::string(side) + "_" + a);
  }
  f.end_row();
  for (const auto& s : run.steps) {
    f.integer(s.k).num(s.t);
    for (const Vec3* v : {&s.terms.L_s, &s.terms.R_s, &s.terms.L_d, &s.terms.R_d, &s.terms.L_a,
                          &s.terms.R_a}) {
      f.num(v->x()).num(v->y()).num(v->z());
    }
    f.end_row();
  }
  f.close();
}

void write_metrics(const RunResult& run, const std::filesystem::path& dir) {
  CsvFile f(dir / "metrics.csv");
  f.cell("k").cell("t");
  for (const char* prefix : {"e_", "c_", "flag_"}) {
    for (const char* m : kMetricNames) f.cell(std::string(prefix) + m);
  }
  f.end_row();
  const auto& cutoffs = run.summary.cutoffs;
  const int n = static_cast<int>(kMetricCount);
  for (const auto& s : run.steps) {
    f.integer(s.k).num(s.t);
    if (s.metrics) {
      for (double e : *s.metrics) f.num(e);
    } else {
      f.empty(n);
    }
    if (cutoffs && s.k >= run.summary.freeze_step) {
      for (double c : *cutoffs) f.num(c);
    } else {
      f.empty(n);
    }
    if (s.flags) {
      for (bool b : *s.flags) f.cell(b ? "AC" : "BC");
    } else {
      f.empty(n);
    }
    f.end_row();
  }
  f.close();
}

void write_diagnostic(const RunResult& run, const std::filesystem::path& dir) {
  CsvFile f(dir / "diagnostic.csv");
  f.cell("k").cell("t").cell("pattern").cell("verdict");
  f.end_row();
  for (const auto& s : run.steps) {
    f.integer(s.k).num(s.t);
    if (s.flags && s.verdict) {
      f.cell(flag_pattern(*s.flags)).cell(to_string(*s.verdict));
    } else {
      f.empty(2);
    }
    f.end_row();
  }
  f.close();
}

std::string optional_step(const std::optional<long>& k) { return k ? std::to_string(*k) : "none"; }

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string summary_text(const RunResult& run) {
  const auto& s = run.summary;
  const auto& sc = run.scenario;
  std::ostringstream out;
  out << "scenario: " << sc.name << '\n';
  out << "seed: " << sc.seed << '\n';
  out << "heading: " << to_string(sc.trajectory.heading) << '\n';
  out << "derivatives: " << to_string(sc.derivatives) << '\n';
  out << "fault: " << (sc.faults.empty() ? std::string("none") : format_fault(sc.faults.front())) << '\n';
  out << "status: " << to_string(s.status) << '\n';
  if (!s.message.empty()) out << "message: " << s.message << '\n';
  if (s.failure_step) out << "failure_step: " << *s.failure_step << '\n';
  out << "steps_run: " << s.steps_run << '\n';
  out << "delta: " << sc.delta << '\n';
  out << "cutoff_step: " << s.freeze_step << '\n';
  out << "sustained_verdict: " << (s.sustained_verdict ? to_string(*s.sustained_verdict) : "none") << '\n';
  out << "sustained_verdict_step: " << optional_step(s.sustained_step) << '\n';
  out << "classified_steps: " << s.classified_steps << '\n';
  for (std::size_t v = 0; v < s.verdict_counts.size(); ++v) {
    out << "steps_" << to_string(static_cast<Verdict>(v)) << ": " << s.verdict_counts[v] << '\n';
  }
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    out << "first_ac_" << kMetricNames[m] << ": " << optional_step(s.first_ac[m]) << '\n';
  }
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    out << "cutoff_" << kMetricNames[m] << ": " << (s.cutoffs ? format_double((*s.cutoffs)[m]) : "none")
        << '\n';
  }
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    out << "final_e_" << kMetricNames[m] << ": "
        << (s.final_metrics ? format_double((*s.final_metrics)[m]) : "none") << '\n';
  }
  return out.str();
}

void write_traces(const RunResult& run, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  write_sensors(run, dir);
  write_derivatives(run, dir);
  write_residuals(run, dir);
  write_metrics(run, dir);
  write_diagnostic(run, dir);
  std::ofstream out(dir / "summary.txt", std::ios::binary);
  out << summary_text(run);
  if (!out) throw std::runtime_error("failed writing " + (dir / "summary.txt").string());
}

}  // namespace kinfault
