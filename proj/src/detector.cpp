#include "kinfault/detector.hpp"

#include <cmath>
#include <stdexcept>

namespace kinfault {

namespace {

constexpr std::size_t kRefreshInterval = 1000;

struct Signature {
  const char* pattern;
  Verdict verdict;
};

constexpr std::array<Signature, 6> kSignatures{{
    {"000000", Verdict::all_healthy},
    {"110011", Verdict::compass_faulty},
    {"111111", Verdict::radar_faulty},
    {"011100", Verdict::z_gyro_faulty},
    {"001010", Verdict::x_accel_faulty},
    {"000101", Verdict::y_accel_faulty},
}};

}  // namespace

const std::array<const char*, kMetricCount> kMetricNames{"s_x", "s_y", "d_x", "d_y", "a_x", "a_y"};

Vec3 earth_position(const SensorSample& s) { return body_to_earth_position(s.theta, s.r); }

ResidualTerms build_residual_terms(const SensorSample& s, const DerivativeSet& d) {
  const Vec3 r_dot(d.rx_dot, d.ry_dot, 0.0);
  const Vec3 r_ddot(d.rx_ddot, d.ry_ddot, 0.0);
  const Vec3 R_dot(d.Rx_dot, d.Ry_dot, 0.0);
  const Vec3 R_ddot(d.Rx_ddot, d.Ry_ddot, 0.0);
  const Vec3 omega_dot(0.0, 0.0, d.omega_dot);

  ResidualTerms t;
  t.L_s = resolve_earth_accel_in_body(s.theta, R_dot);
  t.R_s = single_transport_rhs(s.r, r_dot, s.omega);
  t.L_d = s.A;
  t.R_d = double_transport_rhs(s.r, r_dot, r_ddot, s.omega, omega_dot);
  t.L_a = s.A;
  t.R_a = resolve_earth_accel_in_body(s.theta, R_ddot);
  return t;
}

MetricArray planar_residuals(const ResidualTerms& t) {
  const Vec3 s = t.L_s - t.R_s;
  const Vec3 d = t.L_d - t.R_d;
  const Vec3 a = t.L_a - t.R_a;
  return {s.x(), s.y(), d.x(), d.y(), a.x(), a.y()};
}

WindowedRms::WindowedRms(std::size_t delta) : delta_(delta) {
  if (delta == 0) throw std::invalid_argument("window length must be >= 1");
  squares_.assign(delta + 1, 0.0);
}

void WindowedRms::push(double residual) {
  const double sq = residual * residual;
  sum_ += sq - squares_[head_];
  squares_[head_] = sq;
  head_ = (head_ + 1) % squares_.size();
  ++count_;
  if (++since_refresh_ >= kRefreshInterval) refresh();
}

void WindowedRms::refresh() {
  sum_ = 0.0;
  for (double v : squares_) sum_ += v;
  since_refresh_ = 0;
}

double WindowedRms::value() const {
  if (!ready()) throw std::logic_error("error metric is undefined until the window is full");
  return std::sqrt(std::max(sum_, 0.0) / static_cast<double>(delta_));
}

void Cutoffs::freeze(const MetricArray& metrics_at_freeze) {
  if (values_) throw std::logic_error("cutoffs are already frozen");
  MetricArray c{};
  for (std::size_t i = 0; i < kMetricCount; ++i) c[i] = 2.0 * metrics_at_freeze[i];
  values_ = c;
}

const MetricArray& Cutoffs::values() const {
  if (!values_) throw std::logic_error("cutoffs are not frozen yet");
  return *values_;
}

FlagArray Cutoffs::flags(const MetricArray& metrics) const {
  const MetricArray& c = values();
  FlagArray f{};
  for (std::size_t i = 0; i < kMetricCount; ++i) f[i] = metrics[i] > c[i];
  return f;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::all_healthy: return "AllHealthy";
    case Verdict::compass_faulty: return "CompassFaulty";
    case Verdict::radar_faulty: return "RadarFaulty";
    case Verdict::z_gyro_faulty: return "ZGyroFaulty";
    case Verdict::x_accel_faulty: return "XAccelFaulty";
    case Verdict::y_accel_faulty: return "YAccelFaulty";
    case Verdict::indeterminate: return "Indeterminate";
  }
  return "?";
}

std::string flag_pattern(const FlagArray& flags) {
  std::string p(kMetricCount, '0');
  for (std::size_t i = 0; i < kMetricCount; ++i) p[i] = flags[i] ? '1' : '0';
  return p;
}

Verdict classify(const FlagArray& flags) {
  const std::string p = flag_pattern(flags);
  for (const auto& sig : kSignatures) {
    if (p == sig.pattern) return sig.verdict;
  }
  return Verdict::indeterminate;
}

void SustainedVerdict::observe(long k, Verdict v) {
  if (v != current_ || run_ == 0) {
    current_ = v;
    run_ = 0;
    run_start_ = k;
  }
  ++run_;
  if (!verdict_ && v != Verdict::all_healthy && v != Verdict::indeterminate && run_ >= hold_) {
    verdict_ = v;
    step_ = run_start_;
  }
}

}  // namespace kinfault
