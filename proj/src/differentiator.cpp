#include "kinfault/differentiator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kinfault {

namespace {

void symmetrize(MatrixXd& m) { m = 0.5 * (m + m.transpose()).eval(); }

}  // namespace

IntegratorModel IntegratorModel::single(double sample_time) {
  if (!(sample_time > 0.0) || !std::isfinite(sample_time)) {
    throw std::invalid_argument("sample time must be positive");
  }
  IntegratorModel m;
  m.order = 1;
  m.sample_time = sample_time;
  m.A = MatrixXd::Ones(1, 1);
  m.B = VectorXd::Constant(1, sample_time);
  m.C = RowVectorXd::Ones(1);
  return m;
}

IntegratorModel IntegratorModel::double_integrator(double sample_time) {
  if (!(sample_time > 0.0) || !std::isfinite(sample_time)) {
    throw std::invalid_argument("sample time must be positive");
  }
  IntegratorModel m;
  m.order = 2;
  m.sample_time = sample_time;
  m.A.resize(2, 2);
  m.A << 1.0, sample_time, 0.0, 1.0;
  m.B.resize(2);
  m.B << 0.5 * sample_time * sample_time, sample_time;
  m.C.resize(2);
  m.C << 1.0, 0.0;
  return m;
}

IntegratorModel IntegratorModel::of_order(int order, double sample_time) {
  switch (order) {
    case 1: return single(sample_time);
    case 2: return double_integrator(sample_time);
    default: throw std::invalid_argument("integrator order must be 1 or 2");
  }
}

void RlsConfig::validate() const {
  if (n_e < 1) throw std::invalid_argument("n_e must be >= 1");
  if (n_f < 1) throw std::invalid_argument("n_f must be >= 1");
  if (!(R_z > 0.0)) throw std::invalid_argument("R_z must be > 0");
  if (!(R_d > 0.0)) throw std::invalid_argument("R_d must be > 0");
  if (!(R_theta_scale > 0.0)) throw std::invalid_argument("R_theta must be > 0");
}

void AseConfig::validate() const {
  if (!(eta_low >= 0.0) || !(eta_high > eta_low) || !std::isfinite(eta_high)) {
    throw std::invalid_argument("eta range must satisfy 0 <= eta_low < eta_high");
  }
  if (grid_points < 2) throw std::invalid_argument("grid_points must be >= 2");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (spacing == EtaSpacing::log && !(eta_low > 0.0)) {
    throw std::invalid_argument("log eta spacing needs eta_low > 0");
  }
}

std::vector<double> AseConfig::grid() const {
  std::vector<double> g(static_cast<std::size_t>(grid_points));
  const double last = static_cast<double>(grid_points - 1);
  for (int i = 0; i < grid_points; ++i) {
    const double frac = static_cast<double>(i) / last;
    if (spacing == EtaSpacing::linear) {
      g[i] = eta_low + frac * (eta_high - eta_low);
    } else {
      g[i] = std::exp(std::log(eta_low) + frac * (std::log(eta_high) - std::log(eta_low)));
    }
  }
  g.back() = eta_high;
  return g;
}

void ResidualStats::update(double z) {
  // Welford
  ++count_;
  const double delta = z - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (z - mean_);
}

double ResidualStats::variance() const {
  if (count_ < 2) return 0.0;
  return m2_ / static_cast<double>(count_ - 1);
}

AseResult ase_adapt(const IntegratorModel& model, const MatrixXd& P_da_prev,
                    double s_hat, const AseConfig& cfg) {
  const auto n = model.order;
  const MatrixXd propagated = model.A * P_da_prev * model.A.transpose();
  const double base = (model.C * propagated * model.C.transpose())(0, 0);
  const double c_norm2 = model.C.squaredNorm();

  const std::vector<double> etas = cfg.grid();
  std::vector<double> j_f(etas.size());
  double j_min = std::numeric_limits<double>::infinity();
  double j_max = -std::numeric_limits<double>::infinity();
  bool any_positive = false;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    j_f[i] = s_hat - (base + etas[i] * c_norm2);
    if (j_f[i] > 0.0) {
      any_positive = true;
      j_min = std::min(j_min, j_f[i]);
      j_max = std::max(j_max, j_f[i]);
    }
  }

  AseResult out;
  out.positive_set = any_positive;
  const double target = any_positive ? cfg.alpha * j_min + (1.0 - cfg.alpha) * j_max : 0.0;
  out.j_target = target;

  std::size_t best = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const double gap = std::abs(j_f[i] - target);
    if (gap < best_gap) {
      best_gap = gap;
      best = i;
    }
  }

  out.eta = etas[best];
  out.j_f = j_f[best];
  out.v2 = any_positive ? j_f[best] : 0.0;
  out.P_f = propagated + out.eta * MatrixXd::Identity(n, n);
  symmetrize(out.P_f);
  return out;
}

RetrospectiveRls::RetrospectiveRls(int l_theta, double R_z, double R_d, double R_theta_scale)
    : theta_(VectorXd::Zero(l_theta)),
      P_(MatrixXd::Identity(l_theta, l_theta) / R_theta_scale),
      r_inv_z_(1.0 / R_z),
      r_inv_d_(1.0 / R_d) {}

const VectorXd& RetrospectiveRls::update(double z, const RowVectorXd& phi_f, double d_hat_f,
                                         const RowVectorXd& phi) {
  const Eigen::Index l = theta_.size();
  Eigen::MatrixXd phi_tilde(2, l);
  phi_tilde.row(0) = phi_f;
  phi_tilde.row(1) = phi;
  const Eigen::Vector2d z_tilde(z - d_hat_f, 0.0);

  const MatrixXd p_phi_t = P_ * phi_tilde.transpose();  // l x 2
  Eigen::Matrix2d g = phi_tilde * p_phi_t;
  g(0, 0) += r_inv_z_;
  g(1, 1) += r_inv_d_;
  const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
    throw std::runtime_error("RLS gain matrix is singular or non-finite");
  }
  Eigen::Matrix2d gamma;
  gamma << g(1, 1), -g(0, 1), -g(1, 0), g(0, 0);
  gamma /= det;

  const Eigen::Vector2d innovation = z_tilde + phi_tilde * theta_;
  theta_ -= p_phi_t * (gamma * innovation);
  P_ -= p_phi_t * gamma * p_phi_t.transpose();
  symmetrize(P_);
  return theta_;
}

Differentiator::Differentiator(IntegratorModel model, RlsConfig rls, AseConfig ase,
                               InitialState init)
    : model_(std::move(model)),
      rls_cfg_(rls),
      ase_cfg_(ase),
      init_(init),
      rls_((rls.validate(), rls.l_theta()), rls.R_z, rls.R_d, rls.R_theta_scale) {
  ase_cfg_.validate();
  if (model_.order != 1 && model_.order != 2) {
    throw std::invalid_argument("integrator order must be 1 or 2");
  }
  const int n = model_.order;
  const int l = rls_cfg_.l_theta();
  identity_ = MatrixXd::Identity(n, n);
  x_fc_ = VectorXd::Zero(n);
  x_da_ = VectorXd::Zero(n);
  P_f_ = MatrixXd::Zero(n, n);
  P_da_ = MatrixXd::Zero(n, n);

  const auto depth = static_cast<std::size_t>(std::max(rls_cfg_.n_e, rls_cfg_.n_f));
  past_d_hat_ = History<double>(depth, 0.0);
  past_z_ = History<double>(static_cast<std::size_t>(rls_cfg_.n_e), 0.0);
  past_phi_ = History<RowVectorXd>(static_cast<std::size_t>(rls_cfg_.n_f), RowVectorXd::Zero(l));
  past_a_bar_ = History<MatrixXd>(static_cast<std::size_t>(rls_cfg_.n_f), MatrixXd::Zero(n, n));
  markov_.assign(static_cast<std::size_t>(rls_cfg_.n_f), 0.0);
  phi_ = RowVectorXd::Zero(l);
  phi_f_ = RowVectorXd::Zero(l);
}

RowVectorXd Differentiator::build_regressor(double z) const {
  const int n_e = rls_cfg_.n_e;
  RowVectorXd phi(rls_cfg_.l_theta());
  for (int i = 0; i < n_e; ++i) phi(i) = past_d_hat_[static_cast<std::size_t>(i)];
  phi(n_e) = z;
  for (int i = 0; i < n_e; ++i) phi(n_e + 1 + i) = past_z_[static_cast<std::size_t>(i)];
  return phi;
}

void Differentiator::update_markov_parameters() {
  // H_1 = C B; H_i = C Abar_{k-1} ... Abar_{k-i+1} B; H_i = 0 for i > k.
  RowVectorXd w = model_.C;
  for (std::size_t i = 1; i <= markov_.size(); ++i) {
    if (i > k_) {
      markov_[i - 1] = 0.0;
      continue;
    }
    if (i >= 2) w = w * past_a_bar_[i - 2];
    markov_[i - 1] = w.dot(model_.B);
  }
}

void Differentiator::check_finite() const {
  if (!x_fc_.allFinite() || !x_da_.allFinite() || !P_f_.allFinite() || !P_da_.allFinite() ||
      !rls_.theta().allFinite() || !rls_.covariance().allFinite() || !std::isfinite(trace_.d_hat)) {
    throw DivergenceError(k_, "differentiator diverged");
  }
}

double Differentiator::step(double y) {
  if (!std::isfinite(y)) {
    throw std::invalid_argument("differentiator input must be finite");
  }

  if (k_ == 0 && init_ == InitialState::first_sample) {
    x_fc_ = model_.C.transpose() * (y / model_.C.squaredNorm());
  }
  const double y_fc = model_.C.dot(x_fc_);
  const double z = y_fc - y;
  stats_.update(z);
  const double s_hat = stats_.variance();

  const AseResult ase = ase_adapt(model_, P_da_, s_hat, ase_cfg_);
  P_f_ = ase.P_f;

  const double predicted = (model_.C * P_f_ * model_.C.transpose())(0, 0);
  const double innovation_var = predicted + ase.v2;
  VectorXd gain = VectorXd::Zero(model_.order);
  if (innovation_var > 0.0) {
    gain = -P_f_ * model_.C.transpose() / innovation_var;
  }
  x_da_ = x_fc_ + gain * z;
  const MatrixXd closed = identity_ + gain * model_.C;
  P_da_ = closed * P_f_;
  symmetrize(P_da_);
  const MatrixXd a_bar = model_.A * closed;

  phi_ = build_regressor(z);
  const RowVectorXd& phi = phi_;
  const double d_hat = phi.dot(rls_.theta());

  update_markov_parameters();
  phi_f_.setZero();
  d_hat_f_ = 0.0;
  for (std::size_t i = 1; i <= markov_.size(); ++i) {
    const double h = markov_[i - 1];
    if (h == 0.0) continue;
    phi_f_ += h * past_phi_[i - 1];
    d_hat_f_ += h * past_d_hat_[i - 1];
  }
  try {
    rls_.update(z, phi_f_, d_hat_f_, phi);
  } catch (const std::runtime_error& e) {
    throw DivergenceError(k_, e.what());
  }

  x_fc_ = model_.A * x_da_ + model_.B * d_hat;

  trace_ = StepTrace{k_, y, z, d_hat, ase.eta, ase.v2, s_hat, predicted, ase.positive_set};
  check_finite();

  past_d_hat_.push(d_hat);
  past_z_.push(z);
  past_phi_.push(phi);
  past_a_bar_.push(a_bar);
  ++k_;
  return d_hat;
}

}  // namespace kinfault
