// Causal numerical differentiation by adaptive input estimation with
// adaptive state estimation (AIE/ASE).
//
// A scalar sampled signal y_k is modeled as the output of a discrete-time
// integrator (single or double) driven by an unknown input d_k. A Kalman
// filter tracks the integrator state while a retrospective-cost RLS
// estimator adapts the coefficients of an exactly proper input-estimation
// filter from the forecast residual. The filter output d_hat_k is the
// estimated first (order 1) or second (order 2) derivative of y. The process
// and sensor noise covariances of the Kalman filter are adapted online so the
// predicted residual variance tracks the sample residual variance.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kinfault {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

/// Discrete-time integrator x_{k+1} = A x_k + B d_k, y_k = C x_k.
struct IntegratorModel {
  int order = 1;
  double sample_time = 0.01;
  MatrixXd A;
  VectorXd B;
  RowVectorXd C;

  /// A = 1, B = Ts, C = 1.
  static IntegratorModel single(double sample_time);
  /// A = [1 Ts; 0 1], B = [Ts^2/2; Ts], C = [1 0].
  static IntegratorModel double_integrator(double sample_time);
  static IntegratorModel of_order(int order, double sample_time);
};

/// Retrospective-cost RLS weights and filter sizes.
struct RlsConfig {
  int n_e = 12;                 // input-estimation filter order
  int n_f = 15;                 // number of Markov parameters in the regressor filter
  double R_z = 1.0;             // residual weight
  double R_d = 1e-4;            // input-magnitude weight
  double R_theta_scale = 1e-5;  // R_theta = scale * I

  int l_theta() const { return 2 * n_e + 1; }
  void validate() const;
};

enum class EtaSpacing { linear, log };

/// Process-noise grid for ASE. V1 = eta I with eta swept over
/// [eta_low, eta_high].
struct AseConfig {
  double eta_low = 1e-6;
  double eta_high = 1e2;
  int grid_points = 100;
  double alpha = 0.5;
  EtaSpacing spacing = EtaSpacing::linear;

  std::vector<double> grid() const;
  void validate() const;
};

/// Thrown when an internal quantity becomes non-finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"),
        step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Running mean and the 1/k-normalized sample variance of the residual over
/// [0, k]. At k = 0 the variance is defined as 0.
class ResidualStats {
 public:
  void update(double z);
  double mean() const { return mean_; }
  double variance() const;
  std::size_t count() const { return count_; }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct AseResult {
  double eta = 0.0;         // adapted V1 = eta I
  double v2 = 0.0;          // adapted sensor-noise variance, always >= 0
  bool positive_set = false;  // Case 1 (true) or Case 2 (false)
  double j_target = 0.0;    // alpha-blend of min/max positive J_f (Case 1 only)
  double j_f = 0.0;         // J_f at the chosen eta
  MatrixXd P_f;             // A P_da A' + eta I at the chosen eta
};

/// Grid search for (V1, V2). P_da_prev is the data-assimilation covariance
/// of the previous step, s_hat the current sample residual variance.
AseResult ase_adapt(const IntegratorModel& model, const MatrixXd& P_da_prev,
                    double s_hat, const AseConfig& cfg);

/// RLS minimizer of the retrospective cost
///   sum_i R_z (z_i - d_f,i + Phi_f,i theta)^2 + R_d (Phi_i theta)^2
///     + theta' R_theta theta
/// updated one step at a time.
class RetrospectiveRls {
 public:
  RetrospectiveRls(int l_theta, double R_z, double R_d, double R_theta_scale);

  /// Folds step k into the cost and returns theta_{k+1}. Throws
  /// std::runtime_error if the 2x2 gain matrix is singular or
  /// non-finite.
  const VectorXd& update(double z, const RowVectorXd& phi_f, double d_hat_f,
                         const RowVectorXd& phi);

  const VectorXd& theta() const { return theta_; }
  const MatrixXd& covariance() const { return P_; }

 private:
  VectorXd theta_;
  MatrixXd P_;
  double r_inv_z_;
  double r_inv_d_;
};

/// Fixed-capacity history, index 0 is the newest entry. Slots that were
/// never written hold the fill value.
template <typename T>
class History {
 public:
  History() = default;
  History(std::size_t capacity, const T& fill) : data_(capacity, fill) {}

  void push(const T& value) {
    if (data_.empty()) return;
    head_ = (head_ + data_.size() - 1) % data_.size();
    data_[head_] = value;
  }
  const T& operator[](std::size_t age) const {
    return data_[(head_ + age) % data_.size()];
  }
  std::size_t capacity() const { return data_.size(); }

 private:
  std::vector<T> data_;
  std::size_t head_ = 0;
};

/// Per-step record exposed for traces and contract checks.
struct StepTrace {
  std::size_t k = 0;
  double y = 0.0;
  double z = 0.0;
  double d_hat = 0.0;
  double eta = 0.0;
  double v2 = 0.0;
  double s_hat = 0.0;
  double predicted_variance = 0.0;  // C P_f C'
  bool positive_set = false;
};

/// Forecast state before the first sample.
///   zero:         x_fc,0 = 0
///   first_sample: x_fc,0 places the first sample on the output (C x = y_0)
///                 with all higher states 0, so z_0 = 0
enum class InitialState { zero, first_sample };

class Differentiator {
 public:
  Differentiator(IntegratorModel model, RlsConfig rls, AseConfig ase,
                 InitialState init = InitialState::first_sample);

  /// Consumes y_k and returns d_hat_k. Throws std::invalid_argument for a
  /// non-finite sample and DivergenceError if the filter blows up.
  double step(double y);

  std::size_t steps_taken() const { return k_; }
  const IntegratorModel& model() const { return model_; }
  const RlsConfig& rls_config() const { return rls_cfg_; }
  const AseConfig& ase_config() const { return ase_cfg_; }

  const VectorXd& forecast_state() const { return x_fc_; }
  const VectorXd& assimilated_state() const { return x_da_; }
  const MatrixXd& forecast_covariance() const { return P_f_; }
  const MatrixXd& assimilation_covariance() const { return P_da_; }
  const VectorXd& theta() const { return rls_.theta(); }
  const MatrixXd& rls_covariance() const { return rls_.covariance(); }

  /// H_{1..n_f} used at the most recent step.
  const std::vector<double>& markov_parameters() const { return markov_; }
  /// Regressor, filtered regressor and filtered input of the most recent
  /// step.
  const RowVectorXd& regressor() const { return phi_; }
  const RowVectorXd& filtered_regressor() const { return phi_f_; }
  double filtered_input() const { return d_hat_f_; }

  const StepTrace& last_trace() const { return trace_; }

 private:
  RowVectorXd build_regressor(double z) const;
  void update_markov_parameters();
  void check_finite() const;

  IntegratorModel model_;
  RlsConfig rls_cfg_;
  AseConfig ase_cfg_;
  InitialState init_;
  MatrixXd identity_;

  std::size_t k_ = 0;
  VectorXd x_fc_;
  VectorXd x_da_;
  MatrixXd P_f_;
  MatrixXd P_da_;
  ResidualStats stats_;
  RetrospectiveRls rls_;

  History<double> past_d_hat_;       // d_hat_{k-1}, d_hat_{k-2}, ...
  History<double> past_z_;           // z_{k-1}, z_{k-2}, ...
  History<RowVectorXd> past_phi_;    // Phi_{k-1}, ...
  History<MatrixXd> past_a_bar_;     // A(I + K_da C) at k-1, ...

  std::vector<double> markov_;
  RowVectorXd phi_;
  RowVectorXd phi_f_;
  double d_hat_f_ = 0.0;
  StepTrace trace_;
};

}  // namespace kinfault
