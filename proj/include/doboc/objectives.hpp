#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "doboc/errors.hpp"

namespace doboc {

/// Contract for one agent's objective f_i: value, gradient, Hessian (dense
/// p-by-p and as a matrix-vector action), and the constants the rate
/// theory needs: strong convexity m_i, smoothness M_i, and the Lipschitz
/// constant L_i of the Hessian.
class LocalObjective {
 public:
  virtual ~LocalObjective() = default;

  virtual int dim() const = 0;
  virtual double value(const Eigen::Ref<const Eigen::VectorXd>& y) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& y) const = 0;
  virtual Eigen::MatrixXd hessian(const Eigen::Ref<const Eigen::VectorXd>& y) const = 0;
  virtual Eigen::VectorXd hessian_vec(const Eigen::Ref<const Eigen::VectorXd>& y,
                                      const Eigen::Ref<const Eigen::VectorXd>& v) const {
    return hessian(y) * v;
  }

  virtual double strong_convexity() const = 0;   // m_i
  virtual double smoothness() const = 0;         // M_i
  virtual double hessian_lipschitz() const = 0;  // L_i
};

using LocalObjectivePtr = std::shared_ptr<const LocalObjective>;

/// f(y) = 1/2 y^T A y + b^T y + c with A symmetric positive definite.
/// m and M are the extreme eigenvalues of A, computed from the stored
/// matrix; L = 0.
class QuadraticObjective final : public LocalObjective {
 public:
  QuadraticObjective(Eigen::MatrixXd a, Eigen::VectorXd b, double c = 0.0);

  int dim() const override { return static_cast<int>(b_.size()); }
  double value(const Eigen::Ref<const Eigen::VectorXd>& y) const override;
  Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& y) const override;
  Eigen::MatrixXd hessian(const Eigen::Ref<const Eigen::VectorXd>&) const override { return a_; }
  Eigen::VectorXd hessian_vec(const Eigen::Ref<const Eigen::VectorXd>&,
                              const Eigen::Ref<const Eigen::VectorXd>& v) const override {
    return a_ * v;
  }
  double strong_convexity() const override { return m_; }
  double smoothness() const override { return big_m_; }
  double hessian_lipschitz() const override { return 0.0; }

  const Eigen::MatrixXd& matrix() const { return a_; }
  const Eigen::VectorXd& linear_term() const { return b_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  double c_ = 0.0;
  double m_ = 0.0;
  double big_m_ = 0.0;
};

struct LogisticSample {
  Eigen::VectorXd features;
  double label = 1.0;  // must be exactly +1 or -1
};

/// f(y) = sum_s log(1 + exp(-label_s a_s^T y)) + (mu/2)||y||^2.
/// Constants: m = mu, M = mu + 1/4 lambda_max(sum a a^T),
/// L = (1/(6 sqrt 3)) sum ||a||^3 (peak of the logistic third derivative).
class LogisticObjective final : public LocalObjective {
 public:
  LogisticObjective(int dim, std::vector<LogisticSample> samples, double mu);

  int dim() const override { return p_; }
  double value(const Eigen::Ref<const Eigen::VectorXd>& y) const override;
  Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& y) const override;
  Eigen::MatrixXd hessian(const Eigen::Ref<const Eigen::VectorXd>& y) const override;
  Eigen::VectorXd hessian_vec(const Eigen::Ref<const Eigen::VectorXd>& y,
                              const Eigen::Ref<const Eigen::VectorXd>& v) const override;
  double strong_convexity() const override { return mu_; }
  double smoothness() const override { return big_m_; }
  double hessian_lipschitz() const override { return lips_; }

 private:
  int p_ = 0;
  std::vector<LogisticSample> samples_;
  double mu_ = 0.0;
  double big_m_ = 0.0;
  double lips_ = 0.0;
};

struct QuadraticSpec {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  double c = 0.0;
};

/// Build agents from explicit (A_i, b_i, c_i) triples.
std::vector<LocalObjectivePtr> make_quadratic_family(const std::vector<QuadraticSpec>& specs);

/// Seeded generation: each A_i = Q diag(eigs) Q^T with eigenvalues drawn
/// uniformly from [spectrum_lo, spectrum_hi] and b_i standard normal.
std::vector<LocalObjectivePtr> make_quadratic_family(int agents, int dim, std::uint64_t seed,
                                                     double spectrum_lo, double spectrum_hi);

/// One logistic objective per agent from its sample set.  Empty sample
/// sets are allowed (the objective degenerates to the ridge term).
std::vector<LocalObjectivePtr> make_logistic_family(int dim,
                                                    const std::vector<std::vector<LogisticSample>>& per_agent,
                                                    double mu);

/// Seeded synthetic classification data, `count` samples per agent.
std::vector<std::vector<LogisticSample>> make_synthetic_logistic_data(int agents, int dim, int count,
                                                                      std::uint64_t seed);

}  // namespace doboc
