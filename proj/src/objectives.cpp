#include "doboc/objectives.hpp"

#include <cmath>
#include <string>

#include "doboc/rng.hpp"

namespace doboc {

namespace {

// Numerically safe log(1 + exp(z)) and logistic sigmoid.
double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

QuadraticObjective::QuadraticObjective(Eigen::MatrixXd a, Eigen::VectorXd b, double c)
    : a_(std::move(a)), b_(std::move(b)), c_(c) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size() || b_.size() < 1)
    throw ObjectiveError("quadratic objective needs a square A matching b");
  const double asym = (a_ - a_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 0.0)
    throw ObjectiveError("quadratic A must be symmetric; max |A - A^T| entry is " +
                         std::to_string(asym));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a_, Eigen::EigenvaluesOnly);
  m_ = es.eigenvalues().minCoeff();
  big_m_ = es.eigenvalues().maxCoeff();
  if (!(m_ > 0.0))
    throw ObjectiveError("quadratic A is not positive definite; smallest eigenvalue is " +
                         std::to_string(m_));
}

double QuadraticObjective::value(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  return 0.5 * y.dot(a_ * y) + b_.dot(y) + c_;
}

Eigen::VectorXd QuadraticObjective::gradient(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  return a_ * y + b_;
}

LogisticObjective::LogisticObjective(int dim, std::vector<LogisticSample> samples, double mu)
    : p_(dim), samples_(std::move(samples)), mu_(mu) {
  if (p_ < 1) throw ObjectiveError("logistic objective needs dim >= 1");
  if (!(mu_ > 0.0)) throw ObjectiveError("logistic regularizer mu must be > 0");

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p_, p_);
  double cubes = 0.0;
  for (std::size_t s = 0; s < samples_.size(); ++s) {
    const auto& smp = samples_[s];
    if (smp.features.size() != p_)
      throw ObjectiveError("sample " + std::to_string(s) + " has dimension " +
                           std::to_string(smp.features.size()) + ", expected " + std::to_string(p_));
    if (smp.label != 1.0 && smp.label != -1.0)
      throw ObjectiveError("sample " + std::to_string(s) + " has label " +
                           std::to_string(smp.label) + "; labels must be +1 or -1");
    gram += smp.features * smp.features.transpose();
    cubes += std::pow(smp.features.norm(), 3);
  }
  double gram_top = 0.0;
  if (!samples_.empty()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    gram_top = es.eigenvalues().maxCoeff();
  }
  big_m_ = mu_ + 0.25 * gram_top;
  lips_ = cubes / (6.0 * std::sqrt(3.0));
}

double LogisticObjective::value(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  double loss = 0.0;
  for (const auto& s : samples_) loss += softplus(-s.label * s.features.dot(y));
  return loss + 0.5 * mu_ * y.squaredNorm();
}

Eigen::VectorXd LogisticObjective::gradient(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  Eigen::VectorXd g = mu_ * y;
  for (const auto& s : samples_) {
    const double z = s.label * s.features.dot(y);
    g -= s.label * sigmoid(-z) * s.features;
  }
  return g;
}

Eigen::MatrixXd LogisticObjective::hessian(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  Eigen::MatrixXd h = mu_ * Eigen::MatrixXd::Identity(p_, p_);
  for (const auto& s : samples_) {
    const double z = s.features.dot(y);
    const double w = sigmoid(z) * sigmoid(-z);  // sigma'(z), label-independent
    h += w * (s.features * s.features.transpose());
  }
  return h;
}

Eigen::VectorXd LogisticObjective::hessian_vec(const Eigen::Ref<const Eigen::VectorXd>& y,
                                               const Eigen::Ref<const Eigen::VectorXd>& v) const {
  Eigen::VectorXd out = mu_ * v;
  for (const auto& s : samples_) {
    const double z = s.features.dot(y);
    const double w = sigmoid(z) * sigmoid(-z);
    out += w * s.features.dot(v) * s.features;
  }
  return out;
}

std::vector<LocalObjectivePtr> make_quadratic_family(const std::vector<QuadraticSpec>& specs) {
  if (specs.empty()) throw ObjectiveError("quadratic family needs at least one agent");
  std::vector<LocalObjectivePtr> out;
  out.reserve(specs.size());
  for (const auto& s : specs)
    out.push_back(std::make_shared<QuadraticObjective>(s.a, s.b, s.c));
  return out;
}

std::vector<LocalObjectivePtr> make_quadratic_family(int agents, int dim, std::uint64_t seed,
                                                     double spectrum_lo, double spectrum_hi) {
  if (agents < 1 || dim < 1) throw ObjectiveError("quadratic family needs agents >= 1 and dim >= 1");
  if (!(spectrum_lo > 0.0) || spectrum_hi < spectrum_lo)
    throw ObjectiveError("requested spectrum must satisfy 0 < lo <= hi");
  Rng rng(seed);
  std::vector<LocalObjectivePtr> out;
  out.reserve(agents);
  for (int i = 0; i < agents; ++i) {
    const Eigen::MatrixXd q = rng.orthogonal(dim);
    Eigen::VectorXd eigs(dim);
    for (int d = 0; d < dim; ++d) eigs[d] = rng.uniform(spectrum_lo, spectrum_hi);
    Eigen::MatrixXd a = q * eigs.asDiagonal() * q.transpose();
    a = 0.5 * (a + a.transpose()).eval();  // exact symmetry
    out.push_back(std::make_shared<QuadraticObjective>(std::move(a), rng.normal_vector(dim)));
  }
  return out;
}

std::vector<LocalObjectivePtr> make_logistic_family(int dim,
                                                    const std::vector<std::vector<LogisticSample>>& per_agent,
                                                    double mu) {
  if (per_agent.empty()) throw ObjectiveError("logistic family needs at least one agent");
  std::vector<LocalObjectivePtr> out;
  out.reserve(per_agent.size());
  for (const auto& samples : per_agent)
    out.push_back(std::make_shared<LogisticObjective>(dim, samples, mu));
  return out;
}

std::vector<std::vector<LogisticSample>> make_synthetic_logistic_data(int agents, int dim, int count,
                                                                      std::uint64_t seed) {
  Rng rng(seed);
  // A fixed ground-truth separator keeps the labels correlated with the
  // features, so the objectives are not pure noise.
  const Eigen::VectorXd truth = rng.normal_vector(dim);
  std::vector<std::vector<LogisticSample>> data(agents);
  for (auto& agent_samples : data) {
    agent_samples.reserve(count);
    for (int s = 0; s < count; ++s) {
      LogisticSample smp;
      smp.features = rng.normal_vector(dim);
      const double margin = truth.dot(smp.features) + 0.3 * rng.normal();
      smp.label = margin >= 0.0 ? 1.0 : -1.0;
      agent_samples.push_back(std::move(smp));
    }
  }
  return data;
}

}  // namespace doboc
