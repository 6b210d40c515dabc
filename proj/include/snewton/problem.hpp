#pragma once

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <memory>
#include <optional>

#include "snewton/core.hpp"

namespace snewton {

// Scalar logistic loss phi(t) = log(1 + exp(-b t)) with label b in {-1, +1}.
// Overflow-safe: the softplus branches on the sign of b*t, and phi'' uses the
// symmetric form s*(1-s) with s = sigmoid(b*t).
struct LogisticScalar {
  double phi;
  double dphi;
  double ddphi;
};

inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

inline double softplus(double t) {
  // log(1 + exp(t))
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

inline LogisticScalar logistic_scalar(double t, double b) {
  if (b != 1.0 && b != -1.0) throw std::invalid_argument("logistic_scalar: label must be +1 or -1");
  const double bt = b * t;
  const double s = sigmoid(bt);
  LogisticScalar out;
  out.phi = softplus(-bt);
  out.dphi = -b * sigmoid(-bt);
  out.ddphi = s * (1.0 - s);
  return out;
}

struct FullEval {
  double value = 0.0;
  Vector gradient;
  std::optional<Matrix> hessian;
};

// Finite-sum objective f(x) = (1/n) sum_i f_i(x). Components are exposed
// through exact analytic oracles; mu and hess_lip are certified regularity
// constants when positive, 0 when unknown. Immutable after construction,
// safe to share across threads.
class FiniteSumProblem {
 public:
  virtual ~FiniteSumProblem() = default;

  virtual int num_components() const = 0;
  virtual int dim() const = 0;

  // Strong convexity lower bound of every f_i; 0 when unknown.
  virtual double mu() const { return 0.0; }
  // Hessian Lipschitz constant upper bound; 0 when unknown.
  virtual double hess_lip() const { return 0.0; }

  // Exact value/gradient/Hessian of component i at x (0-based index).
  // grad and hess may be null when the caller does not need them.
  virtual void eval_component(int i, const Vector& x, double* value, Vector* grad,
                              Matrix* hess) const = 0;

  void check_component_args(int i, const Vector& x) const {
    if (i < 0 || i >= num_components())
      throw std::out_of_range("eval_component: index out of range");
    if (x.size() != dim()) throw std::invalid_argument("eval_component: dimension mismatch");
    if (!all_finite(x)) throw std::domain_error("eval_component: non-finite input point");
  }

  FullEval eval_full(const Vector& x, bool want_hessian = false) const {
    if (x.size() != dim()) throw std::invalid_argument("eval_full: dimension mismatch");
    if (!all_finite(x)) throw std::domain_error("eval_full: non-finite input point");
    const int n = num_components();
    FullEval out;
    out.gradient = Vector::Zero(dim());
    Matrix hess;
    if (want_hessian) hess = Matrix::Zero(dim(), dim());
    Vector g(dim());
    Matrix h;
    if (want_hessian) h.resize(dim(), dim());
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      eval_component(i, x, &v, &g, want_hessian ? &h : nullptr);
      out.value += v;
      out.gradient += g;
      if (want_hessian) hess += h;
    }
    out.value /= n;
    out.gradient /= n;
    if (want_hessian) out.hessian = hess / n;
    return out;
  }

  double value_at(const Vector& x) const {
    const int n = num_components();
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      eval_component(i, x, &v, nullptr, nullptr);
      sum += v;
    }
    return sum / n;
  }
};

// Empirical surrogates for (mu, H) probed at the given sample points.
// mu_hat is the smallest component-Hessian eigenvalue seen; hess_lip_hat is
// the largest observed ||H_i(x) - H_i(y)|| / ||x - y|| over point pairs.
// Both are advisory: a lower/upper *observation*, not a certificate.
inline std::pair<double, double> estimate_constants(const FiniteSumProblem& problem,
                                                    const std::vector<Vector>& sample_points) {
  if (sample_points.size() < 2)
    throw std::invalid_argument("estimate_constants: need at least 2 sample points");
  const int n = problem.num_components();
  const int d = problem.dim();
  double mu_hat = std::numeric_limits<double>::infinity();
  double lip_hat = 0.0;
  std::vector<Matrix> hess_at(sample_points.size());
  Matrix h(d, d);
  bool any_pair = false;
  for (int i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < sample_points.size(); ++p) {
      problem.eval_component(i, sample_points[p], nullptr, nullptr, &h);
      hess_at[p] = h;
      Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
      mu_hat = std::min(mu_hat, es.eigenvalues().minCoeff());
    }
    for (std::size_t p = 0; p < sample_points.size(); ++p) {
      for (std::size_t q = p + 1; q < sample_points.size(); ++q) {
        const double dist = (sample_points[p] - sample_points[q]).norm();
        if (dist == 0.0) continue;  // coincident pair, skip
        any_pair = true;
        Eigen::SelfAdjointEigenSolver<Matrix> es(hess_at[p] - hess_at[q], Eigen::EigenvaluesOnly);
        const double diff_norm = es.eigenvalues().cwiseAbs().maxCoeff();
        lip_hat = std::max(lip_hat, diff_norm / dist);
      }
    }
  }
  if (!any_pair) throw std::invalid_argument("estimate_constants: all sample points coincide");
  return {mu_hat, lip_hat};
}

// Finite sum of quadratics f_i(x) = 1/2 (x - c_i)^T A_i (x - c_i).
// Constant Hessians make mu exact and hess_lip = 0; the optimum
// x* = (sum A_i)^{-1} sum A_i c_i is available in closed form.
class QuadraticProblem : public FiniteSumProblem {
 public:
  QuadraticProblem(std::vector<Matrix> mats, std::vector<Vector> centers, double mu_cert = 0.0)
      : mats_(std::move(mats)), centers_(std::move(centers)), mu_(mu_cert) {
    if (mats_.empty() || mats_.size() != centers_.size())
      throw std::invalid_argument("QuadraticProblem: mismatched component lists");
    d_ = static_cast<int>(centers_[0].size());
    for (std::size_t i = 0; i < mats_.size(); ++i) {
      if (mats_[i].rows() != d_ || mats_[i].cols() != d_ || centers_[i].size() != d_)
        throw std::invalid_argument("QuadraticProblem: dimension mismatch");
    }
    Matrix a_sum = Matrix::Zero(d_, d_);
    Vector rhs = Vector::Zero(d_);
    for (std::size_t i = 0; i < mats_.size(); ++i) {
      a_sum += mats_[i];
      rhs += mats_[i] * centers_[i];
    }
    x_star_ = a_sum.ldlt().solve(rhs);
  }

  int num_components() const override { return static_cast<int>(mats_.size()); }
  int dim() const override { return d_; }
  double mu() const override { return mu_; }
  double hess_lip() const override { return 0.0; }

  void eval_component(int i, const Vector& x, double* value, Vector* grad,
                      Matrix* hess) const override {
    check_component_args(i, x);
    const Vector r = x - centers_[i];
    if (value) *value = 0.5 * r.dot(mats_[i] * r);
    if (grad) *grad = mats_[i] * r;
    if (hess) *hess = mats_[i];
  }

  const Vector& x_star() const { return x_star_; }

 private:
  std::vector<Matrix> mats_;
  std::vector<Vector> centers_;
  double mu_;
  int d_;
  Vector x_star_;
};

}  // namespace snewton
