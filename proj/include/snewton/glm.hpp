#pragma once

#include <cmath>
#include <utility>

#include "snewton/problem.hpp"

namespace snewton {

// One sample row, stored sparse with 0-based strictly increasing indices.
struct SparseRow {
  std::vector<int> idx;
  std::vector<double> val;

  double dot(const Vector& x) const {
    double s = 0.0;
    for (std::size_t p = 0; p < idx.size(); ++p) s += val[p] * x[idx[p]];
    return s;
  }

  void add_scaled_to(Vector& out, double s) const {
    for (std::size_t p = 0; p < idx.size(); ++p) out[idx[p]] += s * val[p];
  }

  // out += s * a a^T
  void add_scaled_outer_to(Matrix& out, double s) const {
    for (std::size_t p = 0; p < idx.size(); ++p) {
      const double vp = s * val[p];
      for (std::size_t q = 0; q < idx.size(); ++q) out(idx[p], idx[q]) += vp * val[q];
    }
  }

  double squared_norm() const {
    double s = 0.0;
    for (double v : val) s += v * v;
    return s;
  }
};

enum class Loss { logistic, squared };

inline LogisticScalar loss_scalar(Loss loss, double t, double b) {
  if (loss == Loss::logistic) return logistic_scalar(t, b);
  // squared: phi(t) = 1/2 (t - b)^2
  return LogisticScalar{0.5 * (t - b) * (t - b), t - b, 1.0};
}

// max |phi'''| for the logistic loss, attained at s = (3 - sqrt(3))/6.
inline double logistic_third_derivative_bound() { return 1.0 / (6.0 * std::sqrt(3.0)); }

// l2-regularized generalized linear model over m rows, grouped into n
// contiguous blocks. Component i is the mean loss over its block plus the
// ridge term:
//   f_i(x) = (1/|B_i|) sum_{j in B_i} phi_j(a_j^T x) + (lambda/2) ||x||^2.
// With singleton blocks this is the per-sample form the tau=1 fast path
// expects. mu() = lambda is exact; hess_lip() is an analytic upper bound
// (third-derivative bound times mean cubed row norm for logistic, 0 for
// squared loss).
class GlmProblem : public FiniteSumProblem {
 public:
  GlmProblem(std::vector<SparseRow> rows, std::vector<double> labels, int d, Loss loss,
             double lambda, int parts = 0)
      : rows_(std::move(rows)), labels_(std::move(labels)), d_(d), loss_(loss), lambda_(lambda) {
    const int m = static_cast<int>(rows_.size());
    if (m == 0) throw std::invalid_argument("GlmProblem: empty dataset");
    if (labels_.size() != rows_.size())
      throw std::invalid_argument("GlmProblem: labels/rows length mismatch");
    if (lambda_ < 0.0) throw std::invalid_argument("GlmProblem: lambda must be nonnegative");
    for (const auto& r : rows_) {
      for (std::size_t p = 0; p < r.idx.size(); ++p) {
        if (r.idx[p] < 0 || r.idx[p] >= d_)
          throw std::invalid_argument("GlmProblem: feature index out of range");
        if (p > 0 && r.idx[p] <= r.idx[p - 1])
          throw std::invalid_argument("GlmProblem: indices not strictly increasing");
      }
    }
    if (loss_ == Loss::logistic) {
      for (double b : labels_)
        if (b != 1.0 && b != -1.0)
          throw std::invalid_argument("GlmProblem: logistic loss requires labels in {-1,+1}");
    }
    if (parts <= 0) parts = m;  // default: per-sample components
    if (parts > m) throw std::invalid_argument("GlmProblem: more parts than rows");
    // Contiguous blocks with sizes differing by at most one.
    block_begin_.resize(parts + 1);
    const int base = m / parts, rem = m % parts;
    block_begin_[0] = 0;
    for (int i = 0; i < parts; ++i) block_begin_[i + 1] = block_begin_[i] + base + (i < rem ? 1 : 0);
    // Certified Hessian Lipschitz bound per block.
    hess_lip_ = 0.0;
    if (loss_ == Loss::logistic) {
      const double c3 = logistic_third_derivative_bound();
      for (int i = 0; i < parts; ++i) {
        double mean_cubed = 0.0;
        for (int j = block_begin_[i]; j < block_begin_[i + 1]; ++j) {
          const double nrm = std::sqrt(rows_[j].squared_norm());
          mean_cubed += nrm * nrm * nrm;
        }
        mean_cubed /= block_size(i);
        hess_lip_ = std::max(hess_lip_, c3 * mean_cubed);
      }
    }
  }

  int num_components() const override { return static_cast<int>(block_begin_.size()) - 1; }
  int dim() const override { return d_; }
  double mu() const override { return lambda_; }
  double hess_lip() const override { return hess_lip_; }

  void eval_component(int i, const Vector& x, double* value, Vector* grad,
                      Matrix* hess) const override {
    check_component_args(i, x);
    const int lo = block_begin_[i], hi = block_begin_[i + 1];
    const double inv_m = 1.0 / (hi - lo);
    if (value) *value = 0.0;
    if (grad) grad->setZero(d_);
    if (hess) hess->setZero(d_, d_);
    for (int j = lo; j < hi; ++j) {
      const double t = rows_[j].dot(x);
      const LogisticScalar s = loss_scalar(loss_, t, labels_[j]);
      if (value) *value += inv_m * s.phi;
      if (grad) rows_[j].add_scaled_to(*grad, inv_m * s.dphi);
      if (hess) rows_[j].add_scaled_outer_to(*hess, inv_m * s.ddphi);
    }
    if (value) *value += 0.5 * lambda_ * x.squaredNorm();
    if (grad) *grad += lambda_ * x;
    if (hess) hess->diagonal().array() += lambda_;
  }

  int num_rows() const { return static_cast<int>(rows_.size()); }
  int block_size(int i) const { return block_begin_[i + 1] - block_begin_[i]; }
  bool per_sample() const { return num_components() == num_rows(); }
  const SparseRow& row(int j) const { return rows_[j]; }
  double label(int j) const { return labels_[j]; }
  double lambda() const { return lambda_; }
  Loss loss() const { return loss_; }

 private:
  std::vector<SparseRow> rows_;
  std::vector<double> labels_;
  int d_;
  Loss loss_;
  double lambda_;
  double hess_lip_ = 0.0;
  std::vector<int> block_begin_;
};

}  // namespace snewton
