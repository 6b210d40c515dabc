#pragma once

#include <Eigen/Cholesky>

#include "snewton/problem.hpp"

namespace snewton {

// What to do when the aggregated Hessian fails the SPD factorization
// (possible in lambda=0 runs where the strong convexity premise is absent).
enum class SingularPolicy { error, jitter };

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solves sum_mat * x = rhs by Cholesky; on failure either throws or adds
// 1e-10 * trace/d jitter to the diagonal and retries once.
inline Vector solve_spd(const Matrix& sum_mat, const Vector& rhs, SingularPolicy policy) {
  Eigen::LLT<Matrix> llt(sum_mat);
  if (llt.info() == Eigen::Success) return llt.solve(rhs);
  if (policy == SingularPolicy::jitter) {
    const double eps = 1e-10 * sum_mat.trace() / sum_mat.rows();
    Matrix jittered = sum_mat;
    jittered.diagonal().array() += eps;
    Eigen::LLT<Matrix> retry(jittered);
    if (retry.info() == Eigen::Success) return retry.solve(rhs);
  }
  throw SolverError("aggregated Hessian is not positive definite");
}

// hess_sum/rhs_sum accumulated over components at a common point x, in index
// order. Shared by the full-batch reduction and the deterministic Newton
// baseline so the two produce bit-identical iterates.
inline void assemble_newton_sums(const FiniteSumProblem& problem, const Vector& x,
                                 Matrix& hess_sum, Vector& rhs_sum) {
  const int d = problem.dim();
  hess_sum.setZero(d, d);
  rhs_sum.setZero(d);
  Vector g(d);
  Matrix h(d, d);
  for (int i = 0; i < problem.num_components(); ++i) {
    problem.eval_component(i, x, nullptr, &g, &h);
    hess_sum += h;
    rhs_sum.noalias() += h * x;
    rhs_sum -= g;
  }
}

// State of the stochastic Newton iteration: per-component anchors w_i plus
// the maintained (un-averaged) sums
//   hess_sum = sum_i H_i(w_i),  rhs_sum = sum_i [H_i(w_i) w_i - g_i(w_i)].
struct SnState {
  Vector x;  // x^k; empty until the first step
  std::vector<Vector> anchors;
  Matrix hess_sum;
  Vector rhs_sum;
  int tau = 1;
  Rng rng{0};
  long k = 0;
  long fresh_evals = 0;  // component (grad+Hessian) oracle calls at new points, excluding init
};

inline SnState sn_init(const FiniteSumProblem& problem, const std::vector<Vector>& anchors0,
                       int tau, std::uint64_t seed) {
  const int n = problem.num_components();
  const int d = problem.dim();
  if (tau < 1 || tau > n) throw std::invalid_argument("sn_init: tau out of range");
  if (static_cast<int>(anchors0.size()) != n)
    throw std::invalid_argument("sn_init: need one anchor per component");
  SnState st;
  st.anchors = anchors0;
  st.tau = tau;
  st.rng = Rng(seed);
  st.hess_sum.setZero(d, d);
  st.rhs_sum.setZero(d);
  Vector g(d);
  Matrix h(d, d);
  for (int i = 0; i < n; ++i) {
    if (st.anchors[i].size() != d) throw std::invalid_argument("sn_init: anchor dimension mismatch");
    problem.eval_component(i, st.anchors[i], nullptr, &g, &h);
    st.hess_sum += h;
    st.rhs_sum.noalias() += h * st.anchors[i];
    st.rhs_sum -= g;
  }
  return st;
}

inline SnState sn_init(const FiniteSumProblem& problem, const Vector& anchor0, int tau,
                       std::uint64_t seed) {
  return sn_init(problem, std::vector<Vector>(problem.num_components(), anchor0), tau, seed);
}

// The deterministic half of a step: x^{k+1} from the current sums.
inline Vector sn_next_iterate(const SnState& state, SingularPolicy policy = SingularPolicy::error) {
  return solve_spd(state.hess_sum, state.rhs_sum, policy);
}

// One step with an externally chosen update set (distinct, ascending
// indices). Replacing all n anchors rebuilds the sums from scratch, which
// keeps the full-batch reduction exactly equal to deterministic Newton.
inline Vector sn_step_with_subset(SnState& state, const FiniteSumProblem& problem,
                                  const std::vector<int>& subset,
                                  SingularPolicy policy = SingularPolicy::error) {
  const int n = problem.num_components();
  const int d = problem.dim();
  Vector x_next = sn_next_iterate(state, policy);
  if (static_cast<int>(subset.size()) == n) {
    assemble_newton_sums(problem, x_next, state.hess_sum, state.rhs_sum);
    for (int i = 0; i < n; ++i) state.anchors[i] = x_next;
  } else {
    Vector g(d);
    Matrix h(d, d);
    for (int i : subset) {
      // remove the outgoing component terms (recomputed, not stored)
      problem.eval_component(i, state.anchors[i], nullptr, &g, &h);
      state.hess_sum -= h;
      state.rhs_sum.noalias() -= h * state.anchors[i];
      state.rhs_sum += g;
      problem.eval_component(i, x_next, nullptr, &g, &h);
      state.hess_sum += h;
      state.rhs_sum.noalias() += h * x_next;
      state.rhs_sum -= g;
      state.anchors[i] = x_next;
    }
  }
  state.fresh_evals += static_cast<long>(subset.size());
  state.x = x_next;
  ++state.k;
  return x_next;
}

inline Vector sn_step(SnState& state, const FiniteSumProblem& problem,
                      SingularPolicy policy = SingularPolicy::error) {
  const auto subset = sample_subset(state.rng, problem.num_components(), state.tau);
  return sn_step_with_subset(state, problem, subset, policy);
}

// Fresh recomputation of the maintained sums (drift diagnostics).
inline std::pair<Matrix, Vector> sn_recomputed_sums(const SnState& state,
                                                    const FiniteSumProblem& problem) {
  const int d = problem.dim();
  Matrix hess_sum = Matrix::Zero(d, d);
  Vector rhs_sum = Vector::Zero(d);
  Vector g(d);
  Matrix h(d, d);
  for (int i = 0; i < problem.num_components(); ++i) {
    problem.eval_component(i, state.anchors[i], nullptr, &g, &h);
    hess_sum += h;
    rhs_sum.noalias() += h * state.anchors[i];
    rhs_sum -= g;
  }
  return {std::move(hess_sum), std::move(rhs_sum)};
}

// W^k = (1/n) sum_i ||w_i - x*||^2
inline double lyapunov_w(const SnState& state, const Vector& x_star) {
  double sum = 0.0;
  for (const Vector& w : state.anchors) sum += (w - x_star).squaredNorm();
  return sum / static_cast<double>(state.anchors.size());
}

struct ExpectedNextW {
  double exact = 0.0;                // (tau/n) ||x^{k+1}-x*||^2 + (1-tau/n) W^k
  std::optional<double> enumerated;  // average over all C(n,tau) subsets
  Vector x_next;
};

// One-step conditional expectation of W^{k+1}. x^{k+1} is deterministic
// given the state, so the closed form is exact; the enumerated branch
// averages over every possible subset choice and is the brute-force oracle.
inline ExpectedNextW expected_next_w(const SnState& state, const FiniteSumProblem& problem,
                                     const Vector& x_star,
                                     long long enumeration_budget = 100000) {
  const int n = problem.num_components();
  const double tau_frac = static_cast<double>(state.tau) / n;
  ExpectedNextW out;
  out.x_next = sn_next_iterate(state);
  const double w_now = lyapunov_w(state, x_star);
  const double next_dist_sq = (out.x_next - x_star).squaredNorm();
  out.exact = tau_frac * next_dist_sq + (1.0 - tau_frac) * w_now;
  if (binomial(n, state.tau) <= enumeration_budget) {
    std::vector<double> dist_sq(n);
    for (int i = 0; i < n; ++i) dist_sq[i] = (state.anchors[i] - x_star).squaredNorm();
    const double total = std::accumulate(dist_sq.begin(), dist_sq.end(), 0.0);
    double acc = 0.0;
    long long count = 0;
    for_each_subset(n, state.tau, [&](const std::vector<int>& subset) {
      double w_next = total;
      for (int i : subset) w_next += next_dist_sq - dist_sq[i];
      acc += w_next / n;
      ++count;
    });
    out.enumerated = acc / static_cast<double>(count);
  }
  return out;
}

struct Lemma1Check {
  double lhs = 0.0;  // ||x^{k+1} - x*||
  double rhs = 0.0;  // (H / 2 mu) * W^k
  bool holds = false;
};

inline Lemma1Check check_lemma1(const SnState& state, const FiniteSumProblem& problem,
                                const Vector& x_star, double hess_lip_cert, double mu_cert) {
  if (mu_cert <= 0.0) throw std::invalid_argument("check_lemma1: mu_cert must be positive");
  (void)problem;
  Lemma1Check out;
  out.lhs = (sn_next_iterate(state) - x_star).norm();
  out.rhs = hess_lip_cert / (2.0 * mu_cert) * lyapunov_w(state, x_star);
  out.holds = out.lhs <= out.rhs + 1e-12;
  return out;
}

}  // namespace snewton
