#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "snewton/glm.hpp"

namespace snewton {

// LIBSVM text dataset: one sample per line, "label idx:val idx:val ...",
// indices 1-based and strictly increasing within a row, '#' starts a comment.
struct SparseDataset {
  std::vector<std::vector<std::pair<int, double>>> rows;  // 1-based indices
  std::vector<double> labels;
  int d = 0;  // max feature index observed, or user override

  int num_rows() const { return static_cast<int>(rows.size()); }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(what + " at line " + std::to_string(line)), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

inline SparseDataset parse_libsvm(std::istream& in) {
  SparseDataset ds;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line
    double label;
    try {
      std::size_t used = 0;
      label = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ParseError("malformed label '" + tok + "'", line_no);
    }
    std::vector<std::pair<int, double>> row;
    int prev_index = 0;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw ParseError("malformed pair '" + tok + "' (missing ':')", line_no);
      int index;
      double value;
      try {
        std::size_t used = 0;
        index = std::stoi(tok.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument(tok);
        const std::string vs = tok.substr(colon + 1);
        value = std::stod(vs, &used);
        if (used != vs.size()) throw std::invalid_argument(tok);
      } catch (const ParseError&) {
        throw;
      } catch (const std::exception&) {
        throw ParseError("malformed pair '" + tok + "'", line_no);
      }
      if (index < 1) throw ParseError("feature index < 1", line_no);
      if (index <= prev_index) throw ParseError("indices not strictly increasing", line_no);
      prev_index = index;
      row.emplace_back(index, value);
      ds.d = std::max(ds.d, index);
    }
    ds.rows.push_back(std::move(row));
    ds.labels.push_back(label);
  }
  return ds;
}

inline SparseDataset parse_libsvm(const std::string& text) {
  std::istringstream in(text);
  return parse_libsvm(in);
}

inline SparseDataset load_libsvm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  return parse_libsvm(in);
}

inline std::string serialize_libsvm(const SparseDataset& ds) {
  std::string out;
  char buf[64];
  for (int i = 0; i < ds.num_rows(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", ds.labels[i]);
    out += buf;
    for (const auto& [index, value] : ds.rows[i]) {
      std::snprintf(buf, sizeof(buf), " %d:%.17g", index, value);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

// Builds the finite-sum problem from a dataset: rows are split into `parts`
// contiguous blocks of near-equal size (sizes differ by at most one), each
// block becoming one component. Rows can optionally be shuffled first with a
// seeded permutation; the default keeps file order for reproducibility.
inline GlmProblem partition(const SparseDataset& ds, int parts, Loss loss, double lambda,
                            bool shuffle = false, std::uint64_t shuffle_seed = 0) {
  const int m = ds.num_rows();
  if (parts <= 0) throw std::invalid_argument("partition: parts must be positive");
  if (parts > m) throw std::invalid_argument("partition: more parts than rows");
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  if (shuffle) {
    Rng rng(shuffle_seed);
    for (int j = 0; j < m - 1; ++j) std::swap(order[j], order[j + rng.next_below(m - j)]);
  }
  std::vector<SparseRow> rows(m);
  std::vector<double> labels(m);
  for (int j = 0; j < m; ++j) {
    const auto& src = ds.rows[order[j]];
    SparseRow& r = rows[j];
    r.idx.reserve(src.size());
    r.val.reserve(src.size());
    for (const auto& [index, value] : src) {
      r.idx.push_back(index - 1);  // to 0-based
      r.val.push_back(value);
    }
    labels[j] = ds.labels[order[j]];
  }
  return GlmProblem(std::move(rows), std::move(labels), ds.d, loss, lambda, parts);
}

// Deterministic quadratic fixture with certified constants. Component i is
// 1/2 (x-c_i)^T A_i (x-c_i) where A_i = Q diag(s) Q^T: Q comes from a QR
// factorization of a Gaussian matrix drawn from Rng(seed), s[0] = mu,
// s[d-1] = L, interior entries uniform in [mu, L]. Every component is
// exactly mu-strongly convex and the Hessians are constant (H = 0), so the
// fixture is usable in certified theorem checks; x_star() is closed form.
inline QuadraticProblem synth_quadratic(std::uint64_t seed, int n, int d, double mu, double big_l) {
  if (n < 1 || d < 1) throw std::invalid_argument("synth_quadratic: n, d must be positive");
  if (mu <= 0.0) throw std::invalid_argument("synth_quadratic: mu must be positive");
  if (big_l < mu) throw std::invalid_argument("synth_quadratic: L must be >= mu");
  Rng rng(seed);
  std::vector<Matrix> mats(n);
  std::vector<Vector> centers(n);
  for (int i = 0; i < n; ++i) {
    Matrix a(d, d);
    if (d == 1) {
      a(0, 0) = (i == 0) ? mu : mu + (big_l - mu) * rng.next_unit();
    } else {
      Matrix gauss(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) gauss(r, c) = rng.next_gaussian();
      const Matrix q = Eigen::HouseholderQR<Matrix>(gauss).householderQ();
      Vector spec(d);
      spec[0] = mu;
      spec[d - 1] = big_l;
      for (int j = 1; j < d - 1; ++j) spec[j] = mu + (big_l - mu) * rng.next_unit();
      a = q * spec.asDiagonal() * q.transpose();
      a = 0.5 * (a + a.transpose().eval());
    }
    mats[i] = a;
    Vector c(d);
    for (int j = 0; j < d; ++j) c[j] = rng.next_symmetric();
    centers[i] = c;
  }
  return QuadraticProblem(std::move(mats), std::move(centers), mu);
}

// Deterministic per-sample logistic fixture. Generator (normative):
// from Rng(seed), for each sample i = 0..n-1 in order, draw the d feature
// entries a_{i,0..d-1} = next_symmetric() first, then the label
// b_i = +1 if next_unit() < 0.5 else -1.
inline GlmProblem synth_logistic(std::uint64_t seed, int n, int d, double lambda) {
  if (n < 1 || d < 1) throw std::invalid_argument("synth_logistic: n, d must be positive");
  Rng rng(seed);
  std::vector<SparseRow> rows(n);
  std::vector<double> labels(n);
  for (int i = 0; i < n; ++i) {
    SparseRow& r = rows[i];
    r.idx.resize(d);
    r.val.resize(d);
    for (int j = 0; j < d; ++j) {
      r.idx[j] = j;
      r.val[j] = rng.next_symmetric();
    }
    labels[i] = rng.next_unit() < 0.5 ? 1.0 : -1.0;
  }
  return GlmProblem(std::move(rows), std::move(labels), d, Loss::logistic, lambda, n);
}

}  // namespace snewton
