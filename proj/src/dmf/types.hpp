// Core domain types for the regularized deep matrix factorization landscape
// library: the problem data, its spectral decomposition, and weight/direction
// stacks. All values are immutable once built and safe to share across
// threads.
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Domain/validation failure: bad input data, shape mismatch, unsupported
// configuration. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed serialized input (JSON syntax, wrong field types). Exit code 2.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure that should not happen for valid inputs (SVD on
// non-finite data, bisection bracket loss). Treated as a bug signal.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// min ||W_L ... W_1 - Y||_F^2 + sum_l lambda_l ||W_l||_F^2 over stacks of L
// factors with shapes d_l x d_{l-1}.
struct ProblemSpec {
  std::vector<int> dims;     // d_0, ..., d_L, each >= 1
  VectorXd lambdas;          // lambda_1..lambda_L, all > 0
  MatrixXd Y;                // d_L x d_0
  double lambda = 1.0;       // cached product of lambdas
  bool spectral_input = false;  // Y was given as singular values (so Y = Sigma_Y)

  int depth() const { return static_cast<int>(dims.size()) - 1; }
  int d0() const { return dims.front(); }
  int dL() const { return dims.back(); }
  int d_Y() const { return std::min(d0(), dL()); }
  int d_min() const { return *std::min_element(dims.begin(), dims.end()); }
  int max_dim() const { return *std::max_element(dims.begin(), dims.end()); }
  bool scalar_case() const { return max_dim() < 2; }
  double y_norm() const { return Y.norm(); }

  // Throws ValidationError when shapes/weights are inconsistent.
  void validate() const;
};

// Full SVD of Y with singular values grouped into blocks of equal value.
// group_starts = (s_0, ..., s_p) with s_0 = 0, s_p = rank; group i covers
// indices [s_{i-1}, s_i) and has multiplicity h_i = s_i - s_{i-1}.
struct SpectralDecomposition {
  MatrixXd U;                    // d_L x d_L orthogonal
  MatrixXd V;                    // d_0 x d_0 orthogonal
  VectorXd y;                    // length d_Y, nonincreasing, >= 0
  int rank = 0;                  // r_Y
  std::vector<int> group_starts; // size p_Y + 1

  int num_groups() const { return static_cast<int>(group_starts.size()) - 1; }
  int multiplicity(int i) const { return group_starts[i + 1] - group_starts[i]; }
  double group_value(int i) const { return y(group_starts[i]); }
};

// Ordered list of L weight matrices, matrices[l] of shape d_{l+1} x d_l in
// 0-based indexing. Directions through parameter space share the same shape.
struct FactorStack {
  std::vector<MatrixXd> matrices;

  int depth() const { return static_cast<int>(matrices.size()); }
  bool shape_matches(const ProblemSpec& p) const;
  void require_shape(const ProblemSpec& p) const;
};

using DirectionStack = FactorStack;

// <A, B> = sum_l <A_l, B_l>_F, the inner product under which directions are
// normalized.
double stack_dot(const FactorStack& a, const FactorStack& b);
double stack_norm(const FactorStack& a);
FactorStack stack_axpy(const FactorStack& base, double t, const FactorStack& dir);
FactorStack zero_stack(const ProblemSpec& p);

}  // namespace dmf
