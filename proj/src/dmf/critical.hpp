// Closed-form critical points: a (sigma, pi) spec names one family of
// critical stacks; arbitrary orthogonal dressings pick a representative.
// Construction works in both the per-layer weighted coordinates (F) and the
// uniformly weighted auxiliary coordinates (G); the two are related by the
// sqrt(lambda_l) layer rescaling.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dmf/model.hpp"
#include "dmf/scalar.hpp"
#include "dmf/spectral.hpp"
#include "dmf/types.hpp"

namespace dmf {

MatrixXd block_diag(const std::vector<MatrixXd>& blocks);
// BlkD(Pi, I_{n - d_Y}): permutation matrix with Pi(i, pi[i]) = 1 in the top
// corner, identity on the tail.
MatrixXd padded_permutation(const std::vector<int>& pi, int n);

// sigma: nonincreasing nonnegative vector of length d_min. pi: 0-based
// permutation of [d_Y]; slot i is assigned the data singular value y_{pi[i]}.
struct CriticalSpec {
  VectorXd sigma;
  std::vector<int> pi;

  int support(double zero_tol = 0.0) const;
};

struct ValidationReport {
  bool ok = true;
  std::string message;  // first violated condition when !ok
};

// Checks sortedness, permutation validity, and the root equation
// f(sigma_i; y_{pi(i)}) = 0 for every slot. Violations are data, not errors.
ValidationReport validate_spec(const ProblemSpec& p, const SpectralDecomposition& sd,
                               const CriticalSpec& spec, double tol = 1e-8);

// Orthogonal dressing of one critical family: Q[l-2] in O(d_{l-1}) for
// l = 2..L, O[i] in O(h_{i+1}) for the distinct-value groups, O.back() in
// O(d_0 - r_Y), O_hat in O(d_L - r_Y). Zero-width blocks are 0-sized matrices.
struct Dressing {
  std::vector<MatrixXd> Q;
  std::vector<MatrixXd> O;
  MatrixXd O_hat;
};

Dressing canonical_dressing(const ProblemSpec& p, const SpectralDecomposition& sd);
// Orthogonalized seeded Gaussian blocks (Householder QR with positive-diagonal
// R), bitwise deterministic per seed.
Dressing random_dressing(const ProblemSpec& p, const SpectralDecomposition& sd,
                         std::uint64_t seed);

// Builds the weight stack of Theorem-style form
//   W_1 = Q_2 S_1 BlkD(Pi, I) BlkD(O_1..O_{p+1}) V_Y^T,
//   W_l = Q_{l+1} S_l Q_l^T,
//   W_L = U_Y BlkD(O_1^T..O_hat^T) BlkD(Pi^T, I) S_L Q_L^T,
// with S_l = BlkD(diag(sigma), 0) in G coordinates and diag(sigma)/sqrt(lambda_l)
// in F coordinates. Rejects invalid specs with the validation report.
FactorStack construct(const ProblemSpec& p, const SpectralDecomposition& sd,
                      const CriticalSpec& spec, const Dressing& dressing, Loss coord);

// max_l || W_l W_l^T - W_{l+1}^T W_{l+1} ||_F; zero at critical points of the
// uniformly weighted problem.
double balancedness_residual(const FactorStack& w);

struct SpecFamily {
  std::vector<CriticalSpec> specs;
  bool complete = true;  // false when caps truncated the enumeration
};

struct EnumerationCaps {
  int max_d_Y = 8;
  int max_support = -1;          // default: d_min
  std::int64_t max_specs = 200000;
};

// Every critical family: sorted sigma vectors assembled from per-slot choices
// {0} U positiveRoots(f(.; y)) over inequivalent assignments of distinct data
// singular values to slots, deduplicated, with a canonical permutation. The
// zero spec comes first; ordering is deterministic.
SpecFamily enumerate_specs(const ProblemSpec& p, const SpectralDecomposition& sd,
                           const EnumerationCaps& caps = {});

struct GlobalSpecs {
  std::vector<CriticalSpec> specs;
  bool ambiguous_ties = false;  // more than one sorted argmin selection
};

// Specs of the global minimizers: sigma_i in argmin g(.; y_i) with identity
// permutation; coordinate tie sets are expanded into every sorted selection.
// For L = 2 uses the closed form sigma_i = max(sqrt(lambda) y_i - lambda, 0)^{1/2}.
GlobalSpecs global_specs(const ProblemSpec& p, const SpectralDecomposition& sd,
                         double tie_tol = 1e-9);

}  // namespace dmf
