#include "dmf/model.hpp"

#include <cmath>

namespace dmf {

namespace {

struct LossParams {
  MatrixXd target;    // Y or sqrt(lambda) Y
  VectorXd weights;   // per-layer regularization weights
};

LossParams params_for(const ProblemSpec& p, Loss which) {
  if (which == Loss::F) return {p.Y, p.lambdas};
  return {std::sqrt(p.lambda) * p.Y, VectorXd::Constant(p.depth(), p.lambda)};
}

// prefix[l] = W_l ... W_1 (prefix[0] = I), suffix[l] = W_L ... W_{l} with
// suffix[L+1] = I; both sized L+2 for 1-based layer indexing.
void chain_products(const FactorStack& w, std::vector<MatrixXd>& prefix,
                    std::vector<MatrixXd>& suffix) {
  const int L = w.depth();
  prefix.assign(L + 1, MatrixXd());
  prefix[0] = MatrixXd::Identity(w.matrices[0].cols(), w.matrices[0].cols());
  for (int l = 1; l <= L; ++l) prefix[l] = w.matrices[l - 1] * prefix[l - 1];
  suffix.assign(L + 2, MatrixXd());
  suffix[L + 1] = MatrixXd::Identity(w.matrices[L - 1].rows(), w.matrices[L - 1].rows());
  for (int l = L; l >= 1; --l) suffix[l] = suffix[l + 1] * w.matrices[l - 1];
}

}  // namespace

MatrixXd end_to_end_product(const FactorStack& w) {
  if (w.matrices.empty()) throw ValidationError("empty factor stack");
  MatrixXd p = w.matrices.front();
  for (size_t l = 1; l < w.matrices.size(); ++l) {
    if (w.matrices[l].cols() != p.rows()) {
      throw ValidationError("factor shapes do not chain at layer " + std::to_string(l + 1));
    }
    p = w.matrices[l] * p;
  }
  return p;
}

double loss(const ProblemSpec& p, const FactorStack& w, Loss which) {
  w.require_shape(p);
  const LossParams lp = params_for(p, which);
  double value = (end_to_end_product(w) - lp.target).squaredNorm();
  for (int l = 0; l < w.depth(); ++l) value += lp.weights(l) * w.matrices[l].squaredNorm();
  return value;
}

double loss_F(const ProblemSpec& p, const FactorStack& w) { return loss(p, w, Loss::F); }
double loss_G(const ProblemSpec& p, const FactorStack& w) { return loss(p, w, Loss::G); }

FactorStack grad(const ProblemSpec& p, const FactorStack& w, Loss which) {
  w.require_shape(p);
  const LossParams lp = params_for(p, which);
  const int L = w.depth();
  std::vector<MatrixXd> prefix, suffix;
  chain_products(w, prefix, suffix);
  const MatrixXd residual = prefix[L] - lp.target;
  FactorStack g;
  g.matrices.reserve(L);
  for (int l = 1; l <= L; ++l) {
    g.matrices.push_back(2.0 * suffix[l + 1].transpose() * residual * prefix[l - 1].transpose() +
                         2.0 * lp.weights(l - 1) * w.matrices[l - 1]);
  }
  return g;
}

FactorStack grad_F(const ProblemSpec& p, const FactorStack& w) { return grad(p, w, Loss::F); }
FactorStack grad_G(const ProblemSpec& p, const FactorStack& w) { return grad(p, w, Loss::G); }

double hessian_quadform(const ProblemSpec& p, const FactorStack& w,
                        const DirectionStack& d, Loss which) {
  w.require_shape(p);
  d.require_shape(p);
  const LossParams lp = params_for(p, which);
  const int L = w.depth();
  std::vector<MatrixXd> prefix, suffix;
  chain_products(w, prefix, suffix);
  const MatrixXd residual = prefix[L] - lp.target;

  // Expand prod_l (W_l + t D_l): m1 collects the terms linear in t, m2 the
  // terms with exactly two D factors. acc = sum_{k<m} W_{m-1:k+1} D_k P_{k-1}.
  MatrixXd m1 = MatrixXd::Zero(residual.rows(), residual.cols());
  for (int l = 1; l <= L; ++l) {
    m1 += suffix[l + 1] * d.matrices[l - 1] * prefix[l - 1];
  }
  MatrixXd m2 = MatrixXd::Zero(residual.rows(), residual.cols());
  MatrixXd acc = d.matrices[0] * prefix[0];
  for (int m = 2; m <= L; ++m) {
    m2 += suffix[m + 1] * d.matrices[m - 1] * acc;
    if (m < L) acc = w.matrices[m - 1] * acc + d.matrices[m - 1] * prefix[m - 1];
  }

  double c2 = m1.squaredNorm() + 2.0 * (residual.array() * m2.array()).sum();
  for (int l = 0; l < L; ++l) c2 += lp.weights(l) * d.matrices[l].squaredNorm();
  return 2.0 * c2;
}

FactorStack rescale_F_to_G(const FactorStack& w, const VectorXd& lambdas) {
  if (w.depth() != lambdas.size()) throw ValidationError("lambdas/stack depth mismatch");
  FactorStack out = w;
  for (int l = 0; l < out.depth(); ++l) out.matrices[l] *= std::sqrt(lambdas(l));
  return out;
}

FactorStack rescale_G_to_F(const FactorStack& w, const VectorXd& lambdas) {
  if (w.depth() != lambdas.size()) throw ValidationError("lambdas/stack depth mismatch");
  FactorStack out = w;
  for (int l = 0; l < out.depth(); ++l) out.matrices[l] /= std::sqrt(lambdas(l));
  return out;
}

}  // namespace dmf
