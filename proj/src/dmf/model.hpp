// Loss functions, exact gradients, and the exact Hessian quadratic form for
// the per-layer weighted problem F and the uniformly weighted auxiliary
// problem G (target sqrt(lambda) * Y, weight lambda on every layer).
#pragma once

#include "dmf/types.hpp"

namespace dmf {

enum class Loss { F, G };

inline const char* loss_name(Loss s) { return s == Loss::F ? "F" : "G"; }

MatrixXd end_to_end_product(const FactorStack& w);

double loss_F(const ProblemSpec& p, const FactorStack& w);
double loss_G(const ProblemSpec& p, const FactorStack& w);
double loss(const ProblemSpec& p, const FactorStack& w, Loss which);

// grad_l F = 2 W_{L:l+1}^T (W_{L:1} - Y) W_{l-1:1}^T + 2 lambda_l W_l,
// grad_l G analogous with target sqrt(lambda) Y and weight lambda.
FactorStack grad_F(const ProblemSpec& p, const FactorStack& w);
FactorStack grad_G(const ProblemSpec& p, const FactorStack& w);
FactorStack grad(const ProblemSpec& p, const FactorStack& w, Loss which);

// Exact Hessian bilinear form along d: twice the t^2 coefficient of
// loss(w + t d), assembled from the order-0/1/2 terms of the expanded factor
// product (O(L) matrix products) plus the regularizer contribution. Never
// differentiates numerically.
double hessian_quadform(const ProblemSpec& p, const FactorStack& w,
                        const DirectionStack& d, Loss which);

// (W_1,...,W_L) -> (sqrt(lambda_1) W_1, ..., sqrt(lambda_L) W_L) and back.
FactorStack rescale_F_to_G(const FactorStack& w, const VectorXd& lambdas);
FactorStack rescale_G_to_F(const FactorStack& w, const VectorXd& lambdas);

}  // namespace dmf
