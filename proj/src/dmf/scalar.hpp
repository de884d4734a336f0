// One-dimensional theory behind the landscape classification: the root
// function f(x; y) = x^{2L-1} - sqrt(lambda) y x^{L-1} + lambda x, its
// derivatives, the thresholds x* / y* where the positive-root count changes,
// root isolation with S1/S2/S3 labels, the per-coordinate objective
// g(x; y) = (x^L - sqrt(lambda) y)^2 + lambda L x^2 and its global argmin set,
// and the critical regularization level at which a unique positive root
// appears.
#pragma once

#include <optional>
#include <vector>

#include "dmf/types.hpp"

namespace dmf {

double eval_f(double x, double y, double lambda, int L);
double eval_f_dx(double x, double y, double lambda, int L);
double eval_f_dxx(double x, double y, double lambda, int L);
double eval_g(double x, double y, double lambda, int L);

struct Thresholds {
  double x_star = 0.0;  // ((L-2)/L)^{1/(2L-2)} lambda^{1/(2L-2)}
  double y_star = 0.0;  // value of y at which the two positive roots merge
  double lambda = 0.0;
  int depth = 0;
};

// Requires L >= 3; the two-layer case has no x*/y* (see the L=2 paths).
Thresholds thresholds(double lambda, int L);

enum class RootKind { NoPositive, UniquePositive, TwoPositive };
enum class RootLabel { S1, S2, S3 };  // larger / smaller / unique positive root

const char* root_kind_name(RootKind k);
const char* root_label_name(RootLabel l);

struct RootProfile {
  double y = 0.0;
  double lambda = 0.0;
  int depth = 0;
  RootKind kind = RootKind::NoPositive;
  // Present per kind: TwoPositive -> {x_bar, x_underbar}, Unique -> {x_hat}.
  std::optional<double> x_bar;       // S1
  std::optional<double> x_underbar;  // S2
  std::optional<double> x_hat;       // S3
  Thresholds thr;

  std::vector<std::pair<double, RootLabel>> labeled_roots() const;
};

// Positive roots of f(.; y) = 0 for L >= 3, found by bisecting the monotone
// branches of v(x) = (x^{2L-1} + lambda x) / (sqrt(lambda) x^{L-1}) around its
// minimum at x*. y within a relative eq_tol band of y* classifies as the
// unique-root case.
RootProfile root_profile(double y, double lambda, int L, double tol = 1e-14,
                         double eq_tol = 1e-9);

// Positive roots for any L >= 2 (closed form for L = 2), largest first.
// Used by the enumeration; labels only exist for L >= 3.
std::vector<double> positive_roots(double y, double lambda, int L, double tol = 1e-14,
                                   double eq_tol = 1e-9);

struct ScalarMinResult {
  double y = 0.0;
  std::vector<double> argmin_set;  // 1 or 2 points, descending
  double min_value = 0.0;
  bool tie = false;
};

// Global argmin of g(.; y) over x >= 0. Candidates are 0, the larger positive
// root of f when it exists, and the unique root at y = y*. Values within
// tie_tol * (1 + lambda y^2) of the minimum are reported as a tie set, never
// silently broken.
ScalarMinResult scalar_argmin_g(double y, double lambda, int L, double tie_tol = 1e-9);

// The lambda at which f(.; y) has a unique positive root (y* inverted):
// lambda_crit = y^{2(L-1)} ((L-2)/L)^{L/(2(L-1))} + (L/(L-2))^{(L-2)/(2(L-1))})^{-2(L-1)}.
double lambda_critical(double y, int L);

}  // namespace dmf
