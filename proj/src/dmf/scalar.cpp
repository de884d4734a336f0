#include "dmf/scalar.hpp"

#include <algorithm>
#include <cmath>

namespace dmf {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

void check_fy(double x, double y, double lambda, int L) {
  if (x < 0.0 || y < 0.0) throw ValidationError("f(x; y) requires x, y >= 0");
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
  if (L < 2) throw ValidationError("depth must be >= 2");
}

void require_deep(int L, const char* what) {
  if (L < 3) {
    throw ValidationError(std::string(what) +
                          " is undefined for depth < 3; the two-layer landscape has its own closed form");
  }
}

// v(x) = (x^{2L-1} + lambda x) / (sqrt(lambda) x^{L-1}); for x > 0, f(x;y)=0
// iff v(x) = y. Decreasing on (0, x*], increasing on [x*, inf).
double eval_v(double x, double lambda, int L) {
  return (ipow(x, 2 * L - 1) + lambda * x) / (std::sqrt(lambda) * ipow(x, L - 1));
}

// Bisection for v(x) = y on a bracket where v - y changes sign; `increasing`
// names the branch. Brackets come from the monotonicity proof, so a failure
// here is a bug signal.
double bisect_v(double lo, double hi, double y, double lambda, int L, double tol,
                bool increasing) {
  double flo = eval_v(lo, lambda, L) - y;
  double fhi = eval_v(hi, lambda, L) - y;
  if (increasing ? (flo > 0.0 || fhi < 0.0) : (flo < 0.0 || fhi > 0.0)) {
    throw NumericError("root bracket failure in v(x) = y bisection");
  }
  for (int it = 0; it < 200 && (hi - lo) > tol * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = eval_v(mid, lambda, L) - y;
    if ((fm <= 0.0) == increasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double eval_f(double x, double y, double lambda, int L) {
  check_fy(x, y, lambda, L);
  return ipow(x, 2 * L - 1) - std::sqrt(lambda) * y * ipow(x, L - 1) + lambda * x;
}

double eval_f_dx(double x, double y, double lambda, int L) {
  check_fy(x, y, lambda, L);
  return (2 * L - 1) * ipow(x, 2 * L - 2) -
         std::sqrt(lambda) * (L - 1) * y * ipow(x, L - 2) + lambda;
}

double eval_f_dxx(double x, double y, double lambda, int L) {
  check_fy(x, y, lambda, L);
  double second = (2 * L - 1) * (2 * L - 2) * ipow(x, 2 * L - 3);
  if (L == 2) {
    // x^{L-3} = 1/x; only meaningful for x > 0.
    if (x == 0.0) throw ValidationError("f_xx undefined at x = 0 for depth 2");
    second -= std::sqrt(lambda) * (L - 1) * (L - 2) * y / x;
  } else {
    second -= std::sqrt(lambda) * (L - 1) * (L - 2) * y * ipow(x, L - 3);
  }
  return second;
}

double eval_g(double x, double y, double lambda, int L) {
  check_fy(x, y, lambda, L);
  const double a = ipow(x, L) - std::sqrt(lambda) * y;
  return a * a + lambda * L * x * x;
}

Thresholds thresholds(double lambda, int L) {
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
  require_deep(L, "thresholds");
  const double e = 1.0 / (2.0 * L - 2.0);
  const double ratio = static_cast<double>(L - 2) / L;
  Thresholds t;
  t.lambda = lambda;
  t.depth = L;
  t.x_star = std::pow(ratio, e) * std::pow(lambda, e);
  t.y_star = (std::pow(ratio, L * e) + std::pow(1.0 / ratio, (L - 2) * e)) * std::pow(lambda, e);
  return t;
}

const char* root_kind_name(RootKind k) {
  switch (k) {
    case RootKind::NoPositive: return "no_positive";
    case RootKind::UniquePositive: return "unique_positive";
    case RootKind::TwoPositive: return "two_positive";
  }
  return "?";
}

const char* root_label_name(RootLabel l) {
  switch (l) {
    case RootLabel::S1: return "S1";
    case RootLabel::S2: return "S2";
    case RootLabel::S3: return "S3";
  }
  return "?";
}

std::vector<std::pair<double, RootLabel>> RootProfile::labeled_roots() const {
  std::vector<std::pair<double, RootLabel>> out;
  if (x_bar) out.emplace_back(*x_bar, RootLabel::S1);
  if (x_underbar) out.emplace_back(*x_underbar, RootLabel::S2);
  if (x_hat) out.emplace_back(*x_hat, RootLabel::S3);
  return out;
}

RootProfile root_profile(double y, double lambda, int L, double tol, double eq_tol) {
  if (y < 0.0) throw ValidationError("y must be nonnegative");
  require_deep(L, "root_profile");
  RootProfile rp;
  rp.y = y;
  rp.lambda = lambda;
  rp.depth = L;
  rp.thr = thresholds(lambda, L);

  if (std::abs(y - rp.thr.y_star) <= eq_tol * rp.thr.y_star) {
    rp.kind = RootKind::UniquePositive;
    rp.x_hat = rp.thr.x_star;
    return rp;
  }
  if (y < rp.thr.y_star) {
    rp.kind = RootKind::NoPositive;
    return rp;
  }

  rp.kind = RootKind::TwoPositive;
  // Larger root on the increasing branch; x_bar^L <= sqrt(lambda) y gives the
  // upper bracket.
  const double hi = std::pow(std::sqrt(lambda) * y, 1.0 / L) * (1.0 + 1e-12) + 1e-300;
  rp.x_bar = bisect_v(rp.thr.x_star, std::max(hi, rp.thr.x_star), y, lambda, L, tol, true);
  // Smaller root on the decreasing branch; halve until v(lo) >= y.
  double lo = rp.thr.x_star;
  for (int it = 0; it < 4096 && eval_v(lo, lambda, L) < y; ++it) lo *= 0.5;
  if (!(eval_v(lo, lambda, L) >= y)) {
    throw NumericError("could not bracket the smaller positive root");
  }
  rp.x_underbar = bisect_v(lo, rp.thr.x_star, y, lambda, L, tol, false);
  return rp;
}

std::vector<double> positive_roots(double y, double lambda, int L, double tol, double eq_tol) {
  if (L == 2) {
    const double s = std::sqrt(lambda) * y - lambda;
    if (s > 0.0) return {std::sqrt(s)};
    return {};
  }
  const RootProfile rp = root_profile(y, lambda, L, tol, eq_tol);
  switch (rp.kind) {
    case RootKind::NoPositive: return {};
    case RootKind::UniquePositive: return {*rp.x_hat};
    case RootKind::TwoPositive: return {*rp.x_bar, *rp.x_underbar};
  }
  return {};
}

ScalarMinResult scalar_argmin_g(double y, double lambda, int L, double tie_tol) {
  if (y < 0.0) throw ValidationError("y must be nonnegative");
  if (L < 2) throw ValidationError("depth must be >= 2");
  std::vector<double> candidates = {0.0};
  if (L == 2) {
    const double s = std::sqrt(lambda) * y - lambda;
    if (s > 0.0) candidates.push_back(std::sqrt(s));
  } else {
    const RootProfile rp = root_profile(y, lambda, L);
    if (rp.x_bar) candidates.push_back(*rp.x_bar);
    if (rp.x_hat) candidates.push_back(*rp.x_hat);
  }
  ScalarMinResult res;
  res.y = y;
  double best = std::numeric_limits<double>::infinity();
  for (double c : candidates) best = std::min(best, eval_g(c, y, lambda, L));
  const double band = tie_tol * (1.0 + lambda * y * y);
  for (double c : candidates) {
    if (eval_g(c, y, lambda, L) <= best + band) res.argmin_set.push_back(c);
  }
  std::sort(res.argmin_set.rbegin(), res.argmin_set.rend());
  res.min_value = best;
  res.tie = res.argmin_set.size() > 1;
  return res;
}

double lambda_critical(double y, int L) {
  if (!(y > 0.0)) throw ValidationError("lambda_critical requires y > 0");
  require_deep(L, "lambda_critical");
  const double e = 1.0 / (2.0 * (L - 1.0));
  const double ratio = static_cast<double>(L - 2) / L;
  const double c = std::pow(ratio, L * e) + std::pow(1.0 / ratio, (L - 2) * e);
  return std::pow(y / c, 2.0 * (L - 1.0));
}

}  // namespace dmf
