#include "dmf/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dmf {

void ProblemSpec::validate() const {
  if (dims.size() < 3) {
    throw ValidationError("dims must list d_0..d_L with depth L >= 2, got " +
                          std::to_string(dims.size()) + " entries");
  }
  for (size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 1) {
      throw ValidationError("dims[" + std::to_string(i) + "] must be >= 1");
    }
  }
  if (lambdas.size() != depth()) {
    throw ValidationError("lambdas must have one entry per layer (" +
                          std::to_string(depth()) + "), got " +
                          std::to_string(lambdas.size()));
  }
  for (int l = 0; l < lambdas.size(); ++l) {
    if (!(lambdas(l) > 0.0) || !std::isfinite(lambdas(l))) {
      throw ValidationError("lambdas[" + std::to_string(l) + "] must be positive and finite");
    }
  }
  if (Y.rows() != dL() || Y.cols() != d0()) {
    std::ostringstream os;
    os << "Y has shape " << Y.rows() << "x" << Y.cols() << ", expected "
       << dL() << "x" << d0();
    throw ValidationError(os.str());
  }
  if (!Y.allFinite()) throw ValidationError("Y contains non-finite entries");
  double prod = 1.0;
  for (int l = 0; l < lambdas.size(); ++l) prod *= lambdas(l);
  if (std::abs(prod - lambda) > 1e-14 * std::max(prod, lambda)) {
    throw ValidationError("cached lambda product is inconsistent with lambdas");
  }
}

bool FactorStack::shape_matches(const ProblemSpec& p) const {
  if (depth() != p.depth()) return false;
  for (int l = 0; l < depth(); ++l) {
    if (matrices[l].rows() != p.dims[l + 1] || matrices[l].cols() != p.dims[l]) return false;
  }
  return true;
}

void FactorStack::require_shape(const ProblemSpec& p) const {
  if (!shape_matches(p)) {
    std::ostringstream os;
    os << "factor stack shape mismatch: expected chain";
    for (size_t i = 0; i + 1 < p.dims.size(); ++i) {
      os << " " << p.dims[i + 1] << "x" << p.dims[i];
    }
    throw ValidationError(os.str());
  }
}

double stack_dot(const FactorStack& a, const FactorStack& b) {
  double s = 0.0;
  for (int l = 0; l < a.depth(); ++l) {
    s += (a.matrices[l].array() * b.matrices[l].array()).sum();
  }
  return s;
}

double stack_norm(const FactorStack& a) { return std::sqrt(stack_dot(a, a)); }

FactorStack stack_axpy(const FactorStack& base, double t, const FactorStack& dir) {
  FactorStack out = base;
  for (int l = 0; l < out.depth(); ++l) out.matrices[l] += t * dir.matrices[l];
  return out;
}

FactorStack zero_stack(const ProblemSpec& p) {
  FactorStack w;
  w.matrices.reserve(p.depth());
  for (int l = 0; l < p.depth(); ++l) {
    w.matrices.push_back(MatrixXd::Zero(p.dims[l + 1], p.dims[l]));
  }
  return w;
}

}  // namespace dmf
