#include "dmf/spectral.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace dmf {

namespace {

// Flip the sign of column j of M if its largest-magnitude entry is negative.
// Returns true when a flip happened.
bool fix_column_sign(MatrixXd& M, int j) {
  int imax = 0;
  double best = -1.0;
  for (int i = 0; i < M.rows(); ++i) {
    const double a = std::abs(M(i, j));
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (M(imax, j) < 0.0) {
    M.col(j) = -M.col(j);
    return true;
  }
  return false;
}

}  // namespace

SpectralDecomposition spectral_decompose(const ProblemSpec& spec, double group_tol) {
  spec.validate();
  if (!(group_tol > 0.0)) throw ValidationError("group_tol must be positive");

  SpectralDecomposition sd;
  const int dY = spec.d_Y();

  if (spec.spectral_input) {
    // Y is already Sigma_Y; U and V are identities and y is the diagonal.
    sd.U = MatrixXd::Identity(spec.dL(), spec.dL());
    sd.V = MatrixXd::Identity(spec.d0(), spec.d0());
    sd.y = spec.Y.diagonal().head(dY);
  } else {
    if (!spec.Y.allFinite()) throw NumericError("SVD input contains non-finite entries");
    Eigen::JacobiSVD<MatrixXd> svd(spec.Y, Eigen::ComputeFullU | Eigen::ComputeFullV);
    sd.U = svd.matrixU();
    sd.V = svd.matrixV();
    sd.y = svd.singularValues().head(dY);
    if (!sd.U.allFinite() || !sd.V.allFinite() || !sd.y.allFinite()) {
      throw NumericError("SVD did not converge to finite factors");
    }
    // Deterministic sign/phase: fix pairs together for i < d_Y, remaining
    // null-space columns independently (they do not affect U Sigma V^T).
    for (int i = 0; i < dY; ++i) {
      if (fix_column_sign(sd.U, i)) sd.V.col(i) = -sd.V.col(i);
    }
    for (int i = dY; i < sd.U.cols(); ++i) fix_column_sign(sd.U, i);
    for (int i = dY; i < sd.V.cols(); ++i) fix_column_sign(sd.V, i);
  }

  const double scale = std::max(1.0, dY > 0 ? sd.y(0) : 0.0);
  const double tol = group_tol * scale;
  sd.rank = 0;
  for (int i = 0; i < dY; ++i) {
    if (sd.y(i) > tol) ++sd.rank;
  }
  sd.group_starts = {0};
  for (int i = 1; i < sd.rank; ++i) {
    if (std::abs(sd.y(i) - sd.y(i - 1)) > tol) sd.group_starts.push_back(i);
  }
  if (sd.rank > 0) sd.group_starts.push_back(sd.rank);
  return sd;
}

}  // namespace dmf
