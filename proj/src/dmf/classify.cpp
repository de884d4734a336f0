#include "dmf/classify.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace dmf {

const char* crit_class_name(CritClass c) {
  switch (c) {
    case CritClass::GlobalMin: return "global_min";
    case CritClass::SpuriousLocalMin: return "spurious_local_min";
    case CritClass::StrictSaddle: return "strict_saddle";
    case CritClass::NonStrictSaddle: return "non_strict_saddle";
    case CritClass::Unsupported: return "unsupported";
  }
  return "?";
}

bool is_local_min_or_better(CritClass c) {
  return c == CritClass::GlobalMin || c == CritClass::SpuriousLocalMin;
}

const char* certificate_kind_name(CertificateKind k) {
  switch (k) {
    case CertificateKind::S2Descent: return "s2_descent";
    case CertificateKind::MisalignmentDescent: return "misalignment_descent";
    case CertificateKind::CubicNonStrict: return "cubic_nonstrict";
  }
  return "?";
}

namespace {

void require_valid(const ProblemSpec& p, const SpectralDecomposition& sd,
                   const CriticalSpec& spec, double tol) {
  const ValidationReport rep = validate_spec(p, sd, spec, tol);
  if (!rep.ok) throw ValidationError("invalid critical spec: " + rep.message);
}

int support_count(const CriticalSpec& spec, const ClassifyTolerances& tols) {
  const double scale = spec.sigma.size() > 0 ? 1.0 + spec.sigma(0) : 1.0;
  return spec.support(tols.sigma_zero * scale);
}

// Label each supported sigma by matching it to the nearest positive root of
// f(.; y_pi(i)).
std::vector<RootLabel> label_support(const ProblemSpec& p, const SpectralDecomposition& sd,
                                     const CriticalSpec& spec, int r_sigma,
                                     const ClassifyTolerances& tols) {
  std::vector<RootLabel> labels;
  labels.reserve(r_sigma);
  for (int i = 0; i < r_sigma; ++i) {
    const RootProfile rp =
        root_profile(sd.y(spec.pi[i]), p.lambda, p.depth(), 1e-14, tols.eq_tol);
    double best = std::numeric_limits<double>::infinity();
    RootLabel label = RootLabel::S1;
    for (const auto& [root, lab] : rp.labeled_roots()) {
      const double dist = std::abs(spec.sigma(i) - root);
      if (dist < best) {
        best = dist;
        label = lab;
      }
    }
    if (!std::isfinite(best)) {
      throw NumericError("supported sigma with no positive root candidate; spec validation "
                         "should have rejected this");
    }
    labels.push_back(label);
  }
  return labels;
}

bool aligned_with_top(const SpectralDecomposition& sd, const CriticalSpec& spec,
                      int r_sigma, double align_tol) {
  const double scale = 1.0 + (sd.y.size() > 0 ? sd.y(0) : 0.0);
  for (int i = 0; i < r_sigma; ++i) {
    if (std::abs(sd.y(spec.pi[i]) - sd.y(i)) > align_tol * scale) return false;
  }
  return true;
}

}  // namespace

Classification classify_L2(const ProblemSpec& p, const SpectralDecomposition& sd,
                           const CriticalSpec& spec, const ClassifyTolerances& tols) {
  if (p.depth() != 2) throw ValidationError("classify_L2 requires depth 2");
  require_valid(p, sd, spec, tols.spec_tol);
  Classification c;
  c.r_sigma = support_count(spec, tols);
  const int dmin = p.d_min();
  VectorXd star(dmin);
  for (int i = 0; i < dmin; ++i) {
    const double s = std::sqrt(p.lambda) * sd.y(i) - p.lambda;
    star(i) = s > 0.0 ? std::sqrt(s) : 0.0;
  }
  const double scale = 1.0 + star.maxCoeff();
  bool match = true;
  for (int i = 0; i < dmin; ++i) {
    if (std::abs(spec.sigma(i) - star(i)) > 1e-9 * scale) match = false;
  }
  if (match) {
    c.cls = CritClass::GlobalMin;
    c.clause = "L2:optimal";
    c.rationale = "sigma equals the two-layer closed-form optimum componentwise";
  } else {
    c.cls = CritClass::StrictSaddle;
    c.clause = "L2:dichotomy";
    c.rationale = "two-layer critical points are global minimizers or strict saddles";
  }
  return c;
}

Classification classify(const ProblemSpec& p, const SpectralDecomposition& sd,
                        const CriticalSpec& spec, const ClassifyTolerances& tols) {
  if (p.scalar_case()) {
    Classification c;
    c.cls = CritClass::Unsupported;
    c.clause = "scalar";
    c.rationale = "fully scalar problems (all dims = 1) are outside the classification theory";
    return c;
  }
  if (p.depth() == 2) return classify_L2(p, sd, spec, tols);

  require_valid(p, sd, spec, tols.spec_tol);
  Classification c;
  c.r_sigma = support_count(spec, tols);
  c.labels = label_support(p, sd, spec, c.r_sigma, tols);

  for (int i = 0; i < c.r_sigma; ++i) {
    if (c.labels[i] == RootLabel::S2) {
      c.cls = CritClass::StrictSaddle;
      c.clause = "S2";
      std::ostringstream os;
      os << "sigma[" << i << "] is the smaller positive root of f(.; y=" << sd.y(spec.pi[i])
         << ")";
      c.rationale = os.str();
      return c;
    }
  }

  if (!aligned_with_top(sd, spec, c.r_sigma, tols.align_tol)) {
    c.cls = CritClass::StrictSaddle;
    c.clause = "misalignment";
    c.rationale = "supported data values differ from the top-r singular values";
    return c;
  }

  for (int i = 0; i < c.r_sigma; ++i) {
    if (c.labels[i] == RootLabel::S3) {
      c.cls = CritClass::NonStrictSaddle;
      c.clause = "S3";
      std::ostringstream os;
      os << "sigma[" << i << "] is the unique positive root x* at the critical regularization";
      c.rationale = os.str();
      return c;
    }
  }

  // Aligned, all supported values in S1: a local minimizer; global iff every
  // coordinate (zeros included) attains the scalar argmin of g(.; y_i).
  bool in_H = true;
  int witness = -1;
  for (int i = 0; i < p.d_min(); ++i) {
    const ScalarMinResult m = scalar_argmin_g(sd.y(i), p.lambda, p.depth(), tols.h_tol);
    const double gi = eval_g(spec.sigma(i), sd.y(i), p.lambda, p.depth());
    const double band = tols.h_tol * (1.0 + p.lambda * sd.y(i) * sd.y(i));
    if (gi > m.min_value + band) {
      in_H = false;
      witness = i;
      break;
    }
  }
  if (in_H) {
    c.cls = CritClass::GlobalMin;
    c.clause = "H";
    c.rationale = "every coordinate attains the scalar argmin of g(.; y_i)";
  } else {
    c.cls = CritClass::SpuriousLocalMin;
    c.clause = "not-H";
    std::ostringstream os;
    os << "local minimizer, but sigma[" << witness << "] does not attain the scalar argmin of g(.; y="
       << sd.y(witness) << ")";
    c.rationale = os.str();
  }
  return c;
}

RegularizationReport check_partially_benign(const ProblemSpec& p,
                                            const SpectralDecomposition& sd,
                                            double eq_tol) {
  if (p.depth() < 3) {
    throw ValidationError("the benign-regularization condition applies to depth >= 3");
  }
  RegularizationReport rep;
  rep.lambda = p.lambda;
  for (int i = 0; i < p.d_min(); ++i) {
    if (sd.y(i) > 0.0) {
      const double lc = lambda_critical(sd.y(i), p.depth());
      rep.lambda_crit.push_back(lc);
      if (std::abs(p.lambda - lc) <= eq_tol * lc) rep.violating_indices.push_back(i);
    } else {
      rep.lambda_crit.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  rep.benign = rep.violating_indices.empty();
  return rep;
}

std::optional<CertificateKind> certificate_kind_for(const Classification& c) {
  if (c.clause == "S2") return CertificateKind::S2Descent;
  if (c.clause == "misalignment") return CertificateKind::MisalignmentDescent;
  if (c.clause == "S3") return CertificateKind::CubicNonStrict;
  return std::nullopt;
}

namespace {

// The proofs' raw directions live in the coordinates where Y is diagonal and
// the permutation is explicit; transport them through BlkD(Pi, I) on the input
// side, BlkD(Pi^T, I) on the output side, then through the dressing and the
// data singular bases, mirroring the construction of the critical point.
DirectionStack transport(const ProblemSpec& p, const SpectralDecomposition& sd,
                         const CriticalSpec& spec, const Dressing& dressing,
                         std::vector<MatrixXd> raw) {
  const int L = p.depth();
  const MatrixXd pi_in = padded_permutation(spec.pi, p.d0());
  const MatrixXd pi_out = padded_permutation(spec.pi, p.dL()).transpose();
  const MatrixXd o_in = block_diag(dressing.O);
  std::vector<MatrixXd> o_out_blocks;
  for (int i = 0; i < sd.num_groups(); ++i) o_out_blocks.push_back(dressing.O[i].transpose());
  o_out_blocks.push_back(dressing.O_hat.transpose());
  const MatrixXd o_out = block_diag(o_out_blocks);

  DirectionStack d;
  d.matrices.resize(L);
  d.matrices[0] = dressing.Q[0] * raw[0] * pi_in * o_in * sd.V.transpose();
  for (int l = 2; l <= L - 1; ++l) {
    d.matrices[l - 1] = dressing.Q[l - 1] * raw[l - 1] * dressing.Q[l - 2].transpose();
  }
  d.matrices[L - 1] = sd.U * o_out * pi_out * raw[L - 1] * dressing.Q[L - 2].transpose();
  return d;
}

}  // namespace

Certificate certificate_direction(const ProblemSpec& p, const SpectralDecomposition& sd,
                                  const CriticalSpec& spec, CertificateKind kind,
                                  const Dressing& dressing, Loss coord,
                                  const ClassifyTolerances& tols) {
  if (p.depth() < 3) throw ValidationError("certificates require depth >= 3");
  require_valid(p, sd, spec, tols.spec_tol);
  const int L = p.depth();
  const int r_sigma = support_count(spec, tols);
  const std::vector<RootLabel> labels = label_support(p, sd, spec, r_sigma, tols);
  const double sqrt_lambda = std::sqrt(p.lambda);

  Certificate cert;
  cert.kind = kind;
  cert.coord = coord;
  std::vector<MatrixXd> raw(L);
  for (int l = 0; l < L; ++l) raw[l] = MatrixXd::Zero(p.dims[l + 1], p.dims[l]);

  switch (kind) {
    case CertificateKind::S2Descent: {
      int slot = -1;
      for (int i = 0; i < r_sigma; ++i) {
        if (labels[i] == RootLabel::S2) {
          slot = i;
          break;
        }
      }
      if (slot < 0) throw ValidationError("no S2 singular value; the S2 certificate does not apply");
      for (int l = 0; l < L; ++l) raw[l](slot, slot) = -1.0;
      cert.slot = slot;
      cert.expected_quadform =
          2.0 * L * eval_f_dx(spec.sigma(slot), sd.y(spec.pi[slot]), p.lambda, L);
      break;
    }
    case CertificateKind::MisalignmentDescent: {
      if (r_sigma == 0) {
        throw ValidationError("misalignment certificate needs a nonempty support");
      }
      // Smallest supported value against the largest unsupported value.
      int i = r_sigma - 1;
      int j = -1;
      double best = -1.0;
      for (int k = r_sigma; k < p.d_Y(); ++k) {
        if (sd.y(spec.pi[k]) > best) {
          best = sd.y(spec.pi[k]);
          j = k;
        }
      }
      const double scale = 1.0 + (sd.y.size() > 0 ? sd.y(0) : 0.0);
      if (j < 0 || !(sd.y(spec.pi[j]) - sd.y(spec.pi[i]) > tols.align_tol * scale)) {
        throw ValidationError("supported values already dominate; the misalignment certificate "
                              "does not apply");
      }
      raw[0](i, j) = 1.0;
      raw[L - 1](j, i) = 1.0;
      cert.slot = i;
      cert.partner = j;
      cert.expected_quadform = 4.0 * sqrt_lambda * std::pow(spec.sigma(i), L - 2) *
                               (sd.y(spec.pi[i]) - sd.y(spec.pi[j]));
      break;
    }
    case CertificateKind::CubicNonStrict: {
      int slot = -1;
      for (int i = 0; i < r_sigma; ++i) {
        if (labels[i] == RootLabel::S3) {
          slot = i;
          break;
        }
      }
      if (slot < 0) throw ValidationError("no S3 singular value; the cubic certificate does not apply");
      for (int l = 0; l < L; ++l) raw[l](slot, slot) = 1.0;
      cert.slot = slot;
      cert.expected_quadform = 0.0;
      cert.cubic_coefficient =
          (L / 3.0) * eval_f_dxx(spec.sigma(slot), sd.y(spec.pi[slot]), p.lambda, L);
      break;
    }
  }

  cert.direction = transport(p, sd, spec, dressing, std::move(raw));
  if (coord == Loss::F) {
    // F directions are the G directions with layer l divided by sqrt(lambda_l);
    // quadform values divide by lambda.
    cert.direction = rescale_G_to_F(cert.direction, p.lambdas);
    cert.expected_quadform /= p.lambda;
    cert.cubic_coefficient /= p.lambda;
  }
  return cert;
}

double global_min_value(const ProblemSpec& p, const SpectralDecomposition& sd, Loss coord) {
  double gstar = 0.0;
  for (int i = 0; i < p.d_min(); ++i) {
    gstar += scalar_argmin_g(sd.y(i), p.lambda, p.depth()).min_value;
  }
  for (int i = p.d_min(); i < p.d_Y(); ++i) gstar += p.lambda * sd.y(i) * sd.y(i);
  return coord == Loss::G ? gstar : gstar / p.lambda;
}

}  // namespace dmf
