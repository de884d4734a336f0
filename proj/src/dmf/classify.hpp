// Decision procedure for critical-point types. The depth >= 3 flowchart:
// any S2 singular value -> strict saddle; misaligned supported data values ->
// strict saddle; any S3 value (aligned) -> non-strict saddle; otherwise local
// minimizer, global iff every coordinate attains the scalar argmin. Depth 2
// has its own closed-form dichotomy. Also: the benign-regularization check,
// analytic certificate directions, and the global minimum value.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dmf/critical.hpp"

namespace dmf {

enum class CritClass {
  GlobalMin,
  SpuriousLocalMin,
  StrictSaddle,
  NonStrictSaddle,
  Unsupported,
};

const char* crit_class_name(CritClass c);
bool is_local_min_or_better(CritClass c);

struct ClassifyTolerances {
  double spec_tol = 1e-8;      // root-equation residual in validate_spec
  double sigma_zero = 1e-12;   // relative support threshold on sigma
  double align_tol = 1e-9;     // relative tolerance on data-value sequences
  double eq_tol = 1e-9;        // relative y ~ y* band (S3 detection)
  double h_tol = 1e-9;         // argmin-membership band, scaled by 1 + lambda y^2
};

struct Classification {
  CritClass cls = CritClass::Unsupported;
  std::string clause;      // which decision-rule clause fired
  std::string rationale;
  std::vector<RootLabel> labels;  // per supported slot
  int r_sigma = 0;
};

Classification classify(const ProblemSpec& p, const SpectralDecomposition& sd,
                        const CriticalSpec& spec, const ClassifyTolerances& tols = {});

// Depth-2 dichotomy: global minimizer iff sigma matches
// max(sqrt(lambda) y_i - lambda, 0)^{1/2} componentwise; strict saddle otherwise.
Classification classify_L2(const ProblemSpec& p, const SpectralDecomposition& sd,
                           const CriticalSpec& spec, const ClassifyTolerances& tols = {});

struct RegularizationReport {
  double lambda = 0.0;
  std::vector<double> lambda_crit;    // per index i in [d_min]; NaN where y_i = 0
  bool benign = true;
  std::vector<int> violating_indices;
};

// benign iff lambda differs from every lambda_crit(y_i), i in [d_min], by more
// than eq_tol relative. Requires depth >= 3 (depth 2 has no non-strict saddles).
RegularizationReport check_partially_benign(const ProblemSpec& p,
                                            const SpectralDecomposition& sd,
                                            double eq_tol = 1e-9);

enum class CertificateKind { S2Descent, MisalignmentDescent, CubicNonStrict };

const char* certificate_kind_name(CertificateKind k);

// Exact direction stack from the corresponding saddle/non-strict construction,
// transported through the permutation and the dressing. Quadform values are
// stated in the requested coordinate (G formulas divided by lambda for F).
struct Certificate {
  DirectionStack direction;
  CertificateKind kind;
  Loss coord = Loss::G;
  double expected_quadform = 0.0;  // analytic; < 0 for the descent kinds
  double cubic_coefficient = 0.0;  // nonzero only for the cubic kind
  int slot = -1;                   // primary sigma slot used by the construction
  int partner = -1;                // second index for the misalignment pair
};

Certificate certificate_direction(const ProblemSpec& p, const SpectralDecomposition& sd,
                                  const CriticalSpec& spec, CertificateKind kind,
                                  const Dressing& dressing, Loss coord,
                                  const ClassifyTolerances& tols = {});

// Certificate kind implied by a classification, when one exists.
std::optional<CertificateKind> certificate_kind_for(const Classification& c);

// Minimum of G: sum_i min_x g(x; y_i) over i in [d_min] plus
// lambda * sum_{i > d_min} y_i^2; the F minimum is that value / lambda.
double global_min_value(const ProblemSpec& p, const SpectralDecomposition& sd, Loss coord);

}  // namespace dmf
