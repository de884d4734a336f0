// Independent numerical oracles and experiments: finite-difference checks
// (sharing nothing with the analytic gradients beyond loss evaluation),
// random Hessian probing, plain gradient descent with terminal
// classification, and the random-projection landscape slicer.
#pragma once

#include <cstdint>
#include <optional>

#include "dmf/classify.hpp"

namespace dmf {

// Central differences on the loss only.
FactorStack fd_gradient(const ProblemSpec& p, const FactorStack& w, double h, Loss which);
double fd_quadform(const ProblemSpec& p, const FactorStack& w, const DirectionStack& d,
                   double t, Loss which);

struct ProbeReport {
  int n_samples = 0;
  std::uint64_t seed = 0;
  Loss loss = Loss::G;
  double min_quadform = 0.0;
  double max_quadform = 0.0;
  int argmin_sample = -1;
  std::vector<double> certificate_quadforms;  // filled when certificates passed in
};

// Samples n unit directions (seeded Gaussian entries, normalized in the
// global inner product) and records the quadform extremes; deterministic per
// seed. Supplied certificate directions are evaluated as-is.
ProbeReport probe_min_quadform(const ProblemSpec& p, const FactorStack& w, Loss which,
                               int n, std::uint64_t seed,
                               const std::vector<DirectionStack>& certificates = {});

// Seeded Gaussian stack with per-entry scale; entry order is layer-major,
// column-major within a layer.
FactorStack gaussian_stack(const ProblemSpec& p, Rng& rng, double entry_scale);

struct NumericMatchTolerances {
  double grad = 1e-6;          // gate, scaled by 1 + ||Y||_F
  double sigma_match = 1e-4;   // absolute snap distance for sigma slots
  double sigma_match_rel = 0.05;  // relative floor: times the leading sigma
  double probe_negative = -1e-6;  // quadform below this counts as descent
};

struct NumericClassification {
  Classification classification;
  std::optional<CriticalSpec> matched_spec;
  VectorXd sigma_estimate;     // shared singular values in G coordinates
  double snap_distance = 0.0;  // max per-slot distance sigma -> matched spec
  double grad_norm = 0.0;      // F gradient norm at w
  bool unmatched = false;      // fell back to probe-based labeling
  std::string note;
};

// Classifies a numerically critical stack (F coordinates): extracts the shared
// singular values of the rescaled layers, snaps each slot to zero or to a
// positive root of f(.; y_j), validates the snapped spec, and returns its
// analytic class. Falls back to probe-sign labeling with an unmatched flag.
NumericClassification classify_numerically(const ProblemSpec& p,
                                           const SpectralDecomposition& sd,
                                           const FactorStack& w,
                                           const NumericMatchTolerances& tols = {},
                                           std::uint64_t probe_seed = 0, int probe_n = 200);

struct TrainConfig {
  double step = 1e-3;
  std::int64_t max_iter = 200000;
  double grad_tol = 1e-6;      // stop when ||grad_F|| <= grad_tol * (1 + ||Y||_F)
  bool halving_guard = true;   // halve the step when the loss increases
  double init_scale = -1.0;    // < 0: 0.1 * sqrt(1 / max dim) per entry
  double divergence_loss = 1e12;
  int trajectory_points = 1024;
};

struct TrainResult {
  std::int64_t iterations = 0;
  double terminal_grad_norm = 0.0;
  double terminal_loss = 0.0;
  double step_used = 0.0;      // final step after any halvings
  bool converged = false;
  bool diverged = false;
  std::vector<double> trajectory;  // decimated loss values, t = 0 first
  std::int64_t decimation = 1;
  FactorStack terminal;
  std::optional<NumericClassification> terminal_class;
};

TrainResult gradient_descent(const ProblemSpec& p, const SpectralDecomposition& sd,
                             const FactorStack& init, const TrainConfig& cfg,
                             bool classify_terminal = true);

FactorStack random_init(const ProblemSpec& p, std::uint64_t seed, double scale = -1.0);

struct LandscapeGrid {
  std::vector<double> alphas;
  std::vector<double> betas;
  MatrixXd values;       // values(i, j) = h(alphas[i], betas[j]) - reference
  double reference = 0.0;  // h(0, 0)
  std::uint64_t seed = 0;
  Loss loss = Loss::G;
};

// Two seeded Gaussian stacks orthonormalized by Gram-Schmidt in the global
// inner product; h(a, b) = loss(w_ref + a D1 + b D2), exported shifted by
// h(0, 0). Collinear draws are redrawn (bounded retries).
LandscapeGrid landscape_slice(const ProblemSpec& p, const FactorStack& w_ref, Loss which,
                              std::uint64_t seed, double half_range, int resolution);

}  // namespace dmf
