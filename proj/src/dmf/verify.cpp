#include "dmf/verify.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace dmf {

FactorStack fd_gradient(const ProblemSpec& p, const FactorStack& w, double h, Loss which) {
  if (!(h > 0.0)) throw ValidationError("finite-difference step must be positive");
  w.require_shape(p);
  FactorStack g = zero_stack(p);
  FactorStack probe = w;
  for (int l = 0; l < w.depth(); ++l) {
    for (int j = 0; j < w.matrices[l].cols(); ++j) {
      for (int i = 0; i < w.matrices[l].rows(); ++i) {
        const double orig = probe.matrices[l](i, j);
        probe.matrices[l](i, j) = orig + h;
        const double up = loss(p, probe, which);
        probe.matrices[l](i, j) = orig - h;
        const double down = loss(p, probe, which);
        probe.matrices[l](i, j) = orig;
        g.matrices[l](i, j) = (up - down) / (2.0 * h);
      }
    }
  }
  return g;
}

double fd_quadform(const ProblemSpec& p, const FactorStack& w, const DirectionStack& d,
                   double t, Loss which) {
  if (!(t > 0.0)) throw ValidationError("finite-difference step must be positive");
  const double mid = loss(p, w, which);
  const double up = loss(p, stack_axpy(w, t, d), which);
  const double down = loss(p, stack_axpy(w, -t, d), which);
  return (up - 2.0 * mid + down) / (t * t);
}

FactorStack gaussian_stack(const ProblemSpec& p, Rng& rng, double entry_scale) {
  FactorStack s = zero_stack(p);
  for (int l = 0; l < s.depth(); ++l) {
    for (int j = 0; j < s.matrices[l].cols(); ++j) {
      for (int i = 0; i < s.matrices[l].rows(); ++i) {
        s.matrices[l](i, j) = entry_scale * rng.gauss();
      }
    }
  }
  return s;
}

ProbeReport probe_min_quadform(const ProblemSpec& p, const FactorStack& w, Loss which,
                               int n, std::uint64_t seed,
                               const std::vector<DirectionStack>& certificates) {
  if (n < 1) throw ValidationError("probe sample count must be >= 1");
  w.require_shape(p);
  ProbeReport rep;
  rep.n_samples = n;
  rep.seed = seed;
  rep.loss = which;
  rep.min_quadform = std::numeric_limits<double>::infinity();
  rep.max_quadform = -std::numeric_limits<double>::infinity();
  Rng rng(seed);
  for (int k = 0; k < n; ++k) {
    FactorStack d = gaussian_stack(p, rng, 1.0);
    const double norm = stack_norm(d);
    if (norm == 0.0) continue;
    for (auto& m : d.matrices) m /= norm;
    const double q = hessian_quadform(p, w, d, which);
    if (q < rep.min_quadform) {
      rep.min_quadform = q;
      rep.argmin_sample = k;
    }
    rep.max_quadform = std::max(rep.max_quadform, q);
  }
  for (const auto& cert : certificates) {
    rep.certificate_quadforms.push_back(hessian_quadform(p, w, cert, which));
  }
  return rep;
}

FactorStack random_init(const ProblemSpec& p, std::uint64_t seed, double scale) {
  if (scale < 0.0) scale = 0.1 * std::sqrt(1.0 / p.max_dim());
  Rng rng(seed);
  return gaussian_stack(p, rng, scale);
}

TrainResult gradient_descent(const ProblemSpec& p, const SpectralDecomposition& sd,
                             const FactorStack& init, const TrainConfig& cfg,
                             bool classify_terminal) {
  if (!(cfg.step > 0.0)) throw ValidationError("step size must be positive");
  init.require_shape(p);
  TrainResult res;
  res.step_used = cfg.step;
  res.terminal = init;
  const double tol = cfg.grad_tol * (1.0 + p.y_norm());
  const std::int64_t decim = std::max<std::int64_t>(1, cfg.max_iter / std::max(1, cfg.trajectory_points));
  res.decimation = decim;

  double step = cfg.step;
  double last_loss = loss_F(p, res.terminal);
  res.trajectory.push_back(last_loss);

  std::int64_t it = 0;
  for (; it < cfg.max_iter; ++it) {
    const FactorStack g = grad_F(p, res.terminal);
    const double gnorm = stack_norm(g);
    if (gnorm <= tol) {
      res.converged = true;
      break;
    }
    FactorStack next = stack_axpy(res.terminal, -step, g);
    double next_loss = loss_F(p, next);
    if (cfg.halving_guard) {
      int halvings = 0;
      while (next_loss > last_loss && halvings < 60) {
        step *= 0.5;
        next = stack_axpy(res.terminal, -step, g);
        next_loss = loss_F(p, next);
        ++halvings;
      }
    }
    res.terminal = std::move(next);
    last_loss = next_loss;
    if ((it + 1) % decim == 0) res.trajectory.push_back(last_loss);
    if (!std::isfinite(last_loss) || last_loss > cfg.divergence_loss) {
      res.diverged = true;
      ++it;
      break;
    }
  }
  res.iterations = it;
  res.step_used = step;
  res.terminal_grad_norm = stack_norm(grad_F(p, res.terminal));
  res.terminal_loss = loss_F(p, res.terminal);
  if (!res.converged) res.converged = res.terminal_grad_norm <= tol;
  if (res.trajectory.empty() || res.trajectory.back() != res.terminal_loss) {
    res.trajectory.push_back(res.terminal_loss);
  }

  if (classify_terminal && !res.diverged) {
    NumericMatchTolerances t;
    t.grad = std::max(t.grad, 2.0 * res.terminal_grad_norm / (1.0 + p.y_norm()));
    res.terminal_class = classify_numerically(p, sd, res.terminal, t);
  }
  return res;
}

namespace {

// Shared singular values of the rescaled layers, averaged across layers for
// stability; near a critical point the layers agree to rounding.
VectorXd extract_sigma(const ProblemSpec& p, const FactorStack& w_g) {
  const int dmin = p.d_min();
  VectorXd acc = VectorXd::Zero(dmin);
  for (const auto& m : w_g.matrices) {
    Eigen::JacobiSVD<MatrixXd> svd(m);
    acc += svd.singularValues().head(dmin);
  }
  return acc / static_cast<double>(w_g.depth());
}

// v(x) = (x^{2L-1} + lambda x) / (sqrt(lambda) x^{L-1}): the data value any
// positive root belongs to.
double implied_y(double x, double lambda, int L) {
  return (std::pow(x, 2 * L - 1) + lambda * x) / (std::sqrt(lambda) * std::pow(x, L - 1));
}

}  // namespace

NumericClassification classify_numerically(const ProblemSpec& p,
                                           const SpectralDecomposition& sd,
                                           const FactorStack& w,
                                           const NumericMatchTolerances& tols,
                                           std::uint64_t probe_seed, int probe_n) {
  w.require_shape(p);
  NumericClassification out;
  out.grad_norm = stack_norm(grad_F(p, w));
  const double gate = tols.grad * (1.0 + p.y_norm());
  if (out.grad_norm > gate) {
    std::ostringstream os;
    os << "not a critical point: ||grad_F|| = " << out.grad_norm << " exceeds " << gate;
    throw ValidationError(os.str());
  }
  if (p.scalar_case()) {
    out.classification.cls = CritClass::Unsupported;
    out.classification.clause = "scalar";
    out.classification.rationale =
        "fully scalar problems (all dims = 1) are outside the classification theory";
    return out;
  }

  const FactorStack w_g = rescale_F_to_G(w, p.lambdas);
  out.sigma_estimate = extract_sigma(p, w_g);
  const int dmin = p.d_min();
  const int L = p.depth();
  const double sigma_max = out.sigma_estimate.size() ? out.sigma_estimate(0) : 0.0;
  const double snap_tol = std::max(tols.sigma_match, tols.sigma_match_rel * sigma_max);

  // Snap each slot to zero or to an exact root of f(.; y_j).
  std::vector<std::pair<double, int>> pairs;  // (root, value group) for positive slots
  bool ok = true;
  double worst = 0.0;
  for (int i = 0; i < dmin && ok; ++i) {
    const double s = out.sigma_estimate(i);
    double best_dist = std::abs(s);  // the zero candidate
    double best_root = 0.0;
    int best_group = -1;
    for (int g = 0; g < sd.num_groups(); ++g) {
      for (double root : positive_roots(sd.group_value(g), p.lambda, L)) {
        const double dist = std::abs(s - root);
        if (dist < best_dist) {
          best_dist = dist;
          best_root = root;
          best_group = g;
        }
      }
    }
    if (best_dist > snap_tol) {
      ok = false;
      break;
    }
    worst = std::max(worst, best_dist);
    if (best_group >= 0) pairs.emplace_back(best_root, best_group);
  }

  // Respect group multiplicities, then assemble the sorted spec with its
  // canonical permutation (supported slots consume indices of their group).
  if (ok) {
    std::vector<int> uses(sd.num_groups(), 0);
    for (const auto& [root, g] : pairs) {
      if (++uses[g] > sd.multiplicity(g)) ok = false;
    }
  }
  if (ok) {
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    CriticalSpec snapped;
    snapped.sigma = VectorXd::Zero(dmin);
    std::vector<int> next(sd.num_groups());
    for (int g = 0; g < sd.num_groups(); ++g) next[g] = sd.group_starts[g];
    std::vector<bool> used(p.d_Y(), false);
    for (size_t i = 0; i < pairs.size(); ++i) {
      snapped.sigma(static_cast<int>(i)) = pairs[i].first;
      const int idx = next[pairs[i].second]++;
      snapped.pi.push_back(idx);
      used[idx] = true;
    }
    for (int i = 0; i < p.d_Y() && static_cast<int>(snapped.pi.size()) < p.d_Y(); ++i) {
      if (!used[i]) snapped.pi.push_back(i);
    }
    if (validate_spec(p, sd, snapped).ok) {
      out.matched_spec = snapped;
      out.snap_distance = worst;
      out.classification = classify(p, sd, snapped);
      return out;
    }
  }

  // No spec within tolerance: label by probe sign.
  out.unmatched = true;
  const ProbeReport rep = probe_min_quadform(p, w, Loss::F, probe_n, probe_seed);
  out.classification.r_sigma = -1;
  if (rep.min_quadform < tols.probe_negative) {
    out.classification.cls = CritClass::StrictSaddle;
    out.classification.clause = "probe";
    out.classification.rationale = "unmatched point with a sampled descent direction";
  } else {
    out.classification.cls = CritClass::SpuriousLocalMin;
    out.classification.clause = "probe";
    out.classification.rationale =
        "unmatched point with no sampled descent direction; reported as a local minimizer";
  }
  out.note = "no enumerated spec within snap tolerance";
  return out;
}

LandscapeGrid landscape_slice(const ProblemSpec& p, const FactorStack& w_ref, Loss which,
                              std::uint64_t seed, double half_range, int resolution) {
  if (resolution < 2) {
    throw ValidationError("landscape resolution must be >= 2, got " + std::to_string(resolution));
  }
  if (!(half_range > 0.0)) throw ValidationError("half_range must be positive");
  w_ref.require_shape(p);

  LandscapeGrid grid;
  grid.seed = seed;
  grid.loss = which;
  Rng rng(seed);

  FactorStack d1 = gaussian_stack(p, rng, 1.0);
  double n1 = stack_norm(d1);
  int retries = 0;
  while (n1 == 0.0 && retries++ < 16) {
    d1 = gaussian_stack(p, rng, 1.0);
    n1 = stack_norm(d1);
  }
  if (n1 == 0.0) throw NumericError("could not draw a nonzero direction");
  for (auto& m : d1.matrices) m /= n1;

  FactorStack d2 = gaussian_stack(p, rng, 1.0);
  retries = 0;
  for (;;) {
    const double overlap = stack_dot(d2, d1);
    FactorStack ortho = stack_axpy(d2, -overlap, d1);
    const double n2 = stack_norm(ortho);
    if (n2 > 1e-8 * std::max(1.0, stack_norm(d2))) {
      for (auto& m : ortho.matrices) m /= n2;
      d2 = std::move(ortho);
      break;
    }
    if (++retries > 16) throw NumericError("degenerate direction draws in Gram-Schmidt");
    d2 = gaussian_stack(p, rng, 1.0);
  }

  grid.reference = loss(p, w_ref, which);
  grid.alphas.resize(resolution);
  grid.betas.resize(resolution);
  for (int i = 0; i < resolution; ++i) {
    const double t = -half_range + 2.0 * half_range * i / (resolution - 1);
    grid.alphas[i] = t;
    grid.betas[i] = t;
  }
  grid.values.resize(resolution, resolution);
  for (int i = 0; i < resolution; ++i) {
    const FactorStack row = stack_axpy(w_ref, grid.alphas[i], d1);
    for (int j = 0; j < resolution; ++j) {
      const FactorStack point = stack_axpy(row, grid.betas[j], d2);
      grid.values(i, j) = loss(p, point, which) - grid.reference;
    }
  }
  return grid;
}

}  // namespace dmf
