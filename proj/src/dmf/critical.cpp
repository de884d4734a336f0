#include "dmf/critical.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "dmf/rng.hpp"

namespace dmf {

MatrixXd block_diag(const std::vector<MatrixXd>& blocks) {
  int rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += static_cast<int>(b.rows());
    cols += static_cast<int>(b.cols());
  }
  MatrixXd out = MatrixXd::Zero(rows, cols);
  int r = 0, c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += static_cast<int>(b.rows());
    c += static_cast<int>(b.cols());
  }
  return out;
}

MatrixXd padded_permutation(const std::vector<int>& pi, int n) {
  const int dY = static_cast<int>(pi.size());
  MatrixXd P = MatrixXd::Zero(n, n);
  for (int i = 0; i < dY; ++i) P(i, pi[i]) = 1.0;
  for (int i = dY; i < n; ++i) P(i, i) = 1.0;
  return P;
}

namespace {

MatrixXd random_orthogonal(int n, Rng& rng) {
  if (n == 0) return MatrixXd(0, 0);
  MatrixXd A(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) A(i, j) = rng.gauss();
  }
  Eigen::HouseholderQR<MatrixXd> qr(A);
  MatrixXd Q = qr.householderQ() * MatrixXd::Identity(n, n);
  const MatrixXd R = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

}  // namespace

int CriticalSpec::support(double zero_tol) const {
  int r = 0;
  for (int i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > zero_tol) ++r;
  }
  return r;
}

ValidationReport validate_spec(const ProblemSpec& p, const SpectralDecomposition& sd,
                               const CriticalSpec& spec, double tol) {
  const int dmin = p.d_min();
  const int dY = p.d_Y();
  ValidationReport rep;
  auto fail = [&](const std::string& m) {
    rep.ok = false;
    rep.message = m;
    return rep;
  };

  if (spec.sigma.size() != dmin) {
    return fail("sigma must have length d_min = " + std::to_string(dmin) + ", got " +
                std::to_string(spec.sigma.size()));
  }
  if (static_cast<int>(spec.pi.size()) != dY) {
    return fail("pi must be a permutation of length d_Y = " + std::to_string(dY));
  }
  std::vector<bool> seen(dY, false);
  for (int i = 0; i < dY; ++i) {
    const int v = spec.pi[i];
    if (v < 0 || v >= dY || seen[v]) return fail("pi is not a permutation of 0.." + std::to_string(dY - 1));
    seen[v] = true;
  }
  const double sigma_max = dmin > 0 ? spec.sigma(0) : 0.0;
  const double sort_slack = 1e-12 * (1.0 + std::abs(sigma_max));
  for (int i = 0; i < dmin; ++i) {
    if (!(spec.sigma(i) >= 0.0)) return fail("sigma[" + std::to_string(i) + "] must be nonnegative");
    if (i > 0 && spec.sigma(i) > spec.sigma(i - 1) + sort_slack) {
      return fail("sigma must be nonincreasing (violated at index " + std::to_string(i) + ")");
    }
  }
  const int L = p.depth();
  for (int i = 0; i < dmin; ++i) {
    const double x = std::max(spec.sigma(i), 0.0);
    const double yv = sd.y(spec.pi[i]);
    const double fval = eval_f(x, yv, p.lambda, L);
    const double scale = 1.0 + p.lambda * x + std::sqrt(p.lambda) * yv * std::pow(x, L - 1) +
                         std::pow(x, 2 * L - 1);
    if (std::abs(fval) > tol * scale) {
      std::ostringstream os;
      os << "root equation violated at slot " << i << ": f(" << x << "; y=" << yv
         << ") = " << fval;
      return fail(os.str());
    }
  }
  return rep;
}

Dressing canonical_dressing(const ProblemSpec& p, const SpectralDecomposition& sd) {
  Dressing dr;
  for (int l = 2; l <= p.depth(); ++l) {
    dr.Q.push_back(MatrixXd::Identity(p.dims[l - 1], p.dims[l - 1]));
  }
  for (int i = 0; i < sd.num_groups(); ++i) {
    const int h = sd.multiplicity(i);
    dr.O.push_back(MatrixXd::Identity(h, h));
  }
  dr.O.push_back(MatrixXd::Identity(p.d0() - sd.rank, p.d0() - sd.rank));
  dr.O_hat = MatrixXd::Identity(p.dL() - sd.rank, p.dL() - sd.rank);
  return dr;
}

Dressing random_dressing(const ProblemSpec& p, const SpectralDecomposition& sd,
                         std::uint64_t seed) {
  Rng rng(seed);
  Dressing dr;
  for (int l = 2; l <= p.depth(); ++l) dr.Q.push_back(random_orthogonal(p.dims[l - 1], rng));
  for (int i = 0; i < sd.num_groups(); ++i) dr.O.push_back(random_orthogonal(sd.multiplicity(i), rng));
  dr.O.push_back(random_orthogonal(p.d0() - sd.rank, rng));
  dr.O_hat = random_orthogonal(p.dL() - sd.rank, rng);
  return dr;
}

FactorStack construct(const ProblemSpec& p, const SpectralDecomposition& sd,
                      const CriticalSpec& spec, const Dressing& dressing, Loss coord) {
  const ValidationReport rep = validate_spec(p, sd, spec);
  if (!rep.ok) throw ValidationError("invalid critical spec: " + rep.message);
  const int L = p.depth();
  if (static_cast<int>(dressing.Q.size()) != L - 1) {
    throw ValidationError("dressing has the wrong number of Q blocks");
  }

  const int dmin = p.d_min();
  auto sigma_layer = [&](int l) {  // 1-based layer
    MatrixXd S = MatrixXd::Zero(p.dims[l], p.dims[l - 1]);
    const double scale = coord == Loss::F ? 1.0 / std::sqrt(p.lambdas(l - 1)) : 1.0;
    for (int i = 0; i < dmin; ++i) S(i, i) = spec.sigma(i) * scale;
    return S;
  };

  const MatrixXd pi_in = padded_permutation(spec.pi, p.d0());
  const MatrixXd pi_out = padded_permutation(spec.pi, p.dL()).transpose();
  const MatrixXd o_in = block_diag(dressing.O);
  std::vector<MatrixXd> out_blocks;
  for (int i = 0; i < sd.num_groups(); ++i) out_blocks.push_back(dressing.O[i].transpose());
  out_blocks.push_back(dressing.O_hat.transpose());
  const MatrixXd o_out = block_diag(out_blocks);

  if (o_in.rows() != p.d0() || o_out.rows() != p.dL()) {
    throw ValidationError("dressing O blocks do not tile the data dimensions");
  }

  FactorStack w;
  w.matrices.resize(L);
  w.matrices[0] = dressing.Q[0] * sigma_layer(1) * pi_in * o_in * sd.V.transpose();
  for (int l = 2; l <= L - 1; ++l) {
    w.matrices[l - 1] = dressing.Q[l - 1] * sigma_layer(l) * dressing.Q[l - 2].transpose();
  }
  w.matrices[L - 1] = sd.U * o_out * pi_out * sigma_layer(L) * dressing.Q[L - 2].transpose();
  return w;
}

double balancedness_residual(const FactorStack& w) {
  double worst = 0.0;
  for (int l = 0; l + 1 < w.depth(); ++l) {
    const MatrixXd left = w.matrices[l] * w.matrices[l].transpose();
    const MatrixXd right = w.matrices[l + 1].transpose() * w.matrices[l + 1];
    worst = std::max(worst, (left - right).norm());
  }
  return worst;
}

namespace {

struct SlotChoice {
  double root;
  int group;  // distinct-value group index
};

// Builds the canonical permutation for a support selection: supported slots
// consume indices from their value group in order, everything else fills in
// ascending order.
std::vector<int> assemble_pi(const std::vector<SlotChoice>& chosen,
                             const SpectralDecomposition& sd, int dY) {
  std::vector<int> next_in_group(sd.num_groups());
  for (int g = 0; g < sd.num_groups(); ++g) next_in_group[g] = sd.group_starts[g];
  std::vector<int> pi;
  std::vector<bool> used(dY, false);
  pi.reserve(dY);
  for (const auto& c : chosen) {
    const int idx = next_in_group[c.group]++;
    pi.push_back(idx);
    used[idx] = true;
  }
  for (int i = 0; i < dY && static_cast<int>(pi.size()) < dY; ++i) {
    if (!used[i]) pi.push_back(i);
  }
  return pi;
}

}  // namespace

SpecFamily enumerate_specs(const ProblemSpec& p, const SpectralDecomposition& sd,
                           const EnumerationCaps& caps) {
  const int dY = p.d_Y();
  if (dY > caps.max_d_Y) {
    throw ValidationError("enumeration requires d_Y <= " + std::to_string(caps.max_d_Y) +
                          " (raise the cap to enumerate larger problems)");
  }
  const int dmin = p.d_min();
  const int max_support = caps.max_support < 0 ? dmin : std::min(caps.max_support, dmin);
  const int L = p.depth();

  struct GroupInfo {
    std::vector<double> roots;  // descending
    int mult;
  };
  std::vector<GroupInfo> groups;
  for (int g = 0; g < sd.num_groups(); ++g) {
    groups.push_back({positive_roots(sd.group_value(g), p.lambda, L), sd.multiplicity(g)});
  }

  SpecFamily fam;
  std::set<std::vector<std::pair<double, int>>> dedup;
  std::vector<SlotChoice> chosen;

  // DFS over per-group root counts; choices are (count of larger root, count
  // of smaller root) with total at most the group multiplicity.
  auto emit = [&]() {
    if (static_cast<std::int64_t>(fam.specs.size()) >= caps.max_specs) {
      fam.complete = false;
      return;
    }
    std::vector<SlotChoice> sorted = chosen;
    std::stable_sort(sorted.begin(), sorted.end(), [](const SlotChoice& a, const SlotChoice& b) {
      if (a.root != b.root) return a.root > b.root;
      return a.group < b.group;
    });
    std::vector<std::pair<double, int>> key;
    key.reserve(sorted.size());
    for (const auto& c : sorted) key.emplace_back(c.root, c.group);
    if (!dedup.insert(key).second) return;
    CriticalSpec spec;
    spec.sigma = VectorXd::Zero(dmin);
    for (size_t i = 0; i < sorted.size(); ++i) spec.sigma(static_cast<int>(i)) = sorted[i].root;
    spec.pi = assemble_pi(sorted, sd, dY);
    fam.specs.push_back(std::move(spec));
  };

  std::function<void(int)> dfs = [&](int g) {
    if (!fam.complete) return;
    if (g == static_cast<int>(groups.size())) {
      emit();
      return;
    }
    const auto& info = groups[g];
    const int room = max_support - static_cast<int>(chosen.size());
    const int n_roots = static_cast<int>(info.roots.size());
    // count of each root used in this group; (0,0) first so the zero spec leads
    for (int a = 0; a <= (n_roots >= 1 ? std::min(info.mult, room) : 0); ++a) {
      const int room_b = std::min(info.mult - a, room - a);
      for (int b = 0; b <= (n_roots >= 2 ? room_b : 0); ++b) {
        const size_t mark = chosen.size();
        for (int k = 0; k < a; ++k) chosen.push_back({info.roots[0], g});
        for (int k = 0; k < b; ++k) chosen.push_back({info.roots[1], g});
        dfs(g + 1);
        chosen.resize(mark);
      }
    }
  };
  dfs(0);

  if (max_support < dmin && dmin > 0) fam.complete = false;
  return fam;
}

GlobalSpecs global_specs(const ProblemSpec& p, const SpectralDecomposition& sd,
                         double tie_tol) {
  const int dmin = p.d_min();
  const int dY = p.d_Y();
  const int L = p.depth();
  GlobalSpecs out;

  std::vector<int> identity(dY);
  for (int i = 0; i < dY; ++i) identity[i] = i;

  if (L == 2) {
    CriticalSpec spec;
    spec.sigma = VectorXd::Zero(dmin);
    for (int i = 0; i < dmin; ++i) {
      const double s = std::sqrt(p.lambda) * sd.y(i) - p.lambda;
      spec.sigma(i) = s > 0.0 ? std::sqrt(s) : 0.0;
    }
    spec.pi = identity;
    out.specs.push_back(std::move(spec));
    return out;
  }

  std::vector<std::vector<double>> choices(dmin);
  for (int i = 0; i < dmin; ++i) {
    choices[i] = scalar_argmin_g(sd.y(i), p.lambda, L, tie_tol).argmin_set;
  }
  std::vector<double> current(dmin, 0.0);
  std::set<std::vector<double>> dedup;
  std::function<void(int)> pick = [&](int i) {
    if (i == dmin) {
      for (int k = 1; k < dmin; ++k) {
        if (current[k] > current[k - 1]) return;  // keep sorted selections only
      }
      if (!dedup.insert(current).second) return;
      CriticalSpec spec;
      spec.sigma = Eigen::Map<const VectorXd>(current.data(), dmin);
      spec.pi = identity;
      out.specs.push_back(std::move(spec));
      return;
    }
    for (double v : choices[i]) {
      current[i] = v;
      pick(i + 1);
    }
  };
  pick(0);
  out.ambiguous_ties = out.specs.size() > 1;
  return out;
}

}  // namespace dmf
