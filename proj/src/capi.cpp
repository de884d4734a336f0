// extern-C surface of the shared library. Exceptions from the core map to
// status codes; messages land in a thread-local buffer.
#include "dmfland.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <string>

#include "dmf/io.hpp"
#include "dmf/version.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

dmfland_status fail(dmfland_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <typename Fn>
dmfland_status guard(Fn&& fn) {
  try {
    fn();
    return DMFLAND_OK;
  } catch (const dmf::ParseError& e) {
    return fail(DMFLAND_ERR_PARSE, e.what());
  } catch (const dmf::ValidationError& e) {
    return fail(DMFLAND_ERR_DOMAIN, e.what());
  } catch (const dmf::NumericError& e) {
    return fail(DMFLAND_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return fail(DMFLAND_ERR_NUMERIC, e.what());
  }
}

dmf::Loss loss_from(const char* which) {
  if (which && std::string(which) == "G") return dmf::Loss::G;
  if (which && std::string(which) == "F") return dmf::Loss::F;
  throw dmf::ValidationError("loss selector must be \"F\" or \"G\"");
}

}  // namespace

struct dmfland_problem {
  dmf::ProblemSpec spec;
  dmf::SpectralDecomposition sd;
};

struct dmfland_stack {
  dmf::FactorStack stack;
  std::string coord;
};

extern "C" {

const char* dmfland_version(void) { return dmf::kVersion; }

const char* dmfland_last_error(void) { return g_last_error.c_str(); }

void dmfland_free_string(char* s) { delete[] s; }

dmfland_status dmfland_problem_from_json(const char* json_text, dmfland_problem** out) {
  if (!json_text || !out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard([&] {
    auto p = std::make_unique<dmfland_problem>();
    p->spec = dmf::problem_from_json(dmf::parse_json_text(json_text));
    p->sd = dmf::spectral_decompose(p->spec);
    *out = p.release();
  });
}

void dmfland_problem_free(dmfland_problem* p) { delete p; }

dmfland_status dmfland_stack_from_json(const char* json_text, dmfland_stack** out) {
  if (!json_text || !out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard([&] {
    auto w = std::make_unique<dmfland_stack>();
    w->stack = dmf::stack_from_json(dmf::parse_json_text(json_text), &w->coord);
    *out = w.release();
  });
}

dmfland_status dmfland_stack_to_json(const dmfland_stack* w, char** json_out) {
  if (!w || !json_out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard([&] { *json_out = dup_string(dmf::stack_to_json(w->stack, w->coord).dump()); });
}

void dmfland_stack_free(dmfland_stack* w) { delete w; }

dmfland_status dmfland_analyze_roots(double y, double lambda, int depth, double tol,
                                     double eq_tol, char** json_out) {
  if (!json_out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard([&] {
    const dmf::RootProfile rp =
        dmf::root_profile(y, lambda, depth, tol > 0 ? tol : 1e-14, eq_tol > 0 ? eq_tol : 1e-9);
    *json_out = dup_string(dmf::root_profile_to_json(rp).dump());
  });
}

dmfland_status dmfland_validate(const dmfland_problem* p, const char* spec_json,
                                char** json_out) {
  if (!p || !spec_json || !json_out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard([&] {
    const dmf::CriticalSpec spec = dmf::spec_from_json(dmf::parse_json_text(spec_json));
    *json_out =
        dup_string(dmf::validation_to_json(dmf::validate_spec(p->spec, p->sd, spec)).dump());
  });
}

dmfland_status dmfland_construct(const dmfland_problem* p, const char* spec_json,
                                 const char* coord, const char* dressing, uint64_t seed,
                                 dmfland_stack** out) {
  if (!p || !spec_json || !out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard([&] {
    const dmf::CriticalSpec spec = dmf::spec_from_json(dmf::parse_json_text(spec_json));
    const dmf::Loss c = loss_from(coord);
    dmf::Dressing dr;
    const std::string mode = dressing ? dressing : "canonical";
    if (mode == "canonical") {
      dr = dmf::canonical_dressing(p->spec, p->sd);
    } else if (mode == "random") {
      dr = dmf::random_dressing(p->spec, p->sd, seed);
    } else {
      throw dmf::ValidationError("dressing must be \"canonical\" or \"random\"");
    }
    auto w = std::make_unique<dmfland_stack>();
    w->stack = dmf::construct(p->spec, p->sd, spec, dr, c);
    w->coord = dmf::loss_name(c);
    *out = w.release();
  });
}

dmfland_status dmfland_enumerate(const dmfland_problem* p, int max_support, int max_d_y,
                                 int64_t max_specs, char** json_out) {
  if (!p || !json_out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard([&] {
    dmf::EnumerationCaps caps;
    if (max_support >= 0) caps.max_support = max_support;
    if (max_d_y > 0) caps.max_d_Y = max_d_y;
    if (max_specs > 0) caps.max_specs = max_specs;
    *json_out = dup_string(
        dmf::family_to_json(dmf::enumerate_specs(p->spec, p->sd, caps)).dump());
  });
}

dmfland_status dmfland_global_specs(const dmfland_problem* p, char** json_out) {
  if (!p || !json_out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard([&] {
    const dmf::GlobalSpecs gs = dmf::global_specs(p->spec, p->sd);
    dmf::json j;
    j["ambiguous_ties"] = gs.ambiguous_ties;
    dmf::json specs = dmf::json::array();
    for (const auto& s : gs.specs) specs.push_back(dmf::spec_to_json(s));
    j["specs"] = std::move(specs);
    *json_out = dup_string(j.dump());
  });
}

dmfland_status dmfland_classify(const dmfland_problem* p, const char* spec_json,
                                char** json_out) {
  if (!p || !spec_json || !json_out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard([&] {
    const dmf::CriticalSpec spec = dmf::spec_from_json(dmf::parse_json_text(spec_json));
    const dmf::Classification c = dmf::classify(p->spec, p->sd, spec);
    dmf::json j = dmf::classification_to_json(c);
    if (auto kind = dmf::certificate_kind_for(c)) {
      const dmf::Certificate cert = dmf::certificate_direction(
          p->spec, p->sd, spec, *kind, dmf::canonical_dressing(p->spec, p->sd), dmf::Loss::G);
      j["certificate"] = dmf::certificate_to_json(cert);
    }
    if (c.cls != dmf::CritClass::Unsupported) {
      j["global_min_value_F"] = dmf::global_min_value(p->spec, p->sd, dmf::Loss::F);
    }
    *json_out = dup_string(j.dump());
  });
}

dmfland_status dmfland_check_lambda(const dmfland_problem* p, double eq_tol, char** json_out) {
  if (!p || !json_out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard([&] {
    const dmf::RegularizationReport rep =
        dmf::check_partially_benign(p->spec, p->sd, eq_tol > 0 ? eq_tol : 1e-9);
    *json_out = dup_string(dmf::regularization_to_json(rep).dump());
  });
}

dmfland_status dmfland_atlas(const dmfland_problem* p, int probe_n, uint64_t probe_seed,
                             int max_d_y, char** json_out) {
  if (!p || !json_out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard([&] {
    dmf::EnumerationCaps caps;
    if (max_d_y > 0) caps.max_d_Y = max_d_y;
    const dmf::SpecFamily fam = dmf::enumerate_specs(p->spec, p->sd, caps);
    const dmf::Dressing canon = dmf::canonical_dressing(p->spec, p->sd);
    dmf::json rows = dmf::json::array();
    for (size_t i = 0; i < fam.specs.size(); ++i) {
      const auto& spec = fam.specs[i];
      const dmf::Classification c = dmf::classify(p->spec, p->sd, spec);
      const dmf::FactorStack w = dmf::construct(p->spec, p->sd, spec, canon, dmf::Loss::F);
      const dmf::ProbeReport probe = dmf::probe_min_quadform(
          p->spec, w, dmf::Loss::F, probe_n > 0 ? probe_n : 200, probe_seed);
      rows.push_back({{"id", i},
                      {"r_sigma", spec.support()},
                      {"class", dmf::crit_class_name(c.cls)},
                      {"loss_F", dmf::loss_F(p->spec, w)},
                      {"min_probe", probe.min_quadform}});
    }
    dmf::json j;
    j["complete"] = fam.complete;
    j["rows"] = std::move(rows);
    *json_out = dup_string(j.dump());
  });
}

dmfland_status dmfland_global_min_value(const dmfland_problem* p, const char* coord,
                                        double* out) {
  if (!p || !out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard([&] { *out = dmf::global_min_value(p->spec, p->sd, loss_from(coord)); });
}

dmfland_status dmfland_loss(const dmfland_problem* p, const dmfland_stack* w,
                            const char* which, double* out) {
  if (!p || !w || !out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard([&] { *out = dmf::loss(p->spec, w->stack, loss_from(which)); });
}

dmfland_status dmfland_grad_norm(const dmfland_problem* p, const dmfland_stack* w,
                                 const char* which, double* out) {
  if (!p || !w || !out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard(
      [&] { *out = dmf::stack_norm(dmf::grad(p->spec, w->stack, loss_from(which))); });
}

dmfland_status dmfland_probe(const dmfland_problem* p, const dmfland_stack* w,
                             const char* loss_sel, int n, uint64_t seed, char** json_out) {
  if (!p || !w || !json_out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard([&] {
    const dmf::ProbeReport rep =
        dmf::probe_min_quadform(p->spec, w->stack, loss_from(loss_sel), n, seed);
    *json_out = dup_string(dmf::probe_to_json(rep).dump());
  });
}

dmfland_status dmfland_verify_stack(const dmfland_problem* p, const dmfland_stack* w,
                                    int probe_n, uint64_t probe_seed, char** json_out) {
  if (!p || !w || !json_out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard([&] {
    dmf::json j;
    const dmf::FactorStack& stack = w->stack;
    const double gnorm = dmf::stack_norm(dmf::grad_F(p->spec, stack));
    j["grad_norm_F"] = gnorm;
    j["loss_F"] = dmf::loss_F(p->spec, stack);
    j["balancedness_residual_G"] = dmf::balancedness_residual(
        dmf::rescale_F_to_G(stack, p->spec.lambdas));
    const dmf::FactorStack fd = dmf::fd_gradient(p->spec, stack, 1e-6, dmf::Loss::F);
    const dmf::FactorStack an = dmf::grad_F(p->spec, stack);
    double worst = 0.0;
    for (int l = 0; l < an.depth(); ++l) {
      worst = std::max(worst,
                       (an.matrices[l] - fd.matrices[l]).cwiseAbs().maxCoeff() /
                           (1.0 + an.matrices[l].cwiseAbs().maxCoeff()));
    }
    j["fd_gradient_max_rel_err"] = worst;
    try {
      const dmf::NumericClassification nc = dmf::classify_numerically(
          p->spec, p->sd, stack, {}, probe_seed, probe_n > 0 ? probe_n : 200);
      j["numeric_classification"] = dmf::numeric_classification_to_json(nc);
    } catch (const dmf::ValidationError& e) {
      j["numeric_classification"] = nullptr;
      j["note"] = e.what();
    }
    *json_out = dup_string(j.dump());
  });
}

dmfland_status dmfland_train(const dmfland_problem* p, const dmfland_stack* init_or_null,
                             uint64_t seed, double step, int64_t max_iter, double grad_tol,
                             char** json_out) {
  if (!p || !json_out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard([&] {
    dmf::TrainConfig cfg;
    if (step > 0) cfg.step = step;
    if (max_iter > 0) cfg.max_iter = max_iter;
    if (grad_tol > 0) cfg.grad_tol = grad_tol;
    const dmf::FactorStack init =
        init_or_null ? init_or_null->stack : dmf::random_init(p->spec, seed);
    const dmf::TrainResult res = dmf::gradient_descent(p->spec, p->sd, init, cfg);
    dmf::json j = dmf::train_to_json(res);
    j["seed"] = seed;
    j["step"] = cfg.step;
    *json_out = dup_string(j.dump());
  });
}

dmfland_status dmfland_landscape(const dmfland_problem* p, const dmfland_stack* ref,
                                 const char* loss_sel, uint64_t seed, double half_range,
                                 int resolution, double* ref_out, char** csv_out) {
  if (!p || !ref || !csv_out) return fail(DMFLAND_ERR_PARSE, "null argument");
  return guard([&] {
    const dmf::LandscapeGrid grid = dmf::landscape_slice(
        p->spec, ref->stack, loss_from(loss_sel), seed, half_range, resolution);
    if (ref_out) *ref_out = grid.reference;
    *csv_out = dup_string(dmf::landscape_to_csv(grid, ""));
  });
}

}  // extern "C"
