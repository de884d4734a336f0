#include "dmf/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace dmf {

namespace {

const std::set<std::string> kMetaKeys = {"config", "generator", "timestamp", "schema", "note"};

double number_at(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ParseError(ctx + ": missing or non-numeric field '" + key + "'");
  }
  return j.at(key).get<double>();
}

VectorXd vector_from(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw ParseError(ctx + " must be an array of numbers");
  VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError(ctx + "[" + std::to_string(i) + "] must be a number");
    v(static_cast<int>(i)) = j[i].get<double>();
  }
  return v;
}

MatrixXd matrix_from(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) throw ParseError(ctx + " must be a nonempty array of rows");
  const size_t rows = j.size();
  const size_t cols = j[0].is_array() ? j[0].size() : 0;
  MatrixXd m(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw ParseError(ctx + ": ragged or non-array row " + std::to_string(i));
    }
    for (size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) {
        throw ParseError(ctx + ": non-numeric entry at (" + std::to_string(i) + "," +
                         std::to_string(k) + ")");
      }
      m(static_cast<int>(i), static_cast<int>(k)) = j[i][k].get<double>();
    }
  }
  return m;
}

json vector_to(const VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json matrix_to(const MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON at byte ") + std::to_string(e.byte) + ": " +
                     e.what());
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str());
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& context) {
  if (!j.is_object()) throw ParseError(context + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key()) && !kMetaKeys.count(it.key())) {
      throw ParseError(context + ": unknown key '" + it.key() + "'");
    }
  }
}

ProblemSpec problem_from_json(const json& j) {
  check_keys(j, {"dims", "lambdas", "Y"}, "problem");
  if (!j.contains("dims") || !j.contains("lambdas") || !j.contains("Y")) {
    throw ParseError("problem needs 'dims', 'lambdas', and 'Y'");
  }
  ProblemSpec p;
  for (const auto& d : j.at("dims")) {
    if (!d.is_number_integer() || d.get<long long>() < 1) {
      throw ParseError("problem.dims entries must be positive integers");
    }
    p.dims.push_back(d.get<int>());
  }
  p.lambdas = vector_from(j.at("lambdas"), "problem.lambdas");
  p.lambda = 1.0;
  for (int l = 0; l < p.lambdas.size(); ++l) p.lambda *= p.lambdas(l);

  const json& Y = j.at("Y");
  check_keys(Y, {"dense", "singular_values"}, "problem.Y");
  if (Y.contains("dense") == Y.contains("singular_values")) {
    throw ParseError("problem.Y needs exactly one of 'dense' or 'singular_values'");
  }
  if (p.dims.size() < 2) throw ParseError("problem.dims must list d_0..d_L");
  const int dl = p.dims.back(), d0 = p.dims.front();
  if (Y.contains("dense")) {
    p.Y = matrix_from(Y.at("dense"), "problem.Y.dense");
  } else {
    const VectorXd sv = vector_from(Y.at("singular_values"), "problem.Y.singular_values");
    const int dY = std::min(d0, dl);
    if (sv.size() > dY) {
      throw ParseError("problem.Y.singular_values has more entries than min(d_0, d_L)");
    }
    for (int i = 0; i < sv.size(); ++i) {
      if (sv(i) < 0.0) throw ParseError("singular values must be nonnegative");
      if (i > 0 && sv(i) > sv(i - 1)) {
        throw ParseError("singular values must be sorted nonincreasing");
      }
    }
    p.Y = MatrixXd::Zero(dl, d0);
    for (int i = 0; i < sv.size(); ++i) p.Y(i, i) = sv(i);
    p.spectral_input = true;
  }
  p.validate();
  return p;
}

json problem_to_json(const ProblemSpec& p) {
  json j;
  j["dims"] = p.dims;
  j["lambdas"] = vector_to(p.lambdas);
  if (p.spectral_input) {
    json sv = json::array();
    for (int i = 0; i < p.d_Y(); ++i) sv.push_back(p.Y(i, i));
    j["Y"] = {{"singular_values", sv}};
  } else {
    j["Y"] = {{"dense", matrix_to(p.Y)}};
  }
  return j;
}

CriticalSpec spec_from_json(const json& j) {
  check_keys(j, {"sigma", "pi", "problem", "id", "r_sigma", "labels"}, "spec");
  if (!j.contains("sigma") || !j.contains("pi")) throw ParseError("spec needs 'sigma' and 'pi'");
  CriticalSpec s;
  s.sigma = vector_from(j.at("sigma"), "spec.sigma");
  for (const auto& v : j.at("pi")) {
    if (!v.is_number_integer()) throw ParseError("spec.pi entries must be integers");
    s.pi.push_back(v.get<int>());
  }
  return s;
}

json spec_to_json(const CriticalSpec& s) {
  json j;
  j["sigma"] = vector_to(s.sigma);
  j["pi"] = s.pi;
  return j;
}

CriticalSpec spec_from_document(const json& j, int index, ProblemSpec* embedded_problem) {
  if (embedded_problem && j.is_object() && j.contains("problem")) {
    *embedded_problem = problem_from_json(j.at("problem"));
  }
  if (j.is_object() && j.contains("specs")) {
    const json& specs = j.at("specs");
    if (!specs.is_array() || specs.empty()) throw ParseError("'specs' must be a nonempty array");
    if (index < 0 || index >= static_cast<int>(specs.size())) {
      throw ParseError("spec index " + std::to_string(index) + " out of range (file has " +
                       std::to_string(specs.size()) + " specs)");
    }
    return spec_from_json(specs[index]);
  }
  return spec_from_json(j);
}

FactorStack stack_from_json(const json& j, std::string* coord) {
  const json* doc = &j;
  if (j.is_object() && j.contains("stack")) doc = &j.at("stack");
  check_keys(*doc, {"coord", "matrices"}, "stack");
  if (!doc->contains("matrices")) throw ParseError("stack needs 'matrices'");
  if (coord) *coord = doc->value("coord", "F");
  FactorStack w;
  const json& mats = doc->at("matrices");
  if (!mats.is_array() || mats.empty()) throw ParseError("stack.matrices must be a nonempty array");
  for (size_t l = 0; l < mats.size(); ++l) {
    w.matrices.push_back(matrix_from(mats[l], "stack.matrices[" + std::to_string(l) + "]"));
  }
  return w;
}

json stack_to_json(const FactorStack& w, const std::string& coord) {
  json mats = json::array();
  for (const auto& m : w.matrices) mats.push_back(matrix_to(m));
  json j;
  j["coord"] = coord;
  j["matrices"] = std::move(mats);
  return j;
}

json thresholds_to_json(const Thresholds& t) {
  return json{{"x_star", t.x_star}, {"y_star", t.y_star}, {"lambda", t.lambda}, {"depth", t.depth}};
}

json root_profile_to_json(const RootProfile& rp) {
  json j;
  j["y"] = rp.y;
  j["lambda"] = rp.lambda;
  j["depth"] = rp.depth;
  j["kind"] = root_kind_name(rp.kind);
  json roots = json::array();
  for (const auto& [x, label] : rp.labeled_roots()) {
    roots.push_back({{"x", x}, {"label", root_label_name(label)}});
  }
  j["roots"] = std::move(roots);
  j["x_star"] = rp.thr.x_star;
  j["y_star"] = rp.thr.y_star;
  return j;
}

json scalar_min_to_json(const ScalarMinResult& m) {
  return json{
      {"y", m.y}, {"argmin_set", m.argmin_set}, {"min_value", m.min_value}, {"tie", m.tie}};
}

json family_to_json(const SpecFamily& fam) {
  json specs = json::array();
  for (size_t i = 0; i < fam.specs.size(); ++i) {
    json s = spec_to_json(fam.specs[i]);
    s["id"] = i;
    s["r_sigma"] = fam.specs[i].support();
    specs.push_back(std::move(s));
  }
  return json{{"complete", fam.complete}, {"specs", std::move(specs)}};
}

json validation_to_json(const ValidationReport& rep) {
  json j{{"ok", rep.ok}};
  if (!rep.ok) j["violation"] = rep.message;
  return j;
}

json classification_to_json(const Classification& c) {
  json j;
  j["class"] = crit_class_name(c.cls);
  j["clause"] = c.clause;
  j["rationale"] = c.rationale;
  j["r_sigma"] = c.r_sigma;
  json labels = json::array();
  for (const auto& l : c.labels) labels.push_back(root_label_name(l));
  j["labels"] = std::move(labels);
  return j;
}

json certificate_to_json(const Certificate& cert) {
  json j;
  j["kind"] = certificate_kind_name(cert.kind);
  j["expected_quadform"] = cert.expected_quadform;
  if (cert.kind == CertificateKind::CubicNonStrict) {
    j["cubic_coefficient"] = cert.cubic_coefficient;
  }
  j["slot"] = cert.slot;
  if (cert.partner >= 0) j["partner"] = cert.partner;
  j["direction"] = stack_to_json(cert.direction, loss_name(cert.coord));
  return j;
}

json regularization_to_json(const RegularizationReport& rep) {
  json lc = json::array();
  for (double v : rep.lambda_crit) {
    if (std::isnan(v)) {
      lc.push_back(nullptr);
    } else {
      lc.push_back(v);
    }
  }
  return json{{"lambda", rep.lambda},
              {"lambda_critical", std::move(lc)},
              {"benign", rep.benign},
              {"violating_indices", rep.violating_indices}};
}

json probe_to_json(const ProbeReport& rep) {
  json j;
  j["n"] = rep.n_samples;
  j["seed"] = rep.seed;
  j["loss"] = loss_name(rep.loss);
  j["min_quadform"] = rep.min_quadform;
  j["max_quadform"] = rep.max_quadform;
  j["argmin_sample"] = rep.argmin_sample;
  if (!rep.certificate_quadforms.empty()) {
    j["certificate_quadforms"] = rep.certificate_quadforms;
  }
  return j;
}

json numeric_classification_to_json(const NumericClassification& nc) {
  json j;
  j["classification"] = classification_to_json(nc.classification);
  j["grad_norm"] = nc.grad_norm;
  j["sigma_estimate"] = vector_to(nc.sigma_estimate);
  j["unmatched"] = nc.unmatched;
  if (nc.matched_spec) {
    j["matched_spec"] = spec_to_json(*nc.matched_spec);
    j["snap_distance"] = nc.snap_distance;
  }
  if (!nc.note.empty()) j["note"] = nc.note;
  return j;
}

json train_to_json(const TrainResult& res) {
  json j;
  j["iterations"] = res.iterations;
  j["terminal_grad_norm"] = res.terminal_grad_norm;
  j["terminal_loss"] = res.terminal_loss;
  j["step_used"] = res.step_used;
  j["converged"] = res.converged;
  j["diverged"] = res.diverged;
  j["decimation"] = res.decimation;
  j["trajectory"] = res.trajectory;
  j["stack"] = stack_to_json(res.terminal, "F");
  if (res.terminal_class) j["terminal_class"] = numeric_classification_to_json(*res.terminal_class);
  return j;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string landscape_to_csv(const LandscapeGrid& grid, const std::string& header_comment) {
  std::string out;
  out.reserve(grid.alphas.size() * grid.betas.size() * 32 + header_comment.size());
  out += header_comment;
  out += "alpha,beta,value\n";
  for (size_t i = 0; i < grid.alphas.size(); ++i) {
    for (size_t j = 0; j < grid.betas.size(); ++j) {
      out += format_double(grid.alphas[i]);
      out += ',';
      out += format_double(grid.betas[j]);
      out += ',';
      out += format_double(grid.values(static_cast<int>(i), static_cast<int>(j)));
      out += '\n';
    }
  }
  return out;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot open output file: " + tmp);
    out << content;
    if (!out.good()) throw ParseError("failed writing: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw ParseError("failed renaming " + tmp + " to " + path);
  }
}

}  // namespace dmf
