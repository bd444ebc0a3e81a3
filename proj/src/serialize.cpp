#include "condot/serialize.hpp"

#include "json.hpp"

#include "condot/bayes_gmm.hpp"
#include "condot/nn.hpp"
#include "condot/ot_exact.hpp"

namespace condot {

using nlohmann::json;

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from_json(const json& a, const char* what) {
  if (!a.is_array()) throw ValidationError(std::string(what) + ": expected array");
  Eigen::VectorXd v(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number())
      throw ValidationError(std::string(what) + ": expected numeric entries");
    v[static_cast<int>(i)] = a[i].get<double>();
  }
  return v;
}

void require_keys(const json& obj, std::initializer_list<const char*> keys,
                  const char* what) {
  if (!obj.is_object())
    throw ValidationError(std::string(what) + ": expected object");
  for (const char* k : keys)
    if (!obj.contains(k))
      throw ValidationError(std::string(what) + ": missing key '" + k + "'");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* key : keys) known |= k == key;
    if (!known)
      throw ValidationError(std::string(what) + ": unknown key '" + k + "'");
  }
}

json parse(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw ValidationError(std::string(what) + ": malformed JSON");
  return j;
}

} // namespace

std::string measure_to_json(const DiscreteJointMeasure& mu) {
  json doc;
  doc["d"] = mu.dim_y();
  doc["m"] = mu.dim_x();
  json atoms = json::array();
  for (int i = 0; i < mu.num_atoms(); ++i) {
    json a;
    a["y"] = vec_to_json(mu.ys.row(i).transpose());
    a["x"] = vec_to_json(mu.xs.row(i).transpose());
    a["w"] = mu.weights[i];
    atoms.push_back(std::move(a));
  }
  doc["atoms"] = std::move(atoms);
  return doc.dump();
}

DiscreteJointMeasure measure_from_json(const std::string& text) {
  const json doc = parse(text, "measure");
  require_keys(doc, {"d", "m", "atoms"}, "measure");
  if (!doc["d"].is_number_integer() || !doc["m"].is_number_integer())
    throw ValidationError("measure: d and m must be integers");
  const int d = doc["d"].get<int>(), m = doc["m"].get<int>();
  const auto& atoms = doc["atoms"];
  if (!atoms.is_array() || atoms.empty())
    throw ValidationError("measure: atoms must be a nonempty array");

  DiscreteJointMeasure mu;
  const int n = static_cast<int>(atoms.size());
  mu.ys.resize(n, d);
  mu.xs.resize(n, m);
  mu.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    require_keys(atoms[i], {"y", "x", "w"}, "measure atom");
    const Eigen::VectorXd y = vec_from_json(atoms[i]["y"], "measure atom y");
    const Eigen::VectorXd x = vec_from_json(atoms[i]["x"], "measure atom x");
    if (y.size() != d || x.size() != m)
      throw ValidationError("measure: atom dimension mismatch");
    mu.ys.row(i) = y.transpose();
    mu.xs.row(i) = x.transpose();
    if (!atoms[i]["w"].is_number())
      throw ValidationError("measure: atom weight must be numeric");
    mu.weights[i] = atoms[i]["w"].get<double>();
  }
  mu.validate();
  return mu;
}

std::string plan_to_json(const Plan4& plan, double value) {
  json doc;
  json entries = json::array();
  for (const auto& e : plan.entries) {
    json row;
    row["i"] = e.i;
    row["j"] = e.j;
    row["m"] = e.mass;
    entries.push_back(std::move(row));
  }
  doc["entries"] = std::move(entries);
  doc["y_diagonal"] = plan.y_diagonal;
  doc["value"] = value;
  return doc.dump();
}

std::string model_to_json(const VelocityModel& model) {
  json doc;
  doc["version"] = 1;
  doc["dim_y"] = model.dim_y;
  doc["dim_x"] = model.dim_x;
  doc["hidden"] = model.hidden;
  const Eigen::VectorXd p = model.flatten();
  json params = json::array();
  for (int i = 0; i < p.size(); ++i) params.push_back(p[i]);
  doc["params"] = std::move(params);
  return doc.dump();
}

VelocityModel model_from_json(const std::string& text) {
  const json doc = parse(text, "model");
  require_keys(doc, {"version", "dim_y", "dim_x", "hidden", "params"}, "model");
  if (doc["version"].get<int>() != 1)
    throw ValidationError("model: unsupported checkpoint version");
  VelocityModel m = VelocityModel::create(doc["dim_y"].get<int>(),
                                          doc["dim_x"].get<int>(),
                                          doc["hidden"].get<std::vector<int>>(), 0);
  m.unflatten(vec_from_json(doc["params"], "model params"));
  return m;
}

std::string gmm_to_json(const GmmModel& gmm) {
  json doc;
  doc["weights"] = vec_to_json(gmm.weights);
  json means = json::array(), vars = json::array();
  for (int c = 0; c < gmm.components(); ++c) {
    means.push_back(vec_to_json(gmm.means[c]));
    vars.push_back(vec_to_json(gmm.var_diag[c]));
  }
  doc["means"] = std::move(means);
  doc["var_diag"] = std::move(vars);
  return doc.dump();
}

GmmModel gmm_from_json(const std::string& text) {
  const json doc = parse(text, "gmm");
  require_keys(doc, {"weights", "means", "var_diag"}, "gmm");
  GmmModel gmm;
  gmm.weights = vec_from_json(doc["weights"], "gmm weights");
  for (const auto& m : doc["means"]) gmm.means.push_back(vec_from_json(m, "gmm mean"));
  for (const auto& v : doc["var_diag"])
    gmm.var_diag.push_back(vec_from_json(v, "gmm var"));
  gmm.validate();
  return gmm;
}

} // namespace condot
