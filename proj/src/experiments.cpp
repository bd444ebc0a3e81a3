#include "condot/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "condot/bayes_gmm.hpp"
#include "condot/flow_matching.hpp"
#include "condot/geodesics.hpp"
#include "condot/measures.hpp"
#include "condot/nn.hpp"
#include "condot/ot_exact.hpp"
#include "condot/particle_flow.hpp"
#include "condot/rng.hpp"
#include "condot/serialize.hpp"
#include "condot/sinkhorn.hpp"

namespace condot {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- utilities

json parse_config(const std::string& text) {
  if (text.empty()) return json::object();
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("config: malformed JSON");
  if (!j.is_object()) throw ValidationError("config: expected an object");
  return j;
}

// Defaults merged with user keys; unknown keys are rejected.
json merge_config(const json& defaults, const json& user) {
  json out = defaults;
  for (const auto& [k, v] : user.items()) {
    if (!defaults.contains(k))
      throw ValidationError("config: unknown key '" + k + "'");
    if (defaults[k].is_number() && !v.is_number() && !defaults[k].is_boolean())
      if (!v.is_number())
        throw ValidationError("config: key '" + k + "' must be numeric");
    out[k] = v;
  }
  return out;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw NumericError("cannot write " + path.string());
  os << text;
}

struct RunDir {
  fs::path root;
  fs::path artifacts;
};

RunDir make_run_dir(const std::string& out_dir, const std::string& command,
                    int64_t seed) {
  fs::path base = fs::path(out_dir) / command;
  fs::create_directories(base);
  std::string stamp = timestamp_utc() + "-seed" + std::to_string(seed);
  fs::path dir = base / stamp;
  for (int k = 1; fs::exists(dir); ++k) dir = base / (stamp + "-" + std::to_string(k));
  RunDir rd{dir, dir / "artifacts"};
  fs::create_directories(rd.artifacts);
  return rd;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  std::vector<std::thread> workers;
  for (int t = 0; t < jobs; ++t)
    workers.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string csv_num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// ------------------------------------------------------------ constructions

// Two-condition instance with payloads swapped across conditions: the joint
// distance stays at 1 while the conditional distance scales with n.
std::pair<DiscreteJointMeasure, DiscreteJointMeasure> crossing_instance(double n) {
  DiscreteJointMeasure mu, nu;
  mu.ys.resize(2, 1);
  mu.xs.resize(2, 1);
  mu.weights = Eigen::VectorXd::Constant(2, 0.5);
  nu = mu;
  mu.ys << 0, 1;
  mu.xs << 0, n;
  nu.ys << 1, 0;
  nu.xs << 0, n;
  return {mu, nu};
}

// Independent 1-D standard normal triple (y, x, z): both measures share the
// sampled conditions; payloads are independent draws.
std::pair<DiscreteJointMeasure, DiscreteJointMeasure>
independent_normals_instance(int n, uint64_t seed) {
  Rng rng(seed);
  DiscreteJointMeasure mu, nu;
  mu.ys.resize(n, 1);
  mu.xs.resize(n, 1);
  mu.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
  nu = mu;
  for (int i = 0; i < n; ++i) {
    const double y = rng.normal();
    mu.ys(i, 0) = y;
    nu.ys(i, 0) = y;
    mu.xs(i, 0) = rng.normal();
    nu.xs(i, 0) = rng.normal();
  }
  return {mu, nu};
}

// Random pair sharing P_Y with per-condition atom counts and weights drawn
// freely (exercises the general transport route).
std::pair<DiscreteJointMeasure, DiscreteJointMeasure>
random_general_instance(uint64_t seed, int d, int m, int max_conditions,
                        int max_atoms) {
  Rng rng(seed);
  const int K = 1 + static_cast<int>(rng.uniform_int(max_conditions));

  Eigen::VectorXd group_w(K);
  for (int k = 0; k < K; ++k) group_w[k] = 0.2 + rng.uniform();
  group_w /= group_w.sum();

  Eigen::MatrixXd cond(K, d);
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < d; ++j) cond(k, j) = 3.0 * rng.normal();

  auto side = [&](Rng& r) {
    std::vector<Eigen::RowVectorXd> ys, xs;
    std::vector<double> ws;
    for (int k = 0; k < K; ++k) {
      const int na = 1 + static_cast<int>(r.uniform_int(max_atoms));
      Eigen::VectorXd cw(na);
      for (int a = 0; a < na; ++a) cw[a] = 0.2 + r.uniform();
      cw /= cw.sum();
      for (int a = 0; a < na; ++a) {
        Eigen::RowVectorXd x(m);
        for (int j = 0; j < m; ++j) x[j] = r.normal();
        ys.push_back(cond.row(k));
        xs.push_back(x);
        ws.push_back(group_w[k] * cw[a]);
      }
    }
    DiscreteJointMeasure out;
    const int n = static_cast<int>(ws.size());
    out.ys.resize(n, d);
    out.xs.resize(n, m);
    out.weights.resize(n);
    for (int i = 0; i < n; ++i) {
      out.ys.row(i) = ys[i];
      out.xs.row(i) = xs[i];
      out.weights[i] = ws[i];
    }
    // renormalize away accumulated rounding
    out.weights /= out.weights.sum();
    return out;
  };
  Rng ra = rng.split(1), rb = rng.split(2);
  return {side(ra), side(rb)};
}

std::string forward_to_json(const LinearGaussianForward& fwd) {
  json doc;
  doc["f_diag"] = std::vector<double>(fwd.f_diag.data(),
                                      fwd.f_diag.data() + fwd.f_diag.size());
  doc["noise_std"] = fwd.noise_std;
  return doc.dump();
}

LinearGaussianForward forward_from_json(const std::string& text) {
  json doc = json::parse(text);
  LinearGaussianForward fwd;
  const auto v = doc.at("f_diag").get<std::vector<double>>();
  fwd.f_diag = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  fwd.noise_std = doc.at("noise_std").get<double>();
  fwd.validate();
  return fwd;
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// ------------------------------------------------------------------ commands

json cmd_counterexample(const json& cfg, const RunDir& rd, int) {
  const double n = cfg.at("n").get<double>();
  if (!(n > 1)) throw ValidationError("counterexample: n must be > 1");
  const auto [mu, nu] = crossing_instance(n);

  const double w1 = wasserstein_joint(mu, nu, 1.0).value;
  const double w1y = conditional_wasserstein(mu, nu, 1.0).value;
  const double expected = n;
  // summation product metric ||x1-x2|| + ||y1-y2||
  const double w1_sum = relaxed_wasserstein(mu, nu, {1.0, 1.0, false}).value;

  std::ostringstream csv;
  csv << "n,W1,W1Y,expected,W1_sum_metric\n"
      << csv_num(n) << "," << csv_num(w1) << "," << csv_num(w1y) << ","
      << csv_num(expected) << "," << csv_num(w1_sum) << "\n";
  write_file(rd.root / "metrics.csv", csv.str());

  json report;
  report["n"] = n;
  report["W1"] = w1;
  report["W1Y"] = w1y;
  report["expected"] = expected;
  report["W1_sum_metric"] = w1_sum;
  report["strict_inequality"] = w1 < w1y;
  report["strict_inequality_sum_metric"] = w1_sum < w1y;
  return report;
}

json cmd_beta_sweep(const json& cfg, const RunDir& rd, int jobs) {
  const int n = cfg.at("n").get<int>();
  const uint64_t seed = cfg.at("seed").get<uint64_t>();
  const double p = cfg.at("p").get<double>();
  const std::vector<double> betas = cfg.at("betas").get<std::vector<double>>();
  if (n < 1) throw ValidationError("beta_sweep: n must be >= 1");

  const auto [mu, nu] = independent_normals_instance(n, seed);
  const auto diag = conditional_wasserstein(mu, nu, p);
  const double self_distance = conditional_wasserstein(mu, mu, p).value;

  struct Row {
    double beta, value_p, leakage;
  };
  std::vector<Row> rows(betas.size());
  parallel_for(static_cast<int>(betas.size()), jobs, [&](int i) {
    const auto res = relaxed_wasserstein(mu, nu, {p, betas[i], false});
    rows[i] = {betas[i], res.value_p, y_leakage(res.plan, p)};
  });

  std::ostringstream csv;
  csv << "beta,value_p,leakage,diagonal_cost\n";
  for (const auto& r : rows)
    csv << csv_num(r.beta) << "," << csv_num(r.value_p) << ","
        << csv_num(r.leakage) << "," << csv_num(diag.value_p) << "\n";
  write_file(rd.root / "metrics.csv", csv.str());

  json report;
  report["n"] = n;
  report["p"] = p;
  report["diagonal_cost"] = diag.value_p;
  report["conditional_value_p"] = diag.value_p;
  report["self_distance"] = self_distance;
  json arr = json::array();
  for (const auto& r : rows) {
    json row;
    row["beta"] = r.beta;
    row["value_p"] = r.value_p;
    row["leakage"] = r.leakage;
    arr.push_back(row);
  }
  report["sweep"] = arr;
  if (rows.size() >= 2) {
    report["first_leakage"] = rows.front().leakage;
    report["last_leakage"] = rows.back().leakage;
  }
  return report;
}

json cmd_duality_check(const json& cfg, const RunDir& rd, int jobs) {
  const int instances = cfg.at("instances").get<int>();
  const uint64_t seed = cfg.at("seed").get<uint64_t>();
  const int max_conditions = cfg.at("max_conditions").get<int>();
  const int max_atoms = cfg.at("max_atoms").get<int>();
  if (instances < 1) throw ValidationError("duality_check: instances >= 1");

  struct Row {
    uint64_t seed;
    double primal, dual, gap, lipschitz_excess;
  };
  std::vector<Row> rows(instances);
  parallel_for(instances, jobs, [&](int i) {
    const uint64_t s = seed + i;
    const auto [mu, nu] =
        random_general_instance(s, 1, 2, max_conditions, max_atoms);
    const auto cert = dual_certificate(mu, nu);
    rows[i] = {s, cert.primal_value, cert.dual_value, cert.gap,
               cert.lipschitz_excess()};
  });

  std::ostringstream csv;
  csv << "seed,primal,dual,gap,lipschitz_excess\n";
  double max_gap = 0.0, max_excess = -1e300;
  for (const auto& r : rows) {
    csv << r.seed << "," << csv_num(r.primal) << "," << csv_num(r.dual) << ","
        << csv_num(r.gap) << "," << csv_num(r.lipschitz_excess) << "\n";
    max_gap = std::max(max_gap, r.gap);
    max_excess = std::max(max_excess, r.lipschitz_excess);
  }
  write_file(rd.root / "metrics.csv", csv.str());

  json report;
  report["instances"] = instances;
  report["max_gap"] = max_gap;
  report["max_lipschitz_excess"] = max_excess;
  return report;
}

json cmd_geodesic_check(const json& cfg, const RunDir& rd, int jobs) {
  const int instances = cfg.at("instances").get<int>();
  const uint64_t seed = cfg.at("seed").get<uint64_t>();
  const auto pairs = cfg.at("pairs").get<std::vector<std::vector<double>>>();
  for (const auto& p : pairs)
    if (p.size() != 2) throw ValidationError("geodesic_check: pairs are [s,t]");

  struct Row {
    uint64_t seed;
    double max_residual, vy_norm, l2_mismatch, bb_mismatch;
  };
  std::vector<Row> rows(instances);
  parallel_for(instances, jobs, [&](int i) {
    const uint64_t s = seed + i;
    Rng r(s);
    const int K = 1 + static_cast<int>(r.uniform_int(3));
    const int per = 2 + static_cast<int>(r.uniform_int(3));
    auto [mu, nu] = random_joint_instance(s, 1, 2, K, per);
    const auto dist = conditional_wasserstein(mu, nu, 2.0);

    double max_res = 0.0;
    for (const auto& stp : pairs)
      max_res = std::max(
          max_res, geodesic_identity_residual(dist.plan, stp[0], stp[1]));

    const auto field = velocity_field(dist.plan, 0.5);
    double vy = 0.0;
    for (int k = 0; k < field.mass.size(); ++k)
      vy = std::max(vy, field.vel_y.row(k).norm());
    const double l2 = field.l2_norm_sq();
    const double bb = bb_energy(dist.plan);
    rows[i] = {s, max_res, vy, std::abs(l2 - dist.value_p),
               std::abs(bb - dist.value_p)};
  });

  std::ostringstream csv;
  csv << "seed,max_residual,max_vy,l2_mismatch,bb_mismatch\n";
  double worst_res = 0.0, worst_vy = 0.0, worst_l2 = 0.0, worst_bb = 0.0;
  for (const auto& r : rows) {
    csv << r.seed << "," << csv_num(r.max_residual) << "," << csv_num(r.vy_norm)
        << "," << csv_num(r.l2_mismatch) << "," << csv_num(r.bb_mismatch)
        << "\n";
    worst_res = std::max(worst_res, r.max_residual);
    worst_vy = std::max(worst_vy, r.vy_norm);
    worst_l2 = std::max(worst_l2, r.l2_mismatch);
    worst_bb = std::max(worst_bb, r.bb_mismatch);
  }
  write_file(rd.root / "metrics.csv", csv.str());

  json report;
  report["instances"] = instances;
  report["max_residual"] = worst_res;
  report["max_velocity_y_norm"] = worst_vy;
  report["max_l2_mismatch"] = worst_l2;
  report["max_bb_mismatch"] = worst_bb;
  return report;
}

json cmd_particle_flow(const json& cfg, const RunDir& rd, int jobs) {
  const int seeds = cfg.at("seeds").get<int>();
  const uint64_t seed0 = cfg.at("seed").get<uint64_t>();
  const auto betas = cfg.at("betas").get<std::vector<double>>();
  const int per_class = cfg.at("per_class").get<int>();
  const double sep = cfg.at("sep").get<double>();
  const double std_dev = cfg.at("std_dev").get<double>();
  const double epsilon = cfg.at("epsilon").get<double>();
  const double eta = cfg.at("eta").get<double>();
  const int iterations = cfg.at("iterations").get<int>();

  struct Task {
    double beta;
    uint64_t seed;
    double purity = 0.0;
    double final_divergence = 0.0;
    bool aborted = false;
    std::string per_iter_csv;
  };
  std::vector<Task> tasks;
  for (const double b : betas)
    for (int s = 0; s < seeds; ++s) tasks.push_back({b, seed0 + s});

  parallel_for(static_cast<int>(tasks.size()), jobs, [&](int i) {
    Task& tk = tasks[i];
    ParticleFlowConfig pf;
    pf.beta = tk.beta;
    pf.epsilon = epsilon;
    pf.eta = eta;
    pf.iterations = iterations;
    pf.seed = tk.seed;
    pf.target = make_two_class_toy(per_class, sep, std_dev, tk.seed + 7777);
    const auto res = run_particle_flow(pf);
    tk.aborted = res.aborted;
    tk.purity = label_purity(res.labels, res.particles, pf.target);
    tk.final_divergence = res.divergence.empty() ? 0.0 : res.divergence.back();

    std::ostringstream per;
    per << "iter,divergence,purity\n";
    for (size_t it = 0; it < res.trajectory.size(); ++it)
      per << (it + 1) << "," << csv_num(res.divergence[it]) << ","
          << csv_num(label_purity(res.labels, res.trajectory[it], pf.target))
          << "\n";
    tk.per_iter_csv = per.str();
  });

  std::ostringstream csv;
  csv << "beta,seed,purity,final_divergence,aborted\n";
  json per_beta = json::object();
  for (const auto& tk : tasks) {
    csv << csv_num(tk.beta) << "," << tk.seed << "," << csv_num(tk.purity)
        << "," << csv_num(tk.final_divergence) << "," << (tk.aborted ? 1 : 0)
        << "\n";
    write_file(rd.artifacts / ("flow_beta" + csv_num(tk.beta) + "_seed" +
                               std::to_string(tk.seed) + ".csv"),
               tk.per_iter_csv);
    const std::string key = csv_num(tk.beta);
    if (!per_beta.contains(key)) per_beta[key] = json::array();
    per_beta[key].push_back(tk.purity);
  }
  write_file(rd.root / "metrics.csv", csv.str());

  json report;
  report["per_beta_purity"] = per_beta;
  json means = json::object();
  for (const auto& [k, arr] : per_beta.items()) {
    double s = 0.0;
    for (const auto& v : arr) s += v.get<double>();
    means[k] = s / arr.size();
  }
  report["mean_purity"] = means;
  return report;
}

json cmd_gmm_train(const json& cfg, const RunDir& rd, int) {
  const uint64_t seed = cfg.at("seed").get<uint64_t>();
  TrainConfig tc;
  tc.mode.kind = coupling_kind_from_string(cfg.at("mode").get<std::string>());
  tc.mode.beta = cfg.at("beta").get<double>();
  tc.mode.strict = cfg.at("strict").get<bool>();
  tc.coupling_batch = cfg.at("coupling_batch").get<int>();
  tc.grad_batch = cfg.at("grad_batch").get<int>();
  tc.iterations = cfg.at("iterations").get<int>();
  tc.lr = cfg.at("lr").get<double>();
  tc.val_every = cfg.at("val_every").get<int>();
  tc.hidden = cfg.at("hidden").get<std::vector<int>>();
  tc.euler_steps = cfg.at("euler_steps").get<int>();
  tc.seed = seed;
  const int train_size = cfg.at("train_size").get<int>();
  const int val_size = cfg.at("val_size").get<int>();

  Rng root(seed);
  const uint64_t gmm_seed = root.split(100).uniform_int(1ull << 62);
  const uint64_t data_seed = root.split(101).uniform_int(1ull << 62);

  const GmmModel gmm = make_paper_gmm(gmm_seed);
  const LinearGaussianForward fwd = make_paper_forward(gmm.dim());

  const auto [ys, xs] = sample_joint(gmm, fwd, train_size + val_size, data_seed);
  Dataset train_data{ys.topRows(train_size), xs.topRows(train_size)};
  Dataset val_data{ys.bottomRows(val_size), xs.bottomRows(val_size)};

  const auto result = train(tc, train_data, val_data);

  write_file(rd.artifacts / "model.json", model_to_json(result.model));
  write_file(rd.artifacts / "gmm.json", gmm_to_json(gmm));
  write_file(rd.artifacts / "forward.json", forward_to_json(fwd));

  std::ostringstream log;
  for (const auto& cp : result.curve) {
    json row;
    row["iter"] = cp.iter;
    row["train_loss"] = cp.train_loss;
    row["val_loss"] = cp.val_loss;
    log << row.dump() << "\n";
  }
  write_file(rd.root / "train_log.jsonl", log.str());

  std::ostringstream csv;
  csv << "iter,train_loss,val_loss\n";
  for (const auto& cp : result.curve)
    csv << cp.iter << "," << csv_num(cp.train_loss) << ","
        << csv_num(cp.val_loss) << "\n";
  write_file(rd.root / "metrics.csv", csv.str());

  json report;
  report["mode"] = to_string(tc.mode.kind);
  report["beta"] = tc.mode.beta;
  report["parameter_count"] = result.model.parameter_count();
  report["best_val_loss"] = result.best_val_loss;
  report["initial_val_loss"] =
      result.curve.empty() ? result.best_val_loss : result.curve.front().val_loss;
  report["final_val_loss"] =
      result.curve.empty() ? result.best_val_loss : result.curve.back().val_loss;
  report["iterations"] = tc.iterations;
  report["model_path"] = (rd.artifacts / "model.json").string();
  report["gmm_path"] = (rd.artifacts / "gmm.json").string();
  report["forward_path"] = (rd.artifacts / "forward.json").string();
  return report;
}

json cmd_gmm_eval(const json& cfg, const RunDir& rd, int jobs) {
  const uint64_t seed = cfg.at("seed").get<uint64_t>();
  const std::string model_path = cfg.at("model").get<std::string>();
  const std::string gmm_path = cfg.at("gmm").get<std::string>();
  const std::string fwd_path = cfg.at("forward").get<std::string>();
  const int n_conditions = cfg.at("n_conditions").get<int>();
  const int n_samples = cfg.at("n_samples").get<int>();
  const int euler_steps = cfg.at("euler_steps").get<int>();
  if (n_conditions < 1 || n_samples < 1)
    throw ValidationError("gmm_eval: counts must be >= 1");

  const GmmModel gmm = gmm_from_json(read_file(gmm_path));
  const LinearGaussianForward fwd = forward_from_json(read_file(fwd_path));

  VelocityModel model =
      model_path == "zero"
          ? VelocityModel::create(gmm.dim(), gmm.dim(), {16}, 0)
          : model_from_json(read_file(model_path));

  Rng root(seed);
  const uint64_t cond_seed = root.split(0).uniform_int(1ull << 62);
  const auto [test_ys, test_xs] = sample_joint(gmm, fwd, n_conditions, cond_seed);

  struct Row {
    double divergence = 0.0, epsilon = 0.0;
  };
  std::vector<Row> rows(n_conditions);
  parallel_for(n_conditions, jobs, [&](int i) {
    const Eigen::VectorXd y = test_ys.row(i).transpose();
    const GmmModel post = analytic_posterior(gmm, fwd, y);

    Rng sample_rng = Rng(seed).split(200 + i);
    const Eigen::MatrixXd model_x =
        sample_posterior(model, y, n_samples, euler_steps, sample_rng);
    const Eigen::MatrixXd exact_x =
        sample_posterior_exact(post, n_samples, seed + 31 * i + 1);

    // wrap both clouds as payload-only measures for the divergence
    DiscreteJointMeasure a, b;
    a.ys = Eigen::MatrixXd::Zero(n_samples, 1);
    a.xs = model_x;
    a.weights = Eigen::VectorXd::Constant(n_samples, 1.0 / n_samples);
    b.ys = Eigen::MatrixXd::Zero(n_samples, 1);
    b.xs = exact_x;
    b.weights = Eigen::VectorXd::Constant(n_samples, 1.0 / n_samples);

    const CostSpec spec{2.0, 0.0, false};
    const double eps = default_epsilon(a, b, spec);
    SinkhornOptions opts;
    opts.max_iter = 1500;
    opts.tol = 1e-6;
    rows[i] = {sinkhorn_divergence(a, b, spec, eps, opts), eps};
  });

  std::ostringstream csv;
  csv << "condition,divergence,epsilon\n";
  double mean = 0.0;
  for (int i = 0; i < n_conditions; ++i) {
    csv << i << "," << csv_num(rows[i].divergence) << ","
        << csv_num(rows[i].epsilon) << "\n";
    mean += rows[i].divergence;
  }
  mean /= n_conditions;
  write_file(rd.root / "metrics.csv", csv.str());

  json report;
  report["model"] = model_path;
  report["n_conditions"] = n_conditions;
  report["n_samples"] = n_samples;
  report["euler_steps"] = euler_steps;
  report["mean_divergence"] = mean;
  return report;
}

// --------------------------------------------------------------- dispatcher

struct CommandSpec {
  const char* name;
  json (*run)(const json&, const RunDir&, int);
  json defaults;
};

std::vector<CommandSpec> command_table() {
  std::vector<CommandSpec> table;
  table.push_back({"counterexample", cmd_counterexample,
                   json{{"n", 5.0}, {"seed", 0}}});
  table.push_back({"beta_sweep", cmd_beta_sweep,
                   json{{"n", 1000},
                        {"betas", json::array({1.0, 10.0, 100.0, 1000.0, 10000.0})},
                        {"p", 2.0},
                        {"seed", 0}}});
  table.push_back({"duality_check", cmd_duality_check,
                   json{{"instances", 50},
                        {"max_conditions", 4},
                        {"max_atoms", 8},
                        {"seed", 0}}});
  table.push_back(
      {"geodesic_check", cmd_geodesic_check,
       json{{"instances", 20},
            {"pairs", json::array({json::array({0.0, 0.3}),
                                   json::array({0.3, 0.8}),
                                   json::array({0.8, 1.0})})},
            {"seed", 0}}});
  table.push_back({"particle_flow", cmd_particle_flow,
                   json{{"seeds", 5},
                        {"betas", json::array({1.0, 5.0})},
                        {"per_class", 32},
                        {"sep", 1.5},
                        {"std_dev", 0.4},
                        {"epsilon", 0.3},
                        {"eta", 0.5},
                        {"iterations", 300},
                        {"seed", 0}}});
  table.push_back({"gmm_train", cmd_gmm_train,
                   json{{"mode", "ot-bayes"},
                        {"beta", 20.0},
                        {"strict", false},
                        {"train_size", 10000},
                        {"val_size", 2000},
                        {"coupling_batch", 500},
                        {"grad_batch", 100},
                        {"iterations", 20000},
                        {"lr", 1e-3},
                        {"val_every", 250},
                        {"hidden", json::array({256, 256, 256})},
                        {"euler_steps", 10},
                        {"seed", 0}}});
  table.push_back({"gmm_eval", cmd_gmm_eval,
                   json{{"model", "zero"},
                        {"gmm", ""},
                        {"forward", ""},
                        {"n_conditions", 20},
                        {"n_samples", 320},
                        {"euler_steps", 10},
                        {"seed", 0}}});
  return table;
}

const CommandSpec& find_command(const std::string& name) {
  static const std::vector<CommandSpec> table = command_table();
  for (const auto& c : table)
    if (name == c.name) return c;
  throw ValidationError("unknown command: " + name);
}

} // namespace

std::vector<std::string> command_names() {
  std::vector<std::string> names;
  for (const auto& c : command_table()) names.push_back(c.name);
  return names;
}

std::string command_defaults(const std::string& command) {
  return find_command(command).defaults.dump(2);
}

std::string run_command(const std::string& command,
                        const std::string& config_json,
                        std::optional<int64_t> seed_override,
                        const std::string& out_dir, int jobs) {
  const auto& spec = find_command(command);
  json cfg = merge_config(spec.defaults, parse_config(config_json));
  if (seed_override) cfg["seed"] = *seed_override;
  const int64_t seed = cfg.value("seed", int64_t{0});
  if (jobs < 1) throw ValidationError("jobs must be >= 1");

  const RunDir rd = make_run_dir(out_dir, command, seed);
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = timestamp_utc();

  json report = spec.run(cfg, rd, jobs);

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json manifest;
  manifest["command"] = command;
  manifest["config"] = cfg;
  manifest["seed"] = seed;
  manifest["version"] = kVersionString;
  manifest["started_at"] = started;
  manifest["runtime_seconds"] = secs;
  write_file(rd.root / "manifest.json", manifest.dump(2));

  report["command"] = command;
  report["run_dir"] = rd.root.string();
  write_file(rd.root / "report.json", report.dump(2));
  return report.dump(2);
}

} // namespace condot
