#include "mfk/cli.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mfk/errors.hpp"
#include "mfk/io.hpp"
#include "mfk/kernels.hpp"
#include "mfk/meanfield.hpp"
#include "mfk/modulus.hpp"
#include "mfk/parallel.hpp"
#include "mfk/report.hpp"
#include "mfk/rkhs.hpp"
#include "mfk/selftest.hpp"
#include "mfk/transport.hpp"

namespace mfk::cli {

using json = nlohmann::json;

namespace {

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

const json& required(const json& raw, const char* key, std::string_view command) {
  auto it = raw.find(key);
  if (it == raw.end()) invalid(std::string(command) + " config: missing key '" + key + "'");
  return *it;
}

std::int64_t int_field(const json& raw, const char* key, std::optional<std::int64_t> fallback, std::int64_t min,
                       std::string_view command) {
  auto it = raw.find(key);
  if (it == raw.end()) {
    if (!fallback) invalid(std::string(command) + " config: missing key '" + key + "'");
    return *fallback;
  }
  if (!it->is_number_integer()) invalid(std::string(command) + " config: '" + key + "' must be an integer");
  const auto v = it->get<std::int64_t>();
  if (v < min) invalid(std::string(command) + " config: '" + key + "' must be >= " + std::to_string(min));
  return v;
}

double real_field(const json& raw, const char* key, double fallback, std::string_view command) {
  auto it = raw.find(key);
  if (it == raw.end()) return fallback;
  if (!it->is_number()) invalid(std::string(command) + " config: '" + key + "' must be a number");
  return it->get<double>();
}

std::uint64_t seed_field(const json& raw, std::string_view command) {
  auto it = raw.find("seed");
  if (it == raw.end()) return 0;
  if (!it->is_number_unsigned()) invalid(std::string(command) + " config: 'seed' must be a nonnegative integer");
  return it->get<std::uint64_t>();
}

std::vector<std::int64_t> grid_field(const json& raw, const char* key, std::string_view command, bool increasing) {
  const auto& g = required(raw, key, command);
  if (!g.is_array() || g.empty()) invalid(std::string(command) + " config: '" + key + "' must be a nonempty array");
  std::vector<std::int64_t> out;
  for (const auto& v : g) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 1)
      invalid(std::string(command) + " config: '" + key + "' entries must be positive integers");
    out.push_back(v.get<std::int64_t>());
    if (increasing && out.size() > 1 && out[out.size() - 2] >= out.back())
      invalid(std::string(command) + " config: '" + key + "' must be strictly increasing");
  }
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty())
    out << text;
  else
    io::write_text_file(out_path, text);
}

std::vector<DiscreteMeasure> dataset_measures(const Dataset& ds) {
  std::vector<DiscreteMeasure> out;
  out.reserve(ds.records.size());
  for (const auto& r : ds.records) out.push_back(empirical_measure(r.config));
  return out;
}

struct Common {
  int threads = 0;
  std::string out;
  std::string format = "json";
};

void add_threads(CLI::App* sub, Common& c) {
  sub->add_option("--threads", c.threads, "Worker threads for parallel loops (0 = machine default)")
      ->check(CLI::NonNegativeNumber);
}

void add_out(CLI::App* sub, Common& c, const char* what) { sub->add_option("--out", c.out, what); }

void add_format(CLI::App* sub, Common& c) {
  sub->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

std::string detect_command(const json& raw) {
  if (!raw.is_object()) invalid("config must be a JSON object");
  if (auto it = raw.find("command"); it != raw.end()) {
    if (!it->is_string()) invalid("'command' must be a string");
    return it->get<std::string>();
  }
  if (raw.contains("m_grid")) return "converge";
  if (raw.contains("family") || raw.contains("test_ms")) return "transfer";
  if (raw.contains("dynamics")) return "simulate";
  if (raw.contains("n_pairs") || raw.contains("n_decoys") || raw.contains("modulus_scale")) return "mcshane-check";
  if (raw.contains("trials") || raw.contains("metric")) return "modulus";
  invalid("cannot infer the command for this config; add a \"command\" key");
}

json resolve_config(std::string_view command, const json& raw) {
  if (!raw.is_object()) invalid(std::string(command) + " config must be a JSON object");
  if (auto it = raw.find("command"); it != raw.end() && (!it->is_string() || it->get<std::string>() != command))
    invalid(std::string(command) + " config: 'command' does not match the subcommand");
  json r = {{"command", std::string(command)}};
  if (command == "converge") {
    io::check_keys(raw, {"command", "kernel", "mu", "nu", "m_grid", "n_seeds", "seed"}, "converge config");
    r["kernel"] = io::kernel_to_json(io::kernel_from_json(required(raw, "kernel", command)));
    r["mu"] = io::sampler_to_json(io::sampler_from_json(required(raw, "mu", command)));
    r["nu"] = io::sampler_to_json(io::sampler_from_json(required(raw, "nu", command)));
    r["m_grid"] = grid_field(raw, "m_grid", command, true);
    r["n_seeds"] = int_field(raw, "n_seeds", 32, kMinSeedsPerM, command);
    r["seed"] = seed_field(raw, command);
  } else if (command == "transfer") {
    io::check_keys(raw, {"command", "kernel", "observable", "family", "train_m", "test_ms", "n_train", "n_test",
                         "lambda", "seed"},
                   "transfer config");
    r["kernel"] = io::kernel_to_json(io::kernel_from_json(required(raw, "kernel", command)));
    r["observable"] = io::observable_to_json(io::observable_from_json(required(raw, "observable", command)));
    r["family"] = io::law_family_to_json(io::law_family_from_json(required(raw, "family", command)));
    r["train_m"] = int_field(raw, "train_m", 32, 1, command);
    r["test_ms"] = grid_field(raw, "test_ms", command, false);
    r["n_train"] = int_field(raw, "n_train", 200, 1, command);
    r["n_test"] = int_field(raw, "n_test", 100, 1, command);
    r["lambda"] = real_field(raw, "lambda", 1e-6, command);
    if (!(r["lambda"].get<double>() >= 0.0)) invalid("transfer config: 'lambda' must be >= 0");
    r["seed"] = seed_field(raw, command);
  } else if (command == "mcshane-check") {
    io::check_keys(raw, {"command", "kernel", "M", "sampler", "n_pairs", "n_decoys", "modulus_scale", "seed"},
                   "mcshane-check config");
    r["kernel"] = io::kernel_to_json(io::kernel_from_json(required(raw, "kernel", command)));
    r["M"] = int_field(raw, "M", std::nullopt, 1, command);
    r["sampler"] = io::sampler_to_json(io::sampler_from_json(required(raw, "sampler", command)));
    r["n_pairs"] = int_field(raw, "n_pairs", 100, 1, command);
    r["n_decoys"] = int_field(raw, "n_decoys", 32, 0, command);
    r["modulus_scale"] = real_field(raw, "modulus_scale", 1.0, command);
    if (!(r["modulus_scale"].get<double>() >= 0.0)) invalid("mcshane-check config: 'modulus_scale' must be >= 0");
    r["seed"] = seed_field(raw, command);
  } else if (command == "modulus") {
    io::check_keys(raw, {"command", "kernel", "M", "sampler", "trials", "seed", "metric"}, "modulus config");
    r["kernel"] = io::kernel_to_json(io::kernel_from_json(required(raw, "kernel", command)));
    r["M"] = int_field(raw, "M", std::nullopt, 1, command);
    r["sampler"] = io::sampler_to_json(io::sampler_from_json(required(raw, "sampler", command)));
    r["trials"] = int_field(raw, "trials", 200, 10, command);
    r["seed"] = seed_field(raw, command);
    r["metric"] = io::metric_to_json(raw.contains("metric") ? io::metric_from_json(raw["metric"]) : GroundMetric());
  } else if (command == "simulate") {
    io::check_keys(raw, {"command", "dynamics", "M", "steps", "seed", "stride"}, "simulate config");
    r["dynamics"] = io::dynamics_to_json(io::dynamics_from_json(required(raw, "dynamics", command)));
    r["M"] = int_field(raw, "M", std::nullopt, 1, command);
    r["steps"] = int_field(raw, "steps", std::nullopt, 0, command);
    r["seed"] = seed_field(raw, command);
    r["stride"] = int_field(raw, "stride", 1, 1, command);
  } else {
    invalid("no config schema for command '" + std::string(command) + "'");
  }
  return r;
}

namespace {

json load_resolved(std::string_view command, const std::string& path) {
  return resolve_config(command, io::read_json_file(path));
}

int cmd_w1(const std::string& mu_path, const std::string& nu_path, const std::string& metric_text,
           const std::string& solver, double eps, int max_iters, const std::string& plan_path, const Common& c,
           std::ostream& out, std::ostream& err) {
  const auto mu = io::load_measure(mu_path);
  const auto nu = io::load_measure(nu_path);
  const auto metric = io::metric_from_string(metric_text);
  char buf[64];
  if (solver == "exact") {
    const auto r = w1_exact(mu, nu, metric);
    std::snprintf(buf, sizeof buf, "%.12f\n", r.distance);
    emit(buf, c.out, out);
    if (!plan_path.empty()) {
      std::string csv;
      const auto& p = r.plan.coupling;
      for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) csv += (j ? "," : "") + num17(p(i, j));
        csv += "\n";
      }
      io::write_text_file(plan_path, csv);
    }
    return 0;
  }
  if (!plan_path.empty()) throw Error(ErrorCode::InvalidArgument, "--plan requires --solver exact");
  if (solver == "1d") {
    std::snprintf(buf, sizeof buf, "%.12f\n", w1_1d(mu, nu));
    emit(buf, c.out, out);
    return 0;
  }
  const auto r = w1_sinkhorn(mu, nu, metric, eps, max_iters);
  std::snprintf(buf, sizeof buf, "%.12f\n", r.cost);
  emit(buf, c.out, out);
  if (!r.converged) {
    err << "error: NOT_CONVERGED: marginal error " << num17(r.marginal_error) << " after " << r.iterations
        << " iterations\n";
    return 2;
  }
  return 0;
}

int cmd_selftest(const Common& c, std::ostream& out) {
  std::string text;
  bool ok = true;
  for (const auto& check : run_selftest()) {
    text += std::string(check.pass ? "PASS " : "FAIL ") + check.name + " (" + check.detail + ")\n";
    ok = ok && check.pass;
  }
  emit(text, c.out, out);
  return ok ? 0 : 2;
}

std::string build_info() {
  std::string s = "build: C++" + std::to_string(__cplusplus / 100 % 100);
#ifdef __VERSION__
  s += ", compiler " + std::string(__VERSION__);
#endif
#ifdef _OPENMP
  s += ", OpenMP " + std::to_string(_OPENMP);
#endif
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernels on particle configurations and discrete measures", "mfk"};
  app.require_subcommand(1);
  app.fallthrough(false);

  Common c;
  std::string mu_path, nu_path, metric_text = "euclidean", solver = "exact", plan_path, kernel_path, base_text;
  std::string data_path, model_path, measure_path, observable_path, config_path, dat_path, version_command;
  double eps = 0.01, lambda = 1e-6, psd_tol = 1e-8;
  int max_iters = 10000;

  auto* w1 = app.add_subcommand("w1", "Wasserstein-1 distance between two measure files");
  w1->add_option("--mu", mu_path, "First measure (JSON or CSV)")->required();
  w1->add_option("--nu", nu_path, "Second measure (JSON or CSV)")->required();
  w1->add_option("--metric", metric_text, "Ground metric: euclidean | kernel:gaussian:<gamma> | kernel:imq:<c>");
  w1->add_option("--solver", solver, "Solver")->check(CLI::IsMember({"exact", "1d", "sinkhorn"}));
  w1->add_option("--eps", eps, "Entropic regularization for sinkhorn")->check(CLI::PositiveNumber);
  w1->add_option("--max-iters", max_iters, "Iteration cap for sinkhorn")->check(CLI::PositiveNumber);
  w1->add_option("--plan", plan_path, "Write the optimal coupling as CSV (exact solver)");
  add_out(w1, c, "Write the distance here instead of stdout");
  add_threads(w1, c);

  auto* kernel = app.add_subcommand("kernel", "Kernel evaluation");
  kernel->require_subcommand(1);
  auto* keval = kernel->add_subcommand("eval", "Evaluate a distribution kernel on two measure files");
  keval->add_option("--mu", mu_path, "First measure")->required();
  keval->add_option("--nu", nu_path, "Second measure")->required();
  keval->add_option("--kernel", kernel_path, "Kernel spec JSON file")->required();
  add_out(keval, c, "Write the value here instead of stdout");
  add_threads(keval, c);

  auto* gram_cmd = app.add_subcommand("gram", "Gram matrix of a dataset's empirical measures, as CSV");
  gram_cmd->add_option("--data", data_path, "Dataset (JSON lines)")->required();
  gram_cmd->add_option("--kernel", kernel_path, "Kernel spec JSON file")->required();
  gram_cmd->add_option("--psd-tol", psd_tol, "Relative tolerance of the PSD check")->check(CLI::NonNegativeNumber);
  add_out(gram_cmd, c, "Write the matrix here instead of stdout");
  add_threads(gram_cmd, c);

  auto* fit = app.add_subcommand("fit", "Kernel ridge regression on a labelled dataset");
  fit->add_option("--data", data_path, "Labelled dataset (JSON lines)")->required();
  fit->add_option("--kernel", kernel_path, "Kernel spec JSON file")->required();
  fit->add_option("--lambda", lambda, "Ridge parameter (system K + lambda N I)")->check(CLI::NonNegativeNumber);
  add_out(fit, c, "Write the model JSON here instead of stdout");
  add_threads(fit, c);

  auto* predict = app.add_subcommand("predict", "Evaluate a fitted model");
  predict->add_option("--model", model_path, "Model JSON file")->required();
  auto* pred_data = predict->add_option("--data", data_path, "Dataset whose configurations are evaluated");
  auto* pred_measure = predict->add_option("--measure", measure_path, "Single measure file to evaluate");
  pred_data->excludes(pred_measure);
  add_out(predict, c, "Write predictions here instead of stdout");
  add_threads(predict, c);

  auto* mmd_cmd = app.add_subcommand("mmd", "Maximum mean discrepancy between two measure files");
  mmd_cmd->add_option("--mu", mu_path, "First measure")->required();
  mmd_cmd->add_option("--nu", nu_path, "Second measure")->required();
  mmd_cmd->add_option("--base", base_text, "Base kernel: gaussian:<gamma> | imq:<c>")->required();
  add_out(mmd_cmd, c, "Write the value here instead of stdout");
  add_threads(mmd_cmd, c);

  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a particle system into an unlabelled dataset");
  simulate_cmd->add_option("--config", config_path, "Simulation config JSON file")->required();
  add_out(simulate_cmd, c, "Write the dataset here instead of stdout");
  add_threads(simulate_cmd, c);

  auto* label = app.add_subcommand("label", "Label a dataset with an observable");
  label->add_option("--data", data_path, "Dataset (JSON lines)")->required();
  label->add_option("--observable", observable_path, "Observable spec JSON file")->required();
  add_out(label, c, "Write the labelled dataset here instead of stdout");
  add_threads(label, c);

  auto* modulus_cmd = app.add_subcommand("modulus", "Estimate a kernel's modulus of continuity");
  modulus_cmd->add_option("--config", config_path, "Modulus config JSON file")->required();
  add_out(modulus_cmd, c, "Write the report here instead of stdout");
  add_format(modulus_cmd, c);
  add_threads(modulus_cmd, c);

  auto* mcshane = app.add_subcommand("mcshane-check", "McShane extension consistency at empirical pairs");
  mcshane->add_option("--config", config_path, "Check config JSON file")->required();
  add_out(mcshane, c, "Write the report here instead of stdout");
  add_format(mcshane, c);
  add_threads(mcshane, c);

  auto* converge = app.add_subcommand("converge", "Kernel convergence study over a particle-count grid");
  converge->add_option("--config", config_path, "Study config JSON file")->required();
  add_out(converge, c, "Write the report here instead of stdout");
  add_format(converge, c);
  converge->add_option("--dat", dat_path, "Also write a gnuplot data file of M, median, q25, q75");
  add_threads(converge, c);

  auto* transfer = app.add_subcommand("transfer", "Functional transfer study across particle counts");
  transfer->add_option("--config", config_path, "Study config JSON file")->required();
  add_out(transfer, c, "Write the report here instead of stdout");
  add_format(transfer, c);
  add_threads(transfer, c);

  auto* selftest = app.add_subcommand("selftest", "Run the embedded invariant suite");
  add_out(selftest, c, "Write the results here instead of stdout");
  add_threads(selftest, c);

  auto* version = app.add_subcommand("version", "Print version, build info and optionally a config hash");
  version->add_option("--config", config_path, "Print the hash that reports for this config will carry");
  version->add_option("--command", version_command, "Subcommand the config belongs to (default: inferred)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: USAGE: " << e.what() << "\n";
    return 1;
  }

  try {
    set_thread_count(c.threads);
    if (*w1) return cmd_w1(mu_path, nu_path, metric_text, solver, eps, max_iters, plan_path, c, out, err);
    if (*keval) {
      const auto k = io::kernel_from_json(io::read_json_file(kernel_path));
      emit(num17(k(io::load_measure(mu_path), io::load_measure(nu_path))) + "\n", c.out, out);
      return 0;
    }
    if (*mmd_cmd) {
      emit(num17(mmd(io::base_kernel_from_string(base_text), io::load_measure(mu_path), io::load_measure(nu_path))) +
               "\n",
           c.out, out);
      return 0;
    }
    if (*gram_cmd) {
      const auto k = io::kernel_from_json(io::read_json_file(kernel_path));
      const auto g = gram(k, dataset_measures(io::load_dataset(data_path)));
      const auto psd = psd_check(g, psd_tol);
      std::string csv = "# min_eigenvalue: " + num17(psd.min_eigenvalue) + "\n# psd: " + (psd.pass ? "pass" : "fail") + "\n";
      for (Eigen::Index i = 0; i < g.entries.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.entries.cols(); ++j) csv += (j ? "," : "") + num17(g.entries(i, j));
        csv += "\n";
      }
      emit(csv, c.out, out);
      return 0;
    }
    if (*fit) {
      const auto text = read_text(data_path);
      const auto ds = io::dataset_from_jsonl(text);
      if (ds.observable.empty()) throw Error(ErrorCode::InvalidArgument, "dataset has no labels; run `label` first");
      const auto k = io::kernel_from_json(io::read_json_file(kernel_path));
      RealVector y(static_cast<Eigen::Index>(ds.records.size()));
      for (std::size_t i = 0; i < ds.records.size(); ++i) y[static_cast<Eigen::Index>(i)] = ds.records[i].label;
      const auto f = ridge_fit(k, dataset_measures(ds), y, lambda);
      const json training = {{"data_hash", report::fnv1a_hex(text)},
                             {"n", ds.records.size()},
                             {"M", ds.m},
                             {"dim", ds.dim},
                             {"observable", json::parse(ds.observable)},
                             {"residual", f.residual}};
      emit(io::model_to_json(f, training).dump(2) + "\n", c.out, out);
      return 0;
    }
    if (*predict) {
      const auto model = io::model_from_json(io::read_json_file(model_path));
      std::vector<DiscreteMeasure> inputs;
      if (!measure_path.empty())
        inputs.push_back(io::load_measure(measure_path));
      else if (!data_path.empty())
        inputs = dataset_measures(io::load_dataset(data_path));
      else
        throw Error(ErrorCode::InvalidArgument, "predict needs --data or --measure");
      std::vector<double> values(inputs.size());
      parallel_for(static_cast<std::ptrdiff_t>(inputs.size()),
                   [&](std::ptrdiff_t i) { values[i] = expansion_eval(model, inputs[i]); });
      std::string text;
      for (double v : values) text += num17(v) + "\n";
      emit(text, c.out, out);
      return 0;
    }
    if (*simulate_cmd) {
      const auto cfg = load_resolved("simulate", config_path);
      const auto dyn = io::dynamics_from_json(cfg["dynamics"]);
      const auto m = cfg["M"].get<std::int64_t>();
      const auto stride = cfg["stride"].get<std::int64_t>();
      const auto traj = simulate(dyn, m, static_cast<int>(cfg["steps"].get<std::int64_t>()), cfg["seed"].get<std::uint64_t>());
      Dataset ds;
      ds.m = m;
      ds.dim = dyn.initial.dim();
      ds.dynamics = cfg.dump();
      ds.seed = cfg["seed"].get<std::uint64_t>();
      for (std::size_t t = 0; t < traj.size(); t += static_cast<std::size_t>(stride))
        ds.records.push_back({traj[t], std::numeric_limits<double>::quiet_NaN()});
      emit(io::dataset_to_jsonl(ds), c.out, out);
      return 0;
    }
    if (*label) {
      const auto ds = io::load_dataset(data_path);
      const auto obs_json = io::read_json_file(observable_path);
      const auto obs = io::observable_from_json(obs_json);
      std::vector<ParticleConfiguration> configs;
      for (const auto& r : ds.records) configs.push_back(r.config);
      if (configs.empty()) throw Error(ErrorCode::EmptySupport, "dataset has no records");
      auto labelled = make_dataset(configs, obs);
      labelled.observable = io::observable_to_json(obs).dump();
      labelled.dynamics = ds.dynamics;
      labelled.seed = ds.seed;
      emit(io::dataset_to_jsonl(labelled), c.out, out);
      return 0;
    }
    if (*modulus_cmd) {
      const auto cfg = load_resolved("modulus", config_path);
      const auto est = estimate_modulus(io::kernel_from_json(cfg["kernel"]), cfg["M"].get<std::int64_t>(),
                                        io::sampler_from_json(cfg["sampler"]),
                                        static_cast<int>(cfg["trials"].get<std::int64_t>()),
                                        cfg["seed"].get<std::uint64_t>(), io::metric_from_json(cfg["metric"]));
      const auto prov = report::make_provenance(cfg);
      emit(report::parse_format(c.format) == report::Format::Csv ? report::to_csv(est, prov)
                                                                : report::to_json(est, prov).dump(2) + "\n",
           c.out, out);
      return 0;
    }
    if (*mcshane) {
      const auto cfg = load_resolved("mcshane-check", config_path);
      const auto r = mcshane_consistency_check(
          io::kernel_from_json(cfg["kernel"]), cfg["M"].get<std::int64_t>(),
          static_cast<int>(cfg["n_pairs"].get<std::int64_t>()), cfg["seed"].get<std::uint64_t>(),
          io::sampler_from_json(cfg["sampler"]), static_cast<int>(cfg["n_decoys"].get<std::int64_t>()),
          cfg["modulus_scale"].get<double>());
      const auto prov = report::make_provenance(cfg);
      emit(report::parse_format(c.format) == report::Format::Csv ? report::to_csv(r, prov)
                                                                : report::to_json(r, prov).dump(2) + "\n",
           c.out, out);
      return 0;
    }
    if (*converge) {
      const auto cfg = load_resolved("converge", config_path);
      auto r = kernel_convergence_study(io::kernel_from_json(cfg["kernel"]), io::sampler_from_json(cfg["mu"]),
                                        io::sampler_from_json(cfg["nu"]), cfg["m_grid"].get<std::vector<std::int64_t>>(),
                                        static_cast<int>(cfg["n_seeds"].get<std::int64_t>()),
                                        cfg["seed"].get<std::uint64_t>());
      r.provenance = report::make_provenance(cfg);
      emit(report::serialize(r, report::parse_format(c.format)), c.out, out);
      if (!dat_path.empty()) io::write_text_file(dat_path, report::to_dat(r));
      return 0;
    }
    if (*transfer) {
      const auto cfg = load_resolved("transfer", config_path);
      TransferConfig tc{io::kernel_from_json(cfg["kernel"]),
                        io::observable_from_json(cfg["observable"]),
                        io::law_family_from_json(cfg["family"]),
                        cfg["train_m"].get<std::int64_t>(),
                        cfg["test_ms"].get<std::vector<std::int64_t>>(),
                        static_cast<int>(cfg["n_train"].get<std::int64_t>()),
                        static_cast<int>(cfg["n_test"].get<std::int64_t>()),
                        cfg["lambda"].get<double>(),
                        cfg["seed"].get<std::uint64_t>()};
      auto r = functional_transfer_study(tc);
      r.provenance = report::make_provenance(cfg);
      emit(report::serialize(r, report::parse_format(c.format)), c.out, out);
      return 0;
    }
    if (*selftest) return cmd_selftest(c, out);
    if (*version) {
      std::string text = std::string("mfk ") + MFK_VERSION + "\n" + build_info() + "\n";
      if (!config_path.empty()) {
        const auto raw = io::read_json_file(config_path);
        const auto command = version_command.empty() ? detect_command(raw) : version_command;
        text += "config_hash: " + report::make_provenance(resolve_config(command, raw)).config_hash + "\n";
      }
      out << text;
      return 0;
    }
    err << "error: USAGE: no subcommand\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.tag() << ": " << e.what() << "\n";
    return is_validation_error(e.code()) ? 1 : 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: CONFIG_INVALID: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: INTERNAL: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace mfk::cli
