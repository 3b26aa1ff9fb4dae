#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/cli.hpp"
#include "cli/manifest.hpp"
#include "otkit/bounds.hpp"
#include "otkit/divergences.hpp"
#include "otkit/error.hpp"
#include "otkit/io.hpp"
#include "otkit/parallel.hpp"
#include "otkit/rng.hpp"
#include "otkit/sinkhorn.hpp"

namespace otkit::cli {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kDenseLimit = 20000;

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(std::string("bad number in ") + what + ": '" + item + "'");
    }
  }
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  for (double v : parse_list(text, what)) {
    if (!(v >= 1.0) || v != std::floor(v)) throw InputError(std::string("bad entry in ") + what);
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

Norm parse_norm(const std::string& s) {
  if (s == "euclidean" || s == "l2") return Norm::euclidean;
  if (s == "l1") return Norm::l1;
  throw InputError("unknown norm '" + s + "'");
}

// Result destination plus manifest handling shared by every subcommand.
struct Output {
  std::string path;
  std::string manifest;

  bool to_stdout() const { return path.empty() || path == "-"; }

  std::string manifest_target() const {
    if (!manifest.empty()) return manifest;
    return to_stdout() ? std::string() : manifest_path_for(path);
  }

  void write(const std::string& text) const {
    if (to_stdout()) {
      std::cout << text;
      std::cout.flush();
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
  }
};

std::string dump(json j, const Output& out) {
  const std::string m = out.manifest_target();
  if (!m.empty()) j["manifest"] = std::filesystem::path(m).filename().string();
  return j.dump(2) + "\n";
}

void finish(RunManifest& man, const Output& out, Clock::time_point start) {
  const std::string m = out.manifest_target();
  if (m.empty()) return;
  if (!out.to_stdout()) man.outputs.push_back(out.path);
  man.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  man.peak_mem_bytes_estimate = peak_rss_bytes();
  man.threads = thread_count();
  write_manifest(man, m);
}

void check_dense_size(std::size_t n, Backend backend, bool allow) {
  if (backend == Backend::dense && n > kDenseLimit && !allow) {
    throw InputError("dense backend refuses n = " + std::to_string(n) +
                     " > 20000 without --allow-dense-large");
  }
}

struct MeasurePair {
  DiscreteMeasure mu;
  DiscreteMeasure nu;
};

MeasurePair read_pair(const std::string& a, const std::string& b) {
  for (const auto& p : {a, b}) {
    if (!std::filesystem::is_regular_file(p)) throw InputError("cannot open " + p);
  }
  MeasurePair m{io::read_measure_file(a), io::read_measure_file(b)};
  if (m.mu.dim() != m.nu.dim()) throw InputError("input measures have different dimensions");
  return m;
}

struct KernelFlags {
  std::string name = "gauss";
  double length_scale = 1.0;
  double imq_c = 1.0;

  void add(CLI::App* app) {
    app->add_option("--kernel", name, "gauss, laplace, imq or energy")->capture_default_str();
    app->add_option("--length-scale", length_scale, "Gaussian/Laplace length scale")
        ->capture_default_str();
    app->add_option("--imq-c", imq_c, "inverse multiquadric parameter")->capture_default_str();
  }
  RadialKernel kernel() const { return parse_kernel(name, length_scale, imq_c); }
  json to_json() const {
    return {{"kernel", name}, {"length_scale", length_scale}, {"imq_c", imq_c}};
  }
};

struct EtaFlags {
  double eta = 1.0;
  std::optional<double> eta1;
  std::optional<double> eta2;

  void add(CLI::App* app) {
    app->add_option("--eta", eta, "marginal penalty for both sides")->capture_default_str();
    app->add_option("--eta1", eta1, "penalty on the first marginal");
    app->add_option("--eta2", eta2, "penalty on the second marginal");
  }
  double first() const { return eta1.value_or(eta); }
  double second() const { return eta2.value_or(eta); }
};

struct FastsumFlags {
  int bandwidth = 0;
  int degree = 8;

  void add(CLI::App* app) {
    app->add_option("--bandwidth", bandwidth, "fast summation N per axis (0 = default)")
        ->capture_default_str();
    app->add_option("--degree", degree, "fast summation smoothness p")->capture_default_str();
  }
  FastsumOptions options() const {
    FastsumOptions o;
    o.bandwidth = bandwidth;
    o.degree = degree;
    return o;
  }
};

json marginal_json(const PlanMarginals& m) {
  return {{"first", m.mass_first()}, {"second", m.mass_second()}};
}

// ---------------------------------------------------------------- uot

struct UotArgs {
  std::string first, second;
  double r = 2.0;
  std::string norm = "euclidean";
  double lambda = 20.0;
  EtaFlags eta;
  std::string backend = "dense";
  double tol = 1e-10;
  int max_iter = 10000;
  std::string schedule;
  std::string init = "zeros";
  bool debias = false;
  bool allow_dense_large = false;
  FastsumFlags fastsum;
  Output out;
};

int cmd_uot(const UotArgs& a) {
  const auto start = Clock::now();
  const MeasurePair m = read_pair(a.first, a.second);
  const Backend backend = parse_backend(a.backend);
  check_dense_size(std::max(m.mu.size(), m.nu.size()), backend, a.allow_dense_large);
  const CostSpec cost{parse_norm(a.norm), a.r};
  SinkhornConfig cfg;
  cfg.r = a.r;
  cfg.lambda = a.lambda;
  cfg.eta1 = a.eta.first();
  cfg.eta2 = a.eta.second();
  cfg.tol = a.tol;
  cfg.max_iter = a.max_iter;
  cfg.lambda_schedule = parse_list(a.schedule, "--lambda-schedule");
  if (a.init == "zeros") {
    cfg.init = Init::zeros;
  } else if (a.init == "upper-bound") {
    cfg.init = Init::upper_bound;
  } else {
    throw InputError("unknown --init '" + a.init + "'");
  }
  cfg.fastsum = a.fastsum.options();
  validate(cfg, cost, backend);

  const UotProblem prob(m.mu, m.nu, cost, backend, cfg.fastsum);
  const SinkhornResult res = prob.solve(cfg);
  const PlanMarginals marg = prob.marginals(res.potentials, cfg.lambda);

  json j;
  j["command"] = "uot";
  j["backend"] = to_string(backend);
  j["parameters"] = {{"r", a.r},
                     {"norm", a.norm},
                     {"lambda", cfg.lambda},
                     {"eta1", cfg.eta1},
                     {"eta2", cfg.eta2},
                     {"tol", cfg.tol},
                     {"max_iter", cfg.max_iter},
                     {"lambda_schedule", cfg.lambda_schedule},
                     {"init", a.init}};
  j["uot_value"] = prob.primal_objective(res.potentials, cfg);
  j["dual_value"] = prob.dual_objective(res.potentials, cfg);
  j["transport_cost"] = prob.transport_cost(res.potentials, cfg.lambda);
  j["plan_mass"] = marg.mass_first();
  j["marginal_masses"] = marginal_json(marg);
  j["input_masses"] = {{"mu", total_mass(m.mu)}, {"nu", total_mass(m.nu)}};
  j["iterations"] = res.stats.iterations;
  j["stage_lambdas"] = res.stats.stage_lambdas;
  j["stage_iterations"] = res.stats.stage_iterations;
  j["converged"] = res.stats.converged;
  j["final_change"] = res.stats.final_change;
  if (a.debias) j["sd"] = sinkhorn_divergence(m.mu, m.nu, cost, cfg, backend);

  a.out.write(dump(j, a.out));
  RunManifest man;
  man.subcommand = "uot";
  man.parameters = j["parameters"];
  man.inputs = {a.first, a.second};
  man.backend = to_string(backend);
  finish(man, a.out, start);
  if (!res.stats.converged) {
    std::cerr << "otkit: Sinkhorn did not converge within " << cfg.max_iter
              << " iterations per stage (last change " << res.stats.final_change << ")\n";
    return kNumericError;
  }
  return kOk;
}

// ---------------------------------------------------------------- mmd

struct MmdArgs {
  std::string first, second;
  KernelFlags kernel;
  std::string backend = "dense";
  bool verify = false;
  bool force = false;
  bool allow_dense_large = false;
  FastsumFlags fastsum;
  Output out;
};

double relative_l2(const std::vector<double>& test, const std::vector<double>& ref) {
  CompensatedSum num, den;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    num.add((test[i] - ref[i]) * (test[i] - ref[i]));
    den.add(ref[i] * ref[i]);
  }
  if (!(den.value() > 0.0)) throw NumericError("dense kernel sums vanish");
  return std::sqrt(num.value() / den.value());
}

int cmd_mmd(const MmdArgs& a) {
  const auto start = Clock::now();
  const MeasurePair m = read_pair(a.first, a.second);
  const Backend backend = parse_backend(a.backend);
  const std::size_t n = m.mu.size() + m.nu.size();
  check_dense_size(n, backend, a.allow_dense_large);
  if (a.verify) check_dense_size(n, Backend::dense, a.allow_dense_large);
  const RadialKernel k = a.kernel.kernel();
  const FastsumOptions fo = a.fastsum.options();

  const MmdValue v = backend == Backend::dense ? mmd_squared_dense(k, m.mu, m.nu, a.force)
                                               : mmd_squared_nfft(k, m.mu, m.nu, fo, a.force);
  json j;
  j["command"] = "mmd";
  j["backend"] = to_string(backend);
  j["parameters"] = a.kernel.to_json();
  j["parameters"]["force"] = a.force;
  j["mmd_squared"] = v.squared;
  j["raw_mmd_squared"] = v.raw_squared;
  j["mmd"] = v.value();
  if (a.verify) {
    const std::vector<double> dense = joint_kernel_sums_dense(k, m.mu, m.nu);
    const std::vector<double> fast = joint_kernel_sums_nfft(k, m.mu, m.nu, fo);
    j["residual_vs_dense"] = relative_l2(fast, dense);
    j["mmd_squared_dense"] = mmd_squared_dense(k, m.mu, m.nu, a.force).squared;
  }
  a.out.write(dump(j, a.out));
  RunManifest man;
  man.subcommand = "mmd";
  man.parameters = j["parameters"];
  man.inputs = {a.first, a.second};
  man.backend = to_string(backend);
  finish(man, a.out, start);
  return kOk;
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
  std::string check;
  std::string first, second;
  double r = 2.0;
  std::string norm = "euclidean";
  EtaFlags eta;
  double lambda = 20.0;
  std::string schedule;
  std::string backend = "dense";
  KernelFlags kernel;
  std::string plan;
  std::size_t trials = 0;
  std::size_t n = 100;
  std::uint64_t seed = 7;
  double violation_tol = 1e-10;
  double surrogate_lambda = 200.0;
  Output out;
};

Matrix read_plan(const std::string& path, std::size_t rows, std::size_t cols) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open plan " + path);
  Matrix p(rows, cols);
  std::string line;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (i >= rows) throw InputError("plan has too many rows");
    const std::vector<double> v = parse_list(line, "plan");
    if (v.size() != cols) throw InputError("plan row has the wrong length");
    for (std::size_t c = 0; c < cols; ++c) p(i, c) = v[c];
    ++i;
  }
  if (i != rows) throw InputError("plan has too few rows");
  return p;
}

json bound_json(const BoundReport& b) {
  json j = {{"c_star", b.c_star},
            {"objective_at_c_star", b.objective_at_c_star},
            {"objective_at_half", b.objective_at_half},
            {"objective_at_double", b.objective_at_double},
            {"transport_term", b.transport_term},
            {"mass_mu", b.mass_mu},
            {"mass_nu", b.mass_nu},
            {"local_minimum_certified", b.local_minimum_certified()}};
  if (b.lambda) j["lambda"] = *b.lambda;
  return j;
}

json holder_json(const HolderReport& h) {
  return {{"transport_value", h.transport_value}, {"plan_mass", h.plan_mass},
          {"mmd_mu_marginal", h.mmd_mu_marginal}, {"mmd_nu_marginal", h.mmd_nu_marginal},
          {"alpha", h.alpha},                     {"holder_c", h.holder_c}};
}

void require_probability(const DiscreteMeasure& m) {
  if (std::abs(total_mass(m) - 1.0) > 1e-12) {
    throw InputError("this check needs probability measures (total mass 1)");
  }
}

int cmd_bounds(const BoundsArgs& a) {
  const auto start = Clock::now();
  const bool trial_mode =
      (a.check == "holder" || a.check == "holder-unbalanced") && a.trials > 0;
  std::optional<MeasurePair> m;
  if (!trial_mode) {
    if (a.first.empty() || a.second.empty()) throw InputError("two measure files are required");
    m = read_pair(a.first, a.second);
  }
  const Backend backend = parse_backend(a.backend);
  const CostSpec cost{parse_norm(a.norm), a.r};
  validate(cost);
  SurrogateSettings sur;
  sur.lambda = a.surrogate_lambda;
  sur.schedule.clear();
  for (double l : {1.0, 20.0}) {
    if (l < sur.lambda) sur.schedule.push_back(l);
  }
  sur.schedule.push_back(sur.lambda);
  sur.backend = backend;

  json j;
  j["command"] = "bounds";
  j["check"] = a.check;
  json params = {{"r", a.r},
                 {"norm", a.norm},
                 {"eta1", a.eta.first()},
                 {"eta2", a.eta.second()},
                 {"lambda", a.lambda},
                 {"surrogate_lambda", a.surrogate_lambda},
                 {"violation_tol", a.violation_tol}};
  double lhs = 0.0, rhs = 0.0;
  bool violated = false;

  if (a.check == "c-star") {
    std::optional<Matrix> plan;
    if (!a.plan.empty()) plan = read_plan(a.plan, m->mu.size(), m->nu.size());
    const BoundReport b = upper_bound_constant_uot(m->mu, m->nu, cost, a.eta.first(),
                                                   a.eta.second(), plan ? &*plan : nullptr,
                                                   backend);
    j["report"] = bound_json(b);
    lhs = unregularized_uot_estimate(m->mu, m->nu, cost, a.eta.first(), a.eta.second(), sur);
    rhs = b.objective_at_c_star;
  } else if (a.check == "c-star-reg") {
    const BoundReport b = upper_bound_constant_uot_reg(m->mu, m->nu, cost, a.eta.first(),
                                                       a.eta.second(), a.lambda, backend);
    j["report"] = bound_json(b);
    SinkhornConfig cfg;
    cfg.r = a.r;
    cfg.lambda = a.lambda;
    cfg.eta1 = a.eta.first();
    cfg.eta2 = a.eta.second();
    cfg.max_iter = 100000;
    cfg.lambda_schedule = parse_list(a.schedule, "--lambda-schedule");
    const UotProblem prob(m->mu, m->nu, cost, backend);
    const SinkhornResult res = prob.solve(cfg);
    if (!res.stats.converged) throw NumericError("Sinkhorn did not converge");
    lhs = prob.primal_objective(res.potentials, cfg);
    rhs = b.objective_at_c_star;
  } else if (a.check == "wasserstein") {
    const HolderReport h =
        wasserstein_bound_uot(m->mu, m->nu, cost, a.eta.first(), a.eta.second(), sur);
    j["report"] = holder_json(h);
    lhs = h.lhs;
    rhs = h.rhs;
  } else if (a.check == "frobenius") {
    require_probability(m->mu);
    require_probability(m->nu);
    const FrobeniusReport f =
        frobenius_bound(m->mu, m->nu, cost, a.eta.first(), a.eta.second(), sur);
    j["report"] = {{"w_r", f.w_r}, {"uot", f.uot}, {"frobenius_squared", f.frobenius_squared}};
    lhs = f.lhs;
    rhs = f.frobenius_squared;
  } else if (a.check == "holder" || a.check == "holder-unbalanced") {
    const bool unbalanced = a.check == "holder-unbalanced";
    const RadialKernel k = a.kernel.kernel();
    params.update(a.kernel.to_json());
    if (unbalanced) params["eta"] = a.eta.eta;
    if (trial_mode) {
      params["trials"] = a.trials;
      params["n"] = a.n;
      params["seed"] = a.seed;
      const HolderTrialSummary s =
          holder_trials(k, a.n, a.trials, a.seed, unbalanced, a.eta.eta, a.violation_tol, sur);
      j["report"] = {{"trials", s.trials},
                     {"mean_gap", s.mean_gap},
                     {"min_gap", s.min_gap},
                     {"max_gap", s.max_gap},
                     {"violations", s.violations},
                     {"gaps", s.gaps}};
      j["lhs"] = nullptr;
      j["rhs"] = nullptr;
      j["gap"] = s.min_gap;
      violated = s.violations > 0;
    } else {
      HolderReport h;
      if (unbalanced) {
        h = holder_check_unbalanced(m->mu, m->nu, k, a.eta.eta, sur);
      } else {
        require_probability(m->mu);
        require_probability(m->nu);
        h = holder_check_balanced(m->mu, m->nu, k);
      }
      j["report"] = holder_json(h);
      lhs = h.lhs;
      rhs = h.rhs;
    }
  } else if (a.check == "elementary") {
    const RadialKernel k = a.kernel.kernel();
    params.update(a.kernel.to_json());
    lhs = mmd_squared_dense(k, m->mu, m->nu).value();
    rhs = mmd_elementary_bound(k, m->mu, m->nu);
    j["report"] = {{"mmd", lhs}, {"kernel_at_zero", k(0.0)},
                   {"mass_mu", total_mass(m->mu)}, {"mass_nu", total_mass(m->nu)}};
  } else {
    throw InputError("unknown --check '" + a.check + "'");
  }
  j["parameters"] = params;
  if (!trial_mode) {
    j["lhs"] = lhs;
    j["rhs"] = rhs;
    j["gap"] = rhs - lhs;
    violated = rhs - lhs < -a.violation_tol;
  }
  j["violated"] = violated;

  a.out.write(dump(j, a.out));
  RunManifest man;
  man.subcommand = "bounds";
  man.parameters = params;
  if (!trial_mode) {
    man.inputs = {a.first, a.second};
  } else {
    man.seed = a.seed;
  }
  man.backend = to_string(backend);
  finish(man, a.out, start);
  if (violated) {
    std::cerr << "otkit: inequality violated\n";
    return kViolation;
  }
  return kOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string task = "uot";
  std::string sizes = "1000";
  std::string dims = "1";
  std::string backends = "dense,nfft";
  KernelFlags kernel;
  double r = 2.0;
  double lambda = 20.0;
  double eta = 1.0;
  double tol = 1e-10;
  int max_iter = 10000;
  std::uint64_t seed = 1;
  bool allow_dense_large = false;
  Output out;
};

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

int cmd_bench(const BenchArgs& a) {
  const auto start = Clock::now();
  if (a.task != "uot" && a.task != "mmd") throw InputError("--task must be uot or mmd");
  const std::vector<std::size_t> sizes = parse_sizes(a.sizes, "--sizes");
  const std::vector<std::size_t> dims = parse_sizes(a.dims, "--dims");
  std::vector<Backend> backends;
  for (const auto& b : split_names(a.backends)) backends.push_back(parse_backend(b));
  if (sizes.empty() || dims.empty() || backends.empty()) {
    throw InputError("--sizes, --dims and --backends must be non-empty");
  }
  for (std::size_t n : sizes) {
    for (Backend b : backends) check_dense_size(n, b, a.allow_dense_large);
  }
  for (std::size_t d : dims) {
    if (d > 3) throw InputError("--dims entries must be 1, 2 or 3");
  }
  const RadialKernel k = a.kernel.kernel();
  const CostSpec cost{Norm::euclidean, a.r};
  SinkhornConfig cfg;
  cfg.r = a.r;
  cfg.lambda = a.lambda;
  cfg.eta1 = cfg.eta2 = a.eta;
  cfg.tol = a.tol;
  cfg.max_iter = a.max_iter;
  for (Backend b : backends) {
    if (a.task == "uot") validate(cfg, cost, b);
  }

  std::ostringstream csv;
  csv << "task,backend,n,d,kernel,seconds,peak_mem_bytes_estimate,iterations\n";
  std::uint64_t row = 0;
  for (std::size_t n : sizes) {
    for (std::size_t d : dims) {
      const std::uint64_t s = CounterRng::derive(a.seed, row++);
      const DiscreteMeasure mu =
          sample_uniform(n, static_cast<int>(d), WeightMode::unbalanced, CounterRng::derive(s, 0));
      const DiscreteMeasure nu =
          sample_uniform(n, static_cast<int>(d), WeightMode::unbalanced, CounterRng::derive(s, 1));
      for (Backend b : backends) {
        int iterations = 0;
        auto once = [&] {
          if (a.task == "uot") {
            const SinkhornResult res = sinkhorn_uot(mu, nu, cost, cfg, b);
            if (!res.stats.converged) throw NumericError("Sinkhorn did not converge");
            iterations = res.stats.iterations;
          } else if (b == Backend::dense) {
            mmd_squared_dense(k, mu, nu, true);
          } else {
            mmd_squared_nfft(k, mu, nu, FastsumOptions{}, true);
          }
        };
        once();  // warmup
        reset_peak_rss();
        const auto t0 = Clock::now();
        once();
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        csv << a.task << ',' << to_string(b) << ',' << n << ',' << d << ','
            << (a.task == "uot" ? std::string("gibbs") : k.name()) << ','
            << io::format_double(secs) << ',' << peak_rss_bytes() << ',' << iterations << '\n';
      }
    }
  }
  a.out.write(csv.str());
  RunManifest man;
  man.subcommand = "bench";
  man.parameters = {{"task", a.task},     {"sizes", a.sizes},   {"dims", a.dims},
                    {"backends", a.backends}, {"r", a.r},       {"lambda", a.lambda},
                    {"eta", a.eta},       {"tol", a.tol},       {"max_iter", a.max_iter}};
  man.parameters.update(a.kernel.to_json());
  man.seed = a.seed;
  man.backend = a.backends;
  finish(man, a.out, start);
  return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string first, second;
  std::string etas = "1,10,100,1000,10000";
  double lambda = 0.001;
  std::string backend = "dense";
  double tol = 1e-12;
  int max_iter = 100000;
  Output out;
};

int cmd_sweep(const SweepArgs& a) {
  const auto start = Clock::now();
  const MeasurePair m = read_pair(a.first, a.second);
  const std::vector<double> etas = parse_list(a.etas, "--etas");
  if (etas.empty()) throw InputError("--etas is empty");
  const Backend backend = parse_backend(a.backend);
  const std::vector<SweepRow> rows =
      convergence_sweep_energy(m.mu, m.nu, a.lambda, etas, backend, a.tol, a.max_iter);
  std::ostringstream csv;
  csv << "eta,sd,mmd_energy,limit,diff\n";
  for (const SweepRow& r : rows) {
    csv << io::format_double(r.eta) << ',' << io::format_double(r.sd) << ','
        << io::format_double(r.mmd_energy) << ',' << io::format_double(r.limit) << ','
        << io::format_double(r.difference) << '\n';
  }
  a.out.write(csv.str());
  RunManifest man;
  man.subcommand = "sweep";
  man.parameters = {{"etas", etas}, {"lambda", a.lambda}, {"tol", a.tol}, {"max_iter", a.max_iter}};
  man.inputs = {a.first, a.second};
  man.backend = to_string(backend);
  finish(man, a.out, start);
  return kOk;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::size_t n = 100;
  int d = 1;
  std::uint64_t seed = 0;
  std::string mode = "unbalanced";
  Output out;
};

int cmd_gen(const GenArgs& a) {
  const auto start = Clock::now();
  if (a.n < 1) throw InputError("--n must be >= 1");
  if (a.d < 1 || a.d > 3) throw InputError("--d must be 1, 2 or 3");
  WeightMode mode;
  if (a.mode == "unbalanced") {
    mode = WeightMode::unbalanced;
  } else if (a.mode == "probability") {
    mode = WeightMode::probability;
  } else {
    throw InputError("--mode must be unbalanced or probability");
  }
  std::ostringstream csv;
  io::write_measure_csv(csv, sample_uniform(a.n, a.d, mode, a.seed));
  a.out.write(csv.str());
  RunManifest man;
  man.subcommand = "gen";
  man.parameters = {{"n", a.n}, {"d", a.d}, {"mode", a.mode}};
  man.seed = a.seed;
  finish(man, a.out, start);
  return kOk;
}

void add_output(CLI::App* app, Output& out) {
  app->add_option("--output,-o", out.path, "result file (default: standard output)");
  app->add_option("--manifest", out.manifest, "manifest path (default: <output>.manifest.json)");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Unbalanced optimal transport and MMD with NFFT fast summation", "otkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "thread cap (default: OTKIT_THREADS or all cores)");
  std::function<int()> action;

  UotArgs uot;
  auto* u = app.add_subcommand("uot", "entropy-regularized UOT between two measures");
  u->add_option("first", uot.first, "first measure (CSV or PGM)")->required();
  u->add_option("second", uot.second, "second measure (CSV or PGM)")->required();
  u->add_option("--r", uot.r, "cost exponent")->capture_default_str();
  u->add_option("--norm", uot.norm, "euclidean or l1")->capture_default_str();
  u->add_option("--lambda", uot.lambda, "inverse regularization strength")->capture_default_str();
  uot.eta.add(u);
  u->add_option("--backend", uot.backend, "dense or nfft")->capture_default_str();
  u->add_option("--tol", uot.tol, "stopping tolerance")->capture_default_str();
  u->add_option("--max-iter", uot.max_iter, "iteration cap per stage")->capture_default_str();
  u->add_option("--lambda-schedule", uot.schedule, "increasing list ending at --lambda");
  u->add_option("--init", uot.init, "zeros or upper-bound")->capture_default_str();
  u->add_flag("--debias", uot.debias, "also report the Sinkhorn divergence");
  u->add_flag("--allow-dense-large", uot.allow_dense_large, "lift the dense size guard");
  uot.fastsum.add(u);
  add_output(u, uot.out);
  u->callback([&] { action = [&] { return cmd_uot(uot); }; });

  MmdArgs mmd;
  auto* mm = app.add_subcommand("mmd", "maximum mean discrepancy between two measures");
  mm->add_option("first", mmd.first)->required();
  mm->add_option("second", mmd.second)->required();
  mmd.kernel.add(mm);
  mm->add_option("--backend", mmd.backend, "dense or nfft")->capture_default_str();
  mm->add_flag("--verify", mmd.verify, "report the fast-summation error against dense sums");
  mm->add_flag("--force", mmd.force, "allow the energy kernel for unequal masses");
  mm->add_flag("--allow-dense-large", mmd.allow_dense_large, "lift the dense size guard");
  mmd.fastsum.add(mm);
  add_output(mm, mmd.out);
  mm->callback([&] { action = [&] { return cmd_mmd(mmd); }; });

  BoundsArgs bnd;
  auto* b = app.add_subcommand("bounds", "closed-form bounds and inequalities");
  b->add_option("--check", bnd.check,
                "c-star, c-star-reg, wasserstein, frobenius, holder, holder-unbalanced, "
                "elementary")
      ->required();
  b->add_option("first", bnd.first);
  b->add_option("second", bnd.second);
  b->add_option("--r", bnd.r)->capture_default_str();
  b->add_option("--norm", bnd.norm)->capture_default_str();
  bnd.eta.add(b);
  b->add_option("--lambda", bnd.lambda)->capture_default_str();
  b->add_option("--lambda-schedule", bnd.schedule);
  b->add_option("--backend", bnd.backend)->capture_default_str();
  bnd.kernel.add(b);
  b->add_option("--plan", bnd.plan, "reference coupling for c-star (CSV rows, total mass 1)");
  b->add_option("--trials", bnd.trials, "seeded sample trials for the holder checks");
  b->add_option("--n", bnd.n, "sample size per trial")->capture_default_str();
  b->add_option("--seed", bnd.seed)->capture_default_str();
  b->add_option("--violation-tol", bnd.violation_tol)->capture_default_str();
  b->add_option("--surrogate-lambda", bnd.surrogate_lambda,
                "lambda of the regularized solve standing in for unregularized UOT")
      ->capture_default_str();
  add_output(b, bnd.out);
  b->callback([&] { action = [&] { return cmd_bounds(bnd); }; });

  BenchArgs bench;
  auto* be = app.add_subcommand("bench", "timing table over sizes, dimensions and backends");
  be->add_option("--task", bench.task, "uot or mmd")->capture_default_str();
  be->add_option("--sizes", bench.sizes)->capture_default_str();
  be->add_option("--dims", bench.dims)->capture_default_str();
  be->add_option("--backends", bench.backends)->capture_default_str();
  bench.kernel.add(be);
  be->add_option("--r", bench.r)->capture_default_str();
  be->add_option("--lambda", bench.lambda)->capture_default_str();
  be->add_option("--eta", bench.eta)->capture_default_str();
  be->add_option("--tol", bench.tol)->capture_default_str();
  be->add_option("--max-iter", bench.max_iter)->capture_default_str();
  be->add_option("--seed", bench.seed)->capture_default_str();
  be->add_flag("--allow-dense-large", bench.allow_dense_large);
  add_output(be, bench.out);
  be->callback([&] { action = [&] { return cmd_bench(bench); }; });

  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep", "Sinkhorn divergence against the energy distance");
  sw->add_option("first", sweep.first)->required();
  sw->add_option("second", sweep.second)->required();
  sw->add_option("--etas", sweep.etas)->capture_default_str();
  sw->add_option("--lambda", sweep.lambda)->capture_default_str();
  sw->add_option("--backend", sweep.backend)->capture_default_str();
  sw->add_option("--tol", sweep.tol)->capture_default_str();
  sw->add_option("--max-iter", sweep.max_iter)->capture_default_str();
  add_output(sw, sweep.out);
  sw->callback([&] { action = [&] { return cmd_sweep(sweep); }; });

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "uniform random measure as CSV");
  g->add_option("--n", gen.n)->required();
  g->add_option("--d", gen.d)->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--mode", gen.mode, "unbalanced or probability")->capture_default_str();
  add_output(g, gen.out);
  g->callback([&] { action = [&] { return cmd_gen(gen); }; });

  for (auto* sub : {u, mm, b, be, sw, g}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  try {
    if (threads < 0) throw InputError("--threads must be >= 1");
    if (threads > 0) set_thread_count(threads);
    return action();
  } catch (const InputError& e) {
    std::cerr << "otkit: " << e.what() << '\n';
    return kInputError;
  } catch (const NumericError& e) {
    std::cerr << "otkit: numeric failure: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    std::cerr << "otkit: " << e.what() << '\n';
    return kNumericError;
  }
}

}  // namespace otkit::cli
