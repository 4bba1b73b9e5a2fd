#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>
#include <type_traits>

#include "spdgeo/ecd.hpp"
#include "spdgeo/matrix_io.hpp"
#include "spdgeo/optim.hpp"
#include "spdgeo/oracles.hpp"
#include "spdgeo/trace_csv.hpp"

namespace spdgeo::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename F>
auto load(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw DataError(what + ": " + e.what());
  }
}

template <typename T>
struct is_optional : std::false_type {};
template <typename T>
struct is_optional<std::optional<T>> : std::true_type {};

template <typename T>
void put(json& j, const char* key, const T& v) {
  if constexpr (is_optional<T>::value) {
    j[key] = v ? json(*v) : json(nullptr);
  } else {
    j[key] = v;
  }
}

template <typename T>
void get(const json& j, const char* key, T& v) {
  if (!j.contains(key)) return;
  if constexpr (is_optional<T>::value) {
    if (j[key].is_null())
      v.reset();
    else
      v = j[key].get<typename T::value_type>();
  } else {
    v = j[key].get<T>();
  }
}

#define SPDGEO_CONFIG_FIELDS(X)                                                                  \
  X(command) X(seed) X(out) X(threads) X(tol) X(max_iter) X(dgf) X(alpha) X(beta) X(b) X(nu)    \
  X(n) X(dim) X(scatter) X(data) X(method) X(dims) X(betas) X(alpha_ratio) X(methods)           \
  X(matrices) X(weights) X(objective) X(suite) X(trials) X(fault_mean_scale)

std::string with_suffix(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

json matrix_json(const Mat& m) { return json::parse(io::to_json_envelope(m)); }

ecd::Dgf make_dgf(const RunConfig& c, Index d) {
  const auto need = [&](const std::optional<double>& v, const char* name) {
    if (!v) throw UsageError("--dgf " + c.dgf + " needs --" + name);
    return *v;
  };
  ecd::Dgf g;
  if (c.dgf == "gaussian") {
    g = ecd::Dgf::gaussian(d);
  } else {
    ecd::DgfKind kind;
    try {
      kind = ecd::parse_dgf_kind(c.dgf);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    switch (kind) {
      case ecd::DgfKind::Kotz:
        g = ecd::Dgf::kotz(need(c.alpha, "alpha"), c.b.value_or(2.0), need(c.beta, "beta"));
        break;
      case ecd::DgfKind::StudentT:
        g = ecd::Dgf::student_t(need(c.nu, "nu"));
        break;
      case ecd::DgfKind::PowerExponential:
        g = ecd::Dgf::power_exponential(need(c.nu, "nu"), c.b.value_or(2.0));
        break;
      case ecd::DgfKind::WDist:
        g = ecd::Dgf::wdist(need(c.nu, "nu"), c.b.value_or(2.0));
        break;
      case ecd::DgfKind::EllipticalGamma:
        g = ecd::Dgf::elliptical_gamma(need(c.nu, "nu"), c.b.value_or(2.0));
        break;
      case ecd::DgfKind::PearsonII:
        g = ecd::Dgf::pearson2(need(c.nu, "nu"));
        break;
      case ecd::DgfKind::Logistic:
        g = ecd::Dgf::logistic();
        break;
    }
  }
  try {
    g.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return g;
}

json dgf_json(const ecd::Dgf& g) {
  json p = json::object();
  for (const auto& [k, v] : g.params()) p[k] = v;
  return p;
}

// Random scatter with trace d.
Spd random_scatter(Index d, std::mt19937_64& rng) {
  const Spd s = random_spd<double>(d, rng, 1.0, 1e3);
  return s.scaled(static_cast<double>(d) / s.matrix().trace());
}

ecd::Dataset read_dataset(const std::string& path) {
  return load("dataset " + path, [&] {
    const std::string text = io::read_text(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
      json j;
      try {
        j = json::parse(text);
      } catch (const json::exception& e) {
        throw InvalidInput(e.what());
      }
      if (!j.contains("d") || !j.contains("data")) throw InvalidInput("expected keys d and data");
      const auto d = j["d"].get<Index>();
      const auto v = j["data"].get<std::vector<double>>();
      if (d <= 0 || v.size() % static_cast<std::size_t>(d) != 0)
        throw InvalidInput("data length is not a multiple of d");
      const Index n = static_cast<Index>(v.size()) / d;
      if (n == 0) return ecd::Dataset::empty(d);
      Mat rows(n, d);
      for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < d; ++k) rows(i, k) = v[static_cast<std::size_t>(i * d + k)];
      return ecd::Dataset::from_rows(rows);
    }
    return io::parse_dataset_csv(text);
  });
}

int status_code(Status s) { return s == Status::Converged ? kOk : kNoConvergence; }

// ---------------------------------------------------------------- sample

int cmd_sample(const RunConfig& c, std::ostream& out) {
  if (c.n < 0) throw UsageError("--n must be non-negative");
  Spd s;
  if (!c.scatter.empty()) {
    s = load("scatter " + c.scatter, [&] { return io::read_spd(c.scatter); });
    if (c.dim > 0 && c.dim != s.dim()) throw UsageError("--dim does not match the scatter file");
  } else {
    if (c.dim <= 0) throw UsageError("sample needs --dim or --scatter");
    std::mt19937_64 rng = oracles::trial_rng(c.seed, -1);
    s = random_scatter(c.dim, rng);
  }
  const ecd::Dgf g = make_dgf(c, s.dim());
  ecd::Dataset ds;
  try {
    ds = ecd::sample(g, s, static_cast<Index>(c.n), c.seed);
  } catch (const Unsupported& e) {
    throw UsageError(e.what());
  }
  const std::string path = c.out.empty() ? "data.csv" : c.out;
  io::write_text(path, io::dataset_csv(ds));
  json prov;
  prov["seed"] = c.seed;
  prov["dgf"] = g.name();
  prov["params"] = dgf_json(g);
  prov["n"] = c.n;
  prov["scatter"] = matrix_json(s.matrix());
  const std::string prov_path = with_suffix(path, ".provenance.json");
  io::write_text(prov_path, prov.dump(2) + "\n");
  out << "wrote " << path << " (" << c.n << " x " << s.dim() << ") and " << prov_path << "\n";
  return kOk;
}

// ---------------------------------------------------------------- fit

json fit_diagnostics(const ecd::FitReport& r) {
  json d;
  d["method"] = ecd::to_string(r.method);
  d["status"] = to_string(r.status);
  d["iterations"] = r.iterations;
  d["final_cost"] = r.final_cost;
  d["grad_norm"] = r.grad_norm;
  d["class"] = {{"gconvex", r.dgf_class.gconvex},
                {"ln", r.dgf_class.ln},
                {"lc", r.dgf_class.lc},
                {"recommended", ecd::to_string(r.dgf_class.recommended)}};
  if (r.existence) {
    d["existence"] = {{"ok", r.existence->ok},
                      {"exact", r.existence->exact},
                      {"message", r.existence->message},
                      {"fraction", r.existence->fraction},
                      {"bound", r.existence->bound}};
  } else {
    d["existence"] = nullptr;
  }
  return d;
}

ecd::FitMethod fit_method(const std::string& name) {
  try {
    return ecd::parse_fit_method(name);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

int cmd_fit(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.data.empty()) throw UsageError("fit needs --data");
  const ecd::FitMethod method = fit_method(c.method);
  const ecd::Dataset data = read_dataset(c.data);
  const ecd::Dgf g = make_dgf(c, data.d());
  ecd::FitOptions o;
  o.method = method;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  const ecd::FitReport r = ecd::mle_fit(g, data, o);

  const std::string path = c.out.empty() ? "model.json" : c.out;
  json model;
  model["dgf"] = g.name();
  model["params"] = dgf_json(g);
  model["scatter"] = matrix_json(r.scatter.matrix());
  model["diagnostics"] = fit_diagnostics(r);
  io::write_text(path, model.dump(2) + "\n");
  const std::string trace_path = with_suffix(path, ".trace.csv");
  io::write_text(trace_path, io::trace_csv(r.trace));

  if (r.existence && !r.existence->ok) err << "warning: " << r.existence->message << "\n";
  out << ecd::to_string(r.method) << ": " << to_string(r.status) << " after " << r.iterations
      << " iterations, cost " << io::format_double(r.final_cost) << "; wrote " << path << " and "
      << trace_path << "\n";
  return status_code(r.status);
}

// ---------------------------------------------------------------- bench

struct BenchRow {
  std::string method;
  int dim = 0;
  double beta = 0.0, alpha = 0.0;
  int iters = 0;
  double time_s = 0.0, final_cost = 0.0;
  std::string status;
};

std::string iso_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

int cmd_bench(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.dims.empty() || c.betas.empty() || c.methods.empty())
    throw UsageError("bench needs non-empty --dims, --betas and --methods");
  if (!c.alpha && !c.alpha_ratio) throw UsageError("bench needs --alpha or --alpha-ratio");
  if (c.n <= 0) throw UsageError("--n must be positive");
  std::vector<ecd::FitMethod> methods;
  for (const auto& m : c.methods) methods.push_back(fit_method(m));
  for (int d : c.dims)
    if (d <= 0) throw UsageError("--dims entries must be positive");

  struct Cell {
    int dim;
    double beta, alpha;
  };
  std::vector<Cell> cells;
  for (int d : c.dims)
    for (double beta : c.betas)
      cells.push_back({d, beta, c.alpha_ratio ? *c.alpha_ratio * beta : *c.alpha});
  // Validate every dgf before any work starts.
  for (const Cell& cell : cells) {
    RunConfig k = c;
    k.dgf = "kotz";
    k.alpha = cell.alpha;
    k.beta = cell.beta;
    make_dgf(k, cell.dim);
  }

  const fs::path dir = c.out.empty() ? "bench" : c.out;
  fs::create_directories(dir);
  const std::string started = iso_now();

  std::vector<std::vector<BenchRow>> results(cells.size());
  std::vector<std::string> errors(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& cell = cells[i];
      try {
        const auto tag = "_d" + std::to_string(cell.dim) + "_beta" + io::format_double(cell.beta);
        const ecd::Dgf g = ecd::Dgf::kotz(cell.alpha, c.b.value_or(2.0), cell.beta);
        std::mt19937_64 rng = oracles::trial_rng(c.seed, static_cast<int>(i));
        const std::uint64_t data_seed = rng();
        const Spd scatter = random_scatter(cell.dim, rng);
        const ecd::Dataset data = ecd::sample(g, scatter, static_cast<Index>(c.n), data_seed);
        io::write_text(dir / ("data" + tag + ".csv"), io::dataset_csv(data));
        for (ecd::FitMethod m : methods) {
          BenchRow row{ecd::to_string(m), cell.dim, cell.beta, cell.alpha, 0, 0.0, 0.0, ""};
          try {
            ecd::FitOptions o;
            o.method = m;
            o.tol = c.tol;
            o.max_iter = c.max_iter;
            o.check_existence = false;
            const auto t0 = std::chrono::steady_clock::now();
            const ecd::FitReport r = ecd::mle_fit(g, data, o);
            row.time_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            row.iters = r.iterations;
            row.final_cost = r.final_cost;
            row.status = to_string(r.status);
            io::write_text(dir / ("trace_" + row.method + tag + ".csv"), io::trace_csv(r.trace));
          } catch (const IncompatibleMethod&) {
            row.status = "incompatible";
            row.final_cost = std::numeric_limits<double>::quiet_NaN();
          } catch (const Error& e) {
            row.status = "error";
            row.final_cost = std::numeric_limits<double>::quiet_NaN();
            std::lock_guard lock(log_mutex);
            err << "cell d=" << cell.dim << " beta=" << cell.beta << " " << row.method << ": "
                << e.what() << "\n";
          }
          results[i].push_back(row);
        }
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int nthreads =
      std::clamp(c.threads > 0 ? c.threads : hw, 1, static_cast<int>(cells.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream summary;
  summary << "method,dim,beta,alpha,iters,time_s,final_cost,status\n";
  int ok_cells = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!errors[i].empty()) {
      err << "cell d=" << cells[i].dim << " beta=" << cells[i].beta << " failed: " << errors[i]
          << "\n";
      continue;
    }
    bool any = false;
    for (const BenchRow& r : results[i]) {
      summary << r.method << ',' << r.dim << ',' << io::format_double(r.beta) << ','
              << io::format_double(r.alpha) << ',' << r.iters << ','
              << io::format_double(r.time_s) << ',' << io::format_double(r.final_cost) << ','
              << r.status << '\n';
      any = any || r.status == to_string(Status::Converged);
    }
    if (any) ++ok_cells;
  }
  io::write_text(dir / "summary.csv", summary.str());
  json meta;
  meta["started"] = started;
  meta["finished"] = iso_now();
  meta["threads"] = nthreads;
  meta["config"] = json::parse(to_json(c));
  io::write_text(dir / "metadata.json", meta.dump(2) + "\n");
  out << "bench: " << ok_cells << " of " << cells.size() << " cells converged; wrote "
      << (dir / "summary.csv").string() << "\n";
  return ok_cells > 0 ? kOk : kNoConvergence;
}

// ---------------------------------------------------------------- gmean

int cmd_gmean(const RunConfig& c, std::ostream& out) {
  if (c.matrices.empty()) throw UsageError("gmean needs at least one matrix file");
  std::vector<Spd> mats;
  for (const auto& f : c.matrices) mats.push_back(load("matrix " + f, [&] { return io::read_spd(f); }));
  std::vector<double> w = c.weights;
  if (w.empty()) {
    w = uniform_weights(mats.size());
  } else {
    if (w.size() != mats.size()) throw UsageError("--weights needs one weight per matrix");
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(sum > 0.0) || std::any_of(w.begin(), w.end(), [](double x) { return !(x >= 0.0); }))
      throw UsageError("--weights must be non-negative with a positive sum");
    for (double& x : w) x /= sum;
  }
  SolverConfig cfg;
  try {
    cfg.method = parse_method(c.method == "auto" ? "lbfgs" : c.method);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  cfg.grad_tol = c.tol.value_or(1e-10);
  cfg.max_iter = c.max_iter.value_or(1000);
  Problem p;
  try {
    if (c.objective == "mean")
      p = karcher_problem(w, mats);
    else if (c.objective == "median")
      p = median_problem(w, mats);
    else
      throw UsageError("--objective must be mean or median");
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
  const SolveReport r = solve(p, cfg);
  const std::string path = c.out.empty() ? "gmean.csv" : c.out;
  io::write_matrix(path, r.minimizer.matrix());
  out << c.objective << ": " << to_string(r.status) << " after " << r.iterations
      << " iterations, grad_norm " << io::format_double(r.grad_norm) << "; wrote " << path << "\n";
  return status_code(r.status);
}

// ---------------------------------------------------------------- check

int cmd_check(const RunConfig& c, std::ostream& out) {
  if (c.trials <= 0) throw UsageError("--trials must be positive");
  oracles::Options opts;
  opts.tol = c.tol.value_or(opts.tol);
  if (c.fault_mean_scale) {
    const double s = *c.fault_mean_scale;
    opts.mean = [s](const Spd& a, const Spd& b) { return geometric_mean(a, b).scaled(s); };
  }
  std::vector<oracles::CheckReport> reports;
  try {
    reports = oracles::run_suite(c.suite, c.seed, c.trials, opts);
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
  std::ostringstream table;
  table << "name,trials,violations,worst_slack\n";
  int violations = 0;
  for (const auto& r : reports) {
    table << r.name << ',' << r.trials << ',' << r.violations << ','
          << io::format_double(r.worst_slack) << '\n';
    violations += r.violations;
  }
  out << table.str();
  if (!c.out.empty()) io::write_text(c.out, table.str());
  return violations == 0 ? kOk : kViolations;
}

// ---------------------------------------------------------------- parsing

class Parser {
 public:
  Parser() : app_("Geometric optimization on SPD matrices", "spdgeo") {
    app_.require_subcommand(1);
    app_.fallthrough();
    opt(&app_, "--seed", &RunConfig::seed, "RNG seed");
    opt(&app_, "--out", &RunConfig::out, "Output file (or directory for bench)");
    opt(&app_, "--threads", &RunConfig::threads, "Worker threads for bench (0: all cores)");
    opt(&app_, "--tol", &RunConfig::tol, "Convergence or oracle tolerance");
    opt(&app_, "--max-iter", &RunConfig::max_iter, "Iteration cap");
    app_.add_option("--config", config_path_, "JSON config mirroring the flags");
    app_.add_option("--save-config", save_path_, "Write the effective config as JSON");

    const auto dgf_flags = [this](CLI::App* a) {
      opt(a, "--dgf", &RunConfig::dgf, "kotz, gaussian, student_t, power_exponential, wdist, "
                                        "elliptical_gamma, pearson2, logistic");
      opt(a, "--alpha", &RunConfig::alpha, "Kotz alpha");
      opt(a, "--beta", &RunConfig::beta, "Kotz beta");
      opt(a, "--b", &RunConfig::b, "Kotz / power-exponential scale (default 2)");
      opt(a, "--nu", &RunConfig::nu, "Shape parameter of the other families");
    };

    auto* sample = app_.add_subcommand("sample", "Draw a dataset");
    dgf_flags(sample);
    opt(sample, "--n", &RunConfig::n, "Number of samples");
    opt(sample, "--dim", &RunConfig::dim, "Dimension (random scatter)");
    opt(sample, "--scatter", &RunConfig::scatter, "Scatter matrix file");

    auto* fit = app_.add_subcommand("fit", "Maximum-likelihood scatter");
    dgf_flags(fit);
    opt(fit, "--data", &RunConfig::data, "Dataset file");
    opt(fit, "--method", &RunConfig::method, "auto, fp, fp2, cccp, sd, cg, lbfgs");

    auto* bench = app_.add_subcommand("bench", "Solver comparison grid");
    opt(bench, "--alpha", &RunConfig::alpha, "Kotz alpha");
    opt(bench, "--alpha-ratio", &RunConfig::alpha_ratio, "alpha = ratio * beta");
    opt(bench, "--b", &RunConfig::b, "Kotz b (default 2)");
    opt(bench, "--dims", &RunConfig::dims, "Dimensions")->delimiter(',');
    opt(bench, "--betas", &RunConfig::betas, "Kotz beta values")->delimiter(',');
    opt(bench, "--methods", &RunConfig::methods, "Methods")->delimiter(',');
    opt(bench, "--n", &RunConfig::n, "Samples per cell");

    auto* gmean = app_.add_subcommand("gmean", "Weighted geometric mean or median");
    opt(gmean, "matrices", &RunConfig::matrices, "Matrix files");
    opt(gmean, "--weights", &RunConfig::weights, "Weights")->delimiter(',');
    opt(gmean, "--objective", &RunConfig::objective, "mean or median");
    opt(gmean, "--method", &RunConfig::method, "sd, cg, lbfgs");

    auto* check = app_.add_subcommand("check", "Randomized inequality oracles");
    opt(check, "--suite", &RunConfig::suite, "thompson, gconvex, majorization, all");
    opt(check, "--trials", &RunConfig::trials, "Trials per oracle");
    // Test fixture: replaces A # B by s (A # B) in the midpoint checks.
    opt(check, "--fault-mean-scale", &RunConfig::fault_mean_scale, "")->group("");
  }

  CLI::App& app() { return app_; }

  RunConfig effective() const {
    RunConfig cfg = flags_;
    if (!config_path_.empty()) {
      cfg = load("config " + config_path_,
                 [&] { return config_from_json(io::read_text(config_path_)); });
      for (const auto& [o, copy] : merges_)
        if (o->count() > 0) copy(cfg, flags_);
    }
    for (const auto* sub : app_.get_subcommands()) cfg.command = sub->get_name();
    return cfg;
  }

  const std::string& save_path() const { return save_path_; }

 private:
  template <typename T>
  CLI::Option* opt(CLI::App* a, const std::string& name, T RunConfig::*field,
                   const std::string& desc) {
    CLI::Option* o;
    if constexpr (is_optional<T>::value) {
      o = a->add_option_function<typename T::value_type>(
          name, [this, field](const typename T::value_type& v) { flags_.*field = v; }, desc);
    } else {
      o = a->add_option(name, flags_.*field, desc);
    }
    merges_.emplace_back(o, [field](RunConfig& dst, const RunConfig& src) {
      dst.*field = src.*field;
    });
    return o;
  }

  CLI::App app_;
  RunConfig flags_;
  std::string config_path_, save_path_;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&, const RunConfig&)>>> merges_;
};

}  // namespace

std::string to_json(const RunConfig& c) {
  json j;
#define X(f) put(j, #f, c.f);
  SPDGEO_CONFIG_FIELDS(X)
#undef X
  return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInput("config: expected an object");
  RunConfig c;
  static const std::vector<std::string> known = {
#define X(f) #f,
      SPDGEO_CONFIG_FIELDS(X)
#undef X
  };
  for (const auto& [k, v] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw InvalidInput("config: unknown key " + k);
  try {
#define X(f) get(j, #f, c.f);
    SPDGEO_CONFIG_FIELDS(X)
#undef X
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  return c;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Parser parser;
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    parser.app().parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = parser.app().exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  try {
    const RunConfig cfg = parser.effective();
    if (!parser.save_path().empty()) io::write_text(parser.save_path(), to_json(cfg));
    if (cfg.command == "sample") return cmd_sample(cfg, out);
    if (cfg.command == "fit") return cmd_fit(cfg, out, err);
    if (cfg.command == "bench") return cmd_bench(cfg, out, err);
    if (cfg.command == "gmean") return cmd_gmean(cfg, out);
    if (cfg.command == "check") return cmd_check(cfg, out);
    throw UsageError("unknown command " + cfg.command);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const RankError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const DomainError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const NonFiniteCost& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const Error& e) {
    // IncompatibleMethod, ClassViolation, InvalidInput, Unsupported.
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
}

}  // namespace spdgeo::cli
