#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "eigenform/io.hpp"
#include "eigenform/version.hpp"

namespace {

using namespace eigenform;

int log_level() {
  static const int level = [] {
    const char* v = std::getenv("EIGENFORM_LOG");
    if (!v) return 0;
    const std::string s(v);
    if (s == "debug") return 2;
    if (s == "info") return 1;
    return 0;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[info] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[debug] " << msg << "\n";
}

struct Overrides {
  SolverConfig solver;
  double check_tol = tol::check;
  double ext_tol = tol::ext;
  std::map<std::string, std::string> raw;  // for the manifest, as given
};

Overrides parse_overrides(const std::vector<std::string>& sets) {
  Overrides o;
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ParseError("--set expects key=value, got: " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    try {
      if (key == "tol")
        o.solver.tol = std::stod(val);
      else if (key == "residual_tol")
        o.solver.residual_tol = std::stod(val);
      else if (key == "max_iter")
        o.solver.max_iter = std::stoll(val);
      else if (key == "degeneracy_floor")
        o.solver.degeneracy_floor = std::stod(val);
      else if (key == "damping")
        o.solver.damping = std::stod(val);
      else if (key == "check_tol")
        o.check_tol = std::stod(val);
      else if (key == "ext_tol")
        o.ext_tol = std::stod(val);
      else
        throw ParseError("--set: unknown key: " + key);
    } catch (const std::invalid_argument&) {
      throw ParseError("--set: bad numeric value for " + key + ": " + val);
    } catch (const std::out_of_range&) {
      throw ParseError("--set: value out of range for " + key + ": " + val);
    }
    o.raw[key] = val;
  }
  return o;
}

ojson make_manifest(const std::string& command,
                    const std::vector<std::string>& inputs,
                    const std::optional<std::vector<double>>& weights,
                    const std::map<std::string, std::string>& overrides,
                    std::optional<std::uint64_t> seed = {},
                    std::optional<std::string> grid = {}) {
  ojson m;
  m["command"] = command;
  m["inputs"] = inputs;
  if (weights)
    m["weights"] = *weights;
  else
    m["weights"] = nullptr;
  if (grid) m["grid"] = *grid;
  m["config_overrides"] = overrides;
  if (seed)
    m["seed"] = *seed;
  else
    m["seed"] = nullptr;
  m["tool_version"] = kVersion;
  return m;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text;
  else
    write_text(out_path, text);
}

Weights weights_for(const FractalTriple& t, const std::vector<double>& w) {
  if (static_cast<int>(w.size()) != t.n_cells())
    throw DimensionError("expected " + std::to_string(t.n_cells()) +
                         " weights, got " + std::to_string(w.size()));
  return make_weights(w);
}

FractalTriple load_valid_triple(const std::string& spec) {
  FractalTriple t = load_triple(spec);
  ensure_valid(t);
  return t;
}

struct GridAxis {
  std::vector<double> points;
};

// Per-cell "lo:hi:steps" (log-spaced, endpoints included) or a bare number.
std::vector<GridAxis> parse_grid(const std::string& spec, int n_cells) {
  std::vector<GridAxis> axes;
  if (spec.empty()) return axes;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    GridAxis ax;
    const auto c1 = part.find(':');
    try {
      if (c1 == std::string::npos) {
        ax.points.push_back(std::stod(part));
      } else {
        const auto c2 = part.find(':', c1 + 1);
        if (c2 == std::string::npos)
          throw ParseError("grid axis needs lo:hi:steps, got: " + part);
        const double lo = std::stod(part.substr(0, c1));
        const double hi = std::stod(part.substr(c1 + 1, c2 - c1 - 1));
        const long steps = std::stol(part.substr(c2 + 1));
        if (!(lo > 0.0) || !(hi > 0.0))
          throw ParseError("grid endpoints must be positive: " + part);
        if (steps < 1) throw ParseError("grid steps must be >= 1: " + part);
        if (steps == 1) {
          ax.points.push_back(lo);
        } else {
          const double ratio = hi / lo;
          for (long i = 0; i < steps; ++i)
            ax.points.push_back(
                lo * std::pow(ratio, double(i) / double(steps - 1)));
        }
      }
    } catch (const std::invalid_argument&) {
      throw ParseError("bad grid axis: " + part);
    } catch (const std::out_of_range&) {
      throw ParseError("grid value out of range: " + part);
    }
    axes.push_back(std::move(ax));
  }
  if (static_cast<int>(axes.size()) != n_cells)
    throw DimensionError("grid needs one axis per cell (" +
                         std::to_string(n_cells) + "), got " +
                         std::to_string(axes.size()));
  return axes;
}

int run_validate(const std::string& triple_spec, const std::string& out,
                 const Overrides& ov) {
  FractalTriple t = load_triple(triple_spec);
  ValidationReport rep = validate_triple(t);
  ojson j = json_of(rep);
  j["manifest"] = make_manifest("validate", {triple_spec}, {}, ov.raw);
  emit(out, dump_line(j));
  return rep.pass ? 0 : 2;
}

int run_solve(const std::string& triple_spec, const std::vector<double>& w,
              const std::string& start_path, const std::string& out,
              const Overrides& ov) {
  FractalTriple t = load_valid_triple(triple_spec);
  Weights weights = weights_for(t, w);
  SolverConfig cfg = ov.solver;
  std::vector<std::string> inputs{triple_spec};
  if (!start_path.empty()) {
    cfg.start = load_form(start_path);
    inputs.push_back(start_path);
  }
  EigenformResult res = solve_eigenform(t, weights, cfg);
  log_info("solve: " + std::string(status_name(res.status)) + " after " +
           std::to_string(res.iterations) + " iterations");
  ojson j = json_of(res);
  j["manifest"] = make_manifest("solve", inputs, w, ov.raw);
  emit(out, dump_line(j));
  return res.status == SolveStatus::converged ? 0 : 3;
}

int run_existence(const std::string& triple_spec, const std::vector<double>& w,
                  const std::string& out, const Overrides& ov) {
  FractalTriple t = load_valid_triple(triple_spec);
  Weights weights = weights_for(t, w);
  ExistenceReport rep = existence_report(t, weights, ov.solver, ov.check_tol);
  log_info("existence: " + rep.outcome);
  ojson j = json_of(rep);
  j["manifest"] = make_manifest("existence", {triple_spec}, w, ov.raw);
  emit(out, dump_line(j));
  return rep.solve.status == SolveStatus::converged ? 0 : 3;
}

int run_classify(const std::string& triple_spec, const std::vector<double>& w,
                 const std::string& form_path, const std::string& out,
                 const Overrides& ov) {
  FractalTriple t = load_valid_triple(triple_spec);
  Weights weights = weights_for(t, w);
  DirichletForm e = load_form(form_path);
  if (e.n_boundary != t.n_boundary)
    throw DimensionError("form: n_boundary does not match triple");
  if (std::abs(norm1(e) - 1.0) > 1e-12) {
    log_info("classify: normalizing input form");
    e = normalized(e);
  }
  BoundaryClass bc = classify(t, weights, e);
  ojson j = json_of(bc);
  j["manifest"] = make_manifest("classify", {triple_spec, form_path}, w,
                                ov.raw);
  emit(out, dump_line(j));
  return 0;
}

int run_repulsing(const std::string& triple_spec, const std::vector<double>& w,
                  const std::string& form_path, const std::string& ref_path,
                  const std::string& out, const Overrides& ov) {
  FractalTriple t = load_valid_triple(triple_spec);
  Weights weights = weights_for(t, w);
  DirichletForm e_deg = load_form(form_path);
  DirichletForm e_ref =
      ref_path.empty() ? uniform_form(t.n_boundary) : load_form(ref_path);
  std::vector<std::string> inputs{triple_spec, form_path};
  if (!ref_path.empty()) inputs.push_back(ref_path);
  RepulsingReport rep =
      repulsing_check(t, weights, e_deg, e_ref, ov.check_tol);
  ojson j = json_of(rep);
  j["manifest"] = make_manifest("repulsing", inputs, w, ov.raw);
  emit(out, dump_line(j));
  return 0;
}

int run_probe(const std::string& triple_spec, const std::vector<double>& w,
              const std::string& form_path, const std::string& ref_path,
              double radius, long long samples, std::uint64_t seed,
              const std::string& out, const Overrides& ov) {
  FractalTriple t = load_valid_triple(triple_spec);
  Weights weights = weights_for(t, w);
  DirichletForm e_b = load_form(form_path);
  DirichletForm e_ref =
      ref_path.empty() ? uniform_form(t.n_boundary) : load_form(ref_path);
  std::vector<std::string> inputs{triple_spec, form_path};
  if (!ref_path.empty()) inputs.push_back(ref_path);
  ProbeReport rep =
      anti_attracting_probe(t, weights, simplex_point(e_b),
                            simplex_point(e_ref), radius, samples, seed,
                            ov.ext_tol);
  ojson j = json_of(rep);
  j["manifest"] = make_manifest("probe", inputs, w, ov.raw, seed);
  emit(out, dump_line(j));
  return 0;
}

int run_sweep(const std::string& triple_spec, const std::string& grid_spec,
              int jobs, const std::string& out, const Overrides& ov) {
  FractalTriple t = load_valid_triple(triple_spec);
  const auto axes = parse_grid(grid_spec, t.n_cells());
  const int k = t.n_cells();
  long long total = axes.empty() ? 0 : 1;
  for (const auto& ax : axes) total *= static_cast<long long>(ax.points.size());

  // grid-lexicographic order: the first cell's axis varies slowest
  auto weights_at = [&](long long idx) {
    std::vector<double> w(k);
    for (int c = k - 1; c >= 0; --c) {
      const auto sz = static_cast<long long>(axes[c].points.size());
      w[c] = axes[c].points[idx % sz];
      idx /= sz;
    }
    return w;
  };

  std::vector<std::string> lines(total);
  std::vector<char> converged(total, 0);
  std::atomic<long long> next{0};
  auto worker = [&] {
    for (;;) {
      const long long i = next.fetch_add(1);
      if (i >= total) return;
      const std::vector<double> w = weights_at(i);
      EigenformResult res = solve_eigenform(t, make_weights(w), ov.solver);
      converged[i] = res.status == SolveStatus::converged;
      ojson j = json_of(res);
      j["manifest"] = make_manifest("sweep", {triple_spec}, w, ov.raw);
      lines[i] = dump_line(j);
    }
  };
  jobs = std::max(1, jobs);
  if (total < jobs) jobs = std::max<long long>(1, total);
  if (jobs == 1 || total <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  long long n_conv = 0;
  for (char c : converged) n_conv += c;
  std::string payload;
  for (const auto& line : lines) payload += line;
  ojson summary;
  summary["summary"] = {{"points", total}, {"converged", n_conv}};
  summary["manifest"] =
      make_manifest("sweep", {triple_spec}, {}, ov.raw, {}, grid_spec);
  payload += dump_line(summary);
  emit(out, payload);
  return n_conv == total ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-similar energies on finitely ramified fractals"};
  app.require_subcommand(1);

  std::string triple_spec, form_path, ref_path, start_path, out_path;
  std::vector<double> weights;
  std::vector<std::string> sets;
  std::string grid_spec;
  int jobs = 1;
  double radius = 0.0;
  long long samples = 0;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "write the report here instead of stdout");
    cmd->add_option("--set", sets, "override a config key, key=value")
        ->take_all();
  };
  auto add_weights = [&](CLI::App* cmd) {
    cmd->add_option("--weights", weights, "one positive weight per cell")
        ->required()
        ->delimiter(',');
  };

  CLI::App* c_validate = app.add_subcommand("validate", "check the defining conditions of a triple");
  c_validate->add_option("triple", triple_spec, "triple file or builtin:<name>")->required();
  add_common(c_validate);

  CLI::App* c_solve = app.add_subcommand("solve", "search for an eigenform by fixed-point iteration");
  c_solve->add_option("triple", triple_spec)->required();
  add_weights(c_solve);
  c_solve->add_option("--start", start_path, "starting form (default: barycenter)");
  add_common(c_solve);

  CLI::App* c_exist = app.add_subcommand("existence", "solve and diagnose the boundary limit on failure");
  c_exist->add_option("triple", triple_spec)->required();
  add_weights(c_exist);
  add_common(c_exist);

  CLI::App* c_classify = app.add_subcommand("classify", "boundary stratum of a normalized form");
  c_classify->add_option("triple", triple_spec)->required();
  add_weights(c_classify);
  c_classify->add_option("--form", form_path)->required();
  add_common(c_classify);

  CLI::App* c_rep = app.add_subcommand("repulsing", "repulsion certificate for a degenerate eigenform");
  c_rep->add_option("triple", triple_spec)->required();
  add_weights(c_rep);
  c_rep->add_option("--form", form_path, "the degenerate eigenform")->required();
  c_rep->add_option("--ref", ref_path, "interior reference (default: barycenter)");
  add_common(c_rep);

  CLI::App* c_probe = app.add_subcommand("probe", "sample a boundary neighborhood for outward mapping");
  c_probe->add_option("triple", triple_spec)->required();
  add_weights(c_probe);
  c_probe->add_option("--form", form_path, "boundary point to probe")->required();
  c_probe->add_option("--ref", ref_path, "interior reference (default: barycenter)");
  c_probe->add_option("--radius", radius)->required();
  c_probe->add_option("--samples", samples)->required();
  c_probe->add_option("--seed", seed)->required();
  add_common(c_probe);

  CLI::App* c_sweep = app.add_subcommand("sweep", "solve over a log-spaced weight grid, one JSON line each");
  c_sweep->add_option("triple", triple_spec)->required();
  c_sweep->add_option("--weights-grid", grid_spec, "per-cell lo:hi:steps, comma separated")->required();
  c_sweep->add_option("--jobs", jobs, "worker threads (output order is unaffected)");
  add_common(c_sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int rc = 1;
  try {
    const Overrides ov = parse_overrides(sets);
    if (app.got_subcommand(c_validate))
      rc = run_validate(triple_spec, out_path, ov);
    else if (app.got_subcommand(c_solve))
      rc = run_solve(triple_spec, weights, start_path, out_path, ov);
    else if (app.got_subcommand(c_exist))
      rc = run_existence(triple_spec, weights, out_path, ov);
    else if (app.got_subcommand(c_classify))
      rc = run_classify(triple_spec, weights, form_path, out_path, ov);
    else if (app.got_subcommand(c_rep))
      rc = run_repulsing(triple_spec, weights, form_path, ref_path, out_path, ov);
    else if (app.got_subcommand(c_probe))
      rc = run_probe(triple_spec, weights, form_path, ref_path, radius,
                     samples, seed, out_path, ov);
    else if (app.got_subcommand(c_sweep))
      rc = run_sweep(triple_spec, grid_spec, jobs, out_path, ov);
  } catch (const ParseError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const DimensionError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const UnknownName& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }

  const auto dt = std::chrono::duration_cast<std::chrono::microseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  // duration stays out of the JSON so identical inputs give identical bytes
  log_info("completed in " + std::to_string(dt) + " us");
  log_debug("exit code " + std::to_string(rc));
  return rc;
}
