#include "specext/jobs.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "specext/errors.hpp"

namespace specext {

namespace {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Serialization: every float is written with 17 significant digits so that
// re-reading loses nothing.

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void dump_json(const json& node, std::ostream& os) {
  switch (node.type()) {
    case json::value_t::object: {
      os << "{";
      bool first = true;
      for (const auto& [key, value] : node.items()) {
        if (!first) os << ",";
        first = false;
        os << json(key).dump() << ":";
        dump_json(value, os);
      }
      os << "}";
      break;
    }
    case json::value_t::array: {
      os << "[";
      for (std::size_t i = 0; i < node.size(); ++i) {
        if (i) os << ",";
        dump_json(node[i], os);
      }
      os << "]";
      break;
    }
    case json::value_t::number_float:
      os << format_double(node.get<double>());
      break;
    default:
      os << node.dump();
  }
}

std::string dump_json(const json& node) {
  std::ostringstream os;
  dump_json(node, os);
  return os.str();
}

// ---------------------------------------------------------------------------
// Schema helpers.

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.contains(key))
      throw config_error("unknown field \"" + key + "\" in " + where);
}

template <typename T>
T get_as(const json& v, const std::string& name) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw config_error("field \"" + name + "\" has the wrong type");
  }
}

}  // namespace

JobConfig parse_job_config(const std::string& json_text,
                           const std::string& command_hint) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw config_error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw config_error("config root must be an object");

  reject_unknown_keys(doc,
                      {"command", "dimension", "grid", "nu", "lambda", "lambdas",
                       "index_set", "model", "data", "point", "solver", "grids",
                       "section", "seed", "out_dir"},
                      "config");

  JobConfig cfg;
  if (doc.contains("command")) cfg.command = get_as<std::string>(doc["command"], "command");
  if (!command_hint.empty()) {
    if (!cfg.command.empty() && cfg.command != command_hint)
      throw config_error("config command \"" + cfg.command +
                         "\" does not match CLI subcommand \"" + command_hint + "\"");
    cfg.command = command_hint;
  }
  static const std::set<std::string> commands = {
      "moments", "solve", "verify", "sweep-lambda", "converge-grid",
      "entropy-curve"};
  if (!commands.contains(cfg.command))
    throw config_error("unknown or missing command \"" + cfg.command + "\"");

  if (doc.contains("dimension"))
    cfg.dimension = get_as<int>(doc["dimension"], "dimension");
  if (doc.contains("grid"))
    cfg.grid_sizes = get_as<std::vector<int>>(doc["grid"], "grid");
  if (doc.contains("nu")) cfg.nu = get_as<int>(doc["nu"], "nu");
  if (doc.contains("lambda") && doc.contains("lambdas"))
    throw config_error("give either \"lambda\" or \"lambdas\", not both");
  if (doc.contains("lambda"))
    cfg.lambdas = {get_as<double>(doc["lambda"], "lambda")};
  if (doc.contains("lambdas"))
    cfg.lambdas = get_as<std::vector<double>>(doc["lambdas"], "lambdas");

  if (doc.contains("index_set")) {
    const json& is = doc["index_set"];
    if (!is.is_object()) throw config_error("index_set must be an object");
    reject_unknown_keys(is, {"box", "plus"}, "index_set");
    if (is.contains("box") == is.contains("plus"))
      throw config_error("index_set needs exactly one of \"box\" or \"plus\"");
    if (is.contains("box"))
      cfg.box = get_as<std::vector<int>>(is["box"], "index_set.box");
    else
      cfg.plus = get_as<std::vector<MultiIndex>>(is["plus"], "index_set.plus");
  }

  if (doc.contains("model")) {
    const json& mo = doc["model"];
    if (!mo.is_object()) throw config_error("model must be an object");
    reject_unknown_keys(mo, {"abs_a", "angle_a", "abs_b", "angle_b"}, "model");
    ModelSpec spec;
    for (const char* key : {"abs_a", "angle_a", "abs_b", "angle_b"})
      if (!mo.contains(key))
        throw config_error(std::string("model.") + key + " is required");
    spec.abs_a = get_as<std::vector<double>>(mo["abs_a"], "model.abs_a");
    spec.angle_a = get_as<std::vector<double>>(mo["angle_a"], "model.angle_a");
    spec.abs_b = get_as<std::vector<double>>(mo["abs_b"], "model.abs_b");
    spec.angle_b = get_as<std::vector<double>>(mo["angle_b"], "model.angle_b");
    cfg.model = std::move(spec);
  }

  if (doc.contains("data")) {
    const json& da = doc["data"];
    if (!da.is_object()) throw config_error("data must be an object");
    reject_unknown_keys(da, {"c", "m"}, "data");
    if (!da.contains("c")) throw config_error("data.c is required");
    cfg.c = get_as<std::vector<double>>(da["c"], "data.c");
    if (da.contains("m"))
      cfg.m = get_as<std::vector<double>>(da["m"], "data.m");
  }

  if (doc.contains("point")) {
    const json& pt = doc["point"];
    if (!pt.is_object()) throw config_error("point must be an object");
    reject_unknown_keys(pt, {"p", "q"}, "point");
    if (!pt.contains("p") || !pt.contains("q"))
      throw config_error("point needs both \"p\" and \"q\"");
    cfg.point = PointSpec{get_as<std::vector<double>>(pt["p"], "point.p"),
                          get_as<std::vector<double>>(pt["q"], "point.q")};
  }

  if (doc.contains("solver")) {
    const json& so = doc["solver"];
    if (!so.is_object()) throw config_error("solver must be an object");
    reject_unknown_keys(so,
                        {"grad_tol", "max_iter", "backtrack_alpha",
                         "backtrack_beta", "feasibility_fraction"},
                        "solver");
    if (so.contains("grad_tol"))
      cfg.solver.grad_tol = get_as<double>(so["grad_tol"], "solver.grad_tol");
    if (so.contains("max_iter"))
      cfg.solver.max_iter = get_as<int>(so["max_iter"], "solver.max_iter");
    if (so.contains("backtrack_alpha"))
      cfg.solver.backtrack_alpha =
          get_as<double>(so["backtrack_alpha"], "solver.backtrack_alpha");
    if (so.contains("backtrack_beta"))
      cfg.solver.backtrack_beta =
          get_as<double>(so["backtrack_beta"], "solver.backtrack_beta");
    if (so.contains("feasibility_fraction"))
      cfg.solver.feasibility_fraction =
          get_as<double>(so["feasibility_fraction"], "solver.feasibility_fraction");
  }

  if (doc.contains("grids"))
    cfg.converge_grids = get_as<std::vector<int>>(doc["grids"], "grids");
  if (doc.contains("section")) cfg.section = get_as<bool>(doc["section"], "section");
  if (doc.contains("seed")) cfg.seed = get_as<long>(doc["seed"], "seed");
  if (doc.contains("out_dir"))
    cfg.out_dir = get_as<std::string>(doc["out_dir"], "out_dir");

  return cfg;
}

JobConfig load_job_config(const std::string& path, const std::string& command_hint) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_job_config(buf.str(), command_hint);
}

namespace {

// ---------------------------------------------------------------------------
// Resolution of config into core objects.

struct ResolvedJob {
  JobConfig cfg;
  GridSpec grid;
  IndexSet index_set;
  std::optional<ArmaModel> model;
};

ArmaModel build_model(const JobConfig& cfg) {
  const ModelSpec& spec = *cfg.model;
  try {
    return arma_from_polar(spec.abs_a, spec.angle_a, spec.abs_b, spec.angle_b,
                           cfg.nu);
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("bad model: ") + e.what());
  }
}

ResolvedJob resolve(const JobConfig& cfg, bool needs_grid, bool needs_lambda_count,
                    std::size_t lambda_count_min) {
  ResolvedJob job{cfg, {}, {}, {}};

  if (cfg.nu < 2) throw config_error("nu must be an integer >= 2");
  if (cfg.model && cfg.c)
    throw config_error("give either \"model\" or \"data\", not both");

  if (cfg.model) job.model = build_model(cfg);

  if (needs_grid) {
    if (cfg.grid_sizes.empty()) throw config_error("\"grid\" is required");
    job.grid.sizes = cfg.grid_sizes;
    try {
      job.grid.validate();
    } catch (const std::invalid_argument& e) {
      throw config_error(e.what());
    }
  }

  // Index set: explicit spec wins; a model provides its difference set.
  try {
    if (cfg.box)
      job.index_set = make_box_index_set(*cfg.box);
    else if (cfg.plus)
      job.index_set = make_difference_index_set(*cfg.plus);
    else if (job.model)
      job.index_set = job.model->index_set();
    else
      throw config_error("\"index_set\" is required when no model is given");
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("bad index_set: ") + e.what());
  }

  const int d = job.model ? job.model->d : job.index_set.dim();
  if (cfg.dimension && *cfg.dimension != d)
    throw config_error("\"dimension\" does not match the model/index set");
  if (job.index_set.dim() != d)
    throw config_error("index_set dimension does not match the model");
  if (needs_grid && job.grid.dim() != d)
    throw config_error("grid dimension does not match the problem dimension");

  if (needs_lambda_count) {
    if (cfg.lambdas.size() < lambda_count_min)
      throw config_error("this command needs at least " +
                         std::to_string(lambda_count_min) + " lambda value(s)");
    for (double l : cfg.lambdas)
      if (!(l >= 0.0)) throw config_error("lambda values must be >= 0");
  }

  try {
    job.cfg.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  return job;
}

MomentData resolve_data(const ResolvedJob& job, double lambda) {
  MomentData data;
  if (job.model) {
    data = model_moments(*job.model, job.grid);
  } else {
    data.index_set = job.index_set;
    data.nu = job.cfg.nu;
    data.c = *job.cfg.c;
    if (data.c.size() != job.index_set.half_size())
      throw config_error("data.c must have one entry per half-set index (" +
                         std::to_string(job.index_set.half_size()) + ")");
    if (job.cfg.m) {
      data.m = *job.cfg.m;
      if (data.m.size() + 1 != job.index_set.half_size())
        throw config_error("data.m must have |Lambda_half| - 1 entries");
    } else {
      data.m.assign(job.index_set.half_size() - 1, 0.0);
    }
  }
  data.lambda = lambda;
  return data;
}

json index_set_json(const ResolvedJob& job) {
  json out;
  if (job.cfg.box) {
    out["box"] = *job.cfg.box;
  } else {
    std::vector<MultiIndex> plus;
    if (job.cfg.plus) {
      plus = *job.cfg.plus;
    } else {
      // Model default: Lambda_+ = {0, e_1, ..., e_d}.
      const int d = job.model->d;
      plus.emplace_back(d, 0);
      for (int j = 0; j < d; ++j) {
        MultiIndex e(d, 0);
        e[j] = 1;
        plus.push_back(std::move(e));
      }
    }
    out["plus"] = plus;
  }
  return out;
}

json resolved_config_json(const ResolvedJob& job) {
  const JobConfig& cfg = job.cfg;
  json out;
  out["command"] = cfg.command;
  out["dimension"] = job.model ? job.model->d : job.index_set.dim();
  if (!cfg.grid_sizes.empty()) out["grid"] = cfg.grid_sizes;
  out["nu"] = cfg.nu;
  if (cfg.lambdas.size() == 1)
    out["lambda"] = cfg.lambdas[0];
  else if (!cfg.lambdas.empty())
    out["lambdas"] = cfg.lambdas;
  out["index_set"] = index_set_json(job);
  if (cfg.model) {
    json mo;
    mo["abs_a"] = cfg.model->abs_a;
    mo["angle_a"] = cfg.model->angle_a;
    mo["abs_b"] = cfg.model->abs_b;
    mo["angle_b"] = cfg.model->angle_b;
    out["model"] = std::move(mo);
  }
  if (cfg.c) {
    json da;
    da["c"] = *cfg.c;
    da["m"] = cfg.m ? *cfg.m
                    : std::vector<double>(job.index_set.half_size() - 1, 0.0);
    out["data"] = std::move(da);
  }
  if (cfg.point) {
    json pt;
    pt["p"] = cfg.point->p;
    pt["q"] = cfg.point->q;
    out["point"] = std::move(pt);
  }
  json so;
  so["grad_tol"] = cfg.solver.grad_tol;
  so["max_iter"] = cfg.solver.max_iter;
  so["backtrack_alpha"] = cfg.solver.backtrack_alpha;
  so["backtrack_beta"] = cfg.solver.backtrack_beta;
  so["feasibility_fraction"] = cfg.solver.feasibility_fraction;
  out["solver"] = std::move(so);
  if (!cfg.converge_grids.empty()) out["grids"] = cfg.converge_grids;
  if (cfg.command == "sweep-lambda") out["section"] = cfg.section;
  out["seed"] = cfg.seed;
  out["out_dir"] = cfg.out_dir;
  return out;
}

json report_json(const SolveReport& report) {
  json out;
  out["iterations"] = report.iterations;
  out["final_grad_norm"] = report.final_grad_norm;
  out["converged"] = report.converged;
  out["cov_residual"] = report.cov_residual;
  out["cep_residual"] = report.cep_residual;
  out["eps_certificate"] = report.eps_certificate;
  out["cep_identity_gap"] = report.cep_identity_gap;
  out["entropy"] = report.entropy;
  out["p_min"] = report.p_min;
  out["q_min"] = report.q_min;
  return out;
}

std::ofstream open_output(const ResolvedJob& job, const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path dir = job.cfg.out_dir.empty() ? "." : job.cfg.out_dir;
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);  // LF line endings
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  return out;
}

void write_json_file(const ResolvedJob& job, const std::string& name,
                     const json& body) {
  auto out = open_output(job, name);
  dump_json(body, out);
  out << "\n";
}

// ---------------------------------------------------------------------------
// Command implementations. Each computes fully before writing any file.

int run_moments(const ResolvedJob& job) {
  if (!job.model) throw config_error("moments: a \"model\" is required");
  const MomentData data = resolve_data(job, 0.0);
  json out;
  out["config"] = resolved_config_json(job);
  out["nu"] = data.nu;
  json is;
  is["d"] = data.index_set.dim();
  is["half"] = data.index_set.half();
  out["index_set"] = std::move(is);
  out["c"] = data.c;
  out["m"] = data.m;
  write_json_file(job, "moments.json", out);
  return kExitOk;
}

int run_solve(const ResolvedJob& job) {
  const MomentData data = resolve_data(job, job.cfg.lambdas[0]);
  auto [sol, report] = solve(data, job.grid, job.cfg.solver);
  json out;
  out["config"] = resolved_config_json(job);
  out["p"] = sol.p;
  out["q"] = sol.q;
  out["report"] = report_json(report);
  write_json_file(job, "solution.json", out);
  return report.converged ? kExitOk : kExitNotConverged;
}

int run_verify(const ResolvedJob& job) {
  if (!job.cfg.point) throw config_error("verify: a \"point\" is required");
  const MomentData data = resolve_data(job, job.cfg.lambdas[0]);
  DualPoint x{job.index_set, job.cfg.point->p, job.cfg.point->q};
  try {
    x.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("bad point: ") + e.what());
  }
  const SolveReport report = verify(x, data, job.grid);
  json out;
  out["config"] = resolved_config_json(job);
  out["report"] = report_json(report);
  write_json_file(job, "verify.json", out);
  return kExitOk;
}

int run_sweep(const ResolvedJob& job) {
  if (!job.model) throw config_error("sweep-lambda: a \"model\" is required");
  const ExperimentResult result = lambda_sweep(*job.model, job.grid,
                                               job.cfg.lambdas, job.cfg.solver,
                                               job.cfg.section);
  const std::string config_line = dump_json(resolved_config_json(job));
  {
    auto out = open_output(job, "sweep.csv");
    out << "# specext sweep-lambda; rows ordered by decreasing lambda\n";
    out << "# config " << config_line << "\n";
    out << "lambda,error,entropy,cov_residual,max_abs_eps,converged,iterations\n";
    for (std::size_t i = 0; i < result.lambdas.size(); ++i)
      out << format_double(result.lambdas[i]) << ','
          << format_double(result.errors[i]) << ','
          << format_double(result.entropies[i]) << ','
          << format_double(result.cov_residuals[i]) << ','
          << format_double(result.max_abs_eps[i]) << ','
          << (result.converged[i] ? 1 : 0) << ',' << result.iterations[i] << "\n";
  }
  if (job.cfg.section) {
    auto out = open_output(job, "section.csv");
    out << "# specext cross sections through the true-spectrum minimum; grid "
           "indices are zero-based\n";
    out << "# config " << config_line << "\n";
    out << "axis,index,true";
    for (double l : result.lambdas) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), ",recon_%g", l);
      out << buf;
    }
    out << "\n";
    for (const auto& sec : result.cross_sections)
      for (std::size_t l = 0; l < sec.truth.size(); ++l) {
        out << sec.axis << ',' << l << ',' << format_double(sec.truth[l]);
        for (std::size_t i = 0; i < result.lambdas.size(); ++i)
          out << ',' << format_double(sec.reconstructed[i][l]);
        out << "\n";
      }
  }
  for (bool ok : result.converged)
    if (!ok) return kExitNotConverged;
  return kExitOk;
}

int run_converge(const ResolvedJob& job) {
  if (!job.model) throw config_error("converge-grid: a \"model\" is required");
  if (job.cfg.converge_grids.size() < 2)
    throw config_error("converge-grid: \"grids\" needs at least two sizes");
  const auto rows = grid_convergence(*job.model, job.cfg.converge_grids,
                                     job.cfg.lambdas[0], job.cfg.solver);
  auto out = open_output(job, "converge.csv");
  out << "# specext converge-grid; distance_to_prev compares successive "
         "solutions\n";
  out << "# config " << dump_json(resolved_config_json(job)) << "\n";
  out << "N,distance_to_prev,converged,iterations\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << rows[i].sizes[0] << ',';
    if (i > 0) out << format_double(rows[i].distance_to_prev);
    out << ',' << (rows[i].report.converged ? 1 : 0) << ','
        << rows[i].report.iterations << "\n";
  }
  for (const auto& row : rows)
    if (!row.report.converged) return kExitNotConverged;
  return kExitOk;
}

int run_entropy_curve(const ResolvedJob& job) {
  MomentData data = resolve_data(job, 0.0);
  const EntropyCurve curve =
      entropy_curve(data, job.grid, job.cfg.lambdas, job.cfg.solver);
  auto out = open_output(job, "entropy.csv");
  out << "# specext entropy-curve; rows ordered by increasing lambda\n";
  out << "# config " << dump_json(resolved_config_json(job)) << "\n";
  out << "# slope_at_smallest_pair " << format_double(curve.slope_at_origin)
      << "\n";
  out << "lambda,entropy\n";
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i)
    out << format_double(curve.lambdas[i]) << ','
        << format_double(curve.entropies[i]) << "\n";
  return kExitOk;
}

}  // namespace

int run_job(const JobConfig& config) {
  const std::string& cmd = config.command;
  if (cmd == "moments") {
    return run_moments(resolve(config, true, false, 0));
  } else if (cmd == "solve") {
    ResolvedJob job = resolve(config, true, true, 1);
    if (job.cfg.lambdas.size() != 1)
      throw config_error("solve: exactly one lambda is required");
    return run_solve(job);
  } else if (cmd == "verify") {
    ResolvedJob job = resolve(config, true, true, 1);
    if (job.cfg.lambdas.size() != 1)
      throw config_error("verify: exactly one lambda is required");
    return run_verify(job);
  } else if (cmd == "sweep-lambda") {
    return run_sweep(resolve(config, true, true, 1));
  } else if (cmd == "converge-grid") {
    ResolvedJob job = resolve(config, false, true, 1);
    if (job.cfg.lambdas.size() != 1)
      throw config_error("converge-grid: exactly one lambda is required");
    return run_converge(job);
  } else if (cmd == "entropy-curve") {
    return run_entropy_curve(resolve(config, true, true, 2));
  }
  throw config_error("unknown command \"" + cmd + "\"");
}

}  // namespace specext
