#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "eqd/ascent.hpp"
#include "eqd/error.hpp"
#include "eqd/io.hpp"
#include "eqd/oracle.hpp"
#include "eqd/relax_lp.hpp"
#include "eqd/relax_sdp.hpp"
#include "eqd/relax_socp.hpp"
#include "eqd/rounding.hpp"

namespace eqd::cli {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct InstanceArgs {
  std::string pedigree;
  std::string ebv;
  std::string bounds;
  int n = 0;
  double theta2 = 0.0;
  std::size_t dense_limit = kDefaultDenseLimit;
};

struct OutputArgs {
  std::string json_path;
  bool no_meta = false;
};

void add_instance_options(CLI::App* cmd, InstanceArgs& a) {
  cmd->add_option("--pedigree", a.pedigree, "pedigree CSV (id,sire,dam)")->required();
  cmd->add_option("--ebv", a.ebv, "breeding values CSV (id,ebv)")->required();
  cmd->add_option("--bounds", a.bounds, "optional bounds CSV (id,lower,upper)");
  cmd->add_option("--n", a.n, "number of genotypes to deploy")->required();
  cmd->add_option("--theta2", a.theta2, "coancestry cap 2 theta on x'Ax")->required();
  cmd->add_option("--dense-limit", a.dense_limit, "largest Z with dense A");
}

void add_output_options(CLI::App* cmd, OutputArgs& o) {
  cmd->add_option("--json", o.json_path, "write the JSON report here ('-' for stdout)");
  cmd->add_flag("--no-meta", o.no_meta, "omit version and timing fields");
}

struct Loaded {
  Pedigree pedigree;
  EdInstance inst;
};

Loaded load_instance(const InstanceArgs& a) {
  Loaded out;
  out.pedigree = load_pedigree(a.pedigree);
  auto kin = std::make_shared<const KinshipSystem>(KinshipSystem::build(out.pedigree, a.dense_limit));
  const auto z = static_cast<Eigen::Index>(out.pedigree.size());

  Vector g(z);
  std::vector<char> seen(static_cast<std::size_t>(z), 0);
  for (const auto& e : load_ebv(a.ebv)) {
    const auto pos = out.pedigree.position_of(e.id);
    if (!pos) {
      throw InputError("EBV for unknown id " + std::to_string(e.id));
    }
    g[static_cast<Eigen::Index>(*pos)] = e.ebv;
    seen[*pos] = 1;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw InputError("no EBV for id " + std::to_string(out.pedigree[i].id));
    }
  }

  out.inst = make_instance(std::move(kin), std::move(g), a.theta2, a.n);
  if (!a.bounds.empty()) {
    for (const auto& b : load_bounds(a.bounds)) {
      const auto pos = out.pedigree.position_of(b.id);
      if (!pos) {
        throw InputError("bounds for unknown id " + std::to_string(b.id));
      }
      out.inst.lower[static_cast<Eigen::Index>(*pos)] = b.lower;
      out.inst.upper[static_cast<Eigen::Index>(*pos)] = b.upper;
    }
    validate(out.inst);
  }
  return out;
}

json ids_of(const Pedigree& ped, const std::vector<int>& positions) {
  json ids = json::array();
  for (const int i : positions) {
    ids.push_back(ped[static_cast<std::size_t>(i)].id);
  }
  return ids;
}

std::vector<int> support_of(const Vector& x) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

json instance_block(const EdInstance& inst) {
  return json{{"Z", inst.size()}, {"N", inst.n}, {"theta2", inst.theta2}};
}

void emit(const json& report, const OutputArgs& o, const std::string& table, std::ostream& out) {
  if (o.json_path == "-") {
    out << report.dump(2) << '\n';
    return;
  }
  out << table;
  if (!o.json_path.empty()) {
    std::ofstream file(o.json_path, std::ios::binary);
    if (!file) {
      throw InputError("cannot write " + o.json_path);
    }
    file << report.dump(2) << '\n';
  }
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

class Table {
 public:
  explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  std::string str() const {
    std::vector<std::size_t> width;
    for (const auto& r : rows_) {
      width.resize(std::max(width.size(), r.size()), 0);
      for (std::size_t c = 0; c < r.size(); ++c) {
        width[c] = std::max(width[c], r[c].size());
      }
    }
    std::ostringstream s;
    for (const auto& r : rows_) {
      for (std::size_t c = 0; c < r.size(); ++c) {
        s << std::left << std::setw(static_cast<int>(width[c]) + 2) << r[c];
      }
      s << '\n';
    }
    return s.str();
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

// ---- solve ---------------------------------------------------------------

struct SolveArgs {
  InstanceArgs inst;
  OutputArgs out;
  std::string method = "socp+sa";
  std::optional<double> lambda;
  double lambda_mult = 2.0;
  std::uint64_t seed = 0;
  int max_iter = 0;
  bool escalate = false;
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const auto t0 = Clock::now();
  const auto loaded = load_instance(a.inst);
  const auto& inst = loaded.inst;
  const auto& ped = loaded.pedigree;

  const std::string method = a.method;
  const auto plus = method.find('+');
  const std::string relax = method.substr(0, plus);
  const bool ascend = plus != std::string::npos;

  json report;
  report["instance"] = instance_block(inst);
  report["method"] = method;
  std::ostringstream table;

  auto pre = preprocess(inst);
  if (auto* forced = std::get_if<ForcedSolution>(&pre)) {
    const auto chosen = support_of(forced->x);
    report["forced"] = json{{"gTx", forced->gx}, {"xAx", forced->xAx}, {"feasible", forced->feasible}};
    report["chosen"] = ids_of(ped, chosen);
    table << "bounds fix every contribution: gTx " << fixed(forced->gx) << "  xAx "
          << fixed(forced->xAx) << (forced->feasible ? "" : "  (infeasible)") << '\n';
    emit(report, a.out, table.str(), out);
    return forced->feasible ? kExitOk : kExitInfeasible;
  }
  const auto& pp = std::get<PreprocessedInstance>(pre);
  const auto a1 = check_assumption1(pp);
  report["instance"]["V"] = pp.free_count();
  report["instance"]["p"] = pp.p;
  report["instance"]["assumption1"] = a1.holds;

  double lambda = 0.0;
  if (ascend) {
    lambda = a.lambda ? *a.lambda : a.lambda_mult * lambda0(inst);
    if (lambda < 0.0) {
      throw InputError("penalty weight must be nonnegative");
    }
  }

  Table rows({"method", "gTx", "xAx", "iter", "f_lambda", "status"});
  json blocks = json::array();

  std::optional<RelaxationResult> relaxed;
  std::optional<Selection> rounded;
  const auto rt0 = Clock::now();
  if (relax == "lp") {
    relaxed = solve_lp_by_sorting(pp);
  } else if (relax == "socp") {
    relaxed = solve_socp(build_socp(pp));
  } else if (relax == "sdp") {
    relaxed = to_relaxation(solve_sdp(pp), pp);
  } else if (relax == "round") {
    const auto sdp = solve_sdp(pp);
    relaxed = to_relaxation(sdp, pp);
    rounded = repair_to_selection(round_once(sdp, a.seed), pp, lambda);
  }
  const double relax_time = seconds_since(rt0);

  {
    const auto& r = *relaxed;
    const auto v = objective_of(inst, r.x);
    json b{{"kind", std::string(to_string(r.kind))},
           {"status", std::string(to_string(r.status))},
           {"objective", r.objective},
           {"gTx", v.gx},
           {"xAx", v.xAx},
           {"iter", r.iterations},
           {"f_lambda", penalty_value(inst, r.x, lambda)}};
    if (!a.out.no_meta) {
      b["time_s"] = relax_time;
    }
    json res = json::object();
    for (const auto& [k, val] : r.residuals) {
      res[k] = val;
    }
    b["residuals"] = res;
    blocks.push_back(b);
    rows.add({"CR(" + std::string(to_string(r.kind)) + ")", fixed(v.gx), fixed(v.xAx),
              std::to_string(r.iterations), fixed(penalty_value(inst, r.x, lambda)),
              std::string(to_string(r.status))});
  }
  if (rounded) {
    json b{{"kind", "ROUNDED"},
           {"gTx", rounded->gx},
           {"xAx", rounded->xAx},
           {"f_lambda", rounded->penalty_value},
           {"feasible", rounded->feasible},
           {"seed", a.seed}};
    blocks.push_back(b);
    rows.add({"ROUNDED", fixed(rounded->gx), fixed(rounded->xAx), "0",
              fixed(rounded->penalty_value), rounded->feasible ? "feasible" : "infeasible"});
  }

  std::vector<int> chosen;
  if (ascend) {
    const auto st0 = Clock::now();
    AscentResult result;
    if (rounded) {
      result = a.escalate
                   ? ascent_until_feasible(pp, rounded->x, StartKind::Rounded, lambda, a.max_iter)
                   : steepest_ascent(pp, *rounded, lambda, a.max_iter, StartKind::Rounded);
    } else {
      result = a.escalate ? ascent_until_feasible(pp, *relaxed, lambda, a.max_iter)
                          : steepest_ascent(pp, *relaxed, lambda, a.max_iter);
    }
    const double sa_time = seconds_since(st0);
    const auto& sel = result.selection;
    const auto& tr = result.trace;
    json swaps = json::array();
    for (const auto& s : tr.swaps) {
      swaps.push_back(json{{"out", ped[static_cast<std::size_t>(s.out)].id},
                           {"in", ped[static_cast<std::size_t>(s.in)].id},
                           {"f", s.value}});
    }
    json b{{"kind", "SA"},
           {"start_kind", std::string(to_string(tr.start_kind))},
           {"lambda", tr.lambda},
           {"gTx", sel.gx},
           {"xAx", sel.xAx},
           {"iter", tr.iterations},
           {"f_lambda", sel.penalty_value},
           {"f_lambda_x0", tr.f_start},
           {"feasible", sel.feasible},
           {"hit_iteration_cap", tr.hit_iteration_cap},
           {"escalations", tr.escalations}};
    if (!a.out.no_meta) {
      b["time_s"] = sa_time;
    }
    b["swaps"] = swaps;
    blocks.push_back(b);
    rows.add({"SA(" + std::string(to_string(tr.start_kind)) + ")", fixed(sel.gx), fixed(sel.xAx),
              std::to_string(tr.iterations), fixed(sel.penalty_value),
              sel.feasible ? "feasible" : "infeasible"});
    chosen = sel.chosen;
  }

  report["lambda"] = lambda;
  report["results"] = blocks;
  if (ascend) {
    report["chosen"] = ids_of(ped, chosen);
  }
  if (!a.out.no_meta) {
    report["meta"] = json{{"version", "0.3.0"}, {"time_s", seconds_since(t0)}};
  }

  table << "Z " << inst.size() << "  N " << inst.n << "  2theta " << inst.theta2 << "  |V| "
        << pp.free_count() << "  p " << pp.p << "  assumption1 " << (a1.holds ? "true" : "false")
        << '\n';
  if (ascend) {
    table << "lambda " << lambda << '\n';
  }
  table << rows.str();
  if (ascend) {
    table << "chosen:";
    for (const int i : chosen) {
      table << ' ' << ped[static_cast<std::size_t>(i)].id;
    }
    table << '\n';
  }
  emit(report, a.out, table.str(), out);
  return kExitOk;
}

// ---- oracle --------------------------------------------------------------

struct OracleArgs {
  InstanceArgs inst;
  OutputArgs out;
  std::string method = "enum";
  double gap = 0.0;
  double time_cap = 60.0;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out) {
  const auto t0 = Clock::now();
  const auto loaded = load_instance(a.inst);
  const auto pp = preprocess_free(loaded.inst);
  const auto r = a.method == "bnb" ? branch_and_bound_ed(pp, a.gap, a.time_cap) : enumerate_ed(pp);

  json report;
  report["instance"] = instance_block(loaded.inst);
  report["method"] = a.method;
  report["feasible"] = r.feasible();
  report["opt"] = r.feasible() ? json(r.opt) : json(nullptr);
  report["xAx"] = r.feasible() ? json(r.xAx) : json(nullptr);
  report["bound"] = r.feasible() || r.timed_out ? json(r.bound) : json(nullptr);
  report["enumerated"] = r.enumerated;
  report["feasible_count"] = r.feasible_count;
  report["timed_out"] = r.timed_out;
  report["chosen"] = ids_of(loaded.pedigree, r.argmax);
  if (!a.out.no_meta) {
    report["meta"] = json{{"version", "0.3.0"}, {"time_s", seconds_since(t0)}};
  }

  std::ostringstream table;
  if (r.feasible()) {
    table << "opt " << fixed(r.opt) << "  xAx " << fixed(r.xAx) << "  visited " << r.enumerated
          << (r.timed_out ? "  (timed out, bound " + fixed(r.bound) + ")" : "") << '\n';
    table << "chosen:";
    for (const int i : r.argmax) {
      table << ' ' << loaded.pedigree[static_cast<std::size_t>(i)].id;
    }
    table << '\n';
  } else {
    table << "infeasible" << (r.timed_out ? " (timed out)" : "") << '\n';
  }
  emit(report, a.out, table.str(), out);
  return r.feasible() || r.timed_out ? kExitOk : kExitInfeasible;
}

// ---- bounds --------------------------------------------------------------

struct BoundsArgs {
  InstanceArgs inst;
  OutputArgs out;
  int samples = 1000;
  std::uint64_t seed = 0;
};

int cmd_bounds(const BoundsArgs& a, std::ostream& out) {
  const auto t0 = Clock::now();
  const auto loaded = load_instance(a.inst);
  const auto pp = preprocess_free(loaded.inst);
  const auto sdp = solve_sdp(pp);
  const auto b = estimate_expectation(sdp, pp, a.samples, a.seed);

  json report;
  report["instance"] = instance_block(loaded.inst);
  report["bounds"] = json{{"lower", b.lower},
                          {"expected", b.expected},
                          {"std_error", b.std_error},
                          {"upper", b.upper},
                          {"opt_sdp", b.opt_sdp},
                          {"alpha", b.alpha},
                          {"samples", b.samples},
                          {"seed", a.seed}};
  if (!a.out.no_meta) {
    report["meta"] = json{{"version", "0.3.0"}, {"time_s", seconds_since(t0)}};
  }
  Table t({"lower", "expected", "upper", "OPT_SDP", "alpha"});
  t.add({fixed(b.lower, 3), fixed(b.expected, 3), fixed(b.upper, 3), fixed(b.opt_sdp, 3),
         fixed(b.alpha, 5)});
  emit(report, a.out, t.str(), out);
  return kExitOk;
}

// ---- gen -----------------------------------------------------------------

struct GenArgs {
  int founders = 10;
  int generations = 3;
  int offspring = 2;
  std::uint64_t seed = 0;
  std::string dir = ".";
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const auto ped = generate_pedigree(a.founders, a.generations, a.offspring, a.seed);
  std::mt19937_64 rng(a.seed ^ 0x5eedebf0ULL);
  std::normal_distribution<double> normal;
  std::vector<EbvEntry> ebv;
  for (const auto& r : ped.records()) {
    ebv.push_back({r.id, normal(rng)});
  }
  const std::filesystem::path dir(a.dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "pedigree.csv", std::ios::binary);
    write_pedigree(f, ped);
  }
  {
    std::ofstream f(dir / "ebv.csv", std::ios::binary);
    write_ebv(f, ebv);
  }
  out << "wrote " << ped.size() << " individuals to " << (dir / "pedigree.csv").string() << " and "
      << (dir / "ebv.csv").string() << '\n';
  return kExitOk;
}

// ---- kinship -------------------------------------------------------------

struct KinshipArgs {
  std::string pedigree;
  OutputArgs out;
  std::size_t dense_limit = kDefaultDenseLimit;
};

int cmd_kinship(const KinshipArgs& a, std::ostream& out) {
  const auto t0 = Clock::now();
  const auto ped = load_pedigree(a.pedigree);
  const auto kin = KinshipSystem::build(ped, a.dense_limit);
  const auto& diag = kin.diagonal();
  const double max_inbreeding = diag.maxCoeff() - 1.0;

  json report;
  report["Z"] = kin.size();
  report["founders"] = ped.founder_count();
  report["dense"] = kin.has_dense();
  report["diag_mean"] = diag.mean();
  report["diag_max"] = diag.maxCoeff();
  report["max_inbreeding"] = max_inbreeding;
  report["mendelian_min"] = kin.mendelian().minCoeff();
  report["nnz_inverse"] = kin.inverse().nonZeros();
  report["nnz_factor"] = kin.factor().nonZeros();
  if (kin.has_dense()) {
    const Matrix btb = Matrix(kin.factor().transpose() * kin.factor());
    report["identity_residual"] =
        (btb * kin.dense() - Matrix::Identity(btb.rows(), btb.cols())).cwiseAbs().maxCoeff();
  }
  if (!a.out.no_meta) {
    report["meta"] = json{{"version", "0.3.0"}, {"time_s", seconds_since(t0)}};
  }
  std::ostringstream table;
  table << "Z " << kin.size() << "  founders " << ped.founder_count() << "  nnz(A^-1) "
        << kin.inverse().nonZeros() << "  nnz(B) " << kin.factor().nonZeros() << '\n'
        << "mean diag(A) " << fixed(diag.mean()) << "  max inbreeding " << fixed(max_inbreeding)
        << '\n';
  emit(report, a.out, table.str(), out);
  return kExitOk;
}

}  // namespace

namespace {

// `--config <file>` supplies defaults from `key = value` lines; flags given
// on the command line win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::optional<std::string> path;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) {
      path = args[++k];
    } else if (args[k].rfind("--config=", 0) == 0) {
      path = args[k].substr(9);
    } else {
      out.push_back(args[k]);
    }
  }
  if (!path) {
    return out;
  }
  const auto given = [&](const std::string& flag) {
    for (const auto& a : out) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  for (const auto& [key, value] : load_config(*path)) {
    std::string name = key;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::replace(name.begin(), name.end(), '_', '-');
    const std::string flag = "--" + name;
    if (!given(flag)) {
      out.push_back(flag);
      out.push_back(value);
    }
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equal-deployment genotype selection"};
  app.name("eqd");
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "relax, round and improve a selection");
  add_instance_options(s, solve.inst);
  add_output_options(s, solve.out);
  s->add_option("--method", solve.method, "relaxation and optional ascent")
      ->check(CLI::IsMember({"lp", "socp", "sdp", "lp+sa", "socp+sa", "sdp+sa", "round+sa"}))
      ->capture_default_str();
  auto* lam = s->add_option("--lambda", solve.lambda, "penalty weight");
  s->add_option("--lambda-mult", solve.lambda_mult, "penalty weight as a multiple of lambda0")
      ->capture_default_str()
      ->excludes(lam);
  s->add_option("--seed", solve.seed, "rounding seed");
  s->add_option("--max-iter", solve.max_iter, "ascent iteration cap (default 10|V|)");
  s->add_flag("--escalate", solve.escalate, "double lambda until the selection meets the cap");

  OracleArgs oracle;
  auto* o = app.add_subcommand("oracle", "exact OPT_ED on small instances");
  add_instance_options(o, oracle.inst);
  add_output_options(o, oracle.out);
  o->add_option("--method", oracle.method, "enum or bnb")
      ->check(CLI::IsMember({"enum", "bnb"}))
      ->capture_default_str();
  o->add_option("--gap", oracle.gap, "relative gap for bnb")->check(CLI::NonNegativeNumber);
  o->add_option("--time-cap", oracle.time_cap, "seconds for bnb");

  BoundsArgs bounds;
  auto* b = app.add_subcommand("bounds", "rounding bounds and sampled expectation");
  add_instance_options(b, bounds.inst);
  add_output_options(b, bounds.out);
  b->add_option("--samples", bounds.samples, "rounding samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  b->add_option("--seed", bounds.seed, "sampling seed");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "write a random pedigree and EBVs");
  g->add_option("--founders", gen.founders)->check(CLI::Range(2, 1 << 20))->capture_default_str();
  g->add_option("--generations", gen.generations)->check(CLI::NonNegativeNumber)->capture_default_str();
  g->add_option("--offspring", gen.offspring, "children per cross")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--out", gen.dir, "output directory")->capture_default_str();

  KinshipArgs kinship;
  auto* k = app.add_subcommand("kinship", "numerator matrix statistics");
  k->add_option("--pedigree", kinship.pedigree, "pedigree CSV")->required();
  k->add_option("--dense-limit", kinship.dense_limit, "largest Z with dense A");
  add_output_options(k, kinship.out);

  try {
    const auto expanded = expand_config(args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  } catch (const std::exception& e) {
    err << "eqd: error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (s->parsed()) return cmd_solve(solve, out);
    if (o->parsed()) return cmd_oracle(oracle, out);
    if (b->parsed()) return cmd_bounds(bounds, out);
    if (g->parsed()) return cmd_gen(gen, out);
    if (k->parsed()) return cmd_kinship(kinship, out);
  } catch (const InfeasibleError& e) {
    err << "eqd: infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const DomainError& e) {
    err << "eqd: infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const SolverFailure& e) {
    err << "eqd: solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const CapExceededError& e) {
    err << "eqd: CapExceeded: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "eqd: error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace eqd::cli
