// Command-line driver: instance generation, batch runs with CSV output,
// verification reports and frugality measurements.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "covermech/decomposition.hpp"
#include "covermech/errors.hpp"
#include "covermech/io.hpp"
#include "covermech/oracles.hpp"
#include "covermech/parallel.hpp"
#include "covermech/threshold.hpp"
#include "covermech/ufl.hpp"
#include "covermech/verify.hpp"

using namespace covermech;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// "n=16 p=0.2" or "n=16,p=0.2" -> map.
std::map<std::string, std::string> parse_kv(const std::vector<std::string>& items) {
  std::map<std::string, std::string> kv;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + tok + "'");
      kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  return kv;
}

double kv_num(const std::map<std::string, std::string>& kv, const std::string& key, double fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad value for " + key + ": '" + it->second + "'");
  }
}

// "3", "1-20" or "1,4,9".
std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto dash = tok.find('-');
    if (dash == std::string::npos) {
      out.push_back(std::stoull(tok));
    } else {
      const auto lo = std::stoull(tok.substr(0, dash)), hi = std::stoull(tok.substr(dash + 1));
      if (hi < lo) throw std::invalid_argument("empty seed range " + tok);
      for (auto k = lo; k <= hi; ++k) out.push_back(k);
    }
  }
  if (out.empty()) throw std::invalid_argument("no seeds given");
  return out;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// Mechanisms.

const std::vector<std::string> kMechanisms{"ax", "bx", "perron", "rdim", "minor", "threehop"};
const std::vector<std::string> kAlgorithms{"lp-rounding", "ordered-pd", "simultaneous-pd"};

struct MechanismSpec {
  std::string name;
  std::string x = "ones";  // scaling for ax / bx: ones | perron
  double gamma = 0;
  std::uint64_t seed = 1;
};

struct RunOutcome {
  MechanismResult result;
  int parts = 1;
  double lambda_max = kNaN;
  double bound = kNaN;  // certified approximation ratio when known
  double beta = kNaN;
};

std::vector<double> scaling(const Graph& g, const std::string& x, double* lambda) {
  if (x == "perron") {
    auto p = perron_vector(g);
    if (lambda) *lambda = p.lambda_max;
    return p.x;
  }
  if (x != "ones") throw std::invalid_argument("unknown scaling '" + x + "' (ones|perron)");
  return std::vector<double>(g.num_nodes(), 1.0);
}

RunOutcome run_mechanism(const MechanismSpec& spec, const VCInstance& inst) {
  RunOutcome out;
  const Graph& g = inst.graph;
  if (spec.name == "ax" || spec.name == "bx" || spec.name == "perron") {
    const std::string xs = spec.name == "perron" ? "perron" : spec.x;
    const auto x = scaling(g, xs, &out.lambda_max);
    const auto tf = spec.name == "bx" ? bx_mechanism(g, x) : ax_mechanism(g, x);
    out.result = run_any(tf, inst);
    out.beta = beta_Gx(g, x);
    if (spec.name == "bx") {
      out.bound = out.beta + 1;
    } else if (g.max_degree() <= 24) {
      out.bound = alpha_Gx(g, x, Exec::serial).value + 1;
    }
    return out;
  }
  if (spec.name == "rdim") {
    auto run = rdim_mechanism(inst, spec.seed);
    out.result = std::move(run.result);
    out.parts = static_cast<int>(run.decomposition.parts.size());
    out.bound = run.decomposition.ratio_sum();
    return out;
  }
  if (spec.name == "minor" || spec.name == "threehop") {
    MinorOptions opt;
    opt.gamma = spec.gamma;
    opt.seed = spec.seed;
    auto run = spec.name == "minor" ? minor_closed_mechanism(inst, opt) : threehop_mechanism(inst, spec.gamma);
    out.result = std::move(run.result);
    out.parts = static_cast<int>(run.decomposition.parts.size());
    out.bound = run.decomposition.ratio_sum();
    return out;
  }
  throw std::invalid_argument("unknown mechanism '" + spec.name + "'");
}

VCAlgorithm algorithm_by_name(const std::string& name) {
  if (name == "lp-rounding") return on_node_costs(lp_rounding_algorithm);
  if (name == "ordered-pd")
    return on_node_costs([](const Graph& g, std::span<const double> c) { return ordered_primal_dual(g, c); });
  if (name == "simultaneous-pd") return on_node_costs(simultaneous_primal_dual);
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

bool is_mechanism(const std::string& name) {
  return std::find(kMechanisms.begin(), kMechanisms.end(), name) != kMechanisms.end();
}

// Instance sources.

struct SourceOptions {
  std::vector<std::string> files;
  std::vector<std::string> random;  // key=value generator spec
  std::vector<std::string> ufl;
  std::string seeds = "1";
};

struct Job {
  std::string id;
  std::uint64_t seed = 1;
  std::optional<VCInstance> vc;
  std::optional<UFLInstance> fl;
};

UFLInstance make_ufl(const std::map<std::string, std::string>& kv, std::uint64_t seed) {
  const int f = static_cast<int>(kv_num(kv, "facilities", 5));
  const int d = static_cast<int>(kv_num(kv, "clients", 6));
  const int a = static_cast<int>(kv_num(kv, "agents", 2));
  const auto family = kv.count("family") ? kv.at("family") : std::string("line");
  if (family == "line") return generate_random_ufl(f, d, a, seed, 1, kv_num(kv, "max_open", 1.0));
  if (family == "plane") return generate_random_ufl(f, d, a, seed, 2, kv_num(kv, "max_open", 1.0));
  if (family == "bipartite")
    return generate_bipartite_ufl(f, d, a, seed, static_cast<int>(kv_num(kv, "degree", 2)), kv_num(kv, "max_open", 3));
  throw std::invalid_argument("unknown facility family '" + family + "' (line|plane|bipartite)");
}

std::string kv_id(const std::string& kind, const std::vector<std::string>& items, std::uint64_t seed) {
  std::string s = kind + ":";
  for (const auto& it : items) s += it + ",";
  return s + "seed=" + std::to_string(seed);
}

std::vector<Job> collect_jobs(const SourceOptions& src) {
  std::vector<Job> jobs;
  const auto seeds = parse_seeds(src.seeds);
  for (const auto& f : src.files) {
    const auto doc = load_json(f);
    for (auto s : seeds) {
      Job j;
      j.id = f;
      j.seed = s;
      if (is_ufl_document(doc)) j.fl = ufl_instance_from_json(doc);
      else j.vc = vc_instance_from_json(doc);
      jobs.push_back(std::move(j));
    }
  }
  if (!src.random.empty()) {
    const auto kv = parse_kv(src.random);
    for (auto s : seeds) {
      Job j;
      j.id = kv_id("random", src.random, s);
      j.seed = s;
      j.vc = generate_random_vc_instance(static_cast<int>(kv_num(kv, "n", 16)), kv_num(kv, "p", 0.2),
                                         static_cast<int>(kv_num(kv, "r", 2)), s);
      jobs.push_back(std::move(j));
    }
  }
  if (!src.ufl.empty()) {
    const auto kv = parse_kv(src.ufl);
    for (auto s : seeds) {
      Job j;
      j.id = kv_id("ufl", src.ufl, s);
      j.seed = s;
      j.fl = make_ufl(kv, s);
      jobs.push_back(std::move(j));
    }
  }
  if (jobs.empty()) throw std::invalid_argument("no instances: give --instance, --random or --ufl");
  return jobs;
}

void add_source_options(CLI::App* cmd, SourceOptions& src) {
  cmd->add_option("--instance", src.files, "Instance JSON files")->check(CLI::ExistingFile);
  cmd->add_option("--random", src.random, "Random VC instances: n=16 p=0.2 r=2");
  cmd->add_option("--ufl", src.ufl, "Random facility instances: facilities=5 clients=6 agents=2 family=line");
  cmd->add_option("--seeds", src.seeds, "Seeds: 3, 1-20 or 1,4,9");
}

// CSV rows.

struct Row {
  std::string instance;
  std::uint64_t seed = 0;
  std::string mechanism;
  double cost = kNaN, opt = kNaN, ratio = kNaN, payments = kNaN, nu = kNaN, frugality = kNaN;
  int parts = 0;
  double lambda_max = kNaN;
  double wall_ms = 0;
  std::string error;
  bool failed = false;
  bool bad_input = false;  // precondition or size limit, not an invariant
};

const char* kCsvHeader = "instance,seed,mechanism,cost,opt,ratio,payments,nu,frugality_ratio,parts,lambda_max";

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string csv_line(const Row& r, bool timing) {
  std::ostringstream os;
  os << csv_field(r.instance) << ',' << r.seed << ',' << r.mechanism << ',' << fmt(r.cost) << ',' << fmt(r.opt) << ','
     << fmt(r.ratio) << ',' << fmt(r.payments) << ',' << fmt(r.nu) << ',' << fmt(r.frugality) << ',' << r.parts << ','
     << fmt(r.lambda_max);
  if (timing) os << ',' << fmt(r.wall_ms);
  return os.str();
}

Row run_vc_row(const MechanismSpec& base, const Job& job) {
  Row row;
  row.instance = job.id;
  row.seed = job.seed;
  row.mechanism = base.name;
  MechanismSpec spec = base;
  spec.seed = job.seed;
  const auto& inst = *job.vc;
  const auto out = run_mechanism(spec, inst);
  const auto& r = out.result;
  row.cost = r.cost;
  row.payments = r.total_payment();
  row.parts = out.parts;
  row.lambda_max = out.lambda_max;
  if (!r.feasible) {
    row.failed = true;
    row.error = "output is not a vertex cover";
  }
  if (ir_violation(inst, r) > 1e-9) {
    row.failed = true;
    row.error = "individual rationality violated";
  }
  if (inst.num_nodes() <= kMaxExactVCNodes) {
    const auto c = inst.node_costs();
    row.opt = min_vertex_cover_exact(inst.graph, c).cost;
    row.ratio = row.opt > 0 ? row.cost / row.opt : (row.cost > 0 ? kNaN : 1.0);
    if (!std::isnan(row.ratio) && row.ratio < 1 - 1e-9) {
      row.failed = true;
      row.error = "ratio below 1";
    }
    if (!std::isnan(out.bound) && row.ratio > out.bound + 1e-9) {
      row.failed = true;
      row.error = "ratio above the certified bound " + fmt(out.bound);
    }
    try {
      const auto fr = frugality_report(inst.graph, c, row.payments);
      row.nu = fr.nu;
      row.frugality = std::isfinite(fr.ratio) ? fr.ratio : kNaN;
    } catch (const SizeLimitExceeded&) {
    }
  }
  return row;
}

Row run_ufl_row(const Job& job, bool enumerate) {
  Row row;
  row.instance = job.id;
  row.seed = job.seed;
  row.mechanism = "ufl";
  UFLOptions opt;
  opt.enumerate = enumerate;
  const auto r = run_ufl_mechanism(*job.fl, job.seed, opt);
  row.cost = r.expected_cost;
  row.opt = r.frac.value;
  row.ratio = row.opt > 0 ? row.cost / row.opt : 1.0;
  row.payments = 0;
  for (double p : r.expected_payments) row.payments += p;
  row.parts = static_cast<int>(r.outcomes.size());
  const auto e = check_decomposition(*job.fl, r.frac, r.decomposition, opt.rho);
  if (e.lambda_sum > 1e-8 || e.identity > 1e-6 || e.connection > 1e-6 || !e.integral) {
    row.failed = true;
    row.error = "decomposition invariant violated";
  }
  if (row.cost > 2 * row.opt + 1e-6) {
    row.failed = true;
    row.error = "expected cost above twice the LP optimum";
  }
  return row;
}

// Subcommands.

int cmd_gen(const std::optional<int>& gadget, const std::vector<std::string>& random, const std::vector<std::string>& ufl,
            std::uint64_t seed, const std::string& out) {
  std::ostringstream summary;
  if (gadget) {
    const auto sk = generate_gadget(*gadget);
    const std::vector<double> unit(sk.graph.num_nodes(), 1.0);
    const auto inst = attach_costs(sk, unit);
    if (out.empty() || out == "-") std::cout << to_json(inst).dump(2) << '\n';
    else save_instance(out, inst);
    summary << "gadget n=" << inst.num_nodes() << " m=" << inst.graph.num_edges() << " r=" << inst.owners.dimension()
            << " gamma=" << sparsity_gamma(inst.graph);
  } else if (!random.empty()) {
    const auto kv = parse_kv(random);
    const auto inst = generate_random_vc_instance(static_cast<int>(kv_num(kv, "n", 16)), kv_num(kv, "p", 0.2),
                                                  static_cast<int>(kv_num(kv, "r", 2)),
                                                  static_cast<std::uint64_t>(kv_num(kv, "seed", double(seed))));
    const auto rep = validate_vc_instance(inst);
    if (!rep.ok) throw std::runtime_error("generated instance failed validation: " + rep.reasons.front());
    if (out.empty() || out == "-") std::cout << to_json(inst).dump(2) << '\n';
    else save_instance(out, inst);
    summary << "random n=" << inst.num_nodes() << " m=" << inst.graph.num_edges()
            << " r=" << inst.owners.dimension() << " gamma=" << sparsity_gamma(inst.graph);
  } else if (!ufl.empty()) {
    const auto kv = parse_kv(ufl);
    const auto inst = make_ufl(kv, static_cast<std::uint64_t>(kv_num(kv, "seed", double(seed))));
    const auto rep = validate_ufl_instance(inst);
    if (!rep.ok) throw std::runtime_error("generated instance failed validation: " + rep.reasons.front());
    if (out.empty() || out == "-") std::cout << to_json(inst).dump(2) << '\n';
    else save_instance(out, inst);
    summary << "ufl facilities=" << inst.num_facilities() << " clients=" << inst.num_clients
            << " agents=" << inst.num_agents();
  } else {
    throw std::invalid_argument("gen needs --gadget, --random or --ufl");
  }
  (out.empty() || out == "-" ? std::cerr : std::cout) << summary.str() << '\n';
  return 0;
}

int cmd_run(const MechanismSpec& spec, const SourceOptions& src, bool timing, bool enumerate, const std::string& out) {
  const auto jobs = collect_jobs(src);
  const bool ufl = spec.name == "ufl";
  if (!ufl && !is_mechanism(spec.name)) throw std::invalid_argument("unknown mechanism '" + spec.name + "'");
  std::vector<Row> rows(jobs.size());
  // Each job owns its seed; rows keep job order, so output does not depend
  // on scheduling.
#pragma omp parallel for schedule(dynamic) num_threads(worker_threads())
  for (long k = 0; k < static_cast<long>(jobs.size()); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if (ufl != jobs[k].fl.has_value()) {
        throw std::invalid_argument(ufl ? "ufl needs a facility instance" : "a facility instance needs --mechanism ufl");
      }
      rows[k] = ufl ? run_ufl_row(jobs[k], enumerate) : run_vc_row(spec, jobs[k]);
    } catch (const std::exception& e) {
      rows[k] = Row{};
      rows[k].bad_input = dynamic_cast<const MonopolyViolation*>(&e) || dynamic_cast<const SizeLimitExceeded*>(&e) ||
                          dynamic_cast<const std::invalid_argument*>(&e);
      rows[k].instance = jobs[k].id;
      rows[k].seed = jobs[k].seed;
      rows[k].mechanism = spec.name;
      rows[k].failed = true;
      rows[k].error = e.what();
    }
    rows[k].wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  std::ostringstream os;
  os << kCsvHeader << (timing ? ",wall_time_ms" : "") << '\n';
  int failures = 0, rejected = 0;
  for (const auto& r : rows) {
    os << csv_line(r, timing) << '\n';
    if (r.failed) {
      (r.bad_input ? rejected : failures) += 1;
      std::cerr << (r.bad_input ? "REJECTED " : "FAIL ") << r.instance << " seed " << r.seed << ": " << r.error << '\n';
    }
  }
  write_output(out, os.str());
  return failures ? 1 : rejected ? 2 : 0;
}

json distribution_json(const UFLMechanismResult& r, const DecompositionErrors& e) {
  json j;
  j["lp"] = {{"value", r.frac.value}, {"y", r.frac.y}, {"connection_cost", r.frac.connection_cost}};
  j["vcg_payments"] = r.vcg;
  json dist = json::array();
  for (const auto& o : r.outcomes) {
    std::vector<int> open;
    for (std::size_t l = 0; l < o.open.size(); ++l)
      if (o.open[l]) open.push_back(static_cast<int>(l));
    dist.push_back({{"lambda", o.lambda}, {"open", open}, {"assign", o.assign}, {"cost", o.cost},
                    {"payments", o.payments}});
  }
  j["distribution"] = dist;
  j["sampled"] = r.sampled;
  j["realization"] = dist.at(r.sampled);
  j["expected_cost"] = r.expected_cost;
  j["expected_payments"] = r.expected_payments;
  j["master"] = {{"value", r.decomposition.master_value},
                 {"iterations", r.decomposition.iterations},
                 {"generated", r.decomposition.generated},
                 {"enumerated", r.decomposition.enumerated}};
  j["checks"] = {{"lambda_sum_error", e.lambda_sum},
                 {"identity_error", e.identity},
                 {"connection_excess", e.connection},
                 {"integral", e.integral}};
  return j;
}

int cmd_run_ufl(const std::string& file, std::uint64_t seed, bool enumerate, const std::string& out) {
  const auto inst = load_ufl_instance(file);
  UFLOptions opt;
  opt.enumerate = enumerate;
  const auto r = run_ufl_mechanism(inst, seed, opt);
  const auto e = check_decomposition(inst, r.frac, r.decomposition, opt.rho);
  auto j = distribution_json(r, e);
  j["instance"] = file;
  j["seed"] = seed;
  write_output(out, j.dump(2) + "\n");
  const bool ok = e.lambda_sum <= 1e-8 && e.identity <= 1e-6 && e.connection <= 1e-6 && e.integral &&
                  r.expected_cost <= 2 * r.frac.value + 1e-6;
  return ok ? 0 : 1;
}

json witness_json(const WMONWitness& w) {
  std::vector<int> a, b;
  for (std::size_t u = 0; u < w.a.size(); ++u) {
    if (w.a[u]) a.push_back(static_cast<int>(u));
    if (w.b[u]) b.push_back(static_cast<int>(u));
  }
  return {{"probe", w.probe},          {"agent", w.agent},
          {"nodes", w.context.owners.sets[w.agent]},
          {"costs", w.context.costs[w.agent]},
          {"deviation", w.deviation},  {"allocation", a},
          {"allocation_after", b},     {"lhs", w.lhs},
          {"rhs", w.rhs},              {"context", to_json(w.context)}};
}

struct VerifyOptions {
  std::string target;
  std::vector<std::string> checks{"wmon"};
  long probes = 1000;
  std::uint64_t seed = 1;
  bool fixtures = false;
  MechanismSpec mech;
  std::vector<std::string> sample{"n=9", "p=0.35", "r=2"};
  int grid = 9;
};

int cmd_verify(const VerifyOptions& opt, const SourceOptions& src, const std::string& out) {
  json report;
  report["target"] = opt.target;
  report["seed"] = opt.seed;
  bool failed = false;
  auto fail = [&](const std::string& why) {
    failed = true;
    report["failures"].push_back(why);
    std::cerr << "FAIL " << why << '\n';
  };
  const bool mech = is_mechanism(opt.target);
  const bool alg = std::find(kAlgorithms.begin(), kAlgorithms.end(), opt.target) != kAlgorithms.end();
  if (!mech && !alg && opt.target != "ufl") throw std::invalid_argument("unknown target '" + opt.target + "'");

  MechanismSpec spec = opt.mech;
  spec.name = opt.target;
  const VCMechanism vc_mech = [spec](const VCInstance& inst) { return run_mechanism(spec, inst).result; };
  const auto kv = parse_kv(opt.sample);
  const int n = static_cast<int>(kv_num(kv, "n", 9));
  const double p = kv_num(kv, "p", 0.35);
  const int r = static_cast<int>(kv_num(kv, "r", 2));
  const VCSampler sampler = [n, p, r](std::mt19937_64& rng) { return generate_random_vc_instance(n, p, r, rng()); };

  std::vector<Job> jobs;
  if (!src.files.empty() || !src.random.empty() || !src.ufl.empty()) jobs = collect_jobs(src);

  for (const auto& check : opt.checks) {
    if (check == "wmon") {
      if (opt.target == "ufl") throw std::invalid_argument("wmon applies to vertex-cover targets");
      json section;
      if (alg && opt.fixtures) {
        for (const auto& f : wmon_fixtures()) {
          const bool mine = (opt.target == "lp-rounding" && f.name == "lp-rounding-five-cycle") ||
                            (opt.target == "ordered-pd" && f.name == "ordered-primal-dual-path") ||
                            (opt.target == "simultaneous-pd" && f.name == "simultaneous-primal-dual-path");
          if (!mine) continue;
          const auto w = wmon_compare(f.algorithm, f.instance, f.agent, f.deviation);
          json fj{{"name", f.name}, {"expected_lhs", f.lhs}, {"expected_rhs", f.rhs}};
          if (!w || std::abs(w->lhs - f.lhs) > 1e-9 || std::abs(w->rhs - f.rhs) > 1e-9) {
            fail("fixture " + f.name + " did not reproduce");
          } else {
            fj["witness"] = witness_json(*w);
          }
          section["fixtures"].push_back(fj);
          const auto rep = wmon_check(f.algorithm,
                                      opt.target == "simultaneous-pd" ? path_pair_sampler(5.0)
                                                                      : jitter_sampler(f.instance, 0.02),
                                      opt.probes, opt.seed);
          section["probes"] = rep.probes;
          section["violations"] = rep.violations;
          for (const auto& w2 : rep.witnesses) section["witnesses"].push_back(witness_json(w2));
          // Finding more witnesses by probing is informative, not required.
          if (rep.violations == 0) section["note"] = "no further witness within the probe budget";
        }
      } else {
        const VCAlgorithm a = mech ? allocation_of(vc_mech) : algorithm_by_name(opt.target);
        const auto rep = wmon_check(a, sampler, opt.probes, opt.seed);
        section["probes"] = rep.probes;
        section["violations"] = rep.violations;
        for (const auto& w : rep.witnesses) section["witnesses"].push_back(witness_json(w));
        if (mech && rep.violations > 0) fail("weak monotonicity violated by a truthful mechanism");
      }
      report["wmon"] = section;
    } else if (check == "truthful") {
      json section;
      double worst = 0;
      if (opt.target == "ufl") {
        const double factors[] = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0};
        for (const auto& job : jobs) {
          if (!job.fl) continue;
          const auto t = ufl_truthfulness_check(*job.fl, factors, job.seed);
          section["instances"].push_back({{"instance", job.id}, {"seed", job.seed}, {"max_gain", t.max_gain}});
          worst = std::max(worst, t.max_gain);
        }
        if (worst > 1e-7) fail("expected utility gain from misreporting");
      } else {
        if (!mech) throw std::invalid_argument("truthful applies to mechanisms");
        std::vector<std::pair<std::string, VCInstance>> insts;
        for (const auto& job : jobs)
          if (job.vc) insts.emplace_back(job.id, *job.vc);
        if (insts.empty()) {
          for (long k = 0; k < std::max<long>(1, opt.probes / 100); ++k) {
            std::mt19937_64 rng(opt.seed + k);
            insts.emplace_back("sample:" + std::to_string(k), sampler(rng));
          }
        }
        for (const auto& [id, inst] : insts) {
          const auto t = truthfulness_check(vc_mech, inst, opt.grid);
          worst = std::max(worst, t.max_gain);
          if (t.max_gain > 1e-9) section["gains"].push_back({{"instance", id}, {"max_gain", t.max_gain}});
        }
        section["instances"] = insts.size();
        if (worst > 1e-9) fail("utility gain from misreporting");
      }
      section["max_gain"] = worst;
      report["truthful"] = section;
    } else if (check == "ir" || check == "approx" || check == "frugality") {
      if (!mech) throw std::invalid_argument(check + " applies to vertex-cover mechanisms");
      std::vector<std::pair<std::string, VCInstance>> insts;
      for (const auto& job : jobs)
        if (job.vc) insts.emplace_back(job.id + "#" + std::to_string(job.seed), *job.vc);
      if (insts.empty()) {
        for (long k = 0; k < std::max<long>(1, opt.probes / 100); ++k) {
          std::mt19937_64 rng(opt.seed + k);
          insts.emplace_back("sample:" + std::to_string(k), sampler(rng));
        }
      }
      json section;
      double worst = 0, worst_bound_gap = -std::numeric_limits<double>::infinity();
      for (const auto& [id, inst] : insts) {
        const auto o = run_mechanism(spec, inst);
        if (check == "ir") {
          worst = std::max(worst, ir_violation(inst, o.result));
        } else if (check == "approx") {
          if (!o.result.feasible) fail("infeasible output on " + id);
          const double ratio = approximation_ratio(inst, o.result);
          worst = std::max(worst, ratio);
          if (ratio < 1 - 1e-9) fail("ratio below 1 on " + id);
          if (!std::isnan(o.bound)) {
            worst_bound_gap = std::max(worst_bound_gap, ratio - o.bound);
            if (ratio > o.bound + 1e-9) fail("ratio above the certified bound on " + id);
          }
        } else {
          const auto c = inst.node_costs();
          const auto fr = frugality_report(inst.graph, c, o.result.total_payment());
          if (std::isfinite(fr.ratio)) worst = std::max(worst, fr.ratio);
          if (fr.nu < std::accumulate(c.begin(), c.end(), 0.0) / 2 - 1e-9) {
            section["below_half_cost"].push_back(id);
          }
          if (!std::isnan(o.beta) && (spec.name == "ax" || spec.name == "perron") &&
              fr.payment > 2 * o.beta * fr.nu + 1e-9)
            fail("payments above 2 beta nu on " + id);
        }
      }
      section["instances"] = insts.size();
      if (check == "ir") {
        section["max_violation"] = worst;
        if (worst > 1e-9) fail("individual rationality violated");
      } else if (check == "approx") {
        section["max_ratio"] = worst;
        if (std::isfinite(worst_bound_gap)) section["max_ratio_minus_bound"] = worst_bound_gap;
      } else {
        section["max_frugality_ratio"] = worst;
      }
      report[check] = section;
    } else {
      throw std::invalid_argument("unknown check '" + check + "' (wmon,truthful,ir,approx,frugality)");
    }
  }
  report["ok"] = !failed;
  write_output(out, report.dump(2) + "\n");
  return failed ? 1 : 0;
}

int cmd_frugality(const MechanismSpec& spec, const SourceOptions& src, int estimate, const std::string& out) {
  const auto jobs = collect_jobs(src);
  json report = json::array();
  bool failed = false;
  for (const auto& job : jobs) {
    if (!job.vc) throw std::invalid_argument("frugality needs vertex-cover instances");
    const auto& inst = *job.vc;
    MechanismSpec s = spec;
    s.seed = job.seed;
    const auto o = run_mechanism(s, inst);
    const auto c = inst.node_costs();
    const auto fr = frugality_report(inst.graph, c, o.result.total_payment());
    json j{{"instance", job.id},        {"seed", job.seed},          {"mechanism", spec.name},
           {"nu", fr.nu},               {"cover", fr.cover},         {"payment", fr.payment},
           {"ratio", num(fr.ratio)},    {"constraints", fr.constraints}};
    if (!std::isnan(o.beta)) j["beta"] = o.beta;
    if (estimate > 0) {
      const VCMechanism m = [s](const VCInstance& i) { return run_mechanism(s, i).result; };
      const auto est = frugality_ratio_estimate(m, VCSkeleton{inst.graph, inst.owners}, estimate, job.seed);
      j["estimate_lower_bound"] = est.estimate;
      j["estimate_costs"] = est.costs;
      if ((spec.name == "ax" || spec.name == "perron") && est.estimate > 2 * o.beta + 1e-9) {
        failed = true;
        std::cerr << "FAIL frugality estimate above 2 beta on " << job.id << '\n';
      }
    }
    report.push_back(j);
  }
  write_output(out, report.dump(2) + "\n");
  return failed ? 1 : 0;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> f;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      f.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  f.push_back(cur);
  return f;
}

int cmd_report(const std::vector<std::string>& files, const std::string& out) {
  struct Stats {
    long rows = 0;
    long with_ratio = 0;
    double ratio_sum = 0, ratio_max = 0, pay_sum = 0, frug_max = 0, parts_sum = 0;
  };
  std::map<std::string, Stats> by_mech;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file);
    std::string line;
    std::getline(in, line);
    const auto header = split_csv_line(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t k = 0; k < header.size(); ++k) col[header[k]] = k;
    for (const char* need : {"mechanism", "ratio", "payments", "frugality_ratio", "parts"})
      if (!col.count(need)) throw ParseError(file + ": missing column " + need);
    int lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto f = split_csv_line(line);
      if (f.size() != header.size()) throw ParseError(file + ":" + std::to_string(lineno) + ": wrong field count");
      auto& s = by_mech[f[col["mechanism"]]];
      ++s.rows;
      auto val = [&](const char* name) { return f[col[name]].empty() ? kNaN : std::stod(f[col[name]]); };
      const double ratio = val("ratio"), pay = val("payments"), fr = val("frugality_ratio"), parts = val("parts");
      if (!std::isnan(ratio)) {
        ++s.with_ratio;
        s.ratio_sum += ratio;
        s.ratio_max = std::max(s.ratio_max, ratio);
      }
      if (!std::isnan(pay)) s.pay_sum += pay;
      if (!std::isnan(fr)) s.frug_max = std::max(s.frug_max, fr);
      if (!std::isnan(parts)) s.parts_sum += parts;
    }
  }
  std::ostringstream os;
  os << "mechanism,rows,mean_ratio,max_ratio,mean_payments,max_frugality_ratio,mean_parts\n";
  for (const auto& [m, s] : by_mech) {
    os << m << ',' << s.rows << ',' << fmt(s.with_ratio ? s.ratio_sum / s.with_ratio : kNaN) << ','
       << fmt(s.with_ratio ? s.ratio_max : kNaN) << ',' << fmt(s.pay_sum / s.rows) << ',' << fmt(s.frug_max) << ','
       << fmt(s.parts_sum / s.rows) << '\n';
  }
  write_output(out, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truthful mechanisms for multidimensional vertex cover and facility location"};
  app.require_subcommand(1);
  std::string out;

  auto* gen = app.add_subcommand("gen", "Write a generated instance as JSON");
  std::optional<int> gadget;
  std::vector<std::string> gen_random, gen_ufl;
  std::uint64_t gen_seed = 1;
  gen->add_option("--gadget", gadget, "Lower-bound gadget G^n");
  gen->add_option("--random", gen_random, "n=16 p=0.2 r=2 seed=3");
  gen->add_option("--ufl", gen_ufl, "facilities=5 clients=6 agents=2 family=line seed=1");
  gen->add_option("--seed", gen_seed, "Default seed");
  gen->add_option("-o,--out", out, "Output file (default stdout)");

  auto* run = app.add_subcommand("run", "Run a mechanism over instances and emit CSV rows");
  MechanismSpec run_spec;
  SourceOptions run_src;
  bool timing = false, run_enum = false;
  run->add_option("--mechanism", run_spec.name, "ax|bx|perron|rdim|minor|threehop|ufl")->required();
  run->add_option("--x", run_spec.x, "Scaling for ax/bx: ones|perron");
  run->add_option("--gamma", run_spec.gamma, "Sparsity parameter (0 = exact density)");
  add_source_options(run, run_src);
  run->add_flag("--timing", timing, "Add a wall_time_ms column");
  run->add_flag("--fallback-enum", run_enum, "Facility mechanism: enumerate instead of pricing");
  run->add_option("-o,--out", out, "CSV file (default stdout)");

  auto* run_ufl = app.add_subcommand("run-ufl", "Facility mechanism on one instance; JSON distribution");
  std::string ufl_file;
  std::uint64_t ufl_seed = 1;
  bool ufl_enum = false;
  run_ufl->add_option("--instance", ufl_file, "Facility instance JSON")->required()->check(CLI::ExistingFile);
  run_ufl->add_option("--seed", ufl_seed, "Sampling seed");
  run_ufl->add_flag("--fallback-enum", ufl_enum, "Enumerate all facility subsets instead of pricing");
  run_ufl->add_option("-o,--out", out, "JSON file (default stdout)");

  auto* verify = app.add_subcommand("verify", "Game-theoretic checks; nonzero exit on a hard failure");
  VerifyOptions vopt;
  SourceOptions vsrc;
  std::string checks = "wmon";
  verify->add_option("--target", vopt.target, "ax|bx|perron|rdim|minor|threehop|lp-rounding|ordered-pd|simultaneous-pd|ufl")
      ->required();
  verify->add_option("--checks", checks, "Comma list of wmon,truthful,ir,approx,frugality");
  verify->add_option("--probes", vopt.probes, "WMON probes (also sets the sampled instance count)");
  verify->add_option("--seed", vopt.seed, "Probe seed");
  verify->add_flag("--fixtures", vopt.fixtures, "Check the known counterexample for the algorithm");
  verify->add_option("--sample", vopt.sample, "Sampled instances: n=9 p=0.35 r=2");
  verify->add_option("--grid", vopt.grid, "Truthfulness grid size");
  verify->add_option("--x", vopt.mech.x, "Scaling for ax/bx: ones|perron");
  verify->add_option("--gamma", vopt.mech.gamma, "Sparsity parameter");
  add_source_options(verify, vsrc);
  verify->add_option("-o,--out", out, "JSON file (default stdout)");

  auto* frug = app.add_subcommand("frugality", "Frugality benchmark and ratio for a mechanism");
  MechanismSpec frug_spec;
  frug_spec.name = "ax";
  SourceOptions frug_src;
  int estimate = 0;
  frug->add_option("--mechanism", frug_spec.name, "ax|bx|perron|rdim|minor|threehop");
  frug->add_option("--x", frug_spec.x, "Scaling for ax/bx: ones|perron");
  frug->add_option("--gamma", frug_spec.gamma, "Sparsity parameter");
  frug->add_option("--estimate", estimate, "Search trials for a frugality-ratio lower bound");
  add_source_options(frug, frug_src);
  frug->add_option("-o,--out", out, "JSON file (default stdout)");

  auto* report = app.add_subcommand("report", "Summarise CSV files written by run");
  std::vector<std::string> report_files;
  report->add_option("files", report_files, "CSV files")->required()->check(CLI::ExistingFile);
  report->add_option("-o,--out", out, "CSV file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(gadget, gen_random, gen_ufl, gen_seed, out);
    if (*run) return cmd_run(run_spec, run_src, timing, run_enum, out);
    if (*run_ufl) return cmd_run_ufl(ufl_file, ufl_seed, ufl_enum, out);
    if (*verify) {
      vopt.checks.clear();
      std::stringstream ss(checks);
      std::string c;
      while (std::getline(ss, c, ','))
        if (!c.empty()) vopt.checks.push_back(c);
      return cmd_verify(vopt, vsrc, out);
    }
    if (*frug) return cmd_frugality(frug_spec, frug_src, estimate, out);
    if (*report) return cmd_report(report_files, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
