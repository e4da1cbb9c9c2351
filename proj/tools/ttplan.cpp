#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ttplan/conflict.hpp"
#include "ttplan/error.hpp"
#include "ttplan/plan.hpp"
#include "ttplan/planner.hpp"
#include "ttplan/scenario.hpp"
#include "ttplan/sim.hpp"

namespace {

using namespace ttplan;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw MalformedInput("cannot open " + path + " for writing");
  out << text << "\n";
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CommonPlannerFlags {
  std::string mode = "offensive";
  std::optional<int> n_ub;
  std::optional<int> n_path;
  std::optional<int> n_reruns;
  std::optional<double> alpha;

  void attach(CLI::App* cmd) {
    cmd->add_option("--mode", mode, "defensive|offensive")
        ->check(CLI::IsMember({"defensive", "offensive"}));
    cmd->add_option("--n-ub", n_ub, "per-flow candidate growth cap per step");
    cmd->add_option("--n-path", n_path, "candidate paths per flow");
    cmd->add_option("--n-reruns", n_reruns, "solver re-run budget");
    cmd->add_option("--alpha", alpha, "shadow rating penalty");
  }

  SequenceOptions sequence_options() const {
    SequenceOptions opt;
    opt.offensive = mode == "offensive";
    opt.n_ub = n_ub;
    opt.n_path = n_path;
    opt.n_reruns = n_reruns;
    opt.alpha = alpha;
    return opt;
  }
};

int cmd_gen_topology(const TopologySpec& spec, std::uint64_t seed, const std::string& out) {
  Network net = gen_topology(spec, seed);
  write_text(out, net.to_json_string());
  return 0;
}

int cmd_gen_scenario(const std::string& spec_path, std::optional<std::uint64_t> seed,
                     const std::string& out) {
  ScenarioSpec spec = scenario_spec_from_json(read_text(spec_path));
  if (seed) spec.seed = *seed;
  Scenario sc = gen_scenario(spec);
  write_text(out, scenario_to_json(sc));
  return 0;
}

int cmd_run_sequence(const std::string& scenario_path, const CommonPlannerFlags& flags,
                     const std::string& out_dir, bool write_plans, bool no_validate) {
  Scenario sc = load_scenario(scenario_path);
  SequenceOptions opt = flags.sequence_options();
  opt.out_dir = out_dir;
  opt.write_plans = write_plans;
  opt.validate = !no_validate;
  SequenceResult result = run_sequence(sc, opt);
  std::cout << result.csv;
  if (result.oracle_violations > 0) {
    std::cerr << "oracle: " << result.oracle_violations << " queuing violation(s) detected\n";
    return 1;
  }
  return 0;
}

// Replays the sequence deterministically and prints the plan of one step.
int cmd_plan_step(const std::string& scenario_path, int step, const CommonPlannerFlags& flags,
                  const std::string& out) {
  Scenario sc = load_scenario(scenario_path);
  if (step < 1 || step > static_cast<int>(sc.steps.size()))
    throw InvalidParameters("step out of range 1.." + std::to_string(sc.steps.size()));
  PlannerConfig cfg;
  cfg.n_path = flags.n_path.value_or(sc.n_path);
  cfg.n_ub = flags.n_ub.value_or(sc.n_ub);
  if (flags.n_reruns) cfg.gfh.n_reruns = *flags.n_reruns;
  if (flags.alpha) cfg.gfh.alpha = *flags.alpha;
  cfg.offensive = flags.mode == "offensive";
  Planner planner(sc.net, cfg);

  TrafficPlan prev_plan = planner.plan();
  std::map<FlowId, Flow> prev_flows;
  PlanUpdate update;
  for (int i = 0; i < step; ++i) {
    prev_plan = planner.plan();
    prev_flows = i == 0 ? std::map<FlowId, Flow>{} : update.flows;
    std::vector<FlowId> removals;
    for (FlowId id : sc.steps[i].remove)
      if (planner.plan().configs.count(id)) removals.push_back(id);
    update = planner.process_request(sc.steps[i].add, removals);
  }
  write_text(out, plan_json(sc.net, update.flows, update.plan, &prev_plan, &prev_flows));
  return 0;
}

int cmd_validate(const std::string& scenario_path, const CommonPlannerFlags& flags,
                 bool check_graph) {
  Scenario sc = load_scenario(scenario_path);
  SequenceOptions opt = flags.sequence_options();
  opt.validate = true;
  SequenceResult result = run_sequence(sc, opt);

  std::size_t conflicts = 0;
  for (const StepOutcome& step : result.steps) {
    const auto& configs = step.update.plan.configs;
    for (auto a = configs.begin(); a != configs.end(); ++a) {
      for (auto b = std::next(a); b != configs.end(); ++b) {
        if (configs_conflict(sc.net, step.update.flows.at(a->first), a->second,
                             step.update.flows.at(b->first), b->second))
          ++conflicts;
      }
    }
  }
  std::size_t edge_mismatches = 0;
  if (check_graph) {
    // rebuild every step's final graph from its own snapshot and recheck the
    // recorded edges against the pairwise conflict test
    PlannerConfig cfg;
    cfg.n_path = flags.n_path.value_or(sc.n_path);
    cfg.n_ub = flags.n_ub.value_or(sc.n_ub);
    cfg.offensive = flags.mode == "offensive";
    Planner planner(sc.net, cfg);
    for (const ScenarioStep& step : sc.steps) {
      std::vector<FlowId> removals;
      for (FlowId id : step.remove)
        if (planner.plan().configs.count(id)) removals.push_back(id);
      planner.process_request(step.add, removals);
    }
    const ConflictGraph& g = planner.graph();
    ConflictGraph copy = ConflictGraph::from_snapshot_json(sc.net, g.snapshot_json());
    for (FlowId f : copy.flow_ids()) {
      for (VertexId v : copy.candidates(f)) {
        for (VertexId u : copy.vertex(v).nbrs) {
          const VertexInfo& a = copy.vertex(v);
          const VertexInfo& b = copy.vertex(u);
          if (!configs_conflict(sc.net, copy.flow(a.flow), {a.flow, a.phi, a.path},
                                copy.flow(b.flow), {b.flow, b.phi, b.path}))
            ++edge_mismatches;
        }
      }
    }
  }

  std::cout << "steps: " << result.steps.size() << "\n"
            << "queuing violations: " << result.oracle_violations << "\n"
            << "pairwise plan conflicts: " << conflicts << "\n";
  if (check_graph) std::cout << "graph edge mismatches: " << edge_mismatches << "\n";
  bool clean = result.oracle_violations == 0 && conflicts == 0 && edge_mismatches == 0;
  std::cout << (clean ? "clean" : "violations detected") << "\n";
  return clean ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic traffic planner for time-triggered flows"};
  app.require_subcommand(1);

  // gen-topology
  auto* topo = app.add_subcommand("gen-topology", "generate a network topology");
  TopologySpec tspec;
  std::string model_name = "ring";
  std::uint64_t topo_seed = 1;
  std::string topo_out;
  topo->add_option("--model", model_name, "ring|erdos-renyi|waxman|price");
  topo->add_option("--n", tspec.n, "infrastructure node count");
  topo->add_option("--k", tspec.k, "ring neighbor span");
  topo->add_option("--p", tspec.p, "erdos-renyi edge probability");
  topo->add_option("--alpha", tspec.alpha, "waxman alpha");
  topo->add_option("--beta", tspec.beta, "waxman beta");
  topo->add_option("--t-proc", tspec.t_proc, "per-node processing delay");
  topo->add_option("--t-prop", tspec.t_prop, "per-link propagation delay");
  topo->add_option("--seed", topo_seed, "rng seed");
  topo->add_option("-o,--out", topo_out, "output file (default stdout)");

  // gen-scenario
  auto* gen = app.add_subcommand("gen-scenario", "expand a scenario spec into requests");
  std::string gen_spec, gen_out;
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--spec", gen_spec, "scenario spec JSON")->required();
  gen->add_option("--seed", gen_seed, "override the spec's seed");
  gen->add_option("-o,--out", gen_out, "output file (default stdout)");

  // run-sequence
  auto* run = app.add_subcommand("run-sequence", "drive the planner through a scenario");
  std::string run_scenario, run_out_dir;
  bool run_write_plans = false, run_no_validate = false;
  CommonPlannerFlags run_flags;
  run->add_option("--scenario", run_scenario, "scenario JSON")->required();
  run_flags.attach(run);
  run->add_option("--out-dir", run_out_dir, "directory for stats.csv and plans");
  run->add_flag("--write-plans", run_write_plans, "write plan_step_<k>.json files");
  run->add_flag("--no-validate", run_no_validate, "skip oracle simulation");

  // plan-step
  auto* ps = app.add_subcommand("plan-step", "print the plan emitted at one step");
  std::string ps_scenario, ps_out;
  int ps_step = 1;
  CommonPlannerFlags ps_flags;
  ps->add_option("--scenario", ps_scenario, "scenario JSON")->required();
  ps->add_option("--step", ps_step, "1-based step index")->required();
  ps_flags.attach(ps);
  ps->add_option("-o,--out", ps_out, "output file (default stdout)");

  // validate
  auto* val = app.add_subcommand("validate", "replay a scenario and recheck every plan");
  std::string val_scenario;
  bool val_check_graph = false;
  CommonPlannerFlags val_flags;
  val->add_option("--scenario", val_scenario, "scenario JSON")->required();
  val_flags.attach(val);
  val->add_flag("--check-graph", val_check_graph,
                "also recheck the final conflict graph's edges");

  CLI11_PARSE(app, argc, argv);

  try {
    if (topo->parsed()) {
      tspec.model = topology_model_from_name(model_name);
      return cmd_gen_topology(tspec, topo_seed, topo_out);
    }
    if (gen->parsed()) return cmd_gen_scenario(gen_spec, gen_seed, gen_out);
    if (run->parsed())
      return cmd_run_sequence(run_scenario, run_flags, run_out_dir, run_write_plans,
                              run_no_validate);
    if (ps->parsed()) return cmd_plan_step(ps_scenario, ps_step, ps_flags, ps_out);
    if (val->parsed()) return cmd_validate(val_scenario, val_flags, val_check_graph);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
