#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ttplan/flow.hpp"
#include "ttplan/network.hpp"
#include "ttplan/plan.hpp"
#include "ttplan/planner.hpp"
#include "ttplan/rng.hpp"
#include "ttplan/sim.hpp"

namespace ttplan {

enum class TopologyModel : std::uint8_t { Ring, ErdosRenyi, Waxman, Price };

const char* topology_model_name(TopologyModel m);
TopologyModel topology_model_from_name(const std::string& name);

struct TopologySpec {
  TopologyModel model = TopologyModel::Ring;
  int n = 16;          // infrastructure node count
  int k = 2;           // ring: links to the next k nodes in each direction
  double p = 0.2;      // erdos-renyi edge probability
  double alpha = 0.9;  // waxman
  double beta = 0.3;   // waxman
  Duration t_proc = 2;
  Duration t_prop = 1;
  Duration t_src = 0;
  Duration t_dst = 0;
};

// Deterministic for (spec, seed). Every infrastructure node gets one host
// ("h<i>" attached to "s<i>"). Models that can produce disconnected graphs
// retry with an incremented sub-seed, up to 100 attempts.
Network gen_topology(const TopologySpec& spec, std::uint64_t seed);

struct CountSpec {
  enum class Kind : std::uint8_t { Fixed, Poisson } kind = Kind::Fixed;
  std::int64_t value = 0;  // fixed count
  double mean = 0.0;       // poisson mean, truncated at 0 by construction
};

enum class DtLimitPolicy : std::uint8_t { InOrder, Unbounded };

struct ScenarioSpec {
  TopologySpec topology;
  int steps = 10;
  std::uint64_t seed = 1;
  CountSpec add{CountSpec::Kind::Fixed, 15, 0.0};
  CountSpec remove{CountSpec::Kind::Fixed, 5, 0.0};
  std::vector<std::int64_t> cluster_palette = {1, 2, 4, 8, 16, 32};
  std::vector<Duration> t_cycle_palette = {250, 500, 1000, 2000};
  std::vector<Duration> t_trans_palette = {1, 3, 5, 12};
  double pin_fraction = 0.2;
  double deadline_factor = 2.0;
  DtLimitPolicy dt_limit_policy = DtLimitPolicy::InOrder;
  int n_path = 3;
  int n_ub = 50;
};

std::string scenario_spec_to_json(const ScenarioSpec& spec, int indent = 2);
ScenarioSpec scenario_spec_from_json(const std::string& text);

struct ScenarioStep {
  std::vector<FlowParams> add;
  std::vector<FlowId> remove;
};

struct Scenario {
  Network net;
  int n_path = 3;
  int n_ub = 50;
  std::vector<ScenarioStep> steps;
};

// Expands a spec into the concrete request sequence. Removal lists assume
// every requested flow was admitted; the sequence driver drops entries for
// flows the planner actually rejected.
Scenario gen_scenario(const ScenarioSpec& spec);

std::string scenario_to_json(const Scenario& sc, int indent = 2);
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& sc, const std::string& path);

struct SequenceOptions {
  bool offensive = true;
  std::optional<int> n_path;
  std::optional<int> n_ub;
  std::optional<int> n_reruns;
  std::optional<double> alpha;
  std::string out_dir;       // plans land here when write_plans is set
  bool write_plans = false;
  bool validate = true;      // simulate every plan and transition
};

struct StepOutcome {
  PlanUpdate update;
  std::int64_t runtime_ms = 0;
  std::size_t plan_violations = 0;
  std::size_t transition_violations = 0;
};

struct SequenceResult {
  std::vector<StepOutcome> steps;
  std::string csv;
  std::int64_t total_rejected = 0;
  std::int64_t total_reconfigured = 0;
  std::size_t oracle_violations = 0;
};

extern const char* const kSequenceCsvHeader;

SequenceResult run_sequence(const Scenario& sc, const SequenceOptions& opt = {});

}  // namespace ttplan
