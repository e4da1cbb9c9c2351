#include "ttplan/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ttplan/error.hpp"

namespace ttplan {

const char* topology_model_name(TopologyModel m) {
  switch (m) {
    case TopologyModel::Ring: return "ring";
    case TopologyModel::ErdosRenyi: return "erdos-renyi";
    case TopologyModel::Waxman: return "waxman";
    case TopologyModel::Price: return "price";
  }
  return "?";
}

TopologyModel topology_model_from_name(const std::string& name) {
  if (name == "ring") return TopologyModel::Ring;
  if (name == "erdos-renyi") return TopologyModel::ErdosRenyi;
  if (name == "waxman") return TopologyModel::Waxman;
  if (name == "price") return TopologyModel::Price;
  throw MalformedInput("unknown topology model: " + name);
}

namespace {

std::string padded(char prefix, int i, int n) {
  int width = 1;
  for (int v = n - 1; v >= 10; v /= 10) ++width;
  std::string digits = std::to_string(i);
  return prefix + std::string(width - digits.size(), '0') + digits;
}

bool infra_connected(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n == 0) return false;
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : adj[v])
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        stack.push_back(u);
      }
  }
  return count == n;
}

std::vector<std::pair<int, int>> model_edges(const TopologySpec& spec, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  switch (spec.model) {
    case TopologyModel::Ring:
      for (int i = 0; i < spec.n; ++i)
        for (int j = 1; j <= spec.k; ++j) {
          int other = (i + j) % spec.n;
          if (i < other)
            edges.push_back({i, other});
          else
            edges.push_back({other, i});
        }
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
      break;
    case TopologyModel::ErdosRenyi:
      for (int i = 0; i < spec.n; ++i)
        for (int j = i + 1; j < spec.n; ++j)
          if (rng_unit(rng) < spec.p) edges.push_back({i, j});
      break;
    case TopologyModel::Waxman: {
      std::vector<std::pair<double, double>> pos(spec.n);
      for (auto& [x, y] : pos) {
        x = rng_unit(rng);
        y = rng_unit(rng);
      }
      double len = 0.0;
      for (int i = 0; i < spec.n; ++i)
        for (int j = i + 1; j < spec.n; ++j)
          len = std::max(len, std::hypot(pos[i].first - pos[j].first,
                                         pos[i].second - pos[j].second));
      if (len <= 0.0) len = 1.0;
      for (int i = 0; i < spec.n; ++i)
        for (int j = i + 1; j < spec.n; ++j) {
          double d = std::hypot(pos[i].first - pos[j].first, pos[i].second - pos[j].second);
          if (rng_unit(rng) < spec.alpha * std::exp(-d / (spec.beta * len)))
            edges.push_back({i, j});
        }
      break;
    }
    case TopologyModel::Price: {
      // preferential attachment, one link per new node: always a tree
      std::vector<std::int64_t> weight(spec.n, 1);  // degree + 1
      std::int64_t total = 1;
      for (int i = 1; i < spec.n; ++i) {
        std::int64_t r = static_cast<std::int64_t>(rng_below(rng, total));
        int target = 0;
        while (r >= weight[target]) r -= weight[target++];
        edges.push_back({target, i});
        ++weight[target];
        ++weight[i];  // from 1 to 2: node now holds one link
        total += 2;
      }
      break;
    }
  }
  return edges;
}

}  // namespace

Network gen_topology(const TopologySpec& spec, std::uint64_t seed) {
  if (spec.n < 3) throw InvalidParameters("topology needs at least 3 nodes");
  if (spec.model == TopologyModel::Ring && (spec.k < 1 || 2 * spec.k >= spec.n))
    throw InvalidParameters("ring k out of range");
  if (spec.model == TopologyModel::ErdosRenyi && (spec.p < 0.0 || spec.p > 1.0))
    throw InvalidParameters("edge probability out of range");

  std::vector<std::pair<int, int>> edges;
  bool ok = false;
  for (int attempt = 0; attempt < 100; ++attempt) {
    Rng rng(seed + static_cast<std::uint64_t>(attempt));
    edges = model_edges(spec, rng);
    if (infra_connected(spec.n, edges)) {
      ok = true;
      break;
    }
  }
  if (!ok) throw InvalidParameters("could not generate a connected topology in 100 attempts");

  std::vector<std::pair<std::string, NodeRole>> nodes;
  std::vector<std::pair<std::string, std::string>> cables;
  for (int i = 0; i < spec.n; ++i) {
    nodes.push_back({padded('s', i, spec.n), NodeRole::Infrastructure});
    nodes.push_back({padded('h', i, spec.n), NodeRole::Host});
    cables.push_back({padded('h', i, spec.n), padded('s', i, spec.n)});
  }
  for (auto [a, b] : edges) cables.push_back({padded('s', a, spec.n), padded('s', b, spec.n)});
  return Network(std::move(nodes), cables, spec.t_proc, spec.t_prop, spec.t_src, spec.t_dst);
}

namespace {

std::int64_t draw_count(Rng& rng, const CountSpec& spec) {
  if (spec.kind == CountSpec::Kind::Fixed) return spec.value;
  return poisson_sample(rng, spec.mean);
}

// Number of multisets from palette[i..] summing to n. Palette ascending,
// parts non-decreasing along a decomposition so each multiset counts once.
std::uint64_t decomposition_count(const std::vector<std::int64_t>& palette, std::size_t i,
                                  std::int64_t n,
                                  std::map<std::pair<std::size_t, std::int64_t>, std::uint64_t>& memo) {
  if (n == 0) return 1;
  if (i == palette.size()) return 0;
  auto key = std::make_pair(i, n);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  std::uint64_t ways = decomposition_count(palette, i + 1, n, memo);
  if (palette[i] <= n) ways += decomposition_count(palette, i, n - palette[i], memo);
  memo[key] = ways;
  return ways;
}

// Uniform decomposition of n into palette parts; infeasible n is decremented
// until a decomposition exists (n = 0 always works: no clusters).
std::vector<std::int64_t> sample_decomposition(Rng& rng, std::vector<std::int64_t> palette,
                                               std::int64_t n) {
  std::sort(palette.begin(), palette.end());
  palette.erase(std::unique(palette.begin(), palette.end()), palette.end());
  std::map<std::pair<std::size_t, std::int64_t>, std::uint64_t> memo;
  while (n > 0 && decomposition_count(palette, 0, n, memo) == 0) --n;
  std::vector<std::int64_t> parts;
  std::uint64_t rank = rng_below(rng, decomposition_count(palette, 0, n, memo));
  std::size_t i = 0;
  while (n > 0) {
    std::uint64_t take =
        palette[i] <= n ? decomposition_count(palette, i, n - palette[i], memo) : 0;
    if (rank < take) {
      parts.push_back(palette[i]);
      n -= palette[i];
    } else {
      rank -= take;
      ++i;
    }
  }
  return parts;
}

}  // namespace

Scenario gen_scenario(const ScenarioSpec& spec) {
  if (spec.steps < 0 || spec.cluster_palette.empty() || spec.t_cycle_palette.empty() ||
      spec.t_trans_palette.empty() || spec.pin_fraction < 0.0 || spec.pin_fraction > 1.0 ||
      spec.deadline_factor < 1.0)
    throw InvalidParameters("bad scenario spec");

  Scenario sc{gen_topology(spec.topology, spec.seed), spec.n_path, spec.n_ub, {}};
  std::vector<std::int32_t> hosts;
  for (std::int32_t i = 0; i < sc.net.node_count(); ++i)
    if (sc.net.role(i) == NodeRole::Host) hosts.push_back(i);
  if (hosts.size() < 2) throw InvalidParameters("topology has fewer than 2 hosts");

  Rng rng(spec.seed + 1);
  FlowId next_id = 1;
  std::vector<FlowId> assumed_active;
  for (int step = 0; step < spec.steps; ++step) {
    ScenarioStep out;

    std::int64_t n_add = draw_count(rng, spec.add);
    for (std::int64_t size : sample_decomposition(rng, spec.cluster_palette, n_add)) {
      std::int32_t common = hosts[rng_below(rng, hosts.size())];
      bool common_is_src = rng_below(rng, 2) == 0;
      for (std::int64_t i = 0; i < size; ++i) {
        std::int32_t other = common;
        while (other == common) other = hosts[rng_below(rng, hosts.size())];
        FlowParams p;
        p.id = next_id++;
        p.src = sc.net.node_id(common_is_src ? common : other);
        p.dst = sc.net.node_id(common_is_src ? other : common);
        p.t_cycle = rng_pick(rng, spec.t_cycle_palette);
        do {
          p.t_trans = rng_pick(rng, spec.t_trans_palette);
        } while (p.t_trans > p.t_cycle);
        auto shortest = k_candidate_paths(sc.net, sc.net.node_index(p.src),
                                          sc.net.node_index(p.dst), 1,
                                          std::numeric_limits<Duration>::max() / 4, p.t_trans);
        Duration min_e2e = sc.net.path_e2e_delay(shortest.front(), p.t_trans);
        p.deadline = static_cast<Duration>(
            std::ceil(spec.deadline_factor * static_cast<double>(min_e2e)));
        if (spec.dt_limit_policy == DtLimitPolicy::Unbounded)
          p.dt_limit = std::numeric_limits<Duration>::max() / 4;
        out.add.push_back(std::move(p));
      }
    }
    std::size_t n_pin = static_cast<std::size_t>(
        std::llround(spec.pin_fraction * static_cast<double>(out.add.size())));
    for (std::size_t idx : rng_index_subset(rng, out.add.size(), n_pin))
      out.add[idx].pin_on_admit = true;

    std::int64_t n_remove = draw_count(rng, spec.remove);
    std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(std::max<std::int64_t>(0, n_remove)),
                                             assumed_active.size());
    std::sort(assumed_active.begin(), assumed_active.end());
    std::vector<std::size_t> picks = rng_index_subset(rng, assumed_active.size(), take);
    for (auto it = picks.rbegin(); it != picks.rend(); ++it) {
      out.remove.push_back(assumed_active[*it]);
      assumed_active.erase(assumed_active.begin() + static_cast<std::ptrdiff_t>(*it));
    }
    std::sort(out.remove.begin(), out.remove.end());
    for (const FlowParams& p : out.add) assumed_active.push_back(p.id);

    sc.steps.push_back(std::move(out));
  }
  return sc;
}

namespace {

nlohmann::json count_spec_json(const CountSpec& c) {
  if (c.kind == CountSpec::Kind::Fixed) return {{"type", "fixed"}, {"value", c.value}};
  return {{"type", "poisson"}, {"mean", c.mean}};
}

CountSpec count_spec_from_json(const nlohmann::json& j) {
  CountSpec c;
  std::string type = j.at("type").get<std::string>();
  if (type == "fixed") {
    c.kind = CountSpec::Kind::Fixed;
    c.value = j.at("value").get<std::int64_t>();
  } else if (type == "poisson") {
    c.kind = CountSpec::Kind::Poisson;
    c.mean = j.at("mean").get<double>();
    if (c.mean < 0.0) throw MalformedInput("negative poisson mean");
  } else {
    throw MalformedInput("unknown count type: " + type);
  }
  return c;
}

}  // namespace

std::string scenario_spec_to_json(const ScenarioSpec& spec, int indent) {
  nlohmann::json j;
  j["topology"] = {{"model", topology_model_name(spec.topology.model)},
                   {"n", spec.topology.n},
                   {"k", spec.topology.k},
                   {"p", spec.topology.p},
                   {"alpha", spec.topology.alpha},
                   {"beta", spec.topology.beta},
                   {"t_proc", spec.topology.t_proc},
                   {"t_prop", spec.topology.t_prop},
                   {"t_src", spec.topology.t_src},
                   {"t_dst", spec.topology.t_dst}};
  j["steps"] = spec.steps;
  j["seed"] = spec.seed;
  j["add"] = count_spec_json(spec.add);
  j["remove"] = count_spec_json(spec.remove);
  j["cluster_palette"] = spec.cluster_palette;
  j["t_cycle_palette"] = spec.t_cycle_palette;
  j["t_trans_palette"] = spec.t_trans_palette;
  j["pin_fraction"] = spec.pin_fraction;
  j["deadline_factor"] = spec.deadline_factor;
  j["dt_limit_policy"] =
      spec.dt_limit_policy == DtLimitPolicy::InOrder ? "in_order" : "unbounded";
  j["n_path"] = spec.n_path;
  j["n_ub"] = spec.n_ub;
  return j.dump(indent);
}

ScenarioSpec scenario_spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("scenario spec JSON: ") + e.what());
  }
  ScenarioSpec spec;
  try {
    const auto& jt = j.at("topology");
    spec.topology.model = topology_model_from_name(jt.at("model").get<std::string>());
    spec.topology.n = jt.at("n").get<int>();
    spec.topology.k = jt.value("k", spec.topology.k);
    spec.topology.p = jt.value("p", spec.topology.p);
    spec.topology.alpha = jt.value("alpha", spec.topology.alpha);
    spec.topology.beta = jt.value("beta", spec.topology.beta);
    spec.topology.t_proc = jt.value("t_proc", spec.topology.t_proc);
    spec.topology.t_prop = jt.value("t_prop", spec.topology.t_prop);
    spec.topology.t_src = jt.value("t_src", spec.topology.t_src);
    spec.topology.t_dst = jt.value("t_dst", spec.topology.t_dst);
    spec.steps = j.at("steps").get<int>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.add = count_spec_from_json(j.at("add"));
    spec.remove = count_spec_from_json(j.at("remove"));
    spec.cluster_palette = j.value("cluster_palette", spec.cluster_palette);
    spec.t_cycle_palette = j.value("t_cycle_palette", spec.t_cycle_palette);
    spec.t_trans_palette = j.value("t_trans_palette", spec.t_trans_palette);
    spec.pin_fraction = j.value("pin_fraction", spec.pin_fraction);
    spec.deadline_factor = j.value("deadline_factor", spec.deadline_factor);
    std::string policy = j.value("dt_limit_policy", std::string("in_order"));
    if (policy == "in_order")
      spec.dt_limit_policy = DtLimitPolicy::InOrder;
    else if (policy == "unbounded")
      spec.dt_limit_policy = DtLimitPolicy::Unbounded;
    else
      throw MalformedInput("unknown dt_limit_policy: " + policy);
    spec.n_path = j.value("n_path", spec.n_path);
    spec.n_ub = j.value("n_ub", spec.n_ub);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("scenario spec JSON: ") + e.what());
  }
  return spec;
}

std::string scenario_to_json(const Scenario& sc, int indent) {
  nlohmann::json j;
  j["network"] = nlohmann::json::parse(sc.net.to_json_string(0));
  j["n_path"] = sc.n_path;
  j["n_ub"] = sc.n_ub;
  j["steps"] = nlohmann::json::array();
  for (const ScenarioStep& step : sc.steps) {
    nlohmann::json js;
    js["add"] = nlohmann::json::array();
    for (const FlowParams& p : step.add) {
      nlohmann::json jf = {{"id", p.id},           {"src", p.src},
                           {"dst", p.dst},         {"t_trans", p.t_trans},
                           {"t_cycle", p.t_cycle}, {"deadline", p.deadline},
                           {"pin", p.pin_on_admit}};
      if (p.dt_limit) jf["dt_limit"] = *p.dt_limit;
      js["add"].push_back(jf);
    }
    js["remove"] = step.remove;
    j["steps"].push_back(js);
  }
  return j.dump(indent);
}

Scenario scenario_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("scenario JSON: ") + e.what());
  }
  try {
    Scenario sc{Network::from_json_string(j.at("network").dump()), j.value("n_path", 3),
                j.value("n_ub", 50), {}};
    for (const auto& js : j.at("steps")) {
      ScenarioStep step;
      for (const auto& jf : js.at("add")) {
        FlowParams p;
        p.id = jf.at("id").get<FlowId>();
        p.src = jf.at("src").get<std::string>();
        p.dst = jf.at("dst").get<std::string>();
        p.t_trans = jf.at("t_trans").get<Duration>();
        p.t_cycle = jf.at("t_cycle").get<Duration>();
        p.deadline = jf.at("deadline").get<Duration>();
        p.pin_on_admit = jf.value("pin", false);
        if (jf.contains("dt_limit")) p.dt_limit = jf.at("dt_limit").get<Duration>();
        step.add.push_back(std::move(p));
      }
      step.remove = js.at("remove").get<std::vector<FlowId>>();
      sc.steps.push_back(std::move(step));
    }
    return sc;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("scenario JSON: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MalformedInput("cannot open " + path + " for writing");
  out << scenario_to_json(sc) << "\n";
}

const char* const kSequenceCsvHeader =
    "step,n_active,n_requested,n_rejected,n_reconfigured,phase,graph_vertices,graph_edges,"
    "runtime_ms";

SequenceResult run_sequence(const Scenario& sc, const SequenceOptions& opt) {
  PlannerConfig cfg;
  cfg.n_path = opt.n_path.value_or(sc.n_path);
  cfg.n_ub = opt.n_ub.value_or(sc.n_ub);
  if (opt.n_reruns) cfg.gfh.n_reruns = *opt.n_reruns;
  if (opt.alpha) cfg.gfh.alpha = *opt.alpha;
  cfg.offensive = opt.offensive;
  Planner planner(sc.net, cfg);

  SequenceResult result;
  std::ostringstream csv;
  csv << kSequenceCsvHeader << "\n";
  TrafficPlan prev_plan = planner.plan();
  std::map<FlowId, Flow> prev_flows;
  for (std::size_t i = 0; i < sc.steps.size(); ++i) {
    const ScenarioStep& step = sc.steps[i];
    std::vector<FlowId> removals;
    for (FlowId id : step.remove)
      if (planner.plan().configs.count(id)) removals.push_back(id);

    auto started = std::chrono::steady_clock::now();
    StepOutcome outcome;
    outcome.update = planner.process_request(step.add, removals);
    outcome.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
    const PlanUpdate& u = outcome.update;

    if (opt.validate) {
      outcome.plan_violations =
          simulate_plan(sc.net, u.flows, u.plan,
                        default_sim_horizon(sc.net, u.flows, u.plan))
              .size();
      std::map<FlowId, Flow> all_flows = u.flows;
      for (const auto& [id, f] : prev_flows) all_flows.emplace(id, f);
      for (const auto& [f, c] : u.removed) all_flows.emplace(f.id, f);
      outcome.transition_violations =
          simulate_transition(sc.net, all_flows, prev_plan, u.plan).violations.size();
      result.oracle_violations += outcome.plan_violations + outcome.transition_violations;
    }
    if (opt.write_plans && !opt.out_dir.empty()) {
      std::filesystem::create_directories(opt.out_dir);
      std::ofstream out(std::filesystem::path(opt.out_dir) /
                        ("plan_step_" + std::to_string(i + 1) + ".json"));
      out << plan_json(sc.net, u.flows, u.plan, &prev_plan, &prev_flows) << "\n";
    }

    csv << (i + 1) << "," << u.plan.configs.size() << "," << step.add.size() << ","
        << u.rejected.size() << "," << u.reconfigured.size() << ","
        << plan_phase_name(u.phase) << "," << u.graph_vertices << "," << u.graph_edges
        << "," << outcome.runtime_ms << "\n";
    result.total_rejected += static_cast<std::int64_t>(u.rejected.size());
    result.total_reconfigured += static_cast<std::int64_t>(u.reconfigured.size());
    prev_plan = u.plan;
    prev_flows = u.flows;
    result.steps.push_back(std::move(outcome));
  }
  result.csv = csv.str();
  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    std::ofstream out(std::filesystem::path(opt.out_dir) / "stats.csv");
    out << result.csv;
  }
  return result;
}

}  // namespace ttplan
