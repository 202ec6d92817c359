#include "dsim/experiments/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dsim/core/error.hpp"

namespace dsim {

std::int64_t BinRule::unit_ns() const {
  switch (kind) {
    case Kind::min_value: return 0;
    case Kind::fixed: return static_cast<std::int64_t>(fixed.ticks());
    case Kind::tx_time: return static_cast<std::int64_t>(transmission_time(tx_size_bytes, tx_rate_bps).ticks());
  }
  return 0;
}

namespace {

/// Names of every flow and background group, each expanded to its members.
std::set<std::string> defined_flow_names(const Scenario& sc) {
  std::set<std::string> names;
  for (const auto& f : sc.flows) names.insert(f.name);
  for (const auto& b : sc.backgrounds) names.insert(b.name);
  return names;
}

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& path, const std::string& msg) const {
    std::ostringstream os;
    os << origin_;
    if (at.IsDefined() && at.Mark().line >= 0) os << ':' << at.Mark().line + 1 << ':' << at.Mark().column + 1;
    os << ": " << path << ": " << msg;
    throw ConfigError(os.str());
  }

  void only_keys(const YAML::Node& map, const std::string& path, std::initializer_list<const char*> allowed) const {
    if (!map.IsMap()) fail(map, path, "expected a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) fail(kv.first, path + "." + key, "unknown field");
    }
  }

  YAML::Node need(const YAML::Node& map, const char* key, const std::string& path) const {
    YAML::Node n = map[key];
    if (!n.IsDefined() || n.IsNull()) fail(map, path + "." + key, "missing required field");
    return n;
  }

  std::string str(const YAML::Node& n, const std::string& path) const {
    if (!n.IsScalar()) fail(n, path, "expected a scalar");
    return n.Scalar();
  }

  std::uint64_t u64(const YAML::Node& n, const std::string& path) const {
    const std::string s = str(n, path);
    try {
      std::size_t used = 0;
      if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
      const auto v = std::stoull(s, &used, 10);
      if (used != s.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      fail(n, path, "expected a non-negative integer, got '" + s + "'");
    }
  }

  std::uint64_t positive(const YAML::Node& n, const std::string& path) const {
    const auto v = u64(n, path);
    if (v == 0) fail(n, path, "must be positive");
    return v;
  }

  SimTime duration(const YAML::Node& n, const std::string& path) const {
    const std::string s = str(n, path);
    try {
      return parse_duration(s);
    } catch (const std::exception& e) {
      fail(n, path, e.what());
    }
  }

  std::vector<std::string> names(const YAML::Node& n, const std::string& path) const {
    if (!n.IsSequence()) fail(n, path, "expected a list");
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n.size(); ++i) v.push_back(str(n[i], path + "[" + std::to_string(i) + "]"));
    return v;
  }

  Dscp dscp(const YAML::Node& n, const std::string& path) const {
    const auto s = str(n, path);
    if (auto d = parse_dscp(s)) return *d;
    fail(n, path, "unknown codepoint '" + s + "' (EF, BE-in, BE-out, unmarked)");
  }

  std::uint32_t frame(const YAML::Node& n, const std::string& path) const {
    const auto v = u64(n, path);
    if (v < kMinFrameBytes || v > kMaxFrameBytes) fail(n, path, "frame size outside [28, 65535]");
    return static_cast<std::uint32_t>(v);
  }

 private:
  std::string origin_;
};

void check_node(const Reader& rd, const Topology& topo, const YAML::Node& n, const std::string& path) {
  const auto name = rd.str(n, path);
  if (!topo.find(name)) rd.fail(n, path, "undefined node '" + name + "'");
}

PolicySpec read_policy(const Reader& rd, const YAML::Node& n, const std::string& path,
                       const std::set<std::string>& flow_names) {
  rd.only_keys(n, path, {"match", "aggregate_id", "meter", "in_dscp", "out_dscp", "out_action"});
  PolicySpec p;
  const auto match = rd.need(n, "match", path);
  p.flows = rd.names(match, path + ".match");
  for (std::size_t i = 0; i < p.flows.size(); ++i) {
    if (!flow_names.count(p.flows[i])) {
      rd.fail(match[i], path + ".match[" + std::to_string(i) + "]", "undefined flow '" + p.flows[i] + "'");
    }
  }
  p.aggregate = rd.str(rd.need(n, "aggregate_id", path), path + ".aggregate_id");
  if (n["meter"]) {
    const auto m = n["meter"];
    rd.only_keys(m, path + ".meter", {"cir_bps", "cbs_bytes"});
    p.meter = MeterSpec{rd.positive(rd.need(m, "cir_bps", path + ".meter"), path + ".meter.cir_bps"),
                        rd.positive(rd.need(m, "cbs_bytes", path + ".meter"), path + ".meter.cbs_bytes")};
  }
  if (n["in_dscp"]) p.in_dscp = rd.dscp(n["in_dscp"], path + ".in_dscp");
  if (n["out_dscp"]) p.out_dscp = rd.dscp(n["out_dscp"], path + ".out_dscp");
  if (n["out_action"]) {
    const auto a = rd.str(n["out_action"], path + ".out_action");
    if (a == "drop") {
      p.out_action = OutAction::drop;
    } else if (a == "mark") {
      p.out_action = OutAction::mark;
    } else {
      rd.fail(n["out_action"], path + ".out_action", "expected drop or mark");
    }
  }
  return p;
}

}  // namespace

Scenario parse_scenario(const std::string& yaml_text, const std::string& origin) {
  Reader rd(origin);
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    std::ostringstream os;
    os << origin << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
    throw ConfigError(os.str());
  }
  rd.only_keys(root, "scenario",
               {"schema_version", "topology", "flows", "background", "policies", "default_policy", "queues",
                "fifo_capacity", "run", "outputs", "checks"});
  Scenario sc;
  const auto ver = rd.need(root, "schema_version", "scenario");
  sc.schema_version = static_cast<int>(rd.u64(ver, "schema_version"));
  if (sc.schema_version != kScenarioSchemaVersion) {
    rd.fail(ver, "schema_version", "unsupported version (expected " + std::to_string(kScenarioSchemaVersion) + ")");
  }

  if (const auto t = root["topology"]) {
    rd.only_keys(t, "topology", {"lan_rate_bps", "lan_delay", "man_rate_bps", "man_delay"});
    if (t["lan_rate_bps"]) sc.topology.lan_rate_bps = rd.positive(t["lan_rate_bps"], "topology.lan_rate_bps");
    if (t["lan_delay"]) sc.topology.lan_delay = rd.duration(t["lan_delay"], "topology.lan_delay");
    if (t["man_rate_bps"]) sc.topology.man_rate_bps = rd.positive(t["man_rate_bps"], "topology.man_rate_bps");
    if (t["man_delay"]) sc.topology.man_delay = rd.duration(t["man_delay"], "topology.man_delay");
  }
  const Topology topo = build_testbed_topology(sc.topology);

  std::set<std::string> flow_names;
  auto claim_name = [&](const YAML::Node& n, const std::string& path) {
    const auto name = rd.str(n, path);
    if (!flow_names.insert(name).second) rd.fail(n, path, "duplicate flow name '" + name + "'");
    return name;
  };

  if (const auto flows = root["flows"]) {
    if (!flows.IsSequence()) rd.fail(flows, "flows", "expected a list");
    for (std::size_t i = 0; i < flows.size(); ++i) {
      const auto n = flows[i];
      const std::string path = "flows[" + std::to_string(i) + "]";
      rd.only_keys(n, path, {"name", "src", "dst", "rate_bps", "size_bytes", "start", "stop"});
      FlowSpec f;
      f.name = claim_name(rd.need(n, "name", path), path + ".name");
      check_node(rd, topo, rd.need(n, "src", path), path + ".src");
      check_node(rd, topo, rd.need(n, "dst", path), path + ".dst");
      f.src = n["src"].Scalar();
      f.dst = n["dst"].Scalar();
      f.rate_bps = rd.positive(rd.need(n, "rate_bps", path), path + ".rate_bps");
      f.size_bytes = rd.frame(rd.need(n, "size_bytes", path), path + ".size_bytes");
      if (n["start"]) f.start = rd.duration(n["start"], path + ".start");
      if (n["stop"]) f.stop = rd.duration(n["stop"], path + ".stop");
      sc.flows.push_back(std::move(f));
    }
  }

  if (const auto bg = root["background"]) {
    if (!bg.IsSequence()) rd.fail(bg, "background", "expected a list");
    for (std::size_t i = 0; i < bg.size(); ++i) {
      const auto n = bg[i];
      const std::string path = "background[" + std::to_string(i) + "]";
      rd.only_keys(n, path, {"name", "count", "target_load_bps", "rate_range_bps", "start_range", "size_bytes",
                             "size_schedule", "src_nodes", "dst_nodes"});
      BackgroundGroup g;
      g.name = claim_name(rd.need(n, "name", path), path + ".name");
      if (n["count"]) g.count = static_cast<std::uint32_t>(rd.positive(n["count"], path + ".count"));
      if (n["target_load_bps"]) g.target_load_bps = rd.positive(n["target_load_bps"], path + ".target_load_bps");
      if (g.count == 0 && g.target_load_bps == 0) rd.fail(n, path, "needs count or target_load_bps");
      const auto rr = rd.need(n, "rate_range_bps", path);
      if (!rr.IsSequence() || rr.size() != 2) rd.fail(rr, path + ".rate_range_bps", "expected [lo, hi]");
      g.rate_lo_bps = rd.positive(rr[0], path + ".rate_range_bps[0]");
      g.rate_hi_bps = rd.positive(rr[1], path + ".rate_range_bps[1]");
      if (g.rate_lo_bps > g.rate_hi_bps) rd.fail(rr, path + ".rate_range_bps", "lo > hi");
      if (const auto sr = n["start_range"]) {
        if (!sr.IsSequence() || sr.size() != 2) rd.fail(sr, path + ".start_range", "expected [lo, hi]");
        g.start_lo = rd.duration(sr[0], path + ".start_range[0]");
        g.start_hi = rd.duration(sr[1], path + ".start_range[1]");
        if (g.start_lo > g.start_hi) rd.fail(sr, path + ".start_range", "lo > hi");
      }
      if (n["size_bytes"]) {
        g.sizes = {rd.frame(n["size_bytes"], path + ".size_bytes")};
      } else if (const auto ss = n["size_schedule"]) {
        const std::string sp = path + ".size_schedule";
        rd.only_keys(ss, sp, {"first", "last", "step"});
        const auto first = rd.frame(rd.need(ss, "first", sp), sp + ".first");
        const auto last = rd.frame(rd.need(ss, "last", sp), sp + ".last");
        const auto step = rd.positive(rd.need(ss, "step", sp), sp + ".step");
        if (first > last) rd.fail(ss, sp, "first > last");
        for (std::uint64_t s = first; s <= last; s += step) g.sizes.push_back(static_cast<std::uint32_t>(s));
        if (g.count == 0) g.count = static_cast<std::uint32_t>(g.sizes.size());
        if (g.count != g.sizes.size()) rd.fail(ss, sp, "schedule length differs from count");
      } else {
        rd.fail(n, path, "needs size_bytes or size_schedule");
      }
      for (const char* key : {"src_nodes", "dst_nodes"}) {
        const auto list = rd.need(n, key, path);
        const auto v = rd.names(list, path + "." + key);
        if (v.empty()) rd.fail(list, path + "." + key, "must not be empty");
        for (std::size_t k = 0; k < v.size(); ++k) {
          check_node(rd, topo, list[k], path + "." + key + "[" + std::to_string(k) + "]");
        }
        (std::string(key) == "src_nodes" ? g.src_nodes : g.dst_nodes) = v;
      }
      sc.backgrounds.push_back(std::move(g));
    }
  }

  if (const auto pol = root["policies"]) {
    if (!pol.IsSequence()) rd.fail(pol, "policies", "expected a list");
    for (std::size_t i = 0; i < pol.size(); ++i) {
      sc.policies.push_back(read_policy(rd, pol[i], "policies[" + std::to_string(i) + "]", flow_names));
    }
  }
  if (const auto dp = root["default_policy"]) {
    rd.only_keys(dp, "default_policy", {"aggregate_id", "meter", "in_dscp", "out_dscp", "out_action"});
    YAML::Node copy = YAML::Clone(dp);
    copy["match"] = YAML::Node(YAML::NodeType::Sequence);
    sc.default_policy = read_policy(rd, copy, "default_policy", flow_names);
  }

  {
    const auto q = rd.need(root, "queues", "scenario");
    rd.only_keys(q, "queues", {"scheduler_kind", "queues", "llq"});
    const auto kind_node = rd.need(q, "scheduler_kind", "queues");
    const auto kind = parse_scheduler_kind(rd.str(kind_node, "queues.scheduler_kind"));
    if (!kind) rd.fail(kind_node, "queues.scheduler_kind", "unknown scheduler '" + kind_node.Scalar() + "'");
    sc.queues.scheduler = *kind;
    const auto list = rd.need(q, "queues", "queues");
    if (!list.IsSequence() || list.size() == 0) rd.fail(list, "queues.queues", "expected a non-empty list");
    std::set<int> dscps_seen;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto n = list[i];
      const std::string path = "queues.queues[" + std::to_string(i) + "]";
      rd.only_keys(n, path, {"queue_id", "dscp_set", "capacity_packets", "weight", "priority_level"});
      QueueSpec qs;
      const auto id_node = rd.need(n, "queue_id", path);
      qs.id = static_cast<QueueId>(rd.u64(id_node, path + ".queue_id"));
      if (qs.id != i) rd.fail(id_node, path + ".queue_id", "queue ids must be 0..n-1 in order");
      const auto ds = rd.need(n, "dscp_set", path);
      if (!ds.IsSequence()) rd.fail(ds, path + ".dscp_set", "expected a list");
      for (std::size_t k = 0; k < ds.size(); ++k) {
        const Dscp d = rd.dscp(ds[k], path + ".dscp_set[" + std::to_string(k) + "]");
        if (!dscps_seen.insert(static_cast<int>(d)).second) {
          rd.fail(ds[k], path + ".dscp_set[" + std::to_string(k) + "]", "codepoint already mapped to another queue");
        }
        qs.dscps.push_back(d);
      }
      if (n["capacity_packets"]) qs.capacity_packets = rd.positive(n["capacity_packets"], path + ".capacity_packets");
      if (n["weight"]) qs.weight = rd.positive(n["weight"], path + ".weight");
      if (n["priority_level"]) qs.priority = static_cast<int>(rd.u64(n["priority_level"], path + ".priority_level"));
      sc.queues.queues.push_back(std::move(qs));
    }
    if (sc.queues.scheduler == SchedulerKind::pq) {
      std::set<int> levels;
      for (std::size_t i = 0; i < sc.queues.queues.size(); ++i) {
        if (!levels.insert(sc.queues.queues[i].priority).second) {
          rd.fail(list[i], "queues.queues[" + std::to_string(i) + "].priority_level", "priority levels must be unique");
        }
      }
    }
    if (const auto llq = q["llq"]) {
      rd.only_keys(llq, "queues.llq", {"priority_queue", "cir_bps", "cbs_bytes", "exceed"});
      LlqParams p;
      p.priority_queue = static_cast<QueueId>(rd.u64(rd.need(llq, "priority_queue", "queues.llq"), "queues.llq.priority_queue"));
      if (p.priority_queue >= sc.queues.queues.size()) rd.fail(llq, "queues.llq.priority_queue", "no such queue");
      p.cir_bps = rd.positive(rd.need(llq, "cir_bps", "queues.llq"), "queues.llq.cir_bps");
      p.cbs_bytes = static_cast<std::uint32_t>(rd.positive(rd.need(llq, "cbs_bytes", "queues.llq"), "queues.llq.cbs_bytes"));
      if (llq["exceed"]) {
        const auto e = rd.str(llq["exceed"], "queues.llq.exceed");
        if (e == "drop") {
          p.exceed = ExceedAction::drop;
        } else if (e == "defer") {
          p.exceed = ExceedAction::defer;
        } else {
          rd.fail(llq["exceed"], "queues.llq.exceed", "expected drop or defer");
        }
      }
      sc.queues.llq = p;
    } else if (sc.queues.scheduler == SchedulerKind::llq) {
      rd.fail(q, "queues.llq", "scheduler llq requires an llq block");
    }
  }
  if (root["fifo_capacity"]) sc.fifo_capacity = rd.positive(root["fifo_capacity"], "fifo_capacity");

  {
    const auto r = rd.need(root, "run", "scenario");
    rd.only_keys(r, "run", {"duration", "seed", "warmup"});
    sc.run.duration = rd.duration(rd.need(r, "duration", "run"), "run.duration");
    if (r["seed"]) sc.run.seed = rd.u64(r["seed"], "run.seed");
    if (r["warmup"]) sc.run.warmup = rd.duration(r["warmup"], "run.warmup");
    if (sc.run.duration.ticks() > 0 && sc.run.warmup >= sc.run.duration) {
      rd.fail(r, "run.warmup", "warmup must be shorter than duration");
    }
  }

  if (const auto outs = root["outputs"]) {
    if (!outs.IsSequence()) rd.fail(outs, "outputs", "expected a list");
    for (std::size_t i = 0; i < outs.size(); ++i) {
      const auto n = outs[i];
      const std::string path = "outputs[" + std::to_string(i) + "]";
      rd.only_keys(n, path, {"name", "kind", "flow_filter", "bin_unit"});
      OutputSpec o;
      o.name = rd.str(rd.need(n, "name", path), path + ".name");
      const auto k = rd.str(rd.need(n, "kind", path), path + ".kind");
      if (k == "owd") {
        o.kind = MetricKind::owd;
      } else if (k == "ipdv") {
        o.kind = MetricKind::ipdv;
      } else {
        rd.fail(n["kind"], path + ".kind", "expected owd or ipdv");
      }
      const auto ff = rd.need(n, "flow_filter", path);
      o.flows = rd.names(ff, path + ".flow_filter");
      for (std::size_t j = 0; j < o.flows.size(); ++j) {
        if (!flow_names.count(o.flows[j])) {
          rd.fail(ff[j], path + ".flow_filter[" + std::to_string(j) + "]", "undefined flow '" + o.flows[j] + "'");
        }
      }
      if (const auto b = n["bin_unit"]) {
        if (b.IsMap()) {
          rd.only_keys(b, path + ".bin_unit", {"tx_size_bytes", "rate_bps"});
          o.bin.kind = BinRule::Kind::tx_time;
          o.bin.tx_size_bytes = rd.frame(rd.need(b, "tx_size_bytes", path + ".bin_unit"), path + ".bin_unit.tx_size_bytes");
          o.bin.tx_rate_bps = rd.positive(rd.need(b, "rate_bps", path + ".bin_unit"), path + ".bin_unit.rate_bps");
        } else if (rd.str(b, path + ".bin_unit") == "min") {
          o.bin.kind = BinRule::Kind::min_value;
        } else {
          o.bin.kind = BinRule::Kind::fixed;
          o.bin.fixed = rd.duration(b, path + ".bin_unit");
          if (o.bin.fixed.ticks() == 0) rd.fail(b, path + ".bin_unit", "must be positive");
        }
      }
      sc.outputs.push_back(std::move(o));
    }
  }

  if (const auto c = root["checks"]) {
    rd.only_keys(c, "checks", {"probe_queue", "scfq_bound", "pq_bound"});
    CheckSpec cs;
    cs.probe_queue = static_cast<QueueId>(rd.u64(rd.need(c, "probe_queue", "checks"), "checks.probe_queue"));
    if (cs.probe_queue >= sc.queues.queues.size()) rd.fail(c["probe_queue"], "checks.probe_queue", "no such queue");
    if (const auto b = c["scfq_bound"]) {
      rd.only_keys(b, "checks.scfq_bound", {"session_max_bytes", "global_max_bytes", "share"});
      cs.scfq_bound = true;
      cs.session_max_bytes = rd.frame(rd.need(b, "session_max_bytes", "checks.scfq_bound"), "checks.scfq_bound.session_max_bytes");
      cs.global_max_bytes = rd.frame(rd.need(b, "global_max_bytes", "checks.scfq_bound"), "checks.scfq_bound.global_max_bytes");
      const auto sh = rd.need(b, "share", "checks.scfq_bound");
      if (!sh.IsSequence() || sh.size() != 2) rd.fail(sh, "checks.scfq_bound.share", "expected [num, den]");
      cs.share_num = rd.positive(sh[0], "checks.scfq_bound.share[0]");
      cs.share_den = rd.positive(sh[1], "checks.scfq_bound.share[1]");
    }
    if (c["pq_bound"]) cs.pq_bound = c["pq_bound"].as<bool>();
    sc.checks = cs;
  }

  validate(sc);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

void validate(const Scenario& sc) {
  if (sc.schema_version != kScenarioSchemaVersion) throw ConfigError("unsupported schema_version");
  if (sc.run.duration.ticks() > 0 && sc.run.warmup >= sc.run.duration) {
    throw ConfigError("run.warmup: warmup must be shorter than duration");
  }
  const Topology topo = build_testbed_topology(sc.topology);
  for (const auto& f : sc.flows) {
    for (const auto* n : {&f.src, &f.dst}) {
      if (!topo.find(*n)) throw ConfigError("flows." + f.name + ": undefined node '" + *n + "'");
    }
    if (f.rate_bps == 0) throw ConfigError("flows." + f.name + ".rate_bps: must be positive");
  }
  for (const auto& b : sc.backgrounds) {
    for (const auto& n : b.src_nodes) {
      if (!topo.find(n)) throw ConfigError("background." + b.name + ": undefined node '" + n + "'");
    }
    for (const auto& n : b.dst_nodes) {
      if (!topo.find(n)) throw ConfigError("background." + b.name + ": undefined node '" + n + "'");
    }
  }
  const auto names = defined_flow_names(sc);
  auto check_refs = [&](const std::vector<std::string>& refs, const std::string& where) {
    for (const auto& r : refs) {
      if (!names.count(r)) throw ConfigError(where + ": undefined flow '" + r + "'");
    }
  };
  std::set<std::string> matched;
  for (const auto& p : sc.policies) {
    check_refs(p.flows, "policies." + p.aggregate);
    for (const auto& f : p.flows) {
      if (!matched.insert(f).second) throw ConfigError("policies." + p.aggregate + ": flow '" + f + "' matched twice");
    }
  }
  for (const auto& o : sc.outputs) check_refs(o.flows, "outputs." + o.name);
  if (sc.queues.queues.empty()) throw ConfigError("queues: at least one queue required");

  // Every codepoint a packet can carry into the bottleneck must have a queue.
  std::set<Dscp> mapped;
  for (const auto& q : sc.queues.queues) mapped.insert(q.dscps.begin(), q.dscps.end());
  std::set<Dscp> reachable;
  std::set<std::string> unmatched = names;
  for (const auto& p : sc.policies) {
    reachable.insert(p.in_dscp);
    if (p.meter && p.out_action == OutAction::mark) reachable.insert(p.out_dscp);
    for (const auto& f : p.flows) unmatched.erase(f);
  }
  if (!unmatched.empty()) {
    if (sc.default_policy) {
      reachable.insert(sc.default_policy->in_dscp);
      if (sc.default_policy->meter && sc.default_policy->out_action == OutAction::mark) {
        reachable.insert(sc.default_policy->out_dscp);
      }
    } else {
      reachable.insert(Dscp::unmarked);
    }
  }
  for (Dscp d : reachable) {
    if (!mapped.count(d)) throw ConfigError("queues: codepoint " + std::string(to_string(d)) + " has no queue");
  }
}

}  // namespace dsim
