#include "dsim/experiments/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "dsim/core/error.hpp"
#include "dsim/core/simulator.hpp"
#include "dsim/net/rng.hpp"
#include "dsim/sched/latency_bound.hpp"

namespace dsim {

const MetricResult& RunResult::metric(const std::string& name) const {
  for (const auto& m : metrics) {
    if (m.spec.name == name) return m;
  }
  throw BadParam("no metric named '" + name + "'");
}

std::uint64_t group_seed(std::uint64_t run_seed, std::size_t g) {
  if (g == 0) return run_seed;
  // splitmix64 step so groups do not share a stream
  std::uint64_t z = run_seed + 0x9E3779B97F4A7C15ULL * g;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

std::set<FlowId> resolve(const std::vector<std::string>& names,
                         const std::map<std::string, std::vector<FlowId>>& ids) {
  std::set<FlowId> out;
  for (const auto& n : names) {
    const auto& v = ids.at(n);
    out.insert(v.begin(), v.end());
  }
  return out;
}

PolicyEntry to_entry(const PolicySpec& p, const std::map<std::string, std::vector<FlowId>>& ids) {
  PolicyEntry e;
  e.match = resolve(p.flows, ids);
  e.aggregate_id = p.aggregate;
  e.meter = p.meter;
  e.in_dscp = p.in_dscp;
  e.out_dscp = p.out_dscp;
  e.out_action = p.out_action;
  return e;
}

}  // namespace

RunResult run_scenario(const Scenario& sc, std::optional<std::uint64_t> seed_override, DeliveryLog* log) {
  validate(sc);
  RunResult res;
  res.seed = seed_override.value_or(sc.run.seed);

  Topology topo = build_testbed_topology(sc.topology);
  const SimTime stop = sc.run.duration;

  std::vector<CbrSource> sources;
  FlowId next_id = 0;
  for (const auto& f : sc.flows) {
    CbrSource s;
    s.flow_id = next_id++;
    s.src = topo.id_of(f.src);
    s.dst = topo.id_of(f.dst);
    s.rate_bps = f.rate_bps;
    s.packet_size_bytes = f.size_bytes;
    s.start_time = f.start;
    s.stop_time = std::min(f.stop.value_or(stop), stop);
    res.flow_ids[f.name] = {s.flow_id};
    sources.push_back(s);
  }
  for (std::size_t g = 0; g < sc.backgrounds.size(); ++g) {
    const auto& b = sc.backgrounds[g];
    BackgroundSpec spec;
    spec.count = b.count;
    spec.rate_lo_bps = b.rate_lo_bps;
    spec.rate_hi_bps = b.rate_hi_bps;
    spec.start_lo = b.start_lo;
    spec.start_hi = b.start_hi;
    spec.sizes = b.sizes;
    spec.target_load_bps = b.target_load_bps;
    spec.first_flow_id = next_id;
    for (const auto& n : b.src_nodes) spec.src_nodes.push_back(topo.id_of(n));
    for (const auto& n : b.dst_nodes) spec.dst_nodes.push_back(topo.id_of(n));
    spec.stop_time = stop;
    auto drawn = spawn_background(spec, group_seed(res.seed, g));
    auto& ids = res.flow_ids[b.name];
    for (const auto& s : drawn) {
      ids.push_back(s.flow_id);
      sources.push_back(s);
    }
    next_id += static_cast<FlowId>(drawn.size());
    res.background[b.name] = std::move(drawn);
  }

  std::vector<PolicyEntry> entries;
  for (const auto& p : sc.policies) entries.push_back(to_entry(p, res.flow_ids));
  std::optional<PolicyEntry> def;
  if (sc.default_policy) def = to_entry(*sc.default_policy, res.flow_ids);

  Simulator sim;
  Network net(sim, std::move(topo), sc.queues, EdgeConditioner(std::move(entries), std::move(def)), sc.fifo_capacity);
  for (const auto& s : sources) net.add_source(s);

  // Metric attachments.
  struct Live {
    std::set<FlowId> filter;
    DelayStats owd;
    IpdvState ipdv;
  };
  std::vector<Live> live;
  live.reserve(sc.outputs.size());
  for (const auto& o : sc.outputs) {
    auto f = resolve(o.flows, res.flow_ids);
    live.push_back(Live{f, DelayStats(f), IpdvState(f)});
  }
  const SimTime warmup = sc.run.warmup;
  net.add_observer([&](const DeliveryRecord& rec) {
    if (log) log->push_back(rec);
    if (rec.created_at < warmup) return;
    for (std::size_t i = 0; i < live.size(); ++i) {
      if (sc.outputs[i].kind == MetricKind::owd) {
        record_owd(live[i].owd, rec);
      } else {
        record_ipdv(live[i].ipdv, rec);
      }
    }
  });

  std::optional<CheckResult> check;
  if (sc.checks) {
    const CheckSpec& cs = *sc.checks;
    check.emplace();
    EgressPort& port = net.bottleneck();
    const std::uint64_t rate = port.link().rate_bps;
    if (cs.scfq_bound) {
      check->bound = scfq_latency_bound_share(cs.session_max_bytes, cs.global_max_bytes, cs.share_num, cs.share_den,
                                              rate, port.queues().num_queues());
    }
    // Per-packet ceiling uses V = most sessions active during the measured interval.
    std::vector<SimTime> bound_by_v(port.queues().num_queues() + 1);
    if (cs.scfq_bound) {
      for (std::uint64_t v = 1; v < bound_by_v.size(); ++v) {
        bound_by_v[v] =
            scfq_latency_bound_share(cs.session_max_bytes, cs.global_max_bytes, cs.share_num, cs.share_den, rate, v);
      }
    }
    port.set_probe(cs.probe_queue, [&check, &cs, bound_by_v](const ProbeRecord& r) {
      CheckResult& c = *check;
      ++c.probed;
      c.max_active_sessions = std::max(c.max_active_sessions, r.max_active_sessions);
      const SimTime arrival = r.latency();
      const SimTime hol = r.tx_end - r.prev_same_queue_tx_end;
      c.max_latency_arrival = std::max(c.max_latency_arrival, arrival);
      c.max_latency_hol = std::max(c.max_latency_hol, hol);
      if (cs.scfq_bound) {
        if (arrival > bound_by_v[std::max<std::uint32_t>(1, r.max_active_sessions)]) ++c.violations_arrival;
        if (hol > bound_by_v[std::max<std::uint32_t>(1, r.max_active_from_head)]) ++c.violations_hol;
      }
      if (cs.pq_bound && r.wait() > r.residual_at_enqueue + r.ahead_at_enqueue) ++c.pq_violations;
    });
  }

  sim.run_until(stop);

  res.events = sim.total_dispatched();
  res.counters = net.counters();
  res.conserved = net.conserved();
  for (const auto& p : net.conditioner().policies()) res.aggregates[p.aggregate_id] = net.conditioner().counters(p.aggregate_id);
  res.checks = check;
  for (std::size_t i = 0; i < live.size(); ++i) {
    MetricResult m;
    m.spec = sc.outputs[i];
    if (m.spec.kind == MetricKind::owd) {
      m.stats = live[i].owd;
      m.signed_stats = live[i].owd;
    } else {
      m.stats = live[i].ipdv.stats_abs;
      m.signed_stats = live[i].ipdv.stats_signed;
      m.first_owd_ns = live[i].ipdv.first_owd;
      m.last_owd_ns = live[i].ipdv.last_owd;
    }
    res.metrics.push_back(std::move(m));
  }
  return res;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void run_metadata(std::ostream& os, const Scenario& sc, const RunResult& r) {
  os << "# dsim run\n";
  os << "# seed: " << r.seed << '\n';
  os << "# prng: " << Rng::kAlgorithm << '\n';
  os << "# duration_s: " << format_seconds(static_cast<std::int64_t>(sc.run.duration.ticks())) << '\n';
  os << "# warmup_s: " << format_seconds(static_cast<std::int64_t>(sc.run.warmup.ticks())) << '\n';
  os << "# scheduler: " << to_string(sc.queues.scheduler) << '\n';
  os << "# bottleneck_queue_capacity_packets:";
  for (const auto& q : sc.queues.queues) os << " q" << q.id << '=' << q.capacity_packets;
  os << '\n';
  os << "# other_interface_fifo_capacity_packets: " << sc.fifo_capacity << '\n';
  os << "# ipdv_convention: mean of |owd[k] - owd[k-1]| over consecutive received packets of the filter\n";
  os << "# calibration: lan_rate_bps=" << sc.topology.lan_rate_bps
     << " lan_delay_s=" << format_seconds(static_cast<std::int64_t>(sc.topology.lan_delay.ticks()))
     << " man_rate_bps=" << sc.topology.man_rate_bps
     << " man_delay_s=" << format_seconds(static_cast<std::int64_t>(sc.topology.man_delay.ticks())) << '\n';
  os << "# packets: created=" << r.counters.created << " delivered=" << r.counters.delivered
     << " dropped=" << r.counters.dropped() << " conserved=" << (r.conserved ? "yes" : "no") << '\n';
}

}  // namespace

std::vector<std::filesystem::path> write_run_csv(const Scenario& sc, const RunResult& r,
                                                 const std::filesystem::path& out_dir) {
  // Export everything first so an empty output leaves no partial files behind.
  std::vector<StatsReport> reports;
  for (const auto& m : r.metrics) {
    try {
      reports.push_back(export_stats(m.stats, m.spec.bin.unit_ns()));
    } catch (const EmptyStats&) {
      throw EmptyStats("output '" + m.spec.name + "' recorded no samples");
    }
  }
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  auto open = [&](const std::string& name, std::ofstream& os) {
    written.push_back(out_dir / name);
    os.open(written.back(), std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + written.back().string());
    run_metadata(os, sc, r);
  };
  std::ofstream sum;
  open("summary.csv", sum);
  sum << "output,kind,count,mean_s,min_s,max_s,bin_unit_s\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& rep = reports[i];
    sum << r.metrics[i].spec.name << ',' << (r.metrics[i].spec.kind == MetricKind::owd ? "owd" : "ipdv") << ','
        << rep.count << ',' << fixed(rep.mean_ns * 1e-9, 12) << ',' << format_seconds(rep.min_ns) << ','
        << format_seconds(rep.max_ns) << ',' << format_seconds(rep.bin_unit_ns) << '\n';
  }
  for (std::size_t i = 0; i < reports.size(); ++i) {
    std::ofstream h;
    open(r.metrics[i].spec.name + "_hist.csv", h);
    h << "bin_lower_edge_units,bin_lower_edge_s,frequency\n";
    for (const auto& b : reports[i].histogram) {
      h << b.index << ',' << format_seconds(b.lower_edge_ns) << ',' << fixed(b.frequency, 12) << '\n';
    }
  }
  return written;
}

}  // namespace dsim
