#include "dsim/experiments/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "dsim/core/error.hpp"
#include "dsim/net/rng.hpp"

namespace dsim {

Share star_to_weight(std::uint64_t arrival_bps, std::uint64_t line_bps, std::uint64_t star) {
  if (arrival_bps == 0 || line_bps == 0 || star == 0) throw BadParam("star_to_weight: inputs must be positive");
  const unsigned __int128 need = static_cast<unsigned __int128>(arrival_bps) * star;
  if (need > line_bps) throw Infeasible("EF service rate A_r*STAR exceeds the line rate");
  const auto num = static_cast<std::uint64_t>(need);
  const std::uint64_t g = std::gcd(num, line_bps);
  return Share{num / g, line_bps / g};
}

std::vector<std::uint32_t> default_ef_sizes(TestId t) {
  switch (t) {
    case TestId::a: return {128, 256, 512, 1024, 1280, 1518};
    case TestId::b: return {128, 1024};
    case TestId::c: return {64, 128, 256, 384, 512, 640, 768, 896, 1024, 1152, 1280, 1408, 1472, 1518};
  }
  return {};
}

std::vector<std::uint32_t> default_be_sizes() { return stepped_sizes(100, 1450, 50); }
std::vector<std::uint64_t> default_stars() { return {1, 2, 4, 8}; }

namespace {

constexpr std::uint32_t kTestABeSize = 1000;

Scenario base_scenario(std::uint32_t ef_size, const HarnessOptions& opt) {
  Scenario sc;
  sc.topology = opt.topology;
  sc.flows.push_back(FlowSpec{"ef", "S0", "D0", kEfRateBps, ef_size, SimTime{}, std::nullopt});

  PolicySpec ef;
  ef.flows = {"ef"};
  ef.aggregate = "ef";
  ef.meter = MeterSpec{kEfRateBps, ef_size};
  ef.in_dscp = Dscp::ef;
  ef.out_action = OutAction::drop;
  PolicySpec be;
  be.flows = {"be"};
  be.aggregate = "be";
  be.in_dscp = Dscp::be_in;
  sc.policies = {ef, be};

  sc.queues.queues = {QueueSpec{0, {Dscp::ef}, kDefaultQueueCapacity, 1, 0},
                      QueueSpec{1, {Dscp::unmarked, Dscp::be_in, Dscp::be_out}, kDefaultQueueCapacity, 1, 1}};
  sc.run.duration = opt.duration;
  sc.run.seed = opt.seed;
  sc.run.warmup = opt.warmup;

  OutputSpec owd{"ef_owd", MetricKind::owd, {"ef"}, {}};
  OutputSpec ipdv{"ef_ipdv", MetricKind::ipdv, {"ef"}, {}};
  ipdv.bin.kind = BinRule::Kind::tx_time;
  ipdv.bin.tx_size_bytes = ef_size;
  ipdv.bin.tx_rate_bps = opt.topology.man_rate_bps;
  sc.outputs = {owd, ipdv};
  return sc;
}

BackgroundGroup random_background(std::uint32_t size) {
  BackgroundGroup g;
  g.name = "be";
  g.target_load_bps = kLineRateBps;
  g.rate_lo_bps = 10'000;
  g.rate_hi_bps = 100'000;
  g.start_lo = SimTime{};
  g.start_hi = SimTime::s(5);
  g.sizes = {size};
  g.src_nodes = {"S1", "S2", "S3", "S4"};
  g.dst_nodes = {"D1", "D2", "D3", "D4"};
  return g;
}

void set_weights(Scenario& sc, Share s) {
  sc.queues.queues[0].weight = s.num;
  sc.queues.queues[1].weight = s.den - s.num;
}

CheckSpec scfq_check(std::uint32_t ef_size, std::uint32_t other_max, Share s) {
  CheckSpec c;
  c.probe_queue = 0;
  c.scfq_bound = true;
  c.session_max_bytes = ef_size;
  c.global_max_bytes = std::max(ef_size, other_max);
  c.share_num = s.num;
  c.share_den = s.den;
  return c;
}

/// Requested Test A share, possibly above 1, and the share actually applied.
std::pair<Share, Share> test_a_share(std::uint64_t star) {
  const std::uint64_t num = kEfRateBps * star;
  const std::uint64_t g = std::gcd(num, kLineRateBps);
  const Share requested{num / g, kLineRateBps / g};
  const Share cap{kMaxShareNum, kMaxShareDen};
  if (static_cast<unsigned __int128>(requested.num) * cap.den > static_cast<unsigned __int128>(cap.num) * requested.den) {
    return {requested, cap};
  }
  return {requested, star_to_weight(kEfRateBps, kLineRateBps, star)};
}

const Share kTestCShare{3, 20};

std::vector<std::uint32_t> or_default(const std::vector<std::uint32_t>& v, std::vector<std::uint32_t> d) {
  return v.empty() ? d : v;
}

void run_points(SweepResult& r, const std::function<Scenario(const SweepPoint&)>& make) {
  parallel_for(r.points.size(), r.options.threads, [&](std::size_t i) {
    SweepPoint& p = r.points[i];
    p.run = run_scenario(make(p), p.seed);
  });
}

}  // namespace

Scenario test_a_scenario(std::uint32_t ef_size, Share share, const HarnessOptions& opt) {
  Scenario sc = base_scenario(ef_size, opt);
  sc.backgrounds = {random_background(kTestABeSize)};
  sc.queues.scheduler = SchedulerKind::scfq;
  set_weights(sc, share);
  sc.checks = scfq_check(ef_size, kTestABeSize, share);
  return sc;
}

Scenario test_b_scenario(std::uint32_t ef_size, std::uint32_t be_size, const HarnessOptions& opt) {
  Scenario sc = base_scenario(ef_size, opt);
  sc.backgrounds = {random_background(be_size)};
  sc.queues.scheduler = SchedulerKind::pq;
  CheckSpec c;
  c.probe_queue = 0;
  c.pq_bound = true;
  sc.checks = c;
  return sc;
}

Scenario test_c_scenario(SchedulerKind sched, std::uint32_t ef_size, const HarnessOptions& opt) {
  Scenario sc = base_scenario(ef_size, opt);
  BackgroundGroup g;
  g.name = "be";
  g.rate_lo_bps = 100'000;
  g.rate_hi_bps = 100'000;
  g.start_lo = SimTime{};
  g.start_hi = SimTime::s(5);
  g.sizes = stepped_sizes(64, 1472, 64);
  g.count = static_cast<std::uint32_t>(g.sizes.size());
  g.src_nodes = {"S1", "S2", "S3", "S4"};
  g.dst_nodes = {"D1", "D2", "D3", "D4"};
  sc.backgrounds = {g};
  sc.queues.scheduler = sched;
  set_weights(sc, kTestCShare);
  CheckSpec c = scfq_check(ef_size, 1472, kTestCShare);
  c.pq_bound = sched == SchedulerKind::pq;
  sc.checks = c;
  return sc;
}

SweepResult run_test_a(const HarnessOptions& opt) {
  SweepResult r;
  r.test = TestId::a;
  r.options = opt;
  r.ef_sizes = or_default(opt.ef_sizes, default_ef_sizes(TestId::a));
  r.stars = opt.stars.empty() ? default_stars() : opt.stars;
  r.schedulers = {SchedulerKind::scfq};
  for (auto star : r.stars) {
    const auto [req, applied] = test_a_share(star);
    for (auto size : r.ef_sizes) {
      for (std::uint32_t k = 0; k < opt.repeats; ++k) {
        SweepPoint p;
        p.ef_size = size;
        p.be_size = kTestABeSize;
        p.star = star;
        p.requested = req;
        p.applied = applied;
        p.repeat = k;
        p.seed = opt.seed + k;
        r.points.push_back(std::move(p));
      }
    }
  }
  run_points(r, [&](const SweepPoint& p) { return test_a_scenario(p.ef_size, p.applied, opt); });
  return r;
}

SweepResult run_test_b(const HarnessOptions& opt) {
  SweepResult r;
  r.test = TestId::b;
  r.options = opt;
  r.ef_sizes = or_default(opt.ef_sizes, default_ef_sizes(TestId::b));
  r.be_sizes = or_default(opt.be_sizes, default_be_sizes());
  r.schedulers = {SchedulerKind::pq};
  for (auto ef : r.ef_sizes) {
    for (auto be : r.be_sizes) {
      for (std::uint32_t k = 0; k < opt.repeats; ++k) {
        SweepPoint p;
        p.ef_size = ef;
        p.be_size = be;
        p.scheduler = SchedulerKind::pq;
        p.repeat = k;
        p.seed = opt.seed + k;
        r.points.push_back(std::move(p));
      }
    }
  }
  run_points(r, [&](const SweepPoint& p) { return test_b_scenario(p.ef_size, p.be_size, opt); });
  return r;
}

SweepResult run_test_c(const HarnessOptions& opt) {
  SweepResult r;
  r.test = TestId::c;
  r.options = opt;
  r.ef_sizes = or_default(opt.ef_sizes, default_ef_sizes(TestId::c));
  r.schedulers = {SchedulerKind::pq, SchedulerKind::scfq};
  for (auto sched : r.schedulers) {
    for (auto size : r.ef_sizes) {
      for (std::uint32_t k = 0; k < opt.repeats; ++k) {
        SweepPoint p;
        p.ef_size = size;
        p.scheduler = sched;
        p.applied = kTestCShare;
        p.requested = kTestCShare;
        p.repeat = k;
        p.seed = opt.seed + k;
        r.points.push_back(std::move(p));
      }
    }
  }
  run_points(r, [&](const SweepPoint& p) { return test_c_scenario(p.scheduler, p.ef_size, opt); });
  return r;
}

SweepResult run_test(TestId t, const HarnessOptions& opt) {
  switch (t) {
    case TestId::a: return run_test_a(opt);
    case TestId::b: return run_test_b(opt);
    case TestId::c: return run_test_c(opt);
  }
  throw BadParam("unknown test");
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

// CSV output -----------------------------------------------------------------

namespace {

std::string fmt_double(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string share_str(Share s) { return fmt_double(s.value(), 6); }

std::string join(const std::vector<std::uint32_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
  return out;
}

void metadata(std::ostream& os, const SweepResult& r, const std::string& what) {
  const auto& o = r.options;
  os << "# dsim experiment " << static_cast<char>(r.test) << ": " << what << '\n';
  os << "# base_seed: " << o.seed << '\n';
  os << "# repeats: " << o.repeats << " (seed = base_seed + repeat)\n";
  os << "# prng: " << Rng::kAlgorithm << '\n';
  os << "# duration_s: " << format_seconds(static_cast<std::int64_t>(o.duration.ticks())) << '\n';
  os << "# warmup_s: " << format_seconds(static_cast<std::int64_t>(o.warmup.ticks())) << '\n';
  os << "# bottleneck_queue_capacity_packets: ef=" << kDefaultQueueCapacity << " be=" << kDefaultQueueCapacity << '\n';
  os << "# other_interface_fifo_capacity_packets: " << Scenario{}.fifo_capacity << '\n';
  os << "# ipdv_convention: mean of |owd[k] - owd[k-1]| over consecutive received EF packets\n";
  os << "# calibration: lan_rate_bps=" << o.topology.lan_rate_bps
     << " lan_delay_s=" << format_seconds(static_cast<std::int64_t>(o.topology.lan_delay.ticks()))
     << " man_rate_bps=" << o.topology.man_rate_bps
     << " man_delay_s=" << format_seconds(static_cast<std::int64_t>(o.topology.man_delay.ticks())) << '\n';
  os << "# ef_source: cbr " << kEfRateBps << " bps, policed cir=" << kEfRateBps
     << " bps cbs=1 packet, out-of-profile dropped\n";
  os << "# grid (harness-chosen): ef_sizes=" << join(r.ef_sizes);
  if (!r.be_sizes.empty()) os << " be_sizes=" << join(r.be_sizes);
  os << '\n';
  if (r.test == TestId::a) {
    os << "# ef_share_cap: " << kMaxShareNum << '/' << kMaxShareDen
       << " (STAR whose share exceeds the cap runs at the cap; see share_requested/share_applied)\n";
  }
  if (r.test == TestId::c) os << "# wfq_ef_share: 0.150000 (STAR=1)\n";
}

std::string sec(std::int64_t ns) { return format_seconds(ns); }

std::string stats_cols(const DelayStats& st) {
  if (st.count() == 0) return "0,,,";
  return std::to_string(st.count()) + "," + fmt_double(st.mean_ns() * 1e-9, 12) + "," + sec(st.min_ns()) + "," +
         sec(st.max_ns());
}

std::string swept_header(TestId t) {
  switch (t) {
    case TestId::a: return "star,ef_size_bytes,share_requested,share_applied,repeat,seed";
    case TestId::b: return "ef_size_bytes,be_size_bytes,repeat,seed";
    case TestId::c: return "scheduler,ef_size_bytes,repeat,seed";
  }
  return {};
}

std::string swept_cols(TestId t, const SweepPoint& p) {
  std::string tail = std::to_string(p.repeat) + "," + std::to_string(p.seed);
  switch (t) {
    case TestId::a:
      return std::to_string(p.star) + "," + std::to_string(p.ef_size) + "," + share_str(p.requested) + "," +
             share_str(p.applied) + "," + tail;
    case TestId::b: return std::to_string(p.ef_size) + "," + std::to_string(p.be_size) + "," + tail;
    case TestId::c:
      return std::string(p.scheduler == SchedulerKind::pq ? "PQ" : "WFQ") + "," + std::to_string(p.ef_size) + "," + tail;
  }
  return {};
}

std::filesystem::path open_csv(const std::filesystem::path& dir, const std::string& name, std::ofstream& os) {
  auto path = dir / name;
  os.open(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write " + path.string());
  return path;
}

void write_hist(std::ostream& os, const std::string& key, const DelayStats& st, std::int64_t unit) {
  const StatsReport rep = export_stats(st, unit);
  for (const auto& b : rep.histogram) {
    os << key << ',' << b.index << ',' << sec(b.lower_edge_ns) << ',' << fmt_double(b.frequency, 12) << '\n';
  }
}

}  // namespace

std::vector<std::filesystem::path> write_csv(const SweepResult& r, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  const std::string sh = swept_header(r.test);

  auto summary = [&](const std::string& name, const std::string& what, bool ipdv) {
    std::ofstream os;
    written.push_back(open_csv(out_dir, name, os));
    metadata(os, r, what);
    os << sh << ",count,mean_s,min_s,max_s\n";
    for (const auto& p : r.points) os << swept_cols(r.test, p) << ',' << stats_cols(ipdv ? p.ipdv() : p.owd()) << '\n';
  };

  switch (r.test) {
    case TestId::a:
      summary("owd_vs_size_per_star.csv", "mean EF one-way delay per EF size and STAR", false);
      summary("ipdv_vs_star.csv", "mean EF |IPDV| per STAR and EF size", true);
      break;
    case TestId::b:
      summary("owd_vs_be_size.csv", "EF one-way delay versus BE packet size (PQ)", false);
      summary("ipdv_vs_be_size.csv", "EF |IPDV| versus BE packet size (PQ)", true);
      break;
    case TestId::c: {
      summary("avg_owd_vs_size.csv", "mean EF one-way delay per scheduler and EF size", false);
      summary("avg_ipdv_vs_size.csv", "mean EF |IPDV| per scheduler and EF size", true);
      for (std::uint32_t size : {128U, 1518U}) {
        if (std::find(r.ef_sizes.begin(), r.ef_sizes.end(), size) == r.ef_sizes.end()) continue;
        std::ofstream owd;
        std::ofstream ipdv;
        written.push_back(open_csv(out_dir, "owd_hist_" + std::to_string(size) + ".csv", owd));
        written.push_back(open_csv(out_dir, "ipdv_hist_" + std::to_string(size) + ".csv", ipdv));
        metadata(owd, r, "EF one-way delay histogram, " + std::to_string(size) + " B EF packets");
        metadata(ipdv, r, "EF |IPDV| histogram, " + std::to_string(size) + " B EF packets");
        const std::int64_t tu = static_cast<std::int64_t>(transmission_time(size, r.options.topology.man_rate_bps).ticks());
        for (std::uint32_t k = 0; k < r.options.repeats; ++k) {
          // One delay unit shared by both schedulers: the smallest OWD either saw.
          std::int64_t unit = 0;
          for (const auto& p : r.points) {
            if (p.ef_size != size || p.repeat != k || p.owd().count() == 0) continue;
            unit = unit == 0 ? p.owd().min_ns() : std::min(unit, p.owd().min_ns());
          }
          if (k == 0) {
            owd << "# delay_unit_s: " << sec(unit) << " (minimum OWD over both schedulers)\n";
            ipdv << "# transmission_unit_s: " << sec(tu) << " (EF packet at line rate)\n";
            owd << "scheduler,repeat,bin_lower_edge_units,bin_lower_edge_s,frequency\n";
            ipdv << "scheduler,repeat,bin_lower_edge_units,bin_lower_edge_s,frequency\n";
          }
          for (const auto& p : r.points) {
            if (p.ef_size != size || p.repeat != k) continue;
            const std::string key = std::string(p.scheduler == SchedulerKind::pq ? "PQ" : "WFQ") + "," +
                                    std::to_string(p.repeat);
            write_hist(owd, key, p.owd(), unit);
            write_hist(ipdv, key, p.ipdv(), tu);
          }
        }
      }
      break;
    }
  }

  std::ofstream chk;
  written.push_back(open_csv(out_dir, std::string("checks_") + static_cast<char>(r.test) + ".csv", chk));
  metadata(chk, r, "per-run counters and per-packet scheduler checks on the EF queue");
  chk << sh
      << ",created,delivered,dropped_conditioner,dropped_tail,dropped_policer,conserved,ef_in_profile,ef_dropped,"
         "probed,latency_bound_s,max_latency_arrival_s,violations_arrival,max_latency_hol_s,violations_hol,"
         "pq_violations,max_active_sessions\n";
  for (const auto& p : r.points) {
    const auto& c = p.run.counters;
    const auto& ef = p.run.aggregates.at("ef");
    chk << swept_cols(r.test, p) << ',' << c.created << ',' << c.delivered << ',' << c.dropped_conditioner << ','
        << c.dropped_tail << ',' << c.dropped_policer << ',' << (p.run.conserved ? 1 : 0) << ',' << ef.in_profile
        << ',' << ef.dropped;
    if (const auto& k = p.run.checks) {
      chk << ',' << k->probed << ',' << sec(static_cast<std::int64_t>(k->bound.ticks())) << ','
          << sec(static_cast<std::int64_t>(k->max_latency_arrival.ticks())) << ',' << k->violations_arrival << ','
          << sec(static_cast<std::int64_t>(k->max_latency_hol.ticks())) << ',' << k->violations_hol << ','
          << k->pq_violations << ',' << k->max_active_sessions;
    } else {
      chk << ",,,,,,,,";
    }
    chk << '\n';
  }
  return written;
}

}  // namespace dsim
