#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

#include "dsim/core/error.hpp"
#include "dsim/core/simulator.hpp"
#include "dsim/net/link.hpp"
#include "dsim/net/network.hpp"
#include "dsim/net/rng.hpp"

using namespace dsim;

namespace {

Packet frame(std::uint32_t size) {
  Packet p;
  p.size_bytes = size;
  return p;
}

// Closed-form serialization time, kept separate from the library helper.
std::uint64_t ceil_tx_ns(std::uint64_t bytes, std::uint64_t rate) {
  const unsigned __int128 bits_ns = static_cast<unsigned __int128>(bytes) * 8 * 1'000'000'000ULL;
  return static_cast<std::uint64_t>(bits_ns / rate + (bits_ns % rate != 0 ? 1 : 0));
}

}  // namespace

TEST_CASE("link delivery time is start + tx + propagation") {
  Link man{0, 1, 2'000'000, SimTime{}, SimTime{}};
  CHECK(transmit(man, frame(1000), SimTime::s(1)) == SimTime::s(1) + SimTime::ms(4));
  CHECK(man.busy_until == SimTime::s(1) + SimTime::ms(4));

  Link lan{0, 1, 100'000'000, SimTime::ms(1), SimTime{}};
  CHECK(transmit(lan, frame(128), SimTime{}) == SimTime::ns(10'240) + SimTime::ms(1));
}

TEST_CASE("a busy link rejects a second transmission") {
  Link man{0, 1, 2'000'000, SimTime{}, SimTime{}};
  transmit(man, frame(1000), SimTime{});
  CHECK_THROWS_AS(transmit(man, frame(1000), SimTime::ms(4) - SimTime::ns(1)), LinkBusy);
  CHECK_NOTHROW(transmit(man, frame(1000), SimTime::ms(4)));
}

TEST_CASE("frame sizes outside [28, 65535] are rejected") {
  CHECK_THROWS_AS(validate_frame_size(0), BadPacket);
  CHECK_THROWS_AS(validate_frame_size(27), BadPacket);
  CHECK_NOTHROW(validate_frame_size(28));
  CHECK_NOTHROW(validate_frame_size(65535));
  CHECK_THROWS_AS(validate_frame_size(65536), BadPacket);
}

TEST_CASE("default topology") {
  const Topology t = build_testbed_topology({});
  // S0-S4, e1, core, e2, D0-D4
  CHECK(t.nodes().size() == 13);
  const auto name_path = [&](const char* a, const char* b) {
    std::vector<std::string> out;
    for (NodeId n : t.route(t.id_of(a), t.id_of(b))) out.push_back(t.node(n).name);
    return out;
  };
  CHECK(name_path("S0", "D0") == std::vector<std::string>{"S0", "e1", "core", "e2", "D0"});
  CHECK(name_path("S1", "D1") == std::vector<std::string>{"S1", "e1", "core", "e2", "D1"});
  REQUIRE(t.bottleneck);
  CHECK(t.node(t.link(*t.bottleneck).from).name == "e1");
  CHECK(t.node(t.link(*t.bottleneck).to).name == "core");
  CHECK(t.link(*t.bottleneck).rate_bps == 2'000'000);
  CHECK(t.node(*t.edge_router).name == "e1");
}

TEST_CASE("LAN rate override applies to every host link") {
  TopologyOverrides o;
  o.lan_rate_bps = 10'000'000;
  const Topology t = build_testbed_topology(o);
  for (const auto& l : t.links()) {
    const bool host_link = t.node(l.from).kind == NodeKind::host || t.node(l.to).kind == NodeKind::host;
    CHECK(l.rate_bps == (host_link ? 10'000'000U : 2'000'000U));
  }
}

TEST_CASE("routes must be loop-free and follow existing links") {
  Topology t = build_testbed_topology({});
  const NodeId s0 = t.id_of("S0"), e1 = t.id_of("e1"), core = t.id_of("core"), e2 = t.id_of("e2"),
               d0 = t.id_of("D0");
  CHECK_THROWS_AS(t.set_route(s0, d0, {s0, e1, core, e1, core, e2, d0}), BadParam);
  CHECK_THROWS_AS(t.set_route(s0, d0, {s0, core, e2, d0}), BadParam);
  CHECK_NOTHROW(t.set_route(s0, d0, {s0, e1, core, e2, d0}));
}

TEST_CASE("uniform draws stay in range and repeat for a seed") {
  Rng a(7), b(7);
  for (int i = 0; i < 10000; ++i) {
    const auto x = a.uniform(10, 100);
    CHECK(x >= 10);
    CHECK(x <= 100);
    CHECK(x == b.uniform(10, 100));
  }
  Rng c(1);
  CHECK(c.uniform(5, 5) == 5);
  // full 64-bit range is accepted
  CHECK_NOTHROW(c.uniform(0, ~0ULL));
}

TEST_CASE("Test C background schedule") {
  BackgroundSpec s;
  s.count = 23;
  s.rate_lo_bps = s.rate_hi_bps = 100'000;
  s.start_hi = SimTime::s(5);
  s.sizes = stepped_sizes(64, 1472, 64);
  s.src_nodes = {1, 2, 3, 4};
  s.dst_nodes = {9, 10, 11, 12};
  s.stop_time = SimTime::s(200);
  const auto v = spawn_background(s, 3);
  REQUIRE(v.size() == 23);
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(v[i].packet_size_bytes == 64 * (i + 1));
    CHECK(v[i].rate_bps == 100'000);
    CHECK(v[i].start_time <= SimTime::s(5));
  }
  CHECK(v.back().packet_size_bytes == 1472);
}

TEST_CASE("degenerate rate range gives a deterministic source") {
  BackgroundSpec s;
  s.count = 1;
  s.rate_lo_bps = s.rate_hi_bps = 42'000;
  s.sizes = {1000};
  s.src_nodes = {1};
  s.dst_nodes = {9};
  s.stop_time = SimTime::s(1);
  const auto v = spawn_background(s, 99);
  REQUIRE(v.size() == 1);
  CHECK(v[0].rate_bps == 42'000);
  CHECK(v[0].start_time == SimTime{});
}

TEST_CASE("background draws are seed-deterministic and load-targeted") {
  BackgroundSpec s;
  s.target_load_bps = 2'000'000;
  s.rate_lo_bps = 10'000;
  s.rate_hi_bps = 100'000;
  s.start_hi = SimTime::s(5);
  s.sizes = {1000};
  s.src_nodes = {1, 2, 3, 4};
  s.dst_nodes = {9, 10, 11, 12};
  s.first_flow_id = 5;
  s.stop_time = SimTime::s(200);
  const auto a = spawn_background(s, 11);
  const auto b = spawn_background(s, 11);
  REQUIRE(a.size() == b.size());
  std::uint64_t load = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].rate_bps == b[i].rate_bps);
    CHECK(a[i].start_time == b[i].start_time);
    CHECK(a[i].flow_id == 5 + i);
    CHECK(a[i].src == s.src_nodes[i % 4]);
    CHECK(a[i].dst == s.dst_nodes[i % 4]);
    load += a[i].rate_bps;
  }
  CHECK(load >= 2'000'000);
  CHECK(load - a.back().rate_bps < 2'000'000);
  CHECK(spawn_background(s, 12).front().rate_bps != a.front().rate_bps);
}

TEST_CASE("invalid background ranges") {
  BackgroundSpec s;
  s.count = 2;
  s.rate_lo_bps = 20;
  s.rate_hi_bps = 10;
  s.sizes = {100};
  s.src_nodes = {1};
  s.dst_nodes = {9};
  CHECK_THROWS_AS(spawn_background(s, 1), BadRange);
  s.rate_hi_bps = 30;
  s.sizes = {100, 200, 300};
  CHECK_THROWS_AS(spawn_background(s, 1), BadRange);
  s.sizes = {100};
  s.start_lo = SimTime::s(2);
  s.start_hi = SimTime::s(1);
  CHECK_THROWS_AS(spawn_background(s, 1), BadRange);
}

TEST_CASE("uncontended OWD equals the closed-form path delay and IPDV is zero") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    TopologyOverrides o;
    o.lan_rate_bps = 10'000'000 + rng() % 200'000'000;
    o.lan_delay = SimTime::ns(rng() % 5'000'000);
    o.man_rate_bps = 500'000 + rng() % 5'000'000;
    o.man_delay = SimTime::ns(rng() % 8'000'000);
    const std::uint32_t size = 28 + static_cast<std::uint32_t>(rng() % 1491);
    const int pair = static_cast<int>(rng() % 5);
    const std::uint64_t rate = 1'000 + rng() % (o.man_rate_bps - 1'000);  // never self-queues

    Simulator sim;
    Topology topo = build_testbed_topology(o);
    const NodeId src = topo.id_of("S" + std::to_string(pair));
    const NodeId dst = topo.id_of("D" + std::to_string(pair));
    Network net(sim, std::move(topo), fifo_queue_set(50), EdgeConditioner({}), 1000);
    net.add_source(CbrSource{0, src, dst, rate, size, SimTime::ns(rng() % 1000), SimTime::s(2)});

    const std::uint64_t expected = 2 * (ceil_tx_ns(size, o.lan_rate_bps) + o.lan_delay.ticks()) +
                                   2 * (ceil_tx_ns(size, o.man_rate_bps) + o.man_delay.ticks());
    std::uint64_t mismatches = 0;
    std::uint64_t seen = 0;
    IpdvState ipdv;
    net.add_observer([&](const DeliveryRecord& r) {
      ++seen;
      if (r.received_at.ticks() - r.created_at.ticks() != expected) ++mismatches;
      record_ipdv(ipdv, r);
    });
    sim.run();
    CHECK(seen > 0);
    CHECK(seen == net.counters().created);
    CHECK(mismatches == 0);
    if (ipdv.stats_abs.count() > 0) CHECK(ipdv.stats_abs.max_ns() == 0);
    CHECK(net.conserved());
  }
}

TEST_CASE("conservation holds at run end with packets still in flight") {
  Simulator sim;
  Topology topo = build_testbed_topology({});
  const NodeId s1 = topo.id_of("S1"), d1 = topo.id_of("D1");
  Network net(sim, std::move(topo), fifo_queue_set(5), EdgeConditioner({}), 1000);
  // 3 Mbps into a 2 Mbps bottleneck with 5 buffers: tail drops plus backlog
  net.add_source(CbrSource{0, s1, d1, 3'000'000, 500, SimTime{}, SimTime::s(10)});
  sim.run_until(SimTime::ms(5'123));
  CHECK(net.counters().dropped_tail > 0);
  CHECK(net.in_flight() > 0);
  CHECK(net.conserved());
  sim.run();
  CHECK(net.in_flight() == 0);
  CHECK(net.conserved());
  CHECK(net.counters().created == net.counters().delivered + net.counters().dropped());
}

TEST_CASE("sink builds the delivery record") {
  Simulator sim;
  Topology topo = build_testbed_topology({});
  const NodeId s0 = topo.id_of("S0"), d0 = topo.id_of("D0");
  Network net(sim, std::move(topo), fifo_queue_set(50), EdgeConditioner({}), 1000);
  net.add_source(CbrSource{3, s0, d0, 1000, 100, SimTime{}, SimTime{}});  // registers flow 3 only
  Packet p;
  p.flow_id = 3;
  p.seq_no = 4;
  p.created_at = SimTime::ms(10);
  const auto rec = net.sink_receive(p, SimTime::ms(16));
  CHECK(rec.received_at - rec.created_at == SimTime::ms(6));
  p.seq_no = 2;  // out of order is fine
  CHECK_NOTHROW(net.sink_receive(p, SimTime::ms(17)));
}
