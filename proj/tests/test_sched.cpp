#include <doctest.h>

#include <string>

#include "dsim/core/error.hpp"
#include "dsim/sched/fair_queueing.hpp"
#include "dsim/sched/latency_bound.hpp"
#include "trace.hpp"

using namespace dsim;
using namespace dsim::testing;

namespace {

constexpr std::uint64_t kRate = 2'000'000;

std::unique_ptr<Scheduler> make(SchedulerKind k, std::vector<std::uint64_t> weights) {
  return make_scheduler(config_for(k, kRate, weights));
}

/// Queue letters in service order, e.g. "AABAAB".
std::string pattern(const DriveResult& r, std::size_t limit = 1000) {
  std::string s;
  for (const auto& x : r.served) {
    if (s.size() == limit) break;
    s += static_cast<char>('A' + x.q);
  }
  return s;
}

/// `per_queue` equal packets in every queue, all present at t = 0.
std::vector<Arrival> backlog(std::size_t queues, std::size_t per_queue, std::uint32_t size = 500) {
  std::vector<Arrival> t;
  for (std::size_t q = 0; q < queues; ++q) {
    for (std::size_t k = 0; k < per_queue; ++k) t.push_back(Arrival{0, static_cast<QueueId>(q), size});
  }
  return t;
}

}  // namespace

TEST_CASE("scheduler names round-trip") {
  CHECK(all_scheduler_kinds().size() == 9);
  for (auto k : all_scheduler_kinds()) CHECK(parse_scheduler_kind(to_string(k)) == k);
  CHECK(parse_scheduler_kind("wfq") == SchedulerKind::scfq);
  CHECK_FALSE(parse_scheduler_kind("cbq"));
}

TEST_CASE("invalid scheduler configurations") {
  CHECK_THROWS_AS(make(SchedulerKind::scfq, {}), BadParam);
  CHECK_THROWS_AS(make(SchedulerKind::scfq, {1, 0}), BadParam);
  CHECK_THROWS_AS(make_scheduler(config_for(SchedulerKind::scfq, 0, {1, 1})), BadParam);
  auto pq = config_for(SchedulerKind::pq, kRate, {1, 1});
  pq.queues[1].priority = 0;
  CHECK_THROWS_AS(make_scheduler(pq), BadParam);
  auto llq = config_for(SchedulerKind::llq, kRate, {1, 1});
  llq.llq.reset();
  CHECK_THROWS_AS(make_scheduler(llq), BadParam);
}

TEST_CASE("empty scheduler: pick_next is empty, require_pick throws") {
  auto s = make(SchedulerKind::rr, {1, 1});
  CHECK_FALSE(s->pick_next(SimTime{}));
  CHECK_THROWS_AS(s->require_pick(SimTime{}), EmptyQueue);
}

TEST_CASE("contract violations are caught") {
  auto s = make(SchedulerKind::rr, {1, 1});
  s->on_enqueue(0, 100, SimTime{});
  CHECK_THROWS_AS(s->on_dequeue(1, 100, SimTime{}), InvariantViolation);
  CHECK_THROWS_AS(s->on_dequeue(0, 200, SimTime{}), InvariantViolation);
}

TEST_CASE("PQ serves EF first, BE when alone, and EF waits the BE residual") {
  auto s = make(SchedulerKind::pq, {1, 1});
  s->on_enqueue(1, 1000, SimTime{});
  s->on_enqueue(0, 100, SimTime{});
  CHECK(s->require_pick(SimTime{}).queue == 0);
  s->on_dequeue(0, 100, SimTime{});
  CHECK(s->require_pick(SimTime{}).queue == 1);

  auto p = make(SchedulerKind::pq, {1, 1});
  // BE 1000 B starts at 0 (4 ms on the wire); EF arrives at 1 ms
  const auto r = drive(*p, {{0, 1, 1000}, {1'000'000, 0, 128}}, kRate);
  REQUIRE(r.served.size() == 2);
  CHECK(r.served[1].q == 0);
  CHECK(r.served[1].start - 1'000'000 == 3'000'000);
}

TEST_CASE("SCFQ finish tag of a lone 1000 B packet at full rate is 4 ms") {
  auto s = make(SchedulerKind::scfq, {1});
  s->on_enqueue(0, 1000, SimTime{});
  const auto& t = dynamic_cast<TaggedScheduler&>(*s);
  CHECK(t.head_tags(0).finish == make_rational(4, 1000));
  CHECK(t.head_tags(0).start == 0);
}

TEST_CASE("SCFQ alternates equal queues and keeps a lone queue FIFO") {
  auto s = make(SchedulerKind::scfq, {1, 1});
  // A0 goes on the wire before the rest arrive; from then on tags tie pairwise
  CHECK(pattern(drive(*s, backlog(2, 4), kRate)) == "AABABABB");
  auto one = make(SchedulerKind::scfq, {5, 1});
  const auto r = drive(*one, {{0, 1, 300}, {0, 1, 900}, {10, 1, 100}}, kRate);
  CHECK(r.served[0].packet == 0);
  CHECK(r.served[1].packet == 1);
  CHECK(r.served[2].packet == 2);
}

TEST_CASE("SCFQ tags are non-decreasing within a queue") {
  auto s = make(SchedulerKind::scfq, {1, 2});
  auto& t = dynamic_cast<TaggedScheduler&>(*s);
  Rational last = 0;
  for (int k = 0; k < 10; ++k) {
    s->on_enqueue(0, 100 + 10 * k, SimTime{});
    s->on_enqueue(1, 1000, SimTime{});
  }
  while (auto d = s->pick_next(SimTime{})) {
    if (d->queue == 0) {
      CHECK(t.head_tags(0).finish >= last);
      last = t.head_tags(0).finish;
    }
    s->on_dequeue(d->queue, s->head_size(d->queue), SimTime{});
  }
}

TEST_CASE("PGPS virtual time runs at 1/share while one session is backlogged") {
  auto s = make(SchedulerKind::pgps, {1, 3});
  auto& p = dynamic_cast<PgpsScheduler&>(*s);
  s->on_enqueue(0, 1000, SimTime{});
  // q0 alone gets the full 2 Mbps: done at 4 ms real; its tag is 8000*4/2e6 = 16 ms virtual
  CHECK(p.head_tags(0).finish == make_rational(16, 1000));
  CHECK(p.virtual_time_at(SimTime::ms(2)) == make_rational(8, 1000));
  CHECK(p.virtual_time_at(SimTime::ms(4)) == make_rational(16, 1000));
  // fluid system empty: V holds still
  CHECK(p.virtual_time_at(SimTime::ms(9)) == make_rational(16, 1000));
}

TEST_CASE("single session is served FIFO by every scheduler") {
  for (auto k : all_scheduler_kinds()) {
    if (k == SchedulerKind::llq) continue;
    auto s = make(k, {1, 2});
    const auto r = drive(*s, {{0, 1, 300}, {0, 1, 900}, {5, 1, 28}, {5, 1, 1500}}, kRate);
    REQUIRE(r.served.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(r.served[i].packet == i);
  }
}

TEST_CASE("WF2Q+ with equal new tags serves the smallest finish tag") {
  auto s = make(SchedulerKind::wf2qplus, {1, 4});
  s->on_enqueue(0, 500, SimTime{});
  s->on_enqueue(1, 500, SimTime{});
  // both start at 0 and are eligible; q1 has the smaller finish
  CHECK(s->require_pick(SimTime{}).queue == 1);
}

TEST_CASE("SFQ: equal weights serve in arrival order; 2:1 weights give 2:1 counts") {
  auto s = make(SchedulerKind::sfq, {1, 1});
  const auto r = drive(*s, {{0, 1, 500}, {100, 0, 500}, {200, 1, 500}}, kRate);
  CHECK(r.served[0].packet == 0);
  CHECK(r.served[1].packet == 1);
  CHECK(r.served[2].packet == 2);

  auto w = make(SchedulerKind::sfq, {2, 1});
  const auto big = drive(*w, backlog(2, 3000), kRate);
  std::size_t a = 0, b = 0;
  for (std::size_t i = 0; i < 3000; ++i) (big.served[i].q == 0 ? a : b)++;
  CHECK(a == 2000);
  CHECK(b == 1000);
}

TEST_CASE("PGPS 3:1 weights split bytes 3:1 within one packet") {
  auto s = make(SchedulerKind::pgps, {3, 1});
  const auto r = drive(*s, backlog(2, 2000, 700), kRate);
  std::int64_t a = 0, b = 0;
  for (std::size_t i = 0; i < 2000; ++i) {
    (r.served[i].q == 0 ? a : b) += 700;
    CHECK(std::abs(a - 3 * b) <= 3 * 700);
  }
}

TEST_CASE("round-robin family patterns") {
  CHECK(pattern(drive(*make(SchedulerKind::wrr, {2, 1}), backlog(2, 6), kRate), 9) == "AABAABAAB");
  CHECK(pattern(drive(*make(SchedulerKind::wirr, {2, 1}), backlog(2, 6), kRate), 9) == "ABAABAABA");
  CHECK(pattern(drive(*make(SchedulerKind::rr, {1, 1, 1}), backlog(3, 3), kRate)) == "ABCABCABC");
  for (auto k : {SchedulerKind::wrr, SchedulerKind::wirr}) {
    CHECK(pattern(drive(*make(k, {1, 1, 1}), backlog(3, 3), kRate)) == "ABCABCABC");
  }
}

TEST_CASE("one empty queue leaves the whole link to the other") {
  for (auto k : all_scheduler_kinds()) {
    if (k == SchedulerKind::llq) continue;
    auto s = make(k, {1, 7});
    std::vector<Arrival> t;
    for (int i = 0; i < 20; ++i) t.push_back(Arrival{0, 0, 400});
    const auto r = drive(*s, t, kRate);
    REQUIRE(r.served.size() == 20);
    CHECK(r.served.back().end == 20 * 1'600'000);  // back to back: 400 B = 1.6 ms
  }
}

TEST_CASE("LLQ: policed priority queue first, excess dropped or deferred") {
  SchedulerConfig c = config_for(SchedulerKind::llq, kRate, {1, 1, 1});
  c.llq = LlqParams{0, 300'000, 1000, ExceedAction::drop};
  {
    auto s = make_scheduler(c);
    // two 1000 B EF back to back: the second exceeds a one-packet bucket
    const auto r = drive(*s, {{0, 0, 1000}, {0, 0, 1000}, {0, 1, 1000}, {0, 2, 1000}}, kRate);
    REQUIRE(r.served.size() == 4);
    CHECK(r.served[0].q == 0);
    CHECK_FALSE(r.served[0].dropped);
    CHECK(r.served[1].q == 0);
    CHECK(r.served[1].dropped);
    CHECK(r.served[2].q == 1);
    CHECK(r.served[3].q == 2);
  }
  c.llq->exceed = ExceedAction::defer;
  {
    auto s = make_scheduler(c);
    const auto r = drive(*s, {{0, 0, 1000}, {0, 0, 1000}, {0, 1, 1000}, {0, 2, 1000}}, kRate);
    REQUIRE(r.served.size() == 4);
    CHECK(r.served[0].q == 0);
    CHECK(r.served[1].q == 1);
    CHECK(r.served[2].q == 2);
    CHECK(r.served[3].q == 0);
    for (const auto& x : r.served) CHECK_FALSE(x.dropped);
  }
}

TEST_CASE("LLQ with an idle priority queue decides like SCFQ over the rest") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto trace = random_trace(seed, 80, 2, {64, 300, 1500}, 2'000'000);
    std::vector<Arrival> shifted = trace;
    for (auto& a : shifted) a.q += 1;  // queue 0 is the (unused) priority queue
    auto llq = make_scheduler(config_for(SchedulerKind::llq, kRate, {1, 2, 5}));
    auto scfq = make(SchedulerKind::scfq, {2, 5});
    const auto a = drive(*llq, shifted, kRate);
    const auto b = drive(*scfq, trace, kRate);
    REQUIRE(a.served.size() == b.served.size());
    for (std::size_t i = 0; i < a.served.size(); ++i) CHECK(a.served[i].packet == b.served[i].packet);
  }
}

TEST_CASE("SCFQ latency bound values") {
  // V = 1: 8*L/rho only
  CHECK(scfq_latency_bound(1000, 1500, 1'000'000, 2'000'000, 1) == SimTime::ms(8));
  CHECK(scfq_latency_bound(1000, 1000, 2'000'000, 2'000'000, 2) == SimTime::ms(8));
  CHECK(scfq_latency_bound(1518, 1518, 300'000, 2'000'000, 2) == SimTime::us(46'552));
  CHECK(scfq_latency_bound_share(1518, 1518, 3, 20, 2'000'000, 2) == SimTime::us(46'552));
  CHECK_THROWS_AS(scfq_latency_bound(1000, 1000, 0, 2'000'000, 2), BadParam);
  CHECK_THROWS_AS(scfq_latency_bound(1000, 1000, 1, 2'000'000, 0), BadParam);
}
