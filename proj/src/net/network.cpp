#include "dsim/net/network.hpp"

#include <algorithm>
#include <cassert>
#include <string>

#include "dsim/core/error.hpp"
#include "dsim/net/link.hpp"

namespace dsim {

EgressPort::EgressPort(Simulator& sim, Link& link, const QueueSetSpec& spec, Deliver deliver, Drop drop)
    : sim_(sim), link_(link), queues_(spec, link.rate_bps), deliver_(std::move(deliver)), drop_(std::move(drop)) {}

void EgressPort::set_probe(QueueId q, std::function<void(const ProbeRecord&)> sink) {
  if (q >= queues_.num_queues()) throw BadParam("probe on unknown queue");
  probe_queue_ = q;
  probe_sink_ = std::move(sink);
}

std::uint32_t EgressPort::active_sessions() const {
  std::uint32_t n = 0;
  for (QueueId q = 0; q < queues_.num_queues(); ++q) {
    if (queues_.occupancy(q) > 0 || in_service_ == q) ++n;
  }
  return n;
}

void EgressPort::note_activity() {
  if (probe_waiting_.empty()) return;
  const std::uint32_t a = active_sessions();
  for (auto& r : probe_waiting_) {
    r.max_active_sessions = std::max(r.max_active_sessions, a);
    r.max_active_from_head = std::max(r.max_active_from_head, a);
  }
}

void EgressPort::accept(Packet pkt) {
  const SimTime now = sim_.now();
  const EnqueueResult res = queues_.enqueue(pkt, now);
  if (res.outcome == EnqueueOutcome::tail_dropped) {
    drop_(pkt, DropReason::tail);
    return;
  }
  if (probe_queue_ && res.queue == *probe_queue_) {
    ProbeRecord r;
    r.flow_id = pkt.flow_id;
    r.seq_no = pkt.seq_no;
    r.size_bytes = pkt.size_bytes;
    r.enqueued_at = now;
    r.residual_at_enqueue = transmitting_ ? link_.busy_until - now : SimTime{};
    for (const auto& w : probe_waiting_) r.ahead_at_enqueue += link_.tx_time(w.size_bytes);
    probe_waiting_.push_back(r);
  }
  note_activity();
  if (!transmitting_) try_send();
}

void EgressPort::try_send() {
  const SimTime now = sim_.now();
  DequeueResult r = queues_.dequeue(now);
  for (const auto& p : r.policed) {
    if (probe_queue_ && !probe_waiting_.empty() && queues_.queue_for(p.dscp) == *probe_queue_) {
      probe_waiting_.pop_front();
    }
    drop_(p, DropReason::policer);
  }
  if (!r.packet) {
    in_service_.reset();
    probe_last_tx_end_.reset();  // busy period over
    return;
  }
  transmitting_ = true;
  in_service_ = r.queue;
  if (probe_queue_ && r.queue == *probe_queue_) {
    probe_in_service_ = std::move(probe_waiting_.front());
    probe_waiting_.pop_front();
    probe_in_service_->tx_start = now;
    probe_in_service_->prev_same_queue_tx_end =
        std::max(probe_in_service_->enqueued_at, probe_last_tx_end_.value_or(SimTime{}));
  }
  note_activity();
  const SimTime arrival = transmit(link_, *r.packet, now);
  ++on_wire_;
  ++transmitted_;
  sim_.schedule(link_.busy_until, [this] { finish_tx(); });
  sim_.schedule(arrival, [this, pkt = std::move(*r.packet)]() mutable {
    --on_wire_;
    deliver_(std::move(pkt));
  });
}

void EgressPort::finish_tx() {
  transmitting_ = false;
  const bool probed = probe_queue_ && in_service_ == *probe_queue_;
  in_service_.reset();
  if (probed && probe_in_service_) {
    probe_in_service_->tx_end = sim_.now();
    probe_last_tx_end_ = sim_.now();
    if (probe_sink_) probe_sink_(*probe_in_service_);
    probe_in_service_.reset();
    // the next packet of the queue starts its head-of-line wait now
    if (!probe_waiting_.empty()) probe_waiting_.front().max_active_from_head = 0;
  }
  try_send();
}

Network::Network(Simulator& sim, Topology topo, const QueueSetSpec& bottleneck, EdgeConditioner conditioner,
                 std::size_t fifo_capacity)
    : sim_(sim), topo_(std::move(topo)), links_(topo_.links()), conditioner_(std::move(conditioner)) {
  const QueueSetSpec fifo = fifo_queue_set(fifo_capacity);
  ports_.reserve(links_.size());
  for (LinkIndex i = 0; i < links_.size(); ++i) {
    const bool is_bottleneck = topo_.bottleneck && *topo_.bottleneck == i;
    ports_.push_back(std::make_unique<EgressPort>(
        sim_, links_[i], is_bottleneck ? bottleneck : fifo, [this](Packet&& p) { arrive(std::move(p)); },
        [this](const Packet&, DropReason why) {
          if (why == DropReason::tail) {
            ++counters_.dropped_tail;
          } else {
            ++counters_.dropped_policer;
          }
        }));
  }
}

EgressPort& Network::bottleneck() {
  if (!topo_.bottleneck) throw BadParam("topology has no bottleneck link");
  return *ports_[*topo_.bottleneck];
}

const std::vector<LinkIndex>& Network::flow_route(FlowId f) const {
  if (f >= routes_.size() || routes_[f].empty()) throw BadParam("unknown flow " + std::to_string(f));
  return routes_[f];
}

void Network::add_source(const CbrSource& src) {
  if (src.rate_bps == 0) throw BadParam("source rate must be positive");
  validate_frame_size(src.packet_size_bytes);
  if (src.flow_id < routes_.size() && !routes_[src.flow_id].empty()) {
    throw BadParam("duplicate flow id " + std::to_string(src.flow_id));
  }
  const Path& path = topo_.route(src.src, src.dst);
  std::vector<LinkIndex> hops;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) hops.push_back(*topo_.link_between(path[i], path[i + 1]));
  if (hops.size() > 255) throw BadParam("route too long");
  if (routes_.size() <= src.flow_id) {
    routes_.resize(src.flow_id + 1);
    seen_.resize(src.flow_id + 1);
  }
  routes_[src.flow_id] = std::move(hops);
  sources_.push_back(src);
  if (src.start_time < src.stop_time) {
    const std::size_t idx = sources_.size() - 1;
    sim_.schedule(src.start_time, [this, idx] { emit(idx, 0); });
  }
}

void Network::emit(std::size_t source_index, std::uint64_t k) {
  const CbrSource& s = sources_[source_index];
  Packet p;
  p.flow_id = s.flow_id;
  p.seq_no = k;
  p.size_bytes = s.packet_size_bytes;
  p.created_at = sim_.now();
  p.src = s.src;
  p.dst = s.dst;
  ++counters_.created;
  const SimTime next = sim_.now() + s.gap();
  if (next < s.stop_time) sim_.schedule(next, [this, source_index, k] { emit(source_index, k + 1); });
  ports_[routes_[s.flow_id][0]]->accept(std::move(p));
}

void Network::arrive(Packet&& pkt) {
  const auto& route = routes_[pkt.flow_id];
  const NodeId at = links_[route[pkt.hop]].to;
  ++pkt.hop;
  if (pkt.hop == route.size()) {
    sink_receive(pkt, sim_.now());
    return;
  }
  if (topo_.edge_router && at == *topo_.edge_router) {
    const ConditionResult c = conditioner_.condition(pkt, sim_.now());
    if (c.outcome == ConditionOutcome::dropped) {
      ++counters_.dropped_conditioner;
      return;
    }
  }
  forward(std::move(pkt));
}

void Network::forward(Packet&& pkt) { ports_[routes_[pkt.flow_id][pkt.hop]]->accept(std::move(pkt)); }

DeliveryRecord Network::sink_receive(const Packet& pkt, SimTime t) {
  auto& seen = seen_[pkt.flow_id];
  if (seen.size() <= pkt.seq_no) seen.resize(pkt.seq_no + 1, false);
  assert(!seen[pkt.seq_no] && "duplicate delivery");
  seen[pkt.seq_no] = true;
  ++counters_.delivered;
  const DeliveryRecord rec{pkt.flow_id, pkt.seq_no, pkt.created_at, t};
  for (const auto& obs : observers_) obs(rec);
  return rec;
}

std::uint64_t Network::in_flight() const {
  std::uint64_t n = 0;
  for (const auto& p : ports_) n += p->queues().total_occupancy() + p->on_wire();
  return n;
}

}  // namespace dsim
