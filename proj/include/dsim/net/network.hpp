#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "dsim/core/simulator.hpp"
#include "dsim/diffserv/edge.hpp"
#include "dsim/diffserv/queue_set.hpp"
#include "dsim/metrics/delay_stats.hpp"
#include "dsim/net/cbr_source.hpp"
#include "dsim/net/topology.hpp"

namespace dsim {

/// Per-packet timing of one probed queue at an egress interface.
struct ProbeRecord {
  FlowId flow_id = 0;
  std::uint64_t seq_no = 0;
  std::uint32_t size_bytes = 0;
  SimTime enqueued_at;
  SimTime tx_start;
  SimTime tx_end;
  /// Remaining serialization time of the packet on the wire at enqueue.
  SimTime residual_at_enqueue;
  /// Serialization time of the packets already waiting in the same queue.
  SimTime ahead_at_enqueue;
  /// Completion of the previous packet served from the same queue in the
  /// current busy period (equals enqueued_at if none).
  SimTime prev_same_queue_tx_end;
  /// Most queues simultaneously active (backlogged or on the wire) between
  /// enqueue and the start of transmission.
  std::uint32_t max_active_sessions = 0;
  /// Same, counted only from prev_same_queue_tx_end on.
  std::uint32_t max_active_from_head = 0;

  SimTime wait() const { return tx_start - enqueued_at; }
  /// Enqueue to last bit on the wire.
  SimTime latency() const { return tx_end - enqueued_at; }
};

/// Egress interface: queue set + scheduler feeding one link directly (no
/// transmission FIFO after the scheduler).
enum class DropReason : std::uint8_t { tail, policer };

class EgressPort {
 public:
  using Deliver = std::function<void(Packet&&)>;
  using Drop = std::function<void(const Packet&, DropReason)>;

  EgressPort(Simulator& sim, Link& link, const QueueSetSpec& spec, Deliver deliver, Drop drop);

  /// Admits `pkt`; starts a transmission if the link is idle.
  void accept(Packet pkt);

  void set_probe(QueueId q, std::function<void(const ProbeRecord&)> sink);

  const QueueSet& queues() const { return queues_; }
  const Link& link() const { return link_; }
  std::uint64_t on_wire() const { return on_wire_; }
  std::uint64_t transmitted() const { return transmitted_; }

 private:
  void try_send();
  void finish_tx();
  std::uint32_t active_sessions() const;
  void note_activity();

  Simulator& sim_;
  Link& link_;
  QueueSet queues_;
  Deliver deliver_;
  Drop drop_;
  bool transmitting_ = false;
  std::optional<QueueId> in_service_;
  std::uint64_t on_wire_ = 0;
  std::uint64_t transmitted_ = 0;

  std::optional<QueueId> probe_queue_;
  std::function<void(const ProbeRecord&)> probe_sink_;
  std::deque<ProbeRecord> probe_waiting_;
  std::optional<ProbeRecord> probe_in_service_;
  std::optional<SimTime> probe_last_tx_end_;
};

struct NetworkCounters {
  std::uint64_t created = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped_conditioner = 0;
  std::uint64_t dropped_tail = 0;
  std::uint64_t dropped_policer = 0;

  std::uint64_t dropped() const { return dropped_conditioner + dropped_tail + dropped_policer; }
};

/// Runtime instance of a topology: egress ports on every link, the edge
/// conditioner at the edge router, CBR sources and sinks at the hosts.
class Network {
 public:
  using Observer = std::function<void(const DeliveryRecord&)>;

  /// `bottleneck` configures the topology's bottleneck egress; every other
  /// egress is a FIFO of `fifo_capacity` packets.
  Network(Simulator& sim, Topology topo, const QueueSetSpec& bottleneck, EdgeConditioner conditioner,
          std::size_t fifo_capacity);
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  /// Registers the flow route and schedules the emissions. Throws BadParam
  /// for a duplicate flow id or a missing route.
  void add_source(const CbrSource& src);
  void add_observer(Observer obs) { observers_.push_back(std::move(obs)); }

  /// Per-flow route as link indices.
  const std::vector<LinkIndex>& flow_route(FlowId f) const;

  const Topology& topology() const { return topo_; }
  EgressPort& egress(LinkIndex i) { return *ports_.at(i); }
  const EgressPort& egress(LinkIndex i) const { return *ports_.at(i); }
  EgressPort& bottleneck();
  const EdgeConditioner& conditioner() const { return conditioner_; }
  const NetworkCounters& counters() const { return counters_; }
  /// Packets sitting in a queue or propagating on a link.
  std::uint64_t in_flight() const;
  /// created == delivered + dropped + in_flight.
  bool conserved() const { return counters_.created == counters_.delivered + counters_.dropped() + in_flight(); }

  /// Delivers `pkt` to its destination host and notifies observers. Asserts
  /// (debug builds) that (flow, seq) has not been delivered before.
  DeliveryRecord sink_receive(const Packet& pkt, SimTime t);

 private:
  void emit(std::size_t source_index, std::uint64_t k);
  void arrive(Packet&& pkt);
  void forward(Packet&& pkt);

  Simulator& sim_;
  Topology topo_;
  std::vector<Link> links_;
  std::vector<std::unique_ptr<EgressPort>> ports_;
  EdgeConditioner conditioner_;
  std::vector<CbrSource> sources_;
  std::vector<std::vector<LinkIndex>> routes_;  // by flow id
  std::vector<std::vector<bool>> seen_;         // by flow id, by seq
  std::vector<Observer> observers_;
  NetworkCounters counters_;
};

}  // namespace dsim
