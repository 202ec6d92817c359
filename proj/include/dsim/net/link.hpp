#pragma once

#include <cstdint>

#include "dsim/core/sim_time.hpp"
#include "dsim/net/packet.hpp"

namespace dsim {

/// Unidirectional point-to-point pipe. Serializes one packet at a time.
struct Link {
  NodeId from = 0;
  NodeId to = 0;
  std::uint64_t rate_bps = 0;
  SimTime prop_delay;
  SimTime busy_until;

  bool idle_at(SimTime t) const { return t >= busy_until; }
  SimTime tx_time(std::uint32_t size_bytes) const { return transmission_time(size_bytes, rate_bps); }
};

/// Starts serializing `pkt` at `t`; returns the arrival time of its last bit at
/// the far end. Throws LinkBusy if the link is still transmitting at `t`.
SimTime transmit(Link& link, const Packet& pkt, SimTime t);

}  // namespace dsim
