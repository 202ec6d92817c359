#pragma once

#include <cstdint>
#include <vector>

#include "dsim/core/sim_time.hpp"
#include "dsim/net/packet.hpp"

namespace dsim {

/// Constant-bit-rate generator: one packet of fixed size every
/// ceil(8*size*1e9/rate) ns, first at start_time, none at or after stop_time.
struct CbrSource {
  FlowId flow_id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint64_t rate_bps = 0;
  std::uint32_t packet_size_bytes = 0;
  SimTime start_time;
  SimTime stop_time;

  SimTime gap() const { return transmission_time(packet_size_bytes, rate_bps); }
  /// Number of emissions in [start_time, stop_time).
  std::uint64_t emission_count() const;
};

/// Randomized background population. Each source draws its rate, then its
/// start time, from the seeded generator. `sizes` holds either one size for
/// every source or exactly one size per source (a stepped schedule).
struct BackgroundSpec {
  std::uint32_t count = 1;
  std::uint64_t rate_lo_bps = 0;
  std::uint64_t rate_hi_bps = 0;
  SimTime start_lo;
  SimTime start_hi;
  std::vector<std::uint32_t> sizes;
  /// When set, sources are drawn until their summed rate reaches this load;
  /// `count` is then ignored.
  std::uint64_t target_load_bps = 0;
  FlowId first_flow_id = 0;
  /// Sources and sinks are assigned round-robin.
  std::vector<NodeId> src_nodes;
  std::vector<NodeId> dst_nodes;
  SimTime stop_time;
};

/// Throws BadRange on inverted ranges, empty node lists or a size schedule
/// whose length matches neither 1 nor `count`.
std::vector<CbrSource> spawn_background(const BackgroundSpec& spec, std::uint64_t rng_seed);

/// 64, 128, ..., 1472: the stepped per-flow sizes used for the mixed background.
std::vector<std::uint32_t> stepped_sizes(std::uint32_t first, std::uint32_t last, std::uint32_t step);

}  // namespace dsim
