#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "dsim/core/sim_time.hpp"

namespace dsim {

using FlowId = std::uint32_t;
using NodeId = std::uint32_t;

/// Codepoint carried by a packet; selects its physical queue at the edge.
enum class Dscp : std::uint8_t { unmarked, ef, be_in, be_out };

enum class Profile : std::uint8_t { unset, in, out };

std::string_view to_string(Dscp d);
std::optional<Dscp> parse_dscp(std::string_view s);

inline constexpr std::uint32_t kMinFrameBytes = 28;
inline constexpr std::uint32_t kMaxFrameBytes = 65535;

struct Packet {
  FlowId flow_id = 0;
  std::uint64_t seq_no = 0;
  std::uint32_t size_bytes = 0;
  Dscp dscp = Dscp::unmarked;
  SimTime created_at;
  Profile profile = Profile::unset;
  NodeId src = 0;
  NodeId dst = 0;
  /// Index of the next link on the flow's route.
  std::uint8_t hop = 0;
};

/// Throws BadPacket if the frame size is outside [28, 65535].
void validate_frame_size(std::uint32_t size_bytes);

}  // namespace dsim
