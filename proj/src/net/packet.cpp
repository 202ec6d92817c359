#include "dsim/net/packet.hpp"

#include "dsim/core/error.hpp"

namespace dsim {

std::string_view to_string(Dscp d) {
  switch (d) {
    case Dscp::unmarked: return "unmarked";
    case Dscp::ef: return "EF";
    case Dscp::be_in: return "BE-in";
    case Dscp::be_out: return "BE-out";
  }
  return "?";
}

std::optional<Dscp> parse_dscp(std::string_view s) {
  if (s == "unmarked") return Dscp::unmarked;
  if (s == "EF") return Dscp::ef;
  if (s == "BE-in") return Dscp::be_in;
  if (s == "BE-out") return Dscp::be_out;
  return std::nullopt;
}

void validate_frame_size(std::uint32_t size_bytes) {
  if (size_bytes < kMinFrameBytes || size_bytes > kMaxFrameBytes) {
    throw BadPacket("frame size " + std::to_string(size_bytes) + " B outside [" +
                    std::to_string(kMinFrameBytes) + ", " + std::to_string(kMaxFrameBytes) + "]");
  }
}

}  // namespace dsim
