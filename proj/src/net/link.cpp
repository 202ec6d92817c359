#include "dsim/net/link.hpp"

#include <string>

#include "dsim/core/error.hpp"

namespace dsim {

SimTime transmit(Link& link, const Packet& pkt, SimTime t) {
  if (t < link.busy_until) {
    throw LinkBusy("link " + std::to_string(link.from) + "->" + std::to_string(link.to) +
                   " busy until " + std::to_string(link.busy_until.ticks()) + " ns, transmit at " +
                   std::to_string(t.ticks()) + " ns");
  }
  validate_frame_size(pkt.size_bytes);
  const SimTime done = t + link.tx_time(pkt.size_bytes);
  link.busy_until = done;
  return done + link.prop_delay;
}

}  // namespace dsim
