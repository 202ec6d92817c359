#pragma once

#include <cstdint>

#include "dsim/core/sim_time.hpp"

namespace dsim {

/// Worst-case SCFQ latency for session i:
///   8*L_i/rho_i + (8*L_max/r) * (V - 1)
/// with sizes in bytes and rates in bits per second, rounded up to whole
/// nanoseconds. Throws BadParam unless rho_i > 0, r > 0 and V >= 1.
SimTime scfq_latency_bound(std::uint64_t session_max_bytes, std::uint64_t global_max_bytes,
                           std::uint64_t session_rate_bps, std::uint64_t link_rate_bps,
                           std::uint64_t active_sessions);

/// Same bound for a session rate given as an exact fraction
/// num/den of the link rate (rho_i = r * num / den).
SimTime scfq_latency_bound_share(std::uint64_t session_max_bytes, std::uint64_t global_max_bytes,
                                 std::uint64_t share_num, std::uint64_t share_den, std::uint64_t link_rate_bps,
                                 std::uint64_t active_sessions);

}  // namespace dsim
