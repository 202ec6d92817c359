#include "dsim/sched/latency_bound.hpp"

#include "dsim/core/error.hpp"

namespace dsim {

namespace {
using u128 = unsigned __int128;

std::uint64_t ceil_div(u128 num, u128 den) { return static_cast<std::uint64_t>((num + den - 1) / den); }
}  // namespace

SimTime scfq_latency_bound(std::uint64_t session_max_bytes, std::uint64_t global_max_bytes,
                           std::uint64_t session_rate_bps, std::uint64_t link_rate_bps,
                           std::uint64_t active_sessions) {
  return scfq_latency_bound_share(session_max_bytes, global_max_bytes, session_rate_bps, link_rate_bps,
                                  link_rate_bps, active_sessions);
}

SimTime scfq_latency_bound_share(std::uint64_t session_max_bytes, std::uint64_t global_max_bytes,
                                 std::uint64_t share_num, std::uint64_t share_den, std::uint64_t link_rate_bps,
                                 std::uint64_t active_sessions) {
  if (share_num == 0 || share_den == 0) throw BadParam("session rate must be positive");
  if (link_rate_bps == 0) throw BadParam("link rate must be positive");
  if (active_sessions < 1) throw BadParam("at least one active session required");
  // 8 L_i / (r num/den) + 8 L_max (V-1) / r, over the common denominator r*num
  const u128 ns = 1'000'000'000U;
  const u128 first = static_cast<u128>(8U) * session_max_bytes * share_den * ns;
  const u128 second = static_cast<u128>(8U) * global_max_bytes * (active_sessions - 1) * share_num * ns;
  return SimTime(ceil_div(first + second, static_cast<u128>(link_rate_bps) * share_num));
}

}  // namespace dsim
