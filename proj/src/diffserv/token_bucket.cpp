#include "dsim/diffserv/token_bucket.hpp"

#include <string>

#include "dsim/core/error.hpp"

namespace dsim {

TokenBucket::TokenBucket(std::uint64_t cir_bps, std::uint64_t cbs_bytes, SimTime start)
    : cir_bps_(cir_bps), cbs_bytes_(cbs_bytes), capacity_(cbs_bytes * kScale), tokens_(capacity_), last_update_(start) {
  if (cir_bps == 0) throw BadParam("token bucket CIR must be positive");
  if (cbs_bytes == 0 || cbs_bytes > (~0ULL) / kScale) throw BadParam("token bucket CBS out of range");
}

void TokenBucket::refill(SimTime t) {
  if (t < last_update_) {
    throw ClockRegression("meter update at " + std::to_string(t.ticks()) + " ns precedes last update at " +
                          std::to_string(last_update_.ticks()) + " ns");
  }
  const unsigned __int128 added = static_cast<unsigned __int128>(cir_bps_) * (t - last_update_).ticks();
  const std::uint64_t room = capacity_ - tokens_;
  tokens_ = added >= room ? capacity_ : tokens_ + static_cast<std::uint64_t>(added);
  last_update_ = t;
}

MeterResult TokenBucket::meter(std::uint32_t size_bytes, SimTime t) {
  refill(t);
  const std::uint64_t need = static_cast<std::uint64_t>(size_bytes) * kScale;
  if (tokens_ >= need) {
    tokens_ -= need;
    return MeterResult::in_profile;
  }
  return MeterResult::out_profile;
}

}  // namespace dsim
