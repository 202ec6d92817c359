#include "dsim/net/cbr_source.hpp"

#include "dsim/core/error.hpp"
#include "dsim/net/rng.hpp"

namespace dsim {

std::uint64_t CbrSource::emission_count() const {
  if (stop_time <= start_time) return 0;
  const std::uint64_t span = (stop_time - start_time).ticks();
  const std::uint64_t g = gap().ticks();
  return (span + g - 1) / g;
}

std::vector<CbrSource> spawn_background(const BackgroundSpec& spec, std::uint64_t rng_seed) {
  if (spec.rate_lo_bps > spec.rate_hi_bps) throw BadRange("background rate range inverted");
  if (spec.rate_lo_bps == 0) throw BadRange("background rate must be positive");
  if (spec.start_lo > spec.start_hi) throw BadRange("background start range inverted");
  if (spec.src_nodes.empty() || spec.dst_nodes.empty()) throw BadRange("background needs source and sink nodes");
  if (spec.target_load_bps == 0 && spec.count < 1) throw BadRange("background needs at least one source");
  const bool by_load = spec.target_load_bps > 0;
  if (spec.sizes.empty() || (spec.sizes.size() != 1 && (by_load || spec.sizes.size() != spec.count))) {
    throw BadRange("background size schedule must have 1 or `count` entries");
  }
  for (auto s : spec.sizes) validate_frame_size(s);

  Rng rng(rng_seed);
  std::vector<CbrSource> out;
  std::uint64_t load = 0;
  for (std::uint32_t i = 0;; ++i) {
    if (by_load ? load >= spec.target_load_bps : i >= spec.count) break;
    CbrSource s;
    s.flow_id = spec.first_flow_id + i;
    s.src = spec.src_nodes[i % spec.src_nodes.size()];
    s.dst = spec.dst_nodes[i % spec.dst_nodes.size()];
    s.rate_bps = rng.uniform(spec.rate_lo_bps, spec.rate_hi_bps);
    s.start_time = SimTime(rng.uniform(spec.start_lo.ticks(), spec.start_hi.ticks()));
    s.packet_size_bytes = spec.sizes.size() == 1 ? spec.sizes[0] : spec.sizes[i];
    s.stop_time = spec.stop_time;
    load += s.rate_bps;
    out.push_back(s);
  }
  return out;
}

std::vector<std::uint32_t> stepped_sizes(std::uint32_t first, std::uint32_t last, std::uint32_t step) {
  if (step == 0 || first > last) throw BadRange("invalid size schedule");
  std::vector<std::uint32_t> v;
  for (std::uint32_t s = first; s <= last; s += step) v.push_back(s);
  return v;
}

}  // namespace dsim
