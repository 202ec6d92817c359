#include "dsim/diffserv/edge.hpp"

#include "dsim/core/error.hpp"

namespace dsim {

EdgeConditioner::EdgeConditioner(std::vector<PolicyEntry> policies, std::optional<PolicyEntry> default_policy)
    : policies_(std::move(policies)) {
  if (default_policy) {
    default_entry_ = policies_.size();
    policies_.push_back(std::move(*default_policy));
  }
  std::set<std::string> aggregates;
  for (std::size_t i = 0; i < policies_.size(); ++i) {
    const auto& p = policies_[i];
    if (!aggregates.insert(p.aggregate_id).second) {
      throw BadParam("aggregate '" + p.aggregate_id + "' defined twice");
    }
    if (!default_entry_ || i != *default_entry_) {
      for (FlowId f : p.match) {
        if (!by_flow_.emplace(f, i).second) {
          throw BadParam("flow " + std::to_string(f) + " matched by more than one policy entry");
        }
      }
    }
    if (p.meter) {
      meters_.emplace_back(TokenBucket(p.meter->cir_bps, p.meter->cbs_bytes));
    } else {
      meters_.emplace_back(std::nullopt);
    }
  }
  counters_.resize(policies_.size());
}

ConditionResult EdgeConditioner::condition(Packet& pkt, SimTime t) {
  auto it = by_flow_.find(pkt.flow_id);
  if (it != by_flow_.end()) return apply(it->second, pkt, t);
  if (default_entry_) return apply(*default_entry_, pkt, t);
  return ConditionResult{ConditionOutcome::enqueue, pkt.dscp};
}

ConditionResult EdgeConditioner::apply(std::size_t entry, Packet& pkt, SimTime t) {
  const auto& p = policies_[entry];
  auto& c = counters_[entry];
  auto& tb = meters_[entry];
  const MeterResult verdict = tb ? meter(*tb, pkt.size_bytes, t) : MeterResult::in_profile;
  if (verdict == MeterResult::in_profile) {
    pkt.dscp = p.in_dscp;
    pkt.profile = Profile::in;
    ++c.in_profile;
    c.in_profile_bytes += pkt.size_bytes;
    return ConditionResult{ConditionOutcome::enqueue, pkt.dscp};
  }
  ++c.out_profile;
  pkt.profile = Profile::out;
  if (p.out_action == OutAction::drop) {
    ++c.dropped;
    ++total_dropped_;
    return ConditionResult{ConditionOutcome::dropped, pkt.dscp};
  }
  pkt.dscp = p.out_dscp;
  return ConditionResult{ConditionOutcome::enqueue, pkt.dscp};
}

const AggregateCounters& EdgeConditioner::counters(const std::string& aggregate_id) const {
  for (std::size_t i = 0; i < policies_.size(); ++i) {
    if (policies_[i].aggregate_id == aggregate_id) return counters_[i];
  }
  throw BadParam("unknown aggregate '" + aggregate_id + "'");
}

}  // namespace dsim
