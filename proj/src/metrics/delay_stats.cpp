#include "dsim/metrics/delay_stats.hpp"

#include <string>

#include "dsim/core/error.hpp"

namespace dsim {

void DelayStats::add(std::int64_t value_ns) {
  if (count_ == 0) {
    min_ = max_ = value_ns;
  } else {
    if (value_ns < min_) min_ = value_ns;
    if (value_ns > max_) max_ = value_ns;
  }
  ++count_;
  sum_ += value_ns;
  ++exact_[value_ns];
}

double DelayStats::mean_ns() const {
  if (count_ == 0) return 0.0;
  return static_cast<double>(static_cast<long double>(sum_) / static_cast<long double>(count_));
}

std::int64_t bin_index(std::int64_t value_ns, std::int64_t unit_ns) {
  std::int64_t q = value_ns / unit_ns;
  if ((value_ns % unit_ns != 0) && (value_ns < 0)) --q;
  return q;
}

std::map<std::int64_t, std::uint64_t> DelayStats::histogram(std::int64_t unit_ns) const {
  if (unit_ns <= 0) throw BadParam("histogram bin unit must be positive");
  std::map<std::int64_t, std::uint64_t> bins;
  for (const auto& [v, n] : exact_) bins[bin_index(v, unit_ns)] += n;
  return bins;
}

void record_owd(DelayStats& st, const DeliveryRecord& rec) {
  if (!st.accepts(rec.flow_id)) return;
  if (rec.received_at < rec.created_at) {
    throw NegativeDelay("packet " + std::to_string(rec.flow_id) + "/" + std::to_string(rec.seq_no) +
                        " received before it was created");
  }
  st.add(diff_ns(rec.received_at, rec.created_at));
}

void record_ipdv(IpdvState& st, const DeliveryRecord& rec) {
  if (!st.filter.empty() && st.filter.count(rec.flow_id) == 0) return;
  if (rec.received_at < rec.created_at) {
    throw NegativeDelay("packet received before it was created");
  }
  const std::int64_t owd = diff_ns(rec.received_at, rec.created_at);
  if (st.last_owd) {
    const std::int64_t d = owd - *st.last_owd;
    st.stats_signed.add(d);
    st.stats_abs.add(d < 0 ? -d : d);
  } else {
    st.first_owd = owd;
  }
  st.last_owd = owd;
  st.last_seq[rec.flow_id] = rec.seq_no;
}

StatsReport export_stats(const DelayStats& st, std::int64_t unit_ns) {
  if (st.count() == 0) throw EmptyStats("no samples recorded");
  StatsReport r;
  r.count = st.count();
  r.mean_ns = st.mean_ns();
  r.min_ns = st.min_ns();
  r.max_ns = st.max_ns();
  r.bin_unit_ns = unit_ns > 0 ? unit_ns : st.min_ns();
  if (r.bin_unit_ns <= 0) r.bin_unit_ns = 1;  // smallest value is zero or negative
  const auto bins = st.histogram(r.bin_unit_ns);
  const double total = static_cast<double>(st.count());
  for (const auto& [k, n] : bins) {
    r.histogram.push_back(HistogramBin{k, k * r.bin_unit_ns, static_cast<double>(n) / total});
  }
  return r;
}

}  // namespace dsim
