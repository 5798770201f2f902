// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <string>

#include "emma/error.hpp"
#include "emma/metrics.hpp"

namespace emma {

namespace {

double lagging(std::span<const double> delays, double source_len, double ideal_rate_denominator) {
  std::size_t cutoff = delays.size();
  for (std::size_t i = 0; i < delays.size(); ++i) {
    if (std::abs(delays[i] - source_len) <= kDelayEqualityTolerance) {
      cutoff = i + 1;
      break;
    }
  }
  const double rate = source_len / ideal_rate_denominator;
  double total = 0.0;
  for (std::size_t i = 0; i < cutoff; ++i) {
    total += delays[i] - static_cast<double>(i) * rate;
  }
  return total / static_cast<double>(cutoff);
}

void check_delays(std::span<const double> delays, double source_len, std::size_t ref_len) {
  if (delays.empty()) fail(ErrorKind::kArgument, "average lagging: no delays");
  if (ref_len == 0) fail(ErrorKind::kArgument, "average lagging: empty reference");
  if (!(source_len > 0.0)) fail(ErrorKind::kArgument, "average lagging: non-positive source length");
  for (std::size_t i = 0; i < delays.size(); ++i) {
    if (i > 0 && delays[i] < delays[i - 1]) {
      fail(ErrorKind::kDomain, "average lagging: delay " + std::to_string(i + 1) +
                                   " decreases");
    }
    if (delays[i] > source_len + kDelayEqualityTolerance || delays[i] < 0.0) {
      fail(ErrorKind::kDomain, "average lagging: delay " + std::to_string(i + 1) +
                                   " outside [0, source length]");
    }
  }
}

}  // namespace

double average_lagging(std::span<const double> delays, double source_len, std::size_t ref_len) {
  check_delays(delays, source_len, ref_len);
  return lagging(delays, source_len, static_cast<double>(ref_len));
}

double length_adaptive_average_lagging(std::span<const double> delays, double source_len,
                                       std::size_t ref_len, std::size_t hyp_len) {
  check_delays(delays, source_len, ref_len);
  if (hyp_len != delays.size()) {
    fail(ErrorKind::kArgument, "LAAL: hypothesis length " + std::to_string(hyp_len) +
                                   " differs from " + std::to_string(delays.size()) + " delays");
  }
  return lagging(delays, source_len, static_cast<double>(std::max(ref_len, hyp_len)));
}

Offsets offsets(std::span<const Emission> emissions, double source_duration_s) {
  if (emissions.empty()) fail(ErrorKind::kEmptyOutput, "offsets: no emitted output");
  double playback_end = 0.0;
  for (const Emission& e : emissions) {
    playback_end = std::max(e.emit_time_s, playback_end) + e.playback_duration_s;
  }
  return Offsets{emissions.front().emit_time_s, playback_end - source_duration_s};
}

Offsets offsets(const DecisionTrace& trace, double source_duration_s) {
  return offsets(trace.emissions, source_duration_s);
}

InstanceLatency score_instance(const DecisionTrace& trace, std::size_t ref_len, DelayUnit unit) {
  InstanceLatency out;
  out.id = trace.instance_id;
  try {
    std::vector<double> delays;
    double source_len = 0.0;
    if (unit == DelayUnit::kSeconds) {
      delays = trace.delays_s;
      source_len = trace.source_duration_s;
    } else {
      delays.assign(trace.delays_chunks.begin(), trace.delays_chunks.end());
      source_len = static_cast<double>(trace.source_chunks);
    }
    out.al = average_lagging(delays, source_len, ref_len);
    out.laal = length_adaptive_average_lagging(delays, source_len, ref_len, delays.size());
    const Offsets o = offsets(trace, trace.source_duration_s);
    out.start_offset_s = o.start_offset_s;
    out.end_offset_s = o.end_offset_s;
  } catch (const Error& e) {
    out.error = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return out;
}

LatencyReport aggregate_latency(std::vector<InstanceLatency> per_instance) {
  std::sort(per_instance.begin(), per_instance.end(),
            [](const InstanceLatency& a, const InstanceLatency& b) { return a.id < b.id; });
  LatencyReport report;
  for (const auto& item : per_instance) {
    if (item.error) {
      ++report.n_failures;
      continue;
    }
    ++report.n_scored;
    report.al += item.al;
    report.laal += item.laal;
    report.start_offset_s += item.start_offset_s;
    report.end_offset_s += item.end_offset_s;
  }
  if (report.n_scored > 0) {
    const double n = static_cast<double>(report.n_scored);
    report.al /= n;
    report.laal /= n;
    report.start_offset_s /= n;
    report.end_offset_s /= n;
  }
  report.per_instance = std::move(per_instance);
  return report;
}

}  // namespace emma
