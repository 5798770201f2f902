// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emma/runtime.hpp"

namespace emma {

/// Delays within this distance of the source length count as "reached the
/// end of the source" when locating the lagging cutoff.
inline constexpr double kDelayEqualityTolerance = 1e-9;

/// Average lagging. The cutoff is the first index whose delay equals the
/// source length (or the number of delays if none does), and the ideal
/// policy is (i-1) * source_len / ref_len.
///
/// Throws kArgument for empty delays or ref_len == 0, and kDomain for
/// decreasing delays or a delay beyond source_len.
double average_lagging(std::span<const double> delays, double source_len, std::size_t ref_len);

/// As average_lagging with the ideal rate source_len / max(ref_len, hyp_len).
/// hyp_len must equal the number of delays.
double length_adaptive_average_lagging(std::span<const double> delays, double source_len,
                                       std::size_t ref_len, std::size_t hyp_len);

struct Offsets {
  double start_offset_s = 0.0;
  double end_offset_s = 0.0;
};

/// Start offset is the first emission time. Chunks play back one after
/// another, each starting at max(emit time, end of previous chunk); the end
/// offset is the end of the last chunk minus the source duration.
/// Throws kEmptyOutput when nothing was emitted.
Offsets offsets(std::span<const Emission> emissions, double source_duration_s);
Offsets offsets(const DecisionTrace& trace, double source_duration_s);

/// Unit in which delays and source length are measured for AL/LAAL.
enum class DelayUnit { kSeconds, kSourceTokens };

struct InstanceLatency {
  std::string id;
  double al = 0.0;
  double laal = 0.0;
  double start_offset_s = 0.0;
  double end_offset_s = 0.0;
  /// Set when any metric could not be computed; the instance is then left
  /// out of the corpus means.
  std::optional<std::string> error;
};

struct LatencyReport {
  std::vector<InstanceLatency> per_instance;  // sorted by id
  double al = 0.0;
  double laal = 0.0;
  double start_offset_s = 0.0;
  double end_offset_s = 0.0;
  std::size_t n_scored = 0;
  std::size_t n_failures = 0;
};

InstanceLatency score_instance(const DecisionTrace& trace, std::size_t ref_len, DelayUnit unit);

/// Unweighted means over the instances without errors.
LatencyReport aggregate_latency(std::vector<InstanceLatency> per_instance);

}  // namespace emma
