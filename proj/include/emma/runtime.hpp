// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

// Streaming read/write state machine. The runtime consumes timed source
// chunks one at a time, re-encodes the whole consumed prefix, and keeps
// writing target tokens while the minimum per-head stepwise probability
// stays at or above the decision threshold. Written tokens are converted to
// acoustic units at a fixed rate and released in chunks of at least
// min_unit_chunk units.
//
// The simulated clock advances with consumed source seconds (plus optional
// per-read/per-write compute hooks, zero by default).

#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emma/matrix.hpp"

namespace emma {

using TokenId = int;
inline constexpr TokenId kEndOfSequence = -1;

struct SourceChunk {
  double duration_s = 0.0;
  TokenId payload = 0;
};

struct StreamInstance {
  std::string id;
  std::vector<SourceChunk> source_chunks;
  std::vector<TokenId> reference;

  double source_duration_s() const;
  /// Positive durations and at least one chunk; throws kValidation.
  void validate() const;
};

struct RuntimeConfig {
  double threshold = 0.5;
  std::size_t min_unit_chunk = 1;
  std::size_t units_per_token = 1;
  double unit_duration_s = 0.020;
  std::size_t max_target_len = 256;
  double read_compute_s = 0.0;
  double write_compute_s = 0.0;

  void validate() const;
};

/// What the model sees after encoding a source prefix.
struct EncoderState {
  Matrix h;
  std::size_t consumed = 0;
  bool source_finished = false;
};

/// Behavioral contract of a streaming model. Implementations are immutable
/// during a run; identical call histories produce identical answers.
class IncrementalModel {
 public:
  virtual ~IncrementalModel() = default;

  /// Encodes the whole consumed prefix from scratch.
  virtual EncoderState encode_prefix(std::span<const SourceChunk> consumed,
                                     bool source_finished) const = 0;
  /// One stepwise probability per head for the next target token.
  virtual std::vector<double> head_probabilities(const EncoderState& state,
                                                 std::span<const TokenId> prefix) const = 0;
  /// The next target token, or kEndOfSequence.
  virtual TokenId next_token(const EncoderState& state, std::span<const TokenId> prefix) const = 0;
};

/// Builds a model for one instance (lets models derive per-instance seeds).
using ModelFactory = std::function<std::unique_ptr<IncrementalModel>(const StreamInstance&)>;

enum class Decision { kRead, kWrite };

/// WRITE iff min(head_ps) >= threshold. Throws kArgument for an empty head
/// list or a threshold outside (0, 1).
Decision decide(std::span<const double> head_ps, double threshold);

enum class EventKind { kRead, kWrite, kEmit, kFinish };

std::string_view to_string(EventKind kind);

struct TraceEvent {
  double sim_time_s = 0.0;
  EventKind kind = EventKind::kRead;
  std::optional<TokenId> token;
  std::optional<std::size_t> units;
};

struct Emission {
  double emit_time_s = 0.0;
  double playback_duration_s = 0.0;
  std::size_t units = 0;
  std::size_t tokens = 0;
};

struct DecisionTrace {
  std::string instance_id;
  std::vector<TraceEvent> events;
  std::vector<TokenId> output;
  /// Source seconds consumed when each output token was written.
  std::vector<double> delays_s;
  /// Source chunks consumed when each output token was written.
  std::vector<std::size_t> delays_chunks;
  std::vector<Emission> emissions;
  double source_duration_s = 0.0;
  std::size_t source_chunks = 0;
  /// Tokens written by the forced tail after the source ran out.
  std::size_t forced_tokens = 0;
  bool reached_eos = false;
  /// The run hit max_target_len without an end-of-sequence token.
  bool capped = false;
};

/// One instance being streamed. run_stream drives it; the individual stages
/// are public so tests can step through them.
class StreamSession {
 public:
  StreamSession(const IncrementalModel& model, const StreamInstance& instance,
                RuntimeConfig config);

  bool source_exhausted() const noexcept;
  /// End of sequence reached or output capped.
  bool done() const noexcept;

  /// Consumes the next chunk and re-encodes the prefix.
  void read();
  /// Threshold-gated write loop; returns the number of tokens written.
  std::size_t write_loop();
  /// Emits pending units when they reach min_unit_chunk or the sequence ended.
  void emit_stage();
  /// Requires an exhausted source. Writes the remaining tokens with the
  /// threshold bypassed, then flushes any pending units as one last chunk.
  void drain();
  /// Appends the FINISH event and hands over the trace.
  DecisionTrace finish();

  const DecisionTrace& trace() const noexcept { return trace_; }
  std::size_t pending_units() const noexcept { return pending_units_; }
  std::size_t pending_tokens() const noexcept { return pending_tokens_; }

 private:
  /// Asks the model for one token and commits it. Returns false on EOS.
  bool commit_next();
  void emit();

  const IncrementalModel& model_;
  const StreamInstance& instance_;
  RuntimeConfig config_;
  DecisionTrace trace_;
  EncoderState encoded_;
  std::size_t consumed_ = 0;
  double consumed_s_ = 0.0;
  double clock_s_ = 0.0;
  std::size_t pending_tokens_ = 0;
  std::size_t pending_units_ = 0;
  bool finished_ = false;
};

DecisionTrace run_stream(const IncrementalModel& model, const StreamInstance& instance,
                         const RuntimeConfig& config);

/// One JSON object per event: {"time", "kind", "token", "units"}.
void write_trace_jsonl(const DecisionTrace& trace, std::ostream& out);

}  // namespace emma
