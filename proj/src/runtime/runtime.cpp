// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "emma/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emma/error.hpp"

namespace emma {

double StreamInstance::source_duration_s() const {
  double total = 0.0;
  for (const auto& chunk : source_chunks) total += chunk.duration_s;
  return total;
}

void StreamInstance::validate() const {
  if (source_chunks.empty()) {
    fail(ErrorKind::kValidation, "instance '" + id + "': source has no chunks");
  }
  for (std::size_t k = 0; k < source_chunks.size(); ++k) {
    const double d = source_chunks[k].duration_s;
    if (!(d > 0.0) || !std::isfinite(d)) {
      fail(ErrorKind::kValidation, "instance '" + id + "': chunk " + std::to_string(k) +
                                       " has non-positive duration");
    }
  }
}

void RuntimeConfig::validate() const {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    fail(ErrorKind::kArgument,
         "RuntimeConfig: threshold " + std::to_string(threshold) + " outside (0, 1)");
  }
  if (min_unit_chunk == 0 || units_per_token == 0 || max_target_len == 0) {
    fail(ErrorKind::kArgument,
         "RuntimeConfig: min_unit_chunk, units_per_token and max_target_len must be positive");
  }
  if (!(unit_duration_s >= 0.0) || read_compute_s < 0.0 || write_compute_s < 0.0) {
    fail(ErrorKind::kArgument, "RuntimeConfig: durations must be non-negative");
  }
}

Decision decide(std::span<const double> head_ps, double threshold) {
  if (head_ps.empty()) fail(ErrorKind::kArgument, "decide: no head probabilities");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    fail(ErrorKind::kArgument, "decide: threshold outside (0, 1)");
  }
  const double p = *std::min_element(head_ps.begin(), head_ps.end());
  return p < threshold ? Decision::kRead : Decision::kWrite;
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kRead: return "READ";
    case EventKind::kWrite: return "WRITE";
    case EventKind::kEmit: return "EMIT";
    case EventKind::kFinish: return "FINISH";
  }
  return "UNKNOWN";
}

StreamSession::StreamSession(const IncrementalModel& model, const StreamInstance& instance,
                             RuntimeConfig config)
    : model_(model), instance_(instance), config_(config) {
  config_.validate();
  instance_.validate();
  trace_.instance_id = instance.id;
  trace_.source_duration_s = instance.source_duration_s();
  trace_.source_chunks = instance.source_chunks.size();
}

bool StreamSession::source_exhausted() const noexcept {
  return consumed_ == instance_.source_chunks.size();
}

bool StreamSession::done() const noexcept { return trace_.reached_eos || trace_.capped; }

void StreamSession::read() {
  if (source_exhausted()) fail(ErrorKind::kProtocol, "read: source already exhausted");
  const SourceChunk& chunk = instance_.source_chunks[consumed_];
  ++consumed_;
  consumed_s_ += chunk.duration_s;
  clock_s_ += chunk.duration_s + config_.read_compute_s;
  encoded_ = model_.encode_prefix(std::span(instance_.source_chunks).first(consumed_),
                                  source_exhausted());
  trace_.events.push_back({clock_s_, EventKind::kRead, chunk.payload, std::nullopt});
}

bool StreamSession::commit_next() {
  if (consumed_ == 0) {
    fail(ErrorKind::kProtocol, "instance '" + instance_.id +
                                   "': token requested before any source was encoded");
  }
  const TokenId token = model_.next_token(encoded_, trace_.output);
  if (token == kEndOfSequence) {
    trace_.reached_eos = true;
    return false;
  }
  if (token < 0) {
    fail(ErrorKind::kProtocol,
         "instance '" + instance_.id + "': model produced invalid token " + std::to_string(token));
  }
  clock_s_ += config_.write_compute_s;
  // Guard against accumulated round-off pushing a delay past the source end.
  const double delay = source_exhausted() ? trace_.source_duration_s : consumed_s_;
  trace_.output.push_back(token);
  trace_.delays_s.push_back(delay);
  trace_.delays_chunks.push_back(consumed_);
  trace_.events.push_back({clock_s_, EventKind::kWrite, token, config_.units_per_token});
  ++pending_tokens_;
  pending_units_ += config_.units_per_token;
  return true;
}

std::size_t StreamSession::write_loop() {
  std::size_t written = 0;
  while (!done()) {
    if (trace_.output.size() >= config_.max_target_len) {
      trace_.capped = true;
      break;
    }
    const auto ps = model_.head_probabilities(encoded_, trace_.output);
    for (double p : ps) {
      if (!(p >= 0.0 && p <= 1.0)) {
        fail(ErrorKind::kProtocol, "instance '" + instance_.id +
                                       "': head probability outside [0, 1]");
      }
    }
    if (ps.empty()) {
      fail(ErrorKind::kProtocol, "instance '" + instance_.id + "': model reported no heads");
    }
    if (decide(ps, config_.threshold) == Decision::kRead) break;
    if (!commit_next()) break;
    ++written;
  }
  return written;
}

void StreamSession::emit() {
  const double playback = static_cast<double>(pending_units_) * config_.unit_duration_s;
  trace_.emissions.push_back({clock_s_, playback, pending_units_, pending_tokens_});
  trace_.events.push_back({clock_s_, EventKind::kEmit, std::nullopt, pending_units_});
  pending_tokens_ = 0;
  pending_units_ = 0;
}

void StreamSession::emit_stage() {
  if (pending_tokens_ == 0) return;
  if (pending_units_ >= config_.min_unit_chunk || done()) emit();
}

void StreamSession::drain() {
  if (!source_exhausted()) {
    fail(ErrorKind::kProtocol, "drain: source not fully consumed");
  }
  while (!done()) {
    if (trace_.output.size() >= config_.max_target_len) {
      trace_.capped = true;
      break;
    }
    if (!commit_next()) break;
    ++trace_.forced_tokens;
  }
  if (pending_tokens_ > 0) emit();
}

DecisionTrace StreamSession::finish() {
  if (!finished_) {
    trace_.events.push_back({clock_s_, EventKind::kFinish, std::nullopt, std::nullopt});
    finished_ = true;
  }
  return trace_;
}

DecisionTrace run_stream(const IncrementalModel& model, const StreamInstance& instance,
                         const RuntimeConfig& config) {
  StreamSession session(model, instance, config);
  while (!session.done() && !session.source_exhausted()) {
    session.read();
    session.write_loop();
    session.emit_stage();
  }
  // A capped session has already flushed in emit_stage.
  if (!session.done()) session.drain();
  return session.finish();
}

}  // namespace emma
