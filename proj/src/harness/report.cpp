// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <fstream>
#include <string>

#include "emma/error.hpp"
#include "emma/harness.hpp"

namespace emma {

namespace {

constexpr const char* kCsvHeader =
    "threshold,bleu,al,laal,start_offset,end_offset,n_instances,n_failures";
constexpr const char* kBleuSignature =
    "nrefs:1|case:mixed|eff:no|tok:13a-simplified|smooth:exp";

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  // Avoid "-0.000000" so equal values print identically.
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string csv(const SweepReport& report) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : report.rows) {
    out += fixed6(r.threshold) + ',' + fixed6(r.bleu) + ',' + fixed6(r.al) + ',' +
           fixed6(r.laal) + ',' + fixed6(r.start_offset) + ',' + fixed6(r.end_offset) + ',' +
           std::to_string(r.n_instances) + ',' + std::to_string(r.n_failures) + '\n';
  }
  return out;
}

std::string json(const SweepReport& report) {
  std::string out = "{\n  \"bleu_signature\": \"";
  out += kBleuSignature;
  out += "\",\n  \"rows\": [";
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    const auto& r = report.rows[k];
    out += k == 0 ? "\n" : ",\n";
    out += "    {\"threshold\": " + fixed6(r.threshold) + ", \"bleu\": " + fixed6(r.bleu) +
           ", \"al\": " + fixed6(r.al) + ", \"laal\": " + fixed6(r.laal) +
           ", \"start_offset\": " + fixed6(r.start_offset) +
           ", \"end_offset\": " + fixed6(r.end_offset) +
           ", \"n_instances\": " + std::to_string(r.n_instances) +
           ", \"n_failures\": " + std::to_string(r.n_failures) + "}";
  }
  out += report.rows.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

std::string terms_json(const ObjectiveTerms& t) {
  return "{\"loss\": " + fixed6(t.loss) + ", \"nll\": " + fixed6(t.nll) +
         ", \"latency\": " + fixed6(t.latency) + ", \"variance\": " + fixed6(t.variance) +
         ", \"mean_delay\": " + fixed6(t.mean_delay) +
         ", \"mean_variance\": " + fixed6(t.mean_variance) + "}";
}

}  // namespace

std::string format_report(const SweepReport& report, ReportFormat format) {
  return format == ReportFormat::kCsv ? csv(report) : json(report);
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) fail(ErrorKind::kIo, "failed writing " + path.string());
}

void emit_report(const SweepReport& report, ReportFormat format,
                 const std::filesystem::path& path) {
  write_text_file(path, format_report(report, format));
}

std::string format_training_report(const TrainingReport& report) {
  const auto& c = report.config;
  std::string out = "{\n  \"config\": {\"source_len\": " + std::to_string(c.source_len) +
                    ", \"target_len\": " + std::to_string(c.target_len) +
                    ", \"vocab\": " + std::to_string(c.vocab) +
                    ", \"state_dim\": " + std::to_string(c.state_dim) +
                    ", \"heads\": " + std::to_string(c.heads) +
                    ", \"steps\": " + std::to_string(c.steps) +
                    ", \"learning_rate\": " + fixed6(c.learning_rate) +
                    ", \"seed\": " + std::to_string(c.seed) + "},\n  \"runs\": [";
  for (std::size_t k = 0; k < report.runs.size(); ++k) {
    const auto& run = report.runs[k];
    out += k == 0 ? "\n" : ",\n";
    out += "    {\"lambda_latency\": " + fixed6(run.weights.latency) +
           ", \"lambda_variance\": " + fixed6(run.weights.variance) +
           ",\n     \"initial\": " + terms_json(run.initial) +
           ",\n     \"final\": " + terms_json(run.final_terms) + ",\n     \"log\": [";
    for (std::size_t s = 0; s < run.log.size(); ++s) {
      const auto& step = run.log[s];
      out += s == 0 ? "\n" : ",\n";
      out += "       {\"step\": " + std::to_string(step.step) + ", \"loss\": " + fixed6(step.loss) +
             ", \"nll\": " + fixed6(step.nll) + ", \"mean_delay\": " + fixed6(step.mean_delay) +
             ", \"mean_variance\": " + fixed6(step.mean_variance) + "}";
    }
    out += run.log.empty() ? "]}" : "\n     ]}";
  }
  out += report.runs.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

}  // namespace emma
