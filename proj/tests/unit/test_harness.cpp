// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "emma/error.hpp"
#include "emma/harness.hpp"

using namespace emma;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::function<void()>& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message != nullptr) *message = e.what();
    return e.kind();
  }
  FAIL("expected an emma::Error");
  return ErrorKind::kArgument;
}

std::vector<StreamInstance> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_instances(in, "mem");
}

std::vector<StreamInstance> copy_corpus(std::size_t n, std::size_t len, double dur_s) {
  std::vector<StreamInstance> out;
  for (std::size_t k = 0; k < n; ++k) {
    StreamInstance inst;
    inst.id = "i" + std::to_string(k);
    for (std::size_t j = 0; j < len; ++j) {
      const TokenId t = static_cast<TokenId>((k * 7 + j * 3) % 11);
      inst.source_chunks.push_back({dur_s, t});
      inst.reference.push_back(t);
    }
    out.push_back(inst);
  }
  return out;
}

std::vector<StreamInstance> varied_corpus(std::size_t n) {
  std::vector<StreamInstance> out;
  for (std::size_t k = 0; k < n; ++k) {
    StreamInstance inst;
    inst.id = "v" + std::to_string(100 + k);
    const std::size_t len = 3 + k % 5;
    for (std::size_t j = 0; j < len; ++j) {
      const TokenId t = static_cast<TokenId>((k + j * 5) % 9);
      inst.source_chunks.push_back({0.12 + 0.04 * static_cast<double>((k + j) % 4), t});
      inst.reference.push_back(t);
    }
    out.push_back(inst);
  }
  return out;
}

Manifest manifest_for(ModelKind kind) {
  Manifest m;
  m.model.kind = kind;
  m.seed = 17;
  return m;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("emma_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("instance ingestion") {
  CHECK(parse("").empty());
  CHECK(parse("\n\n").empty());
  const auto one = parse(
      R"({"id": "a", "source": [{"dur_ms": 320, "token": 3}], "reference": [3, 4]})"
      "\n");
  REQUIRE(one.size() == 1);
  CHECK(one[0].source_chunks[0].duration_s == doctest::Approx(0.32));
  CHECK(one[0].source_chunks[0].payload == 3);
  CHECK(one[0].reference == std::vector<TokenId>{3, 4});
}

TEST_CASE("instance errors") {
  std::string msg;
  CHECK(kind_of([] { parse(R"({"id": "z", "source": [{"dur_ms": 0, "token": 1}], "reference": []})"); },
                &msg) == ErrorKind::kValidation);
  CHECK(msg.find("'z'") != std::string::npos);

  CHECK(kind_of(
            [] {
              parse(R"({"id": "a", "source": [{"dur_ms": 10, "token": 1}], "reference": [1]})"
                    "\n{not json\n");
            },
            &msg) == ErrorKind::kParse);
  CHECK(msg.find("mem:2") != std::string::npos);

  CHECK(kind_of([] {
          parse(R"({"id": "a", "source": [{"dur_ms": 10, "token": 1}], "reference": [1]})"
                "\n"
                R"({"id": "a", "source": [{"dur_ms": 10, "token": 1}], "reference": [1]})");
        }) == ErrorKind::kValidation);
  CHECK(kind_of([] { parse(R"({"id": "e", "source": [], "reference": [1]})"); }) ==
        ErrorKind::kValidation);
  CHECK(kind_of([] { load_instances("/nonexistent/emma.jsonl"); }) == ErrorKind::kIo);
}

TEST_CASE("manifest parsing") {
  const Manifest m = parse_manifest(R"({
      "instances": "corpus.jsonl", "seed": 5, "latency_unit": "tokens", "workers": 3,
      "chunk_ms": 250,
      "model": {"kind": "scripted_stochastic",
                "parameters": {"heads": 3, "temperature": 0.5, "lookahead": 2,
                               "vocab_map": {"1": 9}}},
      "runtime": {"threshold": 0.6, "min_unit_chunk": 4, "units_per_token": 2},
      "sweep": [0.3, 0.8]})",
                                    "/base");
  CHECK(m.instances == fs::path("/base/corpus.jsonl"));
  CHECK(m.seed == 5);
  CHECK(m.latency_unit == DelayUnit::kSourceTokens);
  CHECK(m.workers == 3);
  CHECK(*m.chunk_ms == 250.0);
  CHECK(m.model.kind == ModelKind::kScriptedStochastic);
  CHECK(m.model.stochastic.heads == 3);
  CHECK(m.model.stochastic.temperature == 0.5);
  CHECK(m.model.stochastic.lookahead == 2);
  CHECK(m.model.vocab_map.at(1) == 9);
  CHECK(m.runtime.threshold == 0.6);
  CHECK(m.runtime.min_unit_chunk == 4);
  CHECK(m.runtime.units_per_token == 2);
  CHECK(m.sweep == std::vector<double>{0.3, 0.8});
}

TEST_CASE("manifest errors") {
  CHECK(kind_of([] { parse_manifest("{", "."); }) == ErrorKind::kParse);
  CHECK(kind_of([] {
          parse_manifest(R"({"instances": "x", "model": {"kind": "nope"}})", ".");
        }) == ErrorKind::kValidation);
  CHECK(kind_of([] {
          parse_manifest(R"({"instances": "x", "model": {"kind": "scripted_offline"},
                             "runtime": {"threshold": 1.5}})",
                         ".");
        }) == ErrorKind::kValidation);
  CHECK(kind_of([] {
          parse_manifest(R"({"instances": "x", "model": {"kind": "scripted_offline"},
                             "latency_unit": "minutes"})",
                         ".");
        }) == ErrorKind::kValidation);
  CHECK(kind_of([] { load_manifest("/nonexistent/manifest.json"); }) == ErrorKind::kIo);
}

TEST_CASE("wait-2 corpus in seconds and tokens") {
  const auto corpus = copy_corpus(10, 6, 1.0);
  Manifest m = manifest_for(ModelKind::kScriptedWaitK);
  m.model.k = 2;
  for (DelayUnit unit : {DelayUnit::kSeconds, DelayUnit::kSourceTokens}) {
    m.latency_unit = unit;
    const CorpusResult r = evaluate_corpus(m, corpus);
    CHECK(r.latency.al == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.quality.bleu == doctest::Approx(100.0));
    CHECK(r.n_instances == 10);
    CHECK(r.n_failures == 0);
  }
}

TEST_CASE("chunk_ms rescales every chunk") {
  const auto corpus = copy_corpus(4, 6, 1.0);
  Manifest m = manifest_for(ModelKind::kScriptedWaitK);
  m.chunk_ms = 500.0;
  CHECK(evaluate_corpus(m, corpus).latency.al == doctest::Approx(1.0));
}

TEST_CASE("offline corpus lags by the mean duration") {
  const auto corpus = varied_corpus(9);
  double mean = 0.0;
  for (const auto& inst : corpus) mean += inst.source_duration_s() / 9.0;
  const CorpusResult r = evaluate_corpus(manifest_for(ModelKind::kScriptedOffline), corpus);
  CHECK(r.latency.al == doctest::Approx(mean).epsilon(1e-12));
  CHECK(r.latency.laal == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("worker count does not change results") {
  const auto corpus = varied_corpus(24);
  const std::vector<double> thresholds{0.4, 0.5, 0.6, 0.7};
  Manifest m = manifest_for(ModelKind::kScriptedStochastic);
  m.runtime.min_unit_chunk = 3;
  m.workers = 1;
  const std::string serial = format_report(threshold_sweep(m, corpus, thresholds), ReportFormat::kCsv);
  m.workers = 8;
  const std::string parallel =
      format_report(threshold_sweep(m, corpus, thresholds), ReportFormat::kCsv);
  CHECK(serial == parallel);
}

TEST_CASE("threshold sweeps") {
  const auto corpus = varied_corpus(16);
  const std::vector<double> thresholds{0.7, 0.4, 0.6, 0.5};
  const SweepReport waitk = threshold_sweep(manifest_for(ModelKind::kScriptedWaitK), corpus,
                                            thresholds);
  REQUIRE(waitk.rows.size() == 4);
  CHECK(waitk.rows[0].threshold == 0.4);
  for (const auto& row : waitk.rows) {
    CHECK(row.al == waitk.rows[0].al);
    CHECK(row.bleu == waitk.rows[0].bleu);
  }
  const SweepReport stochastic =
      threshold_sweep(manifest_for(ModelKind::kScriptedStochastic), corpus, thresholds);
  for (std::size_t k = 1; k < stochastic.rows.size(); ++k) {
    CHECK(stochastic.rows[k].al >= stochastic.rows[k - 1].al);
  }
  const std::vector<double> single{0.5};
  const std::vector<double> outside{0.5, 1.0};
  const Manifest m = manifest_for(ModelKind::kScriptedWaitK);
  CHECK(kind_of([&] { threshold_sweep(m, corpus, single); }) == ErrorKind::kArgument);
  CHECK(kind_of([&] { threshold_sweep(m, corpus, outside); }) == ErrorKind::kArgument);
}

TEST_CASE("failures are counted and a fully failed corpus is an error") {
  auto corpus = copy_corpus(3, 4, 0.2);
  Manifest m = manifest_for(ModelKind::kToyTrained);
  m.model.toy.vocab = 2;
  m.model.toy.steps = 1;
  for (auto& inst : corpus) {
    for (auto& c : inst.source_chunks) c.payload = 5;
  }
  CHECK(kind_of([&] { evaluate_corpus(m, corpus); }) == ErrorKind::kCorpusFailure);

  corpus[0].source_chunks.assign(4, {0.2, 1});
  corpus[0].reference.assign(4, 1);
  const CorpusResult partial = evaluate_corpus(m, corpus);
  CHECK(partial.n_failures == 2);
  CHECK(partial.outcomes[1].error.has_value());
  CHECK(partial.outcomes[0].trace.has_value());
}

TEST_CASE("trace directory receives one event log per instance") {
  const auto corpus = copy_corpus(3, 4, 0.2);
  const fs::path dir = scratch_dir("traces");
  Manifest m = manifest_for(ModelKind::kScriptedWaitK);
  m.trace_dir = dir;
  evaluate_corpus(m, corpus);
  for (const auto& inst : corpus) CHECK(fs::exists(dir / (inst.id + ".jsonl")));
  fs::remove_all(dir);
}

TEST_CASE("report formats") {
  const std::string empty = format_report({}, ReportFormat::kCsv);
  CHECK(empty == "threshold,bleu,al,laal,start_offset,end_offset,n_instances,n_failures\n");

  const SweepReport report = threshold_sweep(manifest_for(ModelKind::kScriptedStochastic),
                                             varied_corpus(8), std::vector<double>{0.4, 0.6});
  const std::string csv = format_report(report, ReportFormat::kCsv);
  const auto json = nlohmann::json::parse(format_report(report, ReportFormat::kJson));
  REQUIRE(json["rows"].size() == 2);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  for (const auto& row : json["rows"]) {
    std::getline(lines, line);
    std::istringstream cells(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(cells, cell, ',')) values.push_back(std::stod(cell));
    REQUIRE(values.size() == 8);
    CHECK(values[0] == doctest::Approx(row["threshold"].get<double>()));
    CHECK(values[1] == doctest::Approx(row["bleu"].get<double>()));
    CHECK(values[2] == doctest::Approx(row["al"].get<double>()));
    CHECK(values[3] == doctest::Approx(row["laal"].get<double>()));
    CHECK(values[6] == row["n_instances"].get<double>());
  }
  CHECK(json.contains("bleu_signature"));

  const fs::path dir = scratch_dir("report");
  emit_report(report, ReportFormat::kCsv, dir / "r.csv");
  std::ifstream in(dir / "r.csv");
  std::stringstream back;
  back << in.rdbuf();
  CHECK(back.str() == csv);
  std::string msg;
  CHECK(kind_of([&] { emit_report(report, ReportFormat::kCsv, "/nonexistent/dir/r.csv"); },
                &msg) == ErrorKind::kIo);
  CHECK(msg.find("/nonexistent/dir/r.csv") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("toy policy training") {
  ToyTrainingConfig config;
  config.steps = 60;
  config.settings = {{0.0, 0.0}};
  CHECK(kind_of([&] { train_toy_policy(config); }) == ErrorKind::kArgument);
  config.settings = {{0.0, 0.0}, {0.5, 0.0}};
  const TrainingReport report = train_toy_policy(config);
  REQUIRE(report.runs.size() == 2);
  const auto& plain = report.runs[0];
  CHECK(plain.log.size() == config.steps + 1);
  CHECK(plain.final_terms.loss < plain.initial.loss);
  CHECK(report.runs[1].final_terms.mean_delay <= plain.final_terms.mean_delay);
  CHECK(plain.initial.loss == doctest::Approx(report.runs[1].initial.nll));
  const auto json = nlohmann::json::parse(format_training_report(report));
  CHECK(json["runs"].size() == 2);
}

TEST_CASE("bundled demo manifests load and run") {
  const fs::path data = fs::path(EMMA_SOURCE_DIR) / "data";
  for (const char* name : {"waitk_manifest.json", "stochastic_manifest.json",
                           "offline_manifest.json"}) {
    const Manifest m = load_manifest(data / name);
    const SweepReport r = threshold_sweep(m, m.sweep);
    CHECK(r.rows.size() == m.sweep.size());
    for (const auto& row : r.rows) CHECK(row.n_failures == 0);
  }
}

}  // TEST_SUITE
