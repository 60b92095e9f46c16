// Copyright 2026 The refmail Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <atomic>
#include <sstream>

#include "commands.hpp"
#include "refmail/service/config.hpp"
#include "refmail/service/metrics.hpp"
#include "refmail/service/pipeline.hpp"
#include "refmail/service/scanner.hpp"
#include "test_support.hpp"

namespace refmail::service {
namespace {

// ---------------------------------------------------------------- config

TEST(Config, ParsesSectionsCommentsAndQuotes) {
  const auto v = parse_config_text(
      "# top\nthreshold = 0.9\nrequire_action=false  # trailing\n[adapter]\nkey = \"a # b\"\n");
  EXPECT_EQ(v.at("threshold"), "0.9");
  EXPECT_EQ(v.at("require_action"), "false");
  EXPECT_EQ(v.at("adapter.key"), "a # b");
  EXPECT_THROW(parse_config_text("novalue\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[open\n"), ConfigError);
}

TEST(Config, ApplyAndValidate) {
  ScanConfig c;
  apply_config(c, {{"threshold", "0.75"}, {"workers", "4"}, {"require_action", "no"}, {"format", "mbox"}});
  EXPECT_DOUBLE_EQ(c.threshold, 0.75);
  EXPECT_EQ(c.workers, 4u);
  EXPECT_FALSE(c.require_action);
  EXPECT_EQ(c.format, ingest::InputFormat::kMbox);
  EXPECT_THROW(apply_config(c, {{"bogus", "1"}}), ConfigError);
  EXPECT_THROW(apply_config(c, {{"format", "pdf"}}), ConfigError);
  EXPECT_THROW(apply_config(c, {{"threshold", "abc"}}), ConfigError);
  c.threshold = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c.threshold = 0.5;
  c.workers = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_TRUE(parse_bool(" On "));
  EXPECT_THROW(parse_bool("maybe"), ConfigError);
}

TEST(Config, BundledConfigHoldsCalibratedThreshold) {
  const auto v = load_config_file(testing::data_dir() / "refmail.conf");
  ScanConfig c;
  apply_config(c, v);
  EXPECT_GT(c.threshold, 0.5);
  EXPECT_LT(c.threshold, 1.0);
  EXPECT_TRUE(c.require_action);
}

// ---------------------------------------------------------------- metrics

verdict::Verdict with(verdict::Decision d, std::string id = "m") {
  verdict::Verdict v;
  v.source_id = std::move(id);
  v.decision = d;
  v.timings_ms = {{"parse", 1.0}, {"total", 2.0}};
  return v;
}

TEST(Metrics, WorkedExample) {
  MetricsAccumulator acc;
  for (int i = 0; i < 9; ++i) acc.add(with(verdict::Decision::kPhishing), true);
  acc.add(with(verdict::Decision::kPhishing), false);
  acc.add(with(verdict::Decision::kBenign), true);
  for (int i = 0; i < 89; ++i) acc.add(with(verdict::Decision::kNoAction), false);
  acc.add(with(verdict::Decision::kBenign, "x"), std::nullopt);
  const auto r = acc.report();
  EXPECT_EQ(r.counts.tp, 9u);
  EXPECT_EQ(r.counts.fp, 1u);
  EXPECT_EQ(r.counts.fn, 1u);
  EXPECT_EQ(r.counts.tn, 89u);
  EXPECT_DOUBLE_EQ(*r.precision, 0.9);
  EXPECT_DOUBLE_EQ(*r.recall, 0.9);
  EXPECT_DOUBLE_EQ(*r.fpr, 1.0 / 90.0);
  EXPECT_EQ(r.excluded, 1u);
  EXPECT_EQ(r.stages.at("total").samples, 101u);
}

TEST(Metrics, UndefinedRatiosAreNull) {
  MetricsAccumulator acc;
  acc.add(with(verdict::Decision::kBenign), false);
  const auto r = acc.report();
  EXPECT_FALSE(r.precision);
  EXPECT_FALSE(r.recall);
  ASSERT_TRUE(r.fpr);
  const auto j = to_json(r);
  EXPECT_TRUE(j.at("precision").is_null());
  EXPECT_TRUE(j.at("recall").is_null());
}

TEST(Metrics, PercentileAndLabels) {
  EXPECT_DOUBLE_EQ(percentile({3, 1, 2}, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(percentile({5}, 0.99), 5.0);
  testing::TempDir dir;
  testing::write_file(dir / "labels.txt", "# id label\na.eml phishing\nb benign\nc 1\n\n");
  const auto labels = load_labels(dir / "labels.txt");
  EXPECT_EQ(labels.size(), 3u);
  EXPECT_EQ(find_label(labels, "/some/dir/a.eml"), true);
  EXPECT_EQ(find_label(labels, "dir/b.eml"), false);
  EXPECT_EQ(find_label(labels, "zzz"), std::nullopt);
  testing::write_file(dir / "bad.txt", "a maybe\n");
  EXPECT_THROW(load_labels(dir / "bad.txt"), std::runtime_error);
}

// ---------------------------------------------------------------- pipeline

const Scanner& scanner() {
  static const auto s = Scanner::from_config(testing::fixture_scan_config());
  return s;
}

std::string sample(std::size_t i) {
  testing::MessageSpec m;
  m.from_name = i % 3 == 0 ? "PayPal" : (i % 3 == 1 ? "" : "IEEE S&P");
  m.from_address = i % 2 ? "alerts@paypa1-secure.xyz" : "service@paypal.com";
  m.subject = "Notice " + std::to_string(i);
  m.body = i % 2 ? "Please verify your account at https://paypa1-secure.xyz/login today."
                 : "Thanks for your purchase.";
  return testing::build_message(m);
}

MessageSource vector_source(std::size_t n, std::atomic<std::size_t>* read = nullptr) {
  auto next = std::make_shared<std::size_t>(0);
  return [=]() -> std::optional<SourceItem> {
    if (*next == n) return std::nullopt;
    const auto i = (*next)++;
    if (read) ++*read;
    SourceItem item;
    item.raw = {sample(i), "msg-" + std::to_string(i)};
    return item;
  };
}

TEST(Pipeline, OrderedOutputMatchesSequentialAt8Workers) {
  std::vector<std::string> seq, par;
  run_pipeline(scanner(), vector_source(200),
               [&](const verdict::Verdict& v) {
                 seq.push_back(v.source_id + verdict::to_json(v)["decision"].get<std::string>());
               },
               1);
  const auto stats = run_pipeline(
      scanner(), vector_source(200),
      [&](const verdict::Verdict& v) {
        par.push_back(v.source_id + verdict::to_json(v)["decision"].get<std::string>());
      },
      8);
  EXPECT_EQ(seq, par);
  EXPECT_EQ(stats.messages, 200u);
  for (std::size_t i = 0; i < par.size(); ++i)
    EXPECT_TRUE(par[i].starts_with("msg-" + std::to_string(i))) << par[i];
}

TEST(Pipeline, BoundedInFlight) {
  std::size_t written = 0;
  const auto stats = run_pipeline(scanner(), vector_source(3000), [&](const verdict::Verdict&) { ++written; },
                                  4, 8);
  EXPECT_EQ(written, 3000u);
  EXPECT_LE(stats.max_in_flight, 8u);
}

TEST(Pipeline, DiagnosticItemsStillProduceVerdicts) {
  int i = 0;
  const MessageSource src = [&]() -> std::optional<SourceItem> {
    SourceItem item;
    item.raw.source_id = "x" + std::to_string(i);
    if (i == 0) item.oversize = true, item.size = 99;
    else if (i == 1) item.error = "unreadable";
    else return std::nullopt;
    ++i;
    return item;
  };
  std::vector<verdict::Verdict> out;
  run_pipeline(scanner(), src, [&](const verdict::Verdict& v) { out.push_back(v); }, 2);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].decision, verdict::Decision::kNoIdentity);
  EXPECT_FALSE(out[0].diagnostics.empty());
  EXPECT_FALSE(out[1].diagnostics.empty());
}

TEST(Pipeline, SinkFailurePropagates) {
  EXPECT_THROW(run_pipeline(scanner(), vector_source(50),
                            [](const verdict::Verdict&) { throw std::runtime_error("disk full"); }, 4),
               std::runtime_error);
}

// ---------------------------------------------------------------- CLI

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "refmail");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> scan_args(std::vector<std::string> extra) {
  std::vector<std::string> a = {"scan", "--data-dir", testing::data_dir().string(), "--kb",
                                testing::fixture_kb_path().string()};
  a.insert(a.end(), extra.begin(), extra.end());
  return a;
}

TEST(Cli, ExitCodes) {
  const auto fig = (testing::data_dir() / "emails" / "conference_invite.eml").string();
  const auto ok = (testing::data_dir() / "emails" / "benign_ieee.eml").string();
  auto r = cli(scan_args({"-i", fig}));
  EXPECT_EQ(r.code, cli::kExitPhishing) << r.err;
  EXPECT_NE(r.out.find("\"Phishing\""), std::string::npos);
  r = cli(scan_args({"-i", ok}));
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(cli(scan_args({"-i", ok, "--threshold", "2"})).code, cli::kExitFatal);
  EXPECT_EQ(cli(scan_args({"--no-such-flag"})).code, cli::kExitFatal);
  EXPECT_EQ(cli({"scan", "--kb", "/nonexistent.jsonl", "-i", ok}).code, cli::kExitFatal);
  EXPECT_EQ(cli({"--help"}).code, cli::kExitOk);
}

TEST(Cli, ScanIsLineDelimitedAndOrdered) {
  testing::TempDir dir;
  std::vector<std::string> args = scan_args({"-j", "4"});
  for (int i = 0; i < 12; ++i) {
    const auto p = dir / ("m" + std::to_string(i) + ".eml");
    testing::write_file(p, sample(static_cast<std::size_t>(i)));
    args.push_back("-i");
    args.push_back(p.string());
  }
  const auto r = cli(args);
  std::istringstream lines(r.out);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("decision"));
    ++n;
  }
  EXPECT_EQ(n, 12);
}

TEST(Cli, EmptyMaildirGivesNoOutput) {
  testing::TempDir dir;
  for (const char* sub : {"new", "cur", "tmp"}) std::filesystem::create_directories(dir / sub);
  const auto r = cli(scan_args({"-i", dir.path().string(), "--format", "maildir"}));
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, KbAddCollisionAndExportRoundTrip) {
  testing::TempDir dir;
  const auto kb = dir / "kb.jsonl";
  std::filesystem::copy_file(testing::fixture_kb_path(), kb);
  const auto before = testing::read_file(kb);
  auto r = cli({"kb", "add", "--kb", kb.string(), "--entry",
                R"({"id":"dup","aliases":["IEEE S&P"],"domains":["dup.org"]})"});
  EXPECT_EQ(r.code, cli::kExitFatal);
  EXPECT_NE(r.err.find("IEEE S&P"), std::string::npos);
  EXPECT_EQ(testing::read_file(kb), before);

  r = cli({"kb", "add", "--kb", kb.string(), "--entry",
           R"({"id":"zebra","aliases":["Zebra Widgets"],"domains":["zebrawidgets.com"]})"});
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  r = cli({"kb", "export", "--kb", kb.string()});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_EQ(r.out, testing::read_file(kb));
  EXPECT_NE(r.out.find("\"zebra\""), std::string::npos);
  r = cli({"kb", "validate", "--kb", kb.string(), "--data-dir", testing::data_dir().string()});
  EXPECT_EQ(r.code, cli::kExitOk) << r.out;
}

TEST(Cli, EvalReportsMetrics) {
  testing::TempDir dir;
  const auto fig = (testing::data_dir() / "emails" / "conference_invite.eml").string();
  const auto ok = (testing::data_dir() / "emails" / "benign_ieee.eml").string();
  testing::write_file(dir / "labels.txt", "conference_invite.eml phishing\nbenign_ieee.eml benign\n");
  auto args = scan_args({"-i", fig, "-i", ok, "--labels", (dir / "labels.txt").string()});
  args[0] = "eval";
  const auto r = cli(args);
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("precision"), 1.0);
  EXPECT_EQ(j.at("recall"), 1.0);
}

}  // namespace
}  // namespace refmail::service
