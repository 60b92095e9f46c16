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

#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "refmail/identity/char_embedding.hpp"
#include "refmail/identity/matcher.hpp"
#include "refmail/ingest/email.hpp"
#include "refmail/service/scanner.hpp"

namespace {

namespace fs = std::filesystem;
using namespace refmail;

const fs::path kData = REFMAIL_BENCH_DATA_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

service::ScanConfig config() {
  service::ScanConfig c;
  c.data_dir = kData.string();
  c.kb_path = (kData / "kb" / "fixture_kb.jsonl").string();
  return c;
}

const service::Scanner& scanner() {
  static const auto s = service::Scanner::from_config(config());
  return s;
}

void BM_Parse(benchmark::State& state) {
  const ingest::RawEmail raw{slurp(kData / "emails" / "conference_invite.eml"), "invite"};
  const auto& res = scanner().resources();
  for (auto _ : state) benchmark::DoNotOptimize(ingest::parse_eml(raw, res.extractors, *res.psl));
}
BENCHMARK(BM_Parse);

void BM_Embed(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(identity::embed("IEEE Symposium on Security and Privacy"));
}
BENCHMARK(BM_Embed);

void BM_Match(benchmark::State& state) {
  const auto& m = *scanner().resources().matcher;
  for (auto _ : state) benchmark::DoNotOptimize(m.match("IEEE S&P 2026 Program Committee", 0.83));
}
BENCHMARK(BM_Match);

void BM_Scan(benchmark::State& state) {
  const ingest::RawEmail raw{slurp(kData / "emails" / "conference_invite.eml"), "invite"};
  for (auto _ : state) benchmark::DoNotOptimize(scanner().scan(raw));
}
BENCHMARK(BM_Scan);

}  // namespace

BENCHMARK_MAIN();
