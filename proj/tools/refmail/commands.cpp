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

#include "commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "refmail/adversarial/mutators.hpp"
#include "refmail/adversarial/robustness.hpp"
#include "refmail/identity/calibration.hpp"
#include "refmail/identity/matcher.hpp"
#include "refmail/kb/knowledge_base.hpp"
#include "refmail/service/config.hpp"
#include "refmail/service/metrics.hpp"
#include "refmail/service/pipeline.hpp"
#include "refmail/service/scanner.hpp"
#include "refmail/spearmail/client.hpp"
#include "refmail/spearmail/generator.hpp"
#include "refmail/spearmail/persuasion.hpp"
#include "refmail/tagging/corpus.hpp"
#include "refmail/util/line_json.hpp"

namespace refmail::cli {

namespace fs = std::filesystem;

namespace {

// Raw flag values; applied on top of the config file so flags win.
struct ScanFlags {
  std::string config;
  std::string kb;
  std::vector<std::string> inputs;
  std::string format;
  std::optional<double> threshold;
  std::optional<std::string> require_action;
  std::string adapter_tagger, adapter_embed, adapter_extractor;
  std::optional<std::size_t> workers;
  std::string output;
  std::string data_dir;
  std::optional<std::size_t> max_message_size;
};

void add_scan_flags(CLI::App* cmd, ScanFlags& f) {
  cmd->add_option("--config", f.config, "key=value config file (default: <data-dir>/refmail.conf if present)");
  cmd->add_option("--kb", f.kb, "knowledge base (JSON lines); falls back to $REFMAIL_KB");
  cmd->add_option("--input,-i", f.inputs, "files, maildirs, or - for stdin");
  cmd->add_option("--format", f.format, "eml | mbox | maildir | stream");
  cmd->add_option("--threshold", f.threshold, "identity-match threshold in [0,1]");
  cmd->add_option("--require-action", f.require_action, "true|false (default true)");
  cmd->add_option("--adapter-tagger", f.adapter_tagger, "tagger endpoint (exec:CMD or unix:PATH)");
  cmd->add_option("--adapter-embed", f.adapter_embed, "embedding endpoint");
  cmd->add_option("--adapter-extractor", f.adapter_extractor, "attachment text endpoint");
  cmd->add_option("--workers,-j", f.workers, "scan workers (>= 1)");
  cmd->add_option("--output,-o", f.output, "output path (default stdout)");
  cmd->add_option("--data-dir", f.data_dir, "bundled data directory");
  cmd->add_option("--max-message-size", f.max_message_size, "bytes; larger messages get a diagnostic verdict");
}

service::ScanConfig build_config(const ScanFlags& f) {
  service::ScanConfig cfg;
  cfg.data_dir = f.data_dir.empty() ? service::default_data_dir() : f.data_dir;
  fs::path conf = f.config;
  if (conf.empty()) {
    const fs::path bundled = fs::path(cfg.data_dir) / "refmail.conf";
    if (fs::exists(bundled)) conf = bundled;
  }
  if (!conf.empty()) service::apply_config(cfg, service::load_config_file(conf));
  if (!f.data_dir.empty()) cfg.data_dir = f.data_dir;
  if (!f.kb.empty()) cfg.kb_path = f.kb;
  cfg.kb_path = service::resolve_kb_path(cfg.kb_path);
  if (!f.inputs.empty()) cfg.inputs = f.inputs;
  if (!f.format.empty()) cfg.format = ingest::parse_input_format(f.format);
  if (f.threshold) cfg.threshold = *f.threshold;
  if (f.require_action) cfg.require_action = service::parse_bool(*f.require_action);
  if (!f.adapter_tagger.empty()) cfg.adapter_tagger = f.adapter_tagger;
  if (!f.adapter_embed.empty()) cfg.adapter_embed = f.adapter_embed;
  if (!f.adapter_extractor.empty()) cfg.adapter_extractor = f.adapter_extractor;
  if (f.workers) cfg.workers = *f.workers;
  if (!f.output.empty()) cfg.output = f.output;
  if (f.max_message_size) cfg.max_message_size = *f.max_message_size;
  cfg.validate();
  return cfg;
}

// Output stream that is either a file or the provided fallback.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw std::runtime_error("cannot open output " + path);
      out_ = &file_;
    }
  }
  std::ostream& operator*() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

service::Scanner make_scanner(const service::ScanConfig& cfg, std::ostream& err) {
  auto scanner = service::Scanner::from_config(cfg);
  const auto diags = kb::validate_kb(*scanner.resources().kb, *scanner.resources().psl);
  for (const auto& d : diags) err << "kb: " << d.to_string() << "\n";
  if (kb::has_errors(diags)) throw std::runtime_error("knowledge base failed validation");
  return scanner;
}

int cmd_scan(const ScanFlags& f, std::ostream& out, std::ostream& err) {
  const auto cfg = build_config(f);
  const auto scanner = make_scanner(cfg, err);
  Sink sink(cfg.output, out);
  const auto stats = service::run_pipeline(
      scanner, service::open_source(cfg),
      [&](const verdict::Verdict& v) { *sink << verdict::to_json(v).dump() << '\n'; }, cfg.workers);
  (*sink).flush();
  return stats.phishing > 0 ? kExitPhishing : kExitOk;
}

int cmd_eval(const ScanFlags& f, const std::string& labels_path, const std::string& verdicts_path,
             std::ostream& out, std::ostream& err) {
  const auto cfg = build_config(f);
  const auto scanner = make_scanner(cfg, err);
  const auto labels = service::load_labels(labels_path);
  service::MetricsAccumulator acc;
  std::ofstream verdicts;
  if (!verdicts_path.empty()) {
    verdicts.open(verdicts_path, std::ios::binary | std::ios::trunc);
    if (!verdicts) throw std::runtime_error("cannot open " + verdicts_path);
  }
  service::run_pipeline(
      scanner, service::open_source(cfg),
      [&](const verdict::Verdict& v) {
        acc.add(v, service::find_label(labels, v.source_id));
        if (verdicts) verdicts << verdict::to_json(v).dump() << '\n';
      },
      cfg.workers);
  const auto report = acc.report();
  for (const auto& d : report.diagnostics) err << "eval: " << d << "\n";
  Sink sink(cfg.output, out);
  *sink << service::to_json(report).dump(2) << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------ kb

std::shared_ptr<const ingest::PublicSuffixList> load_psl(const std::string& data_dir,
                                                          const std::string& psl) {
  service::ScanConfig cfg;
  cfg.data_dir = data_dir.empty() ? service::default_data_dir() : data_dir;
  cfg.psl_path = psl;
  return std::make_shared<const ingest::PublicSuffixList>(
      ingest::PublicSuffixList::load(cfg.resolved_psl()));
}

void print_kb_error(const kb::KbError& e, std::ostream& err) {
  err << "kb: " << e.what() << "\n";
  for (const auto& d : e.details()) err << "  " << d << "\n";
}

int cmd_kb_validate(const std::string& kb_path, const std::string& data_dir, const std::string& psl,
                    std::ostream& out) {
  const auto kb = kb::load_kb(service::resolve_kb_path(kb_path));
  const auto diags = kb::validate_kb(kb, *load_psl(data_dir, psl));
  for (const auto& d : diags) out << d.to_string() << "\n";
  out << kb.entries().size() << " entries, " << kb.alias_count() << " aliases, "
      << diags.size() << " diagnostics\n";
  return kb::has_errors(diags) ? kExitFatal : kExitOk;
}

int cmd_kb_add(const std::string& kb_path, const std::string& entry_json, const std::string& output,
               std::ostream& out) {
  const auto path = service::resolve_kb_path(kb_path);
  const auto kb = kb::load_kb(path);
  std::istringstream in(entry_json);
  auto entries = kb::parse_kb_entries(in, "--entry");
  if (entries.size() != 1) throw std::runtime_error("--entry must hold exactly one JSON object");
  const auto updated = kb::add_entry(kb, std::move(entries.front()));
  const std::string dest = output.empty() ? path : output;
  if (dest == "-") {
    kb::save_kb(updated, out);
  } else {
    // Write beside the target, then rename, so a crash never truncates the KB.
    const fs::path tmp = fs::path(dest).string() + ".tmp";
    kb::save_kb(updated, tmp);
    fs::rename(tmp, dest);
  }
  return kExitOk;
}

int cmd_kb_export(const std::string& kb_path, const std::string& output, std::ostream& out) {
  const auto kb = kb::load_kb(service::resolve_kb_path(kb_path));
  Sink sink(output, out);
  kb::save_kb(kb, *sink);
  return kExitOk;
}

// ------------------------------------------------------------------ robustness

struct RobustnessFlags {
  std::string kb;
  std::string corpus;
  std::string synonyms;
  std::string data_dir;
  double threshold = service::kDefaultThreshold;
  bool threshold_set = false;
  std::uint64_t seed = 1;
  std::string output;
  bool skip_matching = false;
};

int cmd_robustness(RobustnessFlags f, std::ostream& out) {
  service::ScanConfig cfg;
  cfg.data_dir = f.data_dir.empty() ? service::default_data_dir() : f.data_dir;
  const fs::path data(cfg.data_dir);
  if (!f.threshold_set) {
    const auto bundled = data / "refmail.conf";
    if (fs::exists(bundled)) {
      service::apply_config(cfg, service::load_config_file(bundled));
      f.threshold = cfg.threshold;
    }
  }
  const auto kb = std::make_shared<const kb::KnowledgeBase>(kb::load_kb(
      service::resolve_kb_path(f.kb.empty() ? (data / "kb" / "fixture_kb.jsonl").string() : f.kb)));
  const auto samples =
      tagging::load_labeled_corpus(f.corpus.empty() ? data / "ner" / "corpus.jsonl" : fs::path(f.corpus));
  const auto synonyms =
      adversarial::SynonymTable::load(f.synonyms.empty() ? data / "synonyms.json" : fs::path(f.synonyms));
  const auto lexicon = tagging::ActionLexicon::load(cfg.resolved_lexicon());
  const auto tagger = service::make_baseline_tagger(*kb, lexicon);
  const adversarial::SpanTagger span_fn = [&](const TokenSequence& t) { return tagger.spans(t); };

  Json report;
  report["threshold"] = f.threshold;
  report["seed"] = f.seed;
  auto& rec = report["recognition"] = Json::object();
  auto& id_rows = rec["identity"] = Json::array();
  id_rows.push_back(adversarial::to_json(adversarial::recognition_rate(
      span_fn, samples, tagging::EntityClass::kIdentity, adversarial::noop_mutator(), f.seed, "none")));
  for (auto k : adversarial::kAllCharMutations)
    id_rows.push_back(adversarial::to_json(adversarial::recognition_rate(
        span_fn, samples, tagging::EntityClass::kIdentity, adversarial::identity_char_mutator(k), f.seed,
        std::string(adversarial::to_string(k)))));
  auto& act_rows = rec["action"] = Json::array();
  act_rows.push_back(adversarial::to_json(adversarial::recognition_rate(
      span_fn, samples, tagging::EntityClass::kAction, adversarial::noop_mutator(), f.seed, "none")));
  act_rows.push_back(adversarial::to_json(adversarial::recognition_rate(
      span_fn, samples, tagging::EntityClass::kAction, adversarial::concat_sent_mutator(), f.seed, "concat_sent")));
  act_rows.push_back(adversarial::to_json(adversarial::recognition_rate(
      span_fn, samples, tagging::EntityClass::kAction, adversarial::synonym_swap_mutator(synonyms), f.seed,
      "synonym_swap")));

  if (!f.skip_matching) {
    const identity::IdentityMatcher matcher(kb);
    auto& m = report["matching"] = Json::array();
    m.push_back(adversarial::to_json(
        adversarial::matching_rate(matcher, adversarial::noop_alias_mutator(), f.threshold, f.seed, "none")));
    for (auto k : adversarial::kAllCharMutations)
      m.push_back(adversarial::to_json(
          adversarial::matching_rate(matcher, adversarial::char_alias_mutator(k), f.threshold, f.seed,
                                     std::string(adversarial::to_string(k)))));
  }
  Sink sink(f.output, out);
  *sink << report.dump(2) << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------ spearmail

struct SpearFlags {
  std::string profile;
  std::size_t m = 6;
  std::size_t n = 5;
  std::string backend = "mock";
  std::string output;
  std::string kb;
  std::string recipient = "recipient@example.org";
  std::uint64_t seed = 0;
  std::string compare_dir;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int cmd_spearmail(const SpearFlags& f, std::ostream& out, std::ostream& err) {
  std::unique_ptr<spearmail::GenerationClient> client;
  if (f.backend == "mock") {
    client = std::make_unique<spearmail::MockGenerationClient>(f.seed);
  } else {
    std::shared_ptr<JsonLineTransport> t = open_endpoint(f.backend);
    client = std::make_unique<spearmail::AdapterGenerationClient>(t);
  }
  std::optional<kb::KnowledgeBase> kb;
  if (!f.kb.empty()) kb = kb::load_kb(f.kb);

  spearmail::ProfileSpec spec;
  spec.profile_text = read_file(f.profile);
  spec.m = f.m;
  spec.n = f.n;
  spec.recipient = f.recipient;
  spearmail::GenerationOptions opts;
  opts.seed = f.seed;
  opts.kb = kb ? &*kb : nullptr;
  const auto plan = spearmail::generate_plan(spec, *client, opts);
  for (const auto& e : plan.errors) err << "spearmail: " << e << "\n";

  nlohmann::ordered_json summary;
  summary["interests"] = plan.interests.size();
  summary["emails"] = plan.emails.size();
  summary["errors"] = plan.errors.size();
  if (!f.output.empty()) summary["written"] = spearmail::write_maildir(f.output, {plan});

  if (!f.compare_dir.empty()) {
    std::vector<std::string> generated, generic;
    for (const auto& e : plan.emails)
      if (e.ok) generated.push_back(e.body);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(f.compare_dir))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) generic.push_back(read_file(p));
    summary["persuasion"] = nlohmann::ordered_json::parse(
        spearmail::to_json(spearmail::compare_persuasion(spec.profile_text, generated, generic, *client)).dump());
  }
  out << summary.dump(2) << '\n';
  return plan.complete() ? kExitOk : kExitFatal;
}

// ------------------------------------------------------------------ calibrate

int cmd_calibrate(const std::string& kb_path, const std::string& pairs_path, double beta,
                  const std::string& write_config, const std::string& data_dir, std::ostream& out) {
  const fs::path data(data_dir.empty() ? service::default_data_dir() : data_dir);
  const auto kb = std::make_shared<const kb::KnowledgeBase>(kb::load_kb(
      service::resolve_kb_path(kb_path.empty() ? (data / "kb" / "fixture_kb.jsonl").string() : kb_path)));
  const identity::IdentityMatcher matcher(kb);
  const auto pairs = identity::load_labeled_pairs(
      pairs_path.empty() ? data / "calibration" / "pairs.jsonl" : fs::path(pairs_path));
  const auto cal = identity::calibrate_threshold(pairs, matcher, beta);
  out << identity::to_json(cal).dump(2) << '\n';
  if (!write_config.empty()) {
    std::ofstream conf(write_config, std::ios::binary | std::ios::trunc);
    if (!conf) throw std::runtime_error("cannot write " + write_config);
    std::ostringstream thr;
    thr.precision(6);
    thr << std::fixed << cal.threshold;
    conf << "# Baseline embedding threshold, F" << beta << "-optimal on "
         << fs::path(pairs_path.empty() ? "calibration/pairs.jsonl" : pairs_path).filename().string()
         << "\n# precision " << cal.precision << ", recall " << cal.recall << "\nthreshold = "
         << thr.str() << "\nrequire_action = true\n";
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"refmail: identity/domain consistency phishing detector"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "refmail 0.1.0");

  ScanFlags scan_flags;
  auto* scan = app.add_subcommand("scan", "scan messages and print one verdict JSON line each");
  add_scan_flags(scan, scan_flags);

  ScanFlags eval_flags;
  std::string labels, verdicts_out;
  auto* eval = app.add_subcommand("eval", "scan a labeled dataset and print metrics");
  add_scan_flags(eval, eval_flags);
  eval->add_option("--labels", labels, "lines of '<message id> <phishing|benign>'")->required();
  eval->add_option("--verdicts", verdicts_out, "also write verdict lines here");

  std::string kb_path, kb_data_dir, kb_psl, kb_entry, kb_output;
  auto* kbcmd = app.add_subcommand("kb", "knowledge base management");
  kbcmd->require_subcommand(1);
  auto* kb_validate = kbcmd->add_subcommand("validate", "check aliases and domains");
  auto* kb_add = kbcmd->add_subcommand("add", "append one canonicalized entry");
  auto* kb_export = kbcmd->add_subcommand("export", "print canonical JSON lines");
  for (auto* c : {kb_validate, kb_add, kb_export}) {
    c->add_option("--kb", kb_path, "knowledge base path; falls back to $REFMAIL_KB");
    c->add_option("--data-dir", kb_data_dir, "bundled data directory");
  }
  kb_validate->add_option("--psl", kb_psl, "public suffix list");
  kb_add->add_option("--entry", kb_entry, R"(JSON object {"id","name","aliases","domains"})")->required();
  kb_add->add_option("--output,-o", kb_output, "write here instead of updating --kb in place (- for stdout)");
  kb_export->add_option("--output,-o", kb_output, "output path (default stdout)");

  RobustnessFlags rob;
  auto* robust = app.add_subcommand("robustness", "recognition and matching rates under mutation");
  robust->add_option("--kb", rob.kb, "knowledge base");
  robust->add_option("--corpus", rob.corpus, "labeled token corpus (JSON lines)");
  robust->add_option("--synonyms", rob.synonyms, "verb synonym table (JSON)");
  robust->add_option("--data-dir", rob.data_dir, "bundled data directory");
  auto* rob_thr = robust->add_option("--threshold", rob.threshold, "identity-match threshold");
  robust->add_option("--seed", rob.seed, "mutation seed");
  robust->add_option("--output,-o", rob.output, "output path (default stdout)");
  robust->add_flag("--skip-matching", rob.skip_matching, "only report recognition rates");

  SpearFlags sp;
  auto* spear = app.add_subcommand("spearmail", "generate a synthetic spear-phishing fixture maildir");
  spear->add_option("--profile", sp.profile, "profile text file")->required();
  spear->add_option("-m", sp.m, "interests");
  spear->add_option("-n", sp.n, "activities per interest");
  spear->add_option("--backend", sp.backend, "mock or an endpoint (exec:CMD, unix:PATH)");
  spear->add_option("--output,-o", sp.output, "maildir to write");
  spear->add_option("--kb", sp.kb, "knowledge base, used to mark real organizations");
  spear->add_option("--recipient", sp.recipient, "To: address");
  spear->add_option("--seed", sp.seed, "mock seed");
  spear->add_option("--compare", sp.compare_dir, "directory of generic phishing texts to score against");

  std::string cal_kb, cal_pairs, cal_conf, cal_data;
  double cal_beta = 0.5;
  auto* calib = app.add_subcommand("calibrate", "pick the F-beta optimal match threshold");
  calib->add_option("--kb", cal_kb, "knowledge base");
  calib->add_option("--pairs", cal_pairs, R"(JSON lines {"query","identity","match"})");
  calib->add_option("--beta", cal_beta, "F-beta weight (default 0.5)");
  calib->add_option("--write-config", cal_conf, "write threshold to this config file");
  calib->add_option("--data-dir", cal_data, "bundled data directory");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    for (auto* sub : app.get_subcommands()) out << sub->help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "refmail 0.1.0\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "refmail: " << e.what() << "\n";
    return kExitFatal;
  }

  try {
    if (*scan) return cmd_scan(scan_flags, out, err);
    if (*eval) return cmd_eval(eval_flags, labels, verdicts_out, out, err);
    if (*kb_validate) return cmd_kb_validate(kb_path, kb_data_dir, kb_psl, out);
    if (*kb_add) return cmd_kb_add(kb_path, kb_entry, kb_output, out);
    if (*kb_export) return cmd_kb_export(kb_path, kb_output, out);
    if (*robust) {
      rob.threshold_set = rob_thr->count() > 0;
      return cmd_robustness(rob, out);
    }
    if (*spear) return cmd_spearmail(sp, out, err);
    if (*calib) return cmd_calibrate(cal_kb, cal_pairs, cal_beta, cal_conf, cal_data, out);
  } catch (const kb::KbError& e) {
    print_kb_error(e, err);
    return kExitFatal;
  } catch (const std::exception& e) {
    err << "refmail: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}

}  // namespace refmail::cli
