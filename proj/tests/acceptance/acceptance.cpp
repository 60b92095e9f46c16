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

// Acceptance driver: one PASS/FAIL line per criterion, exit status 0 only
// when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bio_oracle.hpp"
#include "refmail/adversarial/mutators.hpp"
#include "refmail/adversarial/robustness.hpp"
#include "refmail/identity/calibration.hpp"
#include "refmail/identity/retrieval_loss.hpp"
#include "refmail/service/pipeline.hpp"
#include "refmail/spearmail/generator.hpp"
#include "refmail/tagging/focal_loss.hpp"
#include "refmail/util/text.hpp"
#include "test_support.hpp"
#include "verdict_oracle.hpp"

using namespace refmail;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(prec) << v;
  return s.str();
}

const service::Scanner& scanner() {
  static const auto s = service::Scanner::from_config(testing::fixture_scan_config());
  return s;
}

// ---------------------------------------------------------------- 1

Outcome verdict_truth_table() {
  const auto t0 = Clock::now();
  std::size_t agree = 0, total = 0;
  auto check = [&](const testing::VerdictCase& c) {
    ++total;
    agree += verdict::decide(c.email, c.spans, c.matches, c.policy).decision == testing::oracle_decision(c);
  };
  for (auto id : {testing::IdentityState::kNone, testing::IdentityState::kConsistent,
                  testing::IdentityState::kInconsistent})
    for (bool action : {false, true})
      for (bool req : {false, true}) check(testing::grid_case(id, action, req));
  Rng rng(2026);
  for (int i = 0; i < 10000; ++i) check(testing::random_case(rng));
  const double secs = seconds_since(t0);
  return {agree == total && total == 10012 && secs < 5.0,
          std::to_string(agree) + "/" + std::to_string(total) + " agree in " + fmt(secs, 3) + " s"};
}

// ---------------------------------------------------------------- 2

Outcome conference_example() {
  const auto raw = testing::read_file(testing::data_dir() / "emails" / "conference_invite.eml");
  const auto v = scanner().scan({raw, "conference_invite.eml"});
  const std::string want =
      "This email is flagged as phishing because it claims to be from IEEE Symposium on Security "
      "and Privacy but was sent from a non-official address as xx@security001.xyz, and it has the "
      "instruction of complete a form.";
  const bool ok = v.decision == verdict::Decision::kPhishing && v.explanation == want &&
                  v.explanation.find("IEEE Symposium on Security and Privacy") != std::string::npos &&
                  v.explanation.find("security001.xyz") != std::string::npos;
  return {ok, std::string(verdict::to_string(v.decision)) + ": \"" + v.explanation + "\""};
}

// ---------------------------------------------------------------- 3

Outcome bio_exhaustive() {
  const auto t0 = Clock::now();
  std::size_t total = 0, agree = 0, at_eight = 0;
  for (std::size_t len = 0; len <= 8; ++len) {
    std::size_t count = 1;
    for (std::size_t i = 0; i < len; ++i) count *= tagging::kTagAlphabet.size();
    tagging::TagSequence t(len);
    for (std::size_t code = 0; code < count; ++code) {
      std::size_t c = code;
      for (std::size_t i = 0; i < len; ++i) {
        t[i] = tagging::kTagAlphabet[c % tagging::kTagAlphabet.size()];
        c /= tagging::kTagAlphabet.size();
      }
      ++total;
      at_eight += len == 8;
      agree += tagging::decode_spans(t) == testing::oracle_spans(t);
    }
  }
  const double secs = seconds_since(t0);
  return {agree == total && at_eight == 390625 && secs < 30.0,
          std::to_string(agree) + "/" + std::to_string(total) + " sequences (" + std::to_string(at_eight) +
              " of length 8) in " + fmt(secs, 2) + " s"};
}

// ---------------------------------------------------------------- 4

tagging::FocalLossInput random_focal(Rng& rng, std::size_t rows, std::size_t classes, double gamma) {
  tagging::FocalLossInput in;
  in.num_classes = classes;
  in.gamma = gamma;
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0;
    std::vector<double> row(classes);
    for (auto& x : row) sum += (x = 0.05 + rng.unit());
    for (auto x : row) in.probs.push_back(x / sum);
    in.labels.push_back(rng.uniform(classes));
  }
  return in;
}

Outcome focal_loss_checks() {
  Rng rng(404);
  double worst_ce = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto in = random_focal(rng, 1 + rng.uniform(16), 5, 0.0);
    double ce = 0;
    for (std::size_t r = 0; r < in.rows(); ++r) ce -= std::log(in.gold(r));
    ce /= static_cast<double>(in.rows());
    worst_ce = std::max(worst_ce, std::abs(tagging::focal_loss(in) - ce));
  }
  const double h = 1e-6;
  double worst_grad = 0;
  for (int i = 0; i < 200; ++i) {
    const auto in = random_focal(rng, 1 + rng.uniform(6), 5, tagging::kDefaultFocalGamma);
    const auto g = tagging::focal_loss_grad(in);
    for (std::size_t k = 0; k < in.probs.size(); ++k) {
      auto up = in, dn = in;
      up.probs[k] += h;
      dn.probs[k] -= h;
      const double fd = (tagging::focal_loss(up) - tagging::focal_loss(dn)) / (2 * h);
      const double denom = std::max({std::abs(fd), std::abs(g[k])});
      if (denom < 1e-8) continue;  // non-gold entries: both zero
      worst_grad = std::max(worst_grad, std::abs(fd - g[k]) / denom);
    }
  }
  std::ostringstream d;
  d << "max |FL(gamma=0) - CE| = " << std::scientific << std::setprecision(2) << worst_ce
    << ", max grad rel err = " << worst_grad;
  return {worst_ce <= 1e-9 && worst_grad < 1e-5, d.str()};
}

// ---------------------------------------------------------------- 5

Outcome retrieval_kernel() {
  Rng rng(55);
  bool kl_zero = true;
  double worst = 0;
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    identity::ProjectionModel model(8, 16, rng.next());
    identity::FeatureBatch b;
    auto vec = [&] {
      std::vector<double> v(16);
      for (auto& x : v) x = rng.unit() * 2 - 1;
      return v;
    };
    b.query = vec();
    b.typo_query = b.query;
    for (int c = 0; c < 6; ++c) b.candidates.push_back(vec());
    b.positives = {0, 3};
    b.temperature = 0.3 + rng.unit();
    kl_zero = kl_zero && identity::retrieval_kl_loss(b, model).kl == 0.0;
    for (auto& x : b.typo_query) x += (rng.unit() - 0.5) * 0.5;
    std::vector<double> grad;
    identity::retrieval_kl_loss(b, model, &grad);
    for (std::size_t k = 0; k < grad.size(); ++k) {
      const double w = model.weights()[k];
      model.weights()[k] = w + h;
      const double up = identity::retrieval_kl_loss(b, model).total();
      model.weights()[k] = w - h;
      const double dn = identity::retrieval_kl_loss(b, model).total();
      model.weights()[k] = w;
      const double fd = (up - dn) / (2 * h);
      const double denom = std::max({std::abs(fd), std::abs(grad[k]), 1e-6});
      worst = std::max(worst, std::abs(fd - grad[k]) / denom);
    }
  }
  const identity::EmbedFn f = [](std::string_view s) { return identity::embed(s).vector; };
  kl_zero = kl_zero &&
            identity::retrieval_kl_loss(identity::RetrievalBatch{"paypal", "paypal", {"paypal", "payday"}, {0}, 1.0}, f)
                    .kl == 0.0;
  std::ostringstream d;
  d << "KL(q'=q) exactly 0: " << (kl_zero ? "yes" : "no") << ", max grad rel err = " << std::scientific
    << std::setprecision(2) << worst;
  return {kl_zero && worst < 1e-5, d.str()};
}

// ---------------------------------------------------------------- 6

Outcome matching_checks() {
  const auto& m = *testing::fixture_matcher();
  const double thr = testing::calibrated_threshold();
  std::size_t aliases = 0, self = 0;
  for (const auto& e : m.kb().entries())
    for (const auto& a : e.aliases) {
      ++aliases;
      for (const auto& s : m.match(a, thr).accepted)
        if (s.identity_id == e.id) {
          ++self;
          break;
        }
    }
  struct Golden {
    adversarial::CharMutation kind;
    double rate;
  };
  const Golden goldens[] = {{adversarial::CharMutation::kDelete, 0.7138},
                            {adversarial::CharMutation::kReplace, 0.6148},
                            {adversarial::CharMutation::kSwitch, 0.5469},
                            {adversarial::CharMutation::kRepeat, 1.0}};
  bool goldens_ok = true;
  std::string rates;
  for (const auto& g : goldens) {
    const auto r = adversarial::matching_rate(m, adversarial::char_alias_mutator(g.kind), thr, 1);
    const double got = r.rate.value_or(-1);
    goldens_ok = goldens_ok && std::abs(got - g.rate) <= 0.02;
    rates += " " + std::string(adversarial::to_string(g.kind)) + "=" + fmt(got);
  }
  const double c1 = identity::cosine(identity::embed("paypal"), identity::embed("payppall"));
  const double c2 = identity::cosine(identity::embed("paypal"), identity::embed("payday"));
  const bool ok = aliases >= 1000 && self == aliases && goldens_ok && c1 > c2;
  return {ok, "self-match " + std::to_string(self) + "/" + std::to_string(aliases) + " at " + fmt(thr, 6) +
                  ";" + rates + "; cos(paypal,payppall)=" + fmt(c1) + " > cos(paypal,payday)=" + fmt(c2)};
}

// ---------------------------------------------------------------- 7

Outcome calibration_checks() {
  std::ifstream in(testing::data_dir() / "calibration" / "reference_scores.jsonl");
  std::vector<identity::ScoredPair> pairs;
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line);
    pairs.push_back({j.at("score").get<double>(), j.at("match").get<bool>()});
  }
  if (pairs.empty()) return {false, "no reference scores"};
  const auto c = identity::calibrate_threshold(pairs, 0.5);
  const double formula = identity::f_beta(0.99, 0.90, 0.5);
  const bool ok = std::abs(formula - 0.97) <= 0.005 && std::abs(c.f_beta - 0.97) <= 0.005 &&
                  std::abs(c.threshold - 0.83) <= 0.005 && std::abs(c.precision - 0.99) <= 0.005 &&
                  std::abs(c.recall - 0.90) <= 0.005;
  return {ok, "F0.5(0.99,0.90)=" + fmt(formula) + "; calibrated t=" + fmt(c.threshold) + " P=" +
                  fmt(c.precision) + " R=" + fmt(c.recall) + " F=" + fmt(c.f_beta)};
}

// ---------------------------------------------------------------- 8

Outcome mutator_contracts() {
  Rng rng(808);
  const std::u32string alphabet = U"abcdefghijklmnopqrstuvwxyzABCXYZ0123456789&.-éßΩжあ漢";
  std::size_t cases = 0, ok = 0, applied = 0;
  for (int i = 0; i < 10000; ++i) {
    std::u32string s;
    for (std::size_t k = 0, n = 1 + rng.uniform(14); k < n; ++k) s.push_back(alphabet[rng.uniform(alphabet.size())]);
    const auto text = text::encode_utf8(s);
    const auto kind = adversarial::kAllCharMutations[rng.uniform(4)];
    const auto seed = rng.next();
    const auto a = adversarial::mutate_chars(kind, text, seed);
    const auto b = adversarial::mutate_chars(kind, text, seed);
    ++cases;
    bool good = a.result == b.result && a.applied == b.applied;
    if (!a.applied) {
      good = good && a.result == text;
    } else {
      ++applied;
      const auto r = text::decode_utf8(a.result);
      const long delta = static_cast<long>(r.size()) - static_cast<long>(s.size());
      const long want = kind == adversarial::CharMutation::kDelete   ? -1
                        : kind == adversarial::CharMutation::kRepeat ? 1
                                                                     : 0;
      good = good && delta == want && !r.empty() && r.front() == s.front() && r.back() == s.back() &&
             a.result != text;
    }
    ok += good;
  }
  return {ok == cases && cases == 10000 && applied > 5000,
          std::to_string(ok) + "/" + std::to_string(cases) + " cases hold (" + std::to_string(applied) +
              " applied)"};
}

// ---------------------------------------------------------------- 9

Outcome spearmail_cardinality() {
  const auto profile = testing::read_file(testing::data_dir() / "spearmail" / "profile.txt");
  spearmail::MockGenerationClient client(1);
  const auto plan = spearmail::generate_plan({profile, 6, 5}, client);
  std::size_t good = 0, grids = 0;
  for (std::size_t m = 1; m <= 8; ++m)
    for (std::size_t n = 1; n <= 8; ++n) {
      spearmail::MockGenerationClient c(m * 100 + n);
      const auto p = spearmail::generate_plan({profile, m, n}, c);
      ++grids;
      good += p.emails.size() == m * n && p.complete();
    }
  return {plan.emails.size() == 30 && plan.complete() && good == grids,
          "m=6,n=5 -> " + std::to_string(plan.emails.size()) + " emails; grid " + std::to_string(good) + "/" +
              std::to_string(grids) + " exact"};
}

// ---------------------------------------------------------------- 10

std::string corpus_message(std::size_t i) {
  static const char* names[] = {"PayPal", "IEEE S&P", "Microsoft", "IT Helpdesk", "", "Amazon", "Jane Doe"};
  static const char* senders[] = {"service@paypal.com", "alerts@secure-login.xyz", "noreply@microsoft.com",
                                  "admin@mail-check.top", "friend@gmail.com"};
  static const char* bodies[] = {
      "Please verify your account at https://secure-login.xyz/verify within 24 hours.",
      "Your order has shipped and will arrive Tuesday.",
      "To keep access, click the link below and update your payment details.",
      "Minutes from yesterday's meeting are attached. Let me know if anything is missing.",
      "Complete the form at https://forms.example/abc to confirm your registration."};
  testing::MessageSpec m;
  m.from_name = names[i % std::size(names)];
  m.from_address = senders[(i / 7) % std::size(senders)];
  m.subject = "Message " + std::to_string(i);
  std::string body;
  for (std::size_t k = 0; k <= i % 4; ++k) body += std::string(bodies[(i + k) % std::size(bodies)]) + "\n\n";
  m.body = body;
  return testing::build_message(m);
}

Outcome throughput() {
  std::vector<std::string> corpus;
  for (std::size_t i = 0; i < 1000; ++i) corpus.push_back(corpus_message(i));
  std::vector<double> ms;
  std::vector<std::string> sequential;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto t0 = Clock::now();
    const auto v = scanner().scan({corpus[i], "m" + std::to_string(i)});
    ms.push_back(seconds_since(t0) * 1000.0);
    sequential.push_back(v.source_id + ":" + std::string(verdict::to_string(v.decision)));
  }
  std::nth_element(ms.begin(), ms.begin() + ms.size() / 2, ms.end());
  const double median = ms[ms.size() / 2];

  std::size_t next = 0;
  const service::MessageSource src = [&]() -> std::optional<service::SourceItem> {
    if (next == corpus.size()) return std::nullopt;
    service::SourceItem item;
    item.raw = {corpus[next], "m" + std::to_string(next)};
    ++next;
    return item;
  };
  std::vector<std::string> parallel;
  service::run_pipeline(
      scanner(), src,
      [&](const verdict::Verdict& v) {
        parallel.push_back(v.source_id + ":" + std::string(verdict::to_string(v.decision)));
      },
      8);
  const bool ordered = parallel == sequential;
  return {median <= 50.0 && ordered,
          "median " + fmt(median, 3) + " ms/message; 8-worker output " + (ordered ? "ordered" : "NOT ordered")};
}

// ---------------------------------------------------------------- 11

Outcome psl_conformance() {
  std::ifstream in(testing::fixture_dir() / "test_psl.txt");
  const std::regex re(R"(checkPublicSuffix\((null|'([^']*)'),\s*(null|'([^']*)')\);)");
  std::string line;
  std::size_t total = 0, pass = 0;
  while (std::getline(in, line)) {
    std::smatch m;
    if (!std::regex_search(line, m, re) || m.position(0) != 0) continue;  // skip commented-out vectors
    ++total;
    std::optional<std::string> got, want;
    if (m[1] != "null") got = testing::psl().registrable_domain(m[2].str());
    if (m[3] != "null") want = m[4].str();
    pass += got == want;
  }
  return {total > 0 && pass == total, std::to_string(pass) + "/" + std::to_string(total) + " vectors"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"verdict truth table", verdict_truth_table},
      {"conference invitation end to end", conference_example},
      {"BIO decode exhaustive", bio_exhaustive},
      {"focal loss", focal_loss_checks},
      {"retrieval + KL kernel", retrieval_kernel},
      {"identity matching", matching_checks},
      {"threshold calibration", calibration_checks},
      {"mutator contracts", mutator_contracts},
      {"spearmail cardinality", spearmail_cardinality},
      {"throughput and ordering", throughput},
      {"public suffix conformance", psl_conformance},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << (i + 1) << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
