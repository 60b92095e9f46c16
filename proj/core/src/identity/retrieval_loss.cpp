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

#include "refmail/identity/retrieval_loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "refmail/util/rng.hpp"

namespace refmail::identity {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("retrieval loss: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double log_sum_exp(const std::vector<double>& s) {
  const double m = *std::max_element(s.begin(), s.end());
  double sum = 0.0;
  for (double x : s) sum += std::exp(x - m);
  return m + std::log(sum);
}

void check_shape(std::size_t n_candidates, const std::vector<std::size_t>& positives, double t) {
  if (n_candidates == 0) throw std::invalid_argument("retrieval loss: empty candidate set");
  if (positives.empty()) throw std::invalid_argument("retrieval loss: no positives");
  for (std::size_t p : positives)
    if (p >= n_candidates) throw std::invalid_argument("retrieval loss: positive out of range");
  if (!(t > 0.0)) throw std::invalid_argument("retrieval loss: temperature must be > 0");
}

struct Scores {
  std::vector<double> s, s_typo;  // logits
  std::vector<double> log_b, log_a;  // log-softmax of s and s_typo
};

RetrievalLoss loss_from_scores(Scores& sc, const std::vector<std::size_t>& positives) {
  const double lse = log_sum_exp(sc.s);
  const double lse_t = log_sum_exp(sc.s_typo);
  sc.log_b.resize(sc.s.size());
  sc.log_a.resize(sc.s.size());
  for (std::size_t j = 0; j < sc.s.size(); ++j) {
    sc.log_b[j] = sc.s[j] - lse;
    sc.log_a[j] = sc.s_typo[j] - lse_t;
  }
  RetrievalLoss r;
  for (std::size_t p : positives) r.retrieval -= sc.log_b[p];
  r.retrieval /= static_cast<double>(positives.size());
  for (std::size_t j = 0; j < sc.s.size(); ++j)
    r.kl += std::exp(sc.log_a[j]) * (sc.log_a[j] - sc.log_b[j]);
  return r;
}

}  // namespace

RetrievalLoss retrieval_kl_loss(const RetrievalBatch& batch, const EmbedFn& f) {
  check_shape(batch.candidates.size(), batch.positives, batch.temperature);
  const auto q = f(batch.query);
  const auto qt = batch.typo_query == batch.query ? q : f(batch.typo_query);
  Scores sc;
  for (const auto& c : batch.candidates) {
    const auto p = f(c);
    sc.s.push_back(dot(q, p) / batch.temperature);
    sc.s_typo.push_back(dot(qt, p) / batch.temperature);
  }
  return loss_from_scores(sc, batch.positives);
}

ProjectionModel::ProjectionModel(std::size_t out_dims, std::size_t in_dims, std::uint64_t seed)
    : out_(out_dims), in_(in_dims), w_(out_dims * in_dims) {
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(in_dims));
  for (double& x : w_) x = (2.0 * rng.unit() - 1.0) * scale;
}

std::vector<double> ProjectionModel::project(const std::vector<double>& x) const {
  if (x.size() != in_) throw std::invalid_argument("projection: input dimension mismatch");
  std::vector<double> u(out_, 0.0);
  for (std::size_t r = 0; r < out_; ++r) {
    const double* row = w_.data() + r * in_;
    double s = 0.0;
    for (std::size_t c = 0; c < in_; ++c) s += row[c] * x[c];
    u[r] = s;
  }
  return u;
}

std::vector<double> ProjectionModel::embed(const std::vector<double>& x) const {
  auto u = project(x);
  const double n = std::sqrt(dot(u, u));
  if (n == 0.0) throw std::domain_error("projection: zero output vector");
  for (double& v : u) v /= n;
  return u;
}

RetrievalLoss retrieval_kl_loss(const FeatureBatch& batch, const ProjectionModel& model,
                                std::vector<double>* grad) {
  check_shape(batch.candidates.size(), batch.positives, batch.temperature);
  const double t = batch.temperature;
  const std::size_t n = batch.candidates.size();

  struct Node {
    const std::vector<double>* x;
    std::vector<double> e;
    double norm;
    std::vector<double> g;  // dL/de
  };
  auto make = [&](const std::vector<double>& x) {
    Node node{&x, model.project(x), 0.0, std::vector<double>(model.out_dims(), 0.0)};
    node.norm = std::sqrt(dot(node.e, node.e));
    if (node.norm == 0.0) throw std::domain_error("projection: zero output vector");
    for (double& v : node.e) v /= node.norm;
    return node;
  };
  Node q = make(batch.query);
  Node qt = make(batch.typo_query);
  std::vector<Node> cand;
  cand.reserve(n);
  for (const auto& c : batch.candidates) cand.push_back(make(c));

  Scores sc;
  for (const auto& c : cand) {
    sc.s.push_back(dot(q.e, c.e) / t);
    sc.s_typo.push_back(dot(qt.e, c.e) / t);
  }
  const RetrievalLoss loss = loss_from_scores(sc, batch.positives);
  if (!grad) return loss;

  std::vector<double> ds(n), ds_t(n);
  const double inv_pos = 1.0 / static_cast<double>(batch.positives.size());
  for (std::size_t j = 0; j < n; ++j) {
    const double a = std::exp(sc.log_a[j]);
    const double b = std::exp(sc.log_b[j]);
    ds[j] = b + (b - a);
    ds_t[j] = a * (sc.log_a[j] - sc.log_b[j] - loss.kl);
  }
  for (std::size_t p : batch.positives) ds[p] -= inv_pos;

  const std::size_t k = model.out_dims();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t d = 0; d < k; ++d) {
      q.g[d] += ds[j] * cand[j].e[d] / t;
      qt.g[d] += ds_t[j] * cand[j].e[d] / t;
      cand[j].g[d] += (ds[j] * q.e[d] + ds_t[j] * qt.e[d]) / t;
    }
  }

  grad->assign(model.weights().size(), 0.0);
  auto backprop = [&](const Node& node) {
    const double ge = dot(node.g, node.e);
    for (std::size_t r = 0; r < k; ++r) {
      const double du = (node.g[r] - ge * node.e[r]) / node.norm;
      if (du == 0.0) continue;
      double* row = grad->data() + r * model.in_dims();
      for (std::size_t c = 0; c < model.in_dims(); ++c) row[c] += du * (*node.x)[c];
    }
  };
  backprop(q);
  backprop(qt);
  for (const auto& c : cand) backprop(c);
  return loss;
}

}  // namespace refmail::identity
