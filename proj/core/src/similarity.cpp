// Copyright 2026 The svaicl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "svaicl/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string_view>

#include <fmt/format.h>

#include "svaicl/error.hpp"
#include "svaicl/random.hpp"

namespace svaicl {

namespace {

void check_weight(double w, const char* name) {
  if (!(w >= 0.0 && w <= 1.0))
    throw UsageError(fmt::format("{} = {} outside [0, 1]", name, w));
}

}  // namespace

double sem_dist(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw DataError(fmt::format("sem_dist length mismatch: {} vs {}", a.size(), b.size()));
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

std::size_t levenshtein(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return a.size();

  // Intern labels so the O(|a||b|) loop compares integers.
  std::unordered_map<std::string_view, std::uint32_t> ids;
  auto intern = [&](std::span<const std::string> seq) {
    std::vector<std::uint32_t> out;
    out.reserve(seq.size());
    for (const auto& s : seq)
      out.push_back(ids.emplace(s, static_cast<std::uint32_t>(ids.size())).first->second);
    return out;
  };
  const auto xa = intern(a);
  const auto xb = intern(b);

  std::vector<std::size_t> prev(xb.size() + 1);
  std::vector<std::size_t> cur(xb.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= xa.size(); ++i) {
    cur[0] = i;
    const std::uint32_t ai = xa[i - 1];
    for (std::size_t j = 1; j <= xb.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (ai == xb[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[xb.size()];
}

double syn_sim(const AstSequence& a, const AstSequence& b) {
  if (a.items.empty() || b.items.empty())
    throw DataError("syn_sim needs non-empty AST sequences");
  const double total = static_cast<double>(a.items.size() + b.items.size());
  const double lev = static_cast<double>(levenshtein(a.items, b.items));
  return (total - lev) / total;
}

double lex_sim(const TokenSet& a, const TokenSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

double code_sim(double syn, double lex, double lambda) {
  check_weight(lambda, "lambda");
  return lambda * syn + (1.0 - lambda) * lex;
}

double text_sim(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size())
    throw DataError(fmt::format("text_sim length mismatch: {} vs {}", a.size(), b.size()));
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw DataError("text_sim undefined for a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double fused_sim(double code, double text, double phi) {
  check_weight(phi, "phi");
  return phi * code + (1.0 - phi) * text;
}

void SelectionParams::validate() const {
  check_weight(lambda, "lambda");
  check_weight(phi, "phi");
  if (shots > top_n)
    throw UsageError(fmt::format("shots ({}) must not exceed top-n ({})", shots, top_n));
}

double DemonstrationSet::mean_fused() const {
  if (demos.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& d : demos) sum += d.scores.fused;
  return sum / static_cast<double>(demos.size());
}

RecordProfile make_profile(const VulnerabilityRecord& record, const VectorStore& code_vectors,
                           const VectorStore& description_vectors, const WhiteningModel& model,
                           CodeViews views) {
  RecordProfile p;
  p.code_whitened = model.apply(code_vectors.at(record.id));
  const auto desc = description_vectors.at(record.id);
  p.description.assign(desc.begin(), desc.end());
  p.views = std::move(views);
  return p;
}

HistoricalRepository::HistoricalRepository(std::vector<VulnerabilityRecord> records,
                                           std::vector<RecordProfile> profiles)
    : records_(std::move(records)), profiles_(std::move(profiles)) {
  if (records_.size() != profiles_.size())
    throw Error(ErrorKind::kInternal, "repository records and profiles differ in count");
}

HistoricalRepository HistoricalRepository::build(std::vector<VulnerabilityRecord> records,
                                                 const VectorStore& code_vectors,
                                                 const VectorStore& description_vectors,
                                                 const WhiteningModel& model,
                                                 const ViewProvider& views) {
  std::vector<RecordProfile> profiles;
  profiles.reserve(records.size());
  for (const auto& r : records) {
    CodeViews v;
    try {
      v = views(r);
    } catch (const ParseFailure& e) {
      throw ParseFailure(fmt::format("record '{}': {}", r.id, e.what()));
    }
    profiles.push_back(make_profile(r, code_vectors, description_vectors, model, std::move(v)));
  }
  return HistoricalRepository(std::move(records), std::move(profiles));
}

std::vector<Candidate> semantic_candidates(const RecordProfile& target,
                                           const std::string& target_id,
                                           const HistoricalRepository& repo, std::size_t n) {
  std::vector<Candidate> all;
  all.reserve(repo.size());
  for (std::size_t i = 0; i < repo.size(); ++i) {
    if (repo.record(i).id == target_id) continue;
    all.push_back({i, sem_dist(target.code_whitened, repo.profile(i).code_whitened)});
  }
  auto closer = [&](const Candidate& a, const Candidate& b) {
    if (a.sem_dist != b.sem_dist) return a.sem_dist < b.sem_dist;
    return repo.record(a.index).id < repo.record(b.index).id;
  };
  const std::size_t keep = std::min(n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), closer);
  all.resize(keep);
  return all;
}

SimilarityBreakdown score_candidate(const RecordProfile& target,
                                    const HistoricalRepository& repo, const Candidate& candidate,
                                    double lambda, double phi) {
  const auto& other = repo.profile(candidate.index);
  SimilarityBreakdown s;
  s.candidate_id = repo.record(candidate.index).id;
  s.sem_dist = candidate.sem_dist;
  s.syn_sim = syn_sim(target.views.ast, other.views.ast);
  s.lex_sim = lex_sim(target.views.tokens, other.views.tokens);
  s.code_sim = code_sim(s.syn_sim, s.lex_sim, lambda);
  s.text_sim = text_sim(target.description, other.description);
  s.fused = fused_sim(s.code_sim, s.text_sim, phi);
  return s;
}

bool ranks_before(const SimilarityBreakdown& a, const SimilarityBreakdown& b) {
  if (a.fused != b.fused) return a.fused > b.fused;
  if (a.sem_dist != b.sem_dist) return a.sem_dist < b.sem_dist;
  return a.candidate_id < b.candidate_id;
}

namespace {

DemonstrationSet rank_and_cut(const VulnerabilityRecord& target, const RecordProfile& profile,
                              const HistoricalRepository& repo,
                              const std::vector<Candidate>& candidates,
                              const SelectionParams& params) {
  std::vector<Demonstration> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates)
    scored.push_back({&repo.record(c.index),
                      score_candidate(profile, repo, c, params.lambda, params.phi)});
  std::sort(scored.begin(), scored.end(), [](const Demonstration& a, const Demonstration& b) {
    return ranks_before(a.scores, b.scores);
  });
  scored.resize(std::min(params.shots, scored.size()));

  DemonstrationSet set;
  set.target_id = target.id;
  set.demos = std::move(scored);
  set.shots = params.shots;
  set.top_n = params.top_n;
  return set;
}

}  // namespace

DemonstrationSet select_demonstrations(const VulnerabilityRecord& target,
                                       const RecordProfile& target_profile,
                                       const HistoricalRepository& repo,
                                       const SelectionParams& params) {
  params.validate();
  if (params.shots == 0) {
    DemonstrationSet empty;
    empty.target_id = target.id;
    empty.top_n = params.top_n;
    return empty;
  }
  if (repo.size() == 0) throw DataError("historical repository is empty");
  const auto candidates = semantic_candidates(target_profile, target.id, repo, params.top_n);
  return rank_and_cut(target, target_profile, repo, candidates, params);
}

DemonstrationSet select_random_demonstrations(const VulnerabilityRecord& target,
                                              const RecordProfile& target_profile,
                                              const HistoricalRepository& repo,
                                              const SelectionParams& params,
                                              std::uint64_t seed) {
  params.validate();
  std::vector<std::size_t> pool;
  pool.reserve(repo.size());
  for (std::size_t i = 0; i < repo.size(); ++i)
    if (repo.record(i).id != target.id) pool.push_back(i);
  if (params.shots > 0 && pool.empty()) throw DataError("historical repository is empty");

  // Partial Fisher-Yates: the first `take` slots become a uniform sample.
  Rng rng(derive_seed(seed, target.id));
  const std::size_t take = std::min(params.shots, pool.size());
  for (std::size_t i = 0; i < take; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(rng, pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  std::vector<Candidate> picked;
  for (std::size_t i = 0; i < take; ++i)
    picked.push_back({pool[i], sem_dist(target_profile.code_whitened,
                                        repo.profile(pool[i]).code_whitened)});
  return rank_and_cut(target, target_profile, repo, picked, params);
}

}  // namespace svaicl
