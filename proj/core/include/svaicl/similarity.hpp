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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "svaicl/codeparse.hpp"
#include "svaicl/corpus.hpp"
#include "svaicl/embedstore.hpp"
#include "svaicl/whitening.hpp"

namespace svaicl {

// Pairwise measures --------------------------------------------------------

/// Squared L2 distance between whitened code embeddings; smaller is closer.
double sem_dist(std::span<const double> a, std::span<const double> b);

/// Item-level edit distance (unit insert/delete/substitute).
std::size_t levenshtein(std::span<const std::string> a, std::span<const std::string> b);

/// (|A| + |B| - lev(A, B)) / (|A| + |B|). Throws DataError on an empty sequence.
double syn_sim(const AstSequence& a, const AstSequence& b);

/// Jaccard index; two empty sets count as identical (1.0).
double lex_sim(const TokenSet& a, const TokenSet& b);

/// lambda * syn + (1 - lambda) * lex. Throws UsageError for lambda outside [0, 1].
double code_sim(double syn, double lex, double lambda);

/// Cosine similarity clamped to [-1, 1]. Throws DataError on a zero vector or
/// length mismatch.
double text_sim(std::span<const float> a, std::span<const float> b);

/// phi * code + (1 - phi) * text. Throws UsageError for phi outside [0, 1].
double fused_sim(double code, double text, double phi);

// Demonstration selection --------------------------------------------------

struct SimilarityBreakdown {
  std::string candidate_id;
  double sem_dist = 0;
  double syn_sim = 0;
  double lex_sim = 0;
  double code_sim = 0;
  double text_sim = 0;
  double fused = 0;
};

struct SelectionParams {
  std::size_t top_n = 10;  // stage-1 candidates
  std::size_t shots = 4;   // k
  double lambda = 0.4;     // syntactic share of code similarity
  double phi = 0.7;        // code share of fused similarity

  /// Throws UsageError when shots > top_n or a weight is outside [0, 1].
  void validate() const;
};

struct Demonstration {
  const VulnerabilityRecord* record = nullptr;  // owned by the repository
  SimilarityBreakdown scores;
};

struct DemonstrationSet {
  std::string target_id;
  std::vector<Demonstration> demos;  // ranked, best first
  std::size_t shots = 0;
  std::size_t top_n = 0;

  /// Mean fused similarity over the demos; 0 when there are none.
  double mean_fused() const;
};

/// Every view of one record that the pipeline needs, precomputed.
struct RecordProfile {
  std::vector<double> code_whitened;
  std::vector<float> description;
  CodeViews views;
};

using ViewProvider = std::function<CodeViews(const VulnerabilityRecord&)>;

/// Builds a profile from the stores. Throws MissingEmbedding naming the id.
RecordProfile make_profile(const VulnerabilityRecord& record, const VectorStore& code_vectors,
                           const VectorStore& description_vectors, const WhiteningModel& model,
                           CodeViews views);

/// Immutable pool of historical records the demonstrations are drawn from.
class HistoricalRepository {
 public:
  HistoricalRepository(std::vector<VulnerabilityRecord> records,
                       std::vector<RecordProfile> profiles);

  /// Resolves every record against the stores and computes code views.
  /// Throws MissingEmbedding / ParseFailure naming the offending record.
  static HistoricalRepository build(std::vector<VulnerabilityRecord> records,
                                    const VectorStore& code_vectors,
                                    const VectorStore& description_vectors,
                                    const WhiteningModel& model, const ViewProvider& views);

  std::size_t size() const noexcept { return records_.size(); }
  const VulnerabilityRecord& record(std::size_t i) const { return records_[i]; }
  const RecordProfile& profile(std::size_t i) const { return profiles_[i]; }
  const std::vector<VulnerabilityRecord>& records() const noexcept { return records_; }

 private:
  std::vector<VulnerabilityRecord> records_;
  std::vector<RecordProfile> profiles_;
};

struct Candidate {
  std::size_t index = 0;  // into the repository
  double sem_dist = 0;
};

/// Stage 1: the n repository entries closest to the target under sem_dist,
/// excluding target_id; ties broken by id. Exact scan.
std::vector<Candidate> semantic_candidates(const RecordProfile& target,
                                           const std::string& target_id,
                                           const HistoricalRepository& repo, std::size_t n);

SimilarityBreakdown score_candidate(const RecordProfile& target,
                                    const HistoricalRepository& repo, const Candidate& candidate,
                                    double lambda, double phi);

/// Orders by fused descending, then sem_dist ascending, then id.
bool ranks_before(const SimilarityBreakdown& a, const SimilarityBreakdown& b);

/// Three-stage selection: semantic filter to top_n, syntactic/lexical code
/// similarity, fusion with description similarity, top-k by fused score.
DemonstrationSet select_demonstrations(const VulnerabilityRecord& target,
                                       const RecordProfile& target_profile,
                                       const HistoricalRepository& repo,
                                       const SelectionParams& params);

/// Baseline: k demonstrations drawn uniformly (seeded) from the repository,
/// scored with the same measures and ranked by fused score.
DemonstrationSet select_random_demonstrations(const VulnerabilityRecord& target,
                                              const RecordProfile& target_profile,
                                              const HistoricalRepository& repo,
                                              const SelectionParams& params,
                                              std::uint64_t seed);

}  // namespace svaicl
