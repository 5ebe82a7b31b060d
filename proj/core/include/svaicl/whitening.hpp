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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svaicl/embedstore.hpp"

namespace svaicl {

inline constexpr double kWhiteningEpsilon = 1e-9;
inline constexpr std::size_t kDefaultWhiteningDim = 256;

/// Affine map x -> (x - mean) * projection that decorrelates embeddings and
/// keeps the top-d principal directions.
///
/// Fitting: sample mean, covariance with 1/N normalization, symmetric
/// eigendecomposition with eigenvalues sorted descending, projection column
/// i = u_i / sqrt(lambda_i + eps). Each eigenvector is sign-normalized so its
/// first nonzero component is positive.
class WhiteningModel {
 public:
  WhiteningModel(std::vector<double> mean, std::vector<double> projection,
                 std::size_t target_dim, std::vector<double> eigenvalues = {});

  std::size_t source_dim() const noexcept { return mean_.size(); }
  std::size_t target_dim() const noexcept { return target_dim_; }

  const std::vector<double>& mean() const noexcept { return mean_; }
  /// Row-major source_dim x target_dim.
  const std::vector<double>& projection() const noexcept { return projection_; }
  /// Descending covariance eigenvalues of the kept directions (empty when loaded from disk).
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }

  /// Throws DataError on dimension mismatch.
  std::vector<double> apply(std::span<const float> x) const;
  std::vector<double> apply(std::span<const double> x) const;

 private:
  std::vector<double> mean_;
  std::vector<double> projection_;
  std::size_t target_dim_;
  std::vector<double> eigenvalues_;
};

/// Fits on every vector in the store. Throws DataError when fewer than 2
/// vectors are present or target_dim is 0 or exceeds the store dimension.
WhiteningModel fit_whitening(const VectorStore& store, std::size_t target_dim,
                             double epsilon = kWhiteningEpsilon);

/// Fits on the subset of the store named by `ids`. Throws MissingEmbedding
/// for any id without a vector.
WhiteningModel fit_whitening(const VectorStore& store, std::span<const std::string> ids,
                             std::size_t target_dim, double epsilon = kWhiteningEpsilon);

/// Row-major N x D samples.
WhiteningModel fit_whitening(std::span<const double> samples, std::size_t dim,
                             std::size_t target_dim, double epsilon = kWhiteningEpsilon);

inline std::vector<double> apply_whitening(const WhiteningModel& model,
                                           std::span<const float> x) {
  return model.apply(x);
}

/// On disk (WHT1, little-endian):
///   "WHT1" | source_dim u32 | target_dim u32 | mean f64[D] | projection f64[D*d]
std::string encode_whitening(const WhiteningModel& model);
WhiteningModel decode_whitening(std::string_view bytes);
void save_whitening(const std::filesystem::path& path, const WhiteningModel& model);
WhiteningModel load_whitening(const std::filesystem::path& path);

}  // namespace svaicl
