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

#include "svaicl/whitening.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "bytes.hpp"
#include "svaicl/error.hpp"

namespace svaicl {

namespace {

constexpr std::string_view kMagic = "WHT1";

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

WhiteningModel::WhiteningModel(std::vector<double> mean, std::vector<double> projection,
                               std::size_t target_dim, std::vector<double> eigenvalues)
    : mean_(std::move(mean)),
      projection_(std::move(projection)),
      target_dim_(target_dim),
      eigenvalues_(std::move(eigenvalues)) {
  if (mean_.empty() || target_dim_ == 0 || target_dim_ > mean_.size())
    throw DataError(fmt::format("invalid whitening shape {} -> {}", mean_.size(), target_dim_));
  if (projection_.size() != mean_.size() * target_dim_)
    throw DataError("whitening projection size does not match its dimensions");
}

std::vector<double> WhiteningModel::apply(std::span<const double> x) const {
  const std::size_t dim = source_dim();
  if (x.size() != dim)
    throw DataError(fmt::format("whitening expects length {}, got {}", dim, x.size()));
  std::vector<double> out(target_dim_, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    const double centered = x[i] - mean_[i];
    if (centered == 0.0) continue;
    const double* row = projection_.data() + i * target_dim_;
    for (std::size_t j = 0; j < target_dim_; ++j) out[j] += centered * row[j];
  }
  return out;
}

std::vector<double> WhiteningModel::apply(std::span<const float> x) const {
  std::vector<double> wide(x.begin(), x.end());
  return apply(std::span<const double>(wide));
}

WhiteningModel fit_whitening(std::span<const double> samples, std::size_t dim,
                             std::size_t target_dim, double epsilon) {
  if (dim == 0 || samples.size() % dim != 0)
    throw DataError("whitening samples are not a whole number of rows");
  const std::size_t n = samples.size() / dim;
  if (n < 2) throw DataError(fmt::format("whitening needs at least 2 vectors, got {}", n));
  if (target_dim == 0 || target_dim > dim)
    throw DataError(fmt::format("whitening target dimension {} must be in [1, {}]", target_dim, dim));

  Eigen::Map<const RowMatrix> x(samples.data(), static_cast<Eigen::Index>(n),
                                static_cast<Eigen::Index>(dim));
  const Eigen::RowVectorXd mu = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mu;
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
  cov = (cov + cov.transpose()) * 0.5;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::kInternal, "covariance eigendecomposition did not converge");

  // Eigen returns ascending eigenvalues; walk from the back for descending order.
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::MatrixXd& vectors = solver.eigenvectors();
  std::vector<double> projection(dim * target_dim);
  std::vector<double> kept;
  kept.reserve(target_dim);
  for (std::size_t j = 0; j < target_dim; ++j) {
    const auto src = static_cast<Eigen::Index>(dim - 1 - j);
    const double lambda = std::max(values(src), 0.0);
    Eigen::VectorXd u = vectors.col(src);
    const double tol = 1e-12 * u.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      if (std::abs(u(k)) > tol) {
        if (u(k) < 0) u = -u;
        break;
      }
    }
    const double scale = 1.0 / std::sqrt(lambda + epsilon);
    for (std::size_t i = 0; i < dim; ++i)
      projection[i * target_dim + j] = u(static_cast<Eigen::Index>(i)) * scale;
    kept.push_back(lambda);
  }
  std::vector<double> mean(mu.data(), mu.data() + dim);
  return WhiteningModel(std::move(mean), std::move(projection), target_dim, std::move(kept));
}

WhiteningModel fit_whitening(const VectorStore& store, std::size_t target_dim, double epsilon) {
  std::vector<double> samples;
  samples.reserve(store.size() * store.dim());
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto row = store.row(i);
    samples.insert(samples.end(), row.begin(), row.end());
  }
  return fit_whitening(samples, store.dim(), target_dim, epsilon);
}

WhiteningModel fit_whitening(const VectorStore& store, std::span<const std::string> ids,
                             std::size_t target_dim, double epsilon) {
  std::vector<double> samples;
  samples.reserve(ids.size() * store.dim());
  for (const auto& id : ids) {
    const auto row = store.at(id);
    samples.insert(samples.end(), row.begin(), row.end());
  }
  return fit_whitening(samples, store.dim(), target_dim, epsilon);
}

std::string encode_whitening(const WhiteningModel& model) {
  std::string out(kMagic);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.source_dim()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.target_dim()));
  for (double v : model.mean()) detail::put_f64(out, v);
  for (double v : model.projection()) detail::put_f64(out, v);
  return out;
}

WhiteningModel decode_whitening(std::string_view bytes) {
  detail::ByteReader in(bytes, "whitening model");
  if (in.take(kMagic.size()) != kMagic) throw FormatError("whitening model: bad magic (expected WHT1)");
  const auto source = in.le<std::uint32_t>();
  const auto target = in.le<std::uint32_t>();
  if (source == 0 || target == 0 || target > source)
    throw FormatError(fmt::format("whitening model: invalid shape {} -> {}", source, target));
  if (in.remaining() != 8ULL * (source + static_cast<std::uint64_t>(source) * target))
    throw FormatError("whitening model: payload size does not match header");
  std::vector<double> mean(source);
  for (auto& v : mean) v = in.f64();
  std::vector<double> projection(static_cast<std::size_t>(source) * target);
  for (auto& v : projection) v = in.f64();
  return WhiteningModel(std::move(mean), std::move(projection), target);
}

void save_whitening(const std::filesystem::path& path, const WhiteningModel& model) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError(fmt::format("cannot write '{}'", path.string()));
  const auto bytes = encode_whitening(model);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError(fmt::format("write failed for '{}'", path.string()));
}

WhiteningModel load_whitening(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError(fmt::format("cannot open whitening model '{}'", path.string()));
  std::ostringstream buf;
  buf << f.rdbuf();
  return decode_whitening(buf.str());
}

}  // namespace svaicl
