// wsm/features.cpp

// Copyright 2026  The wsm authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wsm/features.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "wsm/error.hpp"
#include "wsm/io.hpp"

namespace wsm {

FeatureSeq repeat_upsample(const FeatureSeq& seq, int factor) {
  if (factor < 1) fail(ErrorCode::InvalidArgument, "upsample factor must be >= 1");
  if (factor == 1) return seq;
  FeatureSeq out;
  out.fps = seq.fps * factor;
  out.data.resize(seq.frames() * factor, seq.dim());
  for (Index t = 0; t < seq.frames(); ++t)
    for (int k = 0; k < factor; ++k)
      out.data.row(t * factor + k) = seq.data.row(t);
  return out;
}

namespace {

// Second derivatives of the natural cubic spline through y at uniformly
// spaced knots, via the Thomas algorithm.
Vector natural_spline_m(const Vector& y, double h) {
  const Index n = y.size();
  Vector m = Vector::Zero(n);
  if (n < 3) return m;
  const Index inner = n - 2;
  Vector diag = Vector::Constant(inner, 2.0 * h / 3.0);
  const double off = h / 6.0;
  Vector rhs(inner);
  for (Index i = 0; i < inner; ++i)
    rhs[i] = (y[i + 2] - 2.0 * y[i + 1] + y[i]) / h;
  // Forward elimination.
  for (Index i = 1; i < inner; ++i) {
    const double w = off / diag[i - 1];
    diag[i] -= w * off;
    rhs[i] -= w * rhs[i - 1];
  }
  m[inner] = rhs[inner - 1] / diag[inner - 1];
  for (Index i = inner - 1; i >= 1; --i)
    m[i] = (rhs[i - 1] - off * m[i + 1]) / diag[i - 1];
  return m;
}

}  // namespace

FeatureSeq cubic_resample(const FeatureSeq& seq, Index target_len) {
  if (target_len < 1)
    fail(ErrorCode::InvalidArgument, "target length must be >= 1");
  const Index n = seq.frames();
  FeatureSeq out;
  out.fps = seq.fps * static_cast<double>(target_len) / static_cast<double>(n);
  out.data.resize(target_len, seq.dim());
  if (n == 1) {
    for (Index t = 0; t < target_len; ++t) out.data.row(t) = seq.data.row(0);
    return out;
  }
  const double h = 1.0 / static_cast<double>(n - 1);
  for (Index d = 0; d < seq.dim(); ++d) {
    const Vector y = seq.data.col(d);
    const Vector m = natural_spline_m(y, h);
    for (Index t = 0; t < target_len; ++t) {
      if (t == 0) {
        out.data(0, d) = y[0];
        continue;
      }
      if (t == target_len - 1) {
        out.data(t, d) = y[n - 1];
        continue;
      }
      const double x = static_cast<double>(t) / static_cast<double>(target_len - 1);
      Index i = std::min<Index>(static_cast<Index>(x / h), n - 2);
      const double xl = static_cast<double>(i) * h;
      const double xr = static_cast<double>(i + 1) * h;
      const double a = (xr - x) / h;
      const double b = (x - xl) / h;
      out.data(t, d) = a * y[i] + b * y[i + 1] +
                       ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) *
                           (h * h) / 6.0;
    }
  }
  return out;
}

PcaModel fit_pca_whitener(const Matrix& frames, int out_dim) {
  const Index n = frames.rows();
  const Index d = frames.cols();
  if (out_dim < 1 || out_dim > d)
    fail(ErrorCode::InvalidArgument, "PCA output dimension out of range");
  if (n <= out_dim)
    fail(ErrorCode::InvalidArgument, "PCA needs more samples than components");

  PcaModel model;
  model.mean = frames.colwise().mean();
  Matrix centered = frames.rowwise() - model.mean.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::RankDeficient, "eigendecomposition failed");
  // Eigen returns eigenvalues in increasing order.
  const Vector evals = solver.eigenvalues();
  const Matrix evecs = solver.eigenvectors();

  int usable = 0;
  for (Index i = 0; i < d; ++i)
    if (evals[i] > kEigenvalueFloor) ++usable;
  if (usable < out_dim)
    fail(ErrorCode::RankDeficient,
         "only " + std::to_string(usable) + " components above floor, " +
             std::to_string(out_dim) + " requested");

  model.projection.resize(out_dim, d);
  model.eigenvalues.resize(out_dim);
  for (int k = 0; k < out_dim; ++k) {
    const Index src = d - 1 - k;  // descending eigenvalue order
    Vector axis = evecs.col(src);
    // Canonical sign: largest-magnitude entry positive.
    Index arg_max = 0;
    axis.cwiseAbs().maxCoeff(&arg_max);
    if (axis[arg_max] < 0.0) axis = -axis;
    model.eigenvalues[k] = evals[src];
    model.projection.row(k) = axis.transpose() / std::sqrt(evals[src]);
  }
  return model;
}

Matrix apply_pca(const PcaModel& model, const Matrix& frames) {
  if (frames.cols() != model.projection.cols())
    fail(ErrorCode::DimensionMismatch,
         "PCA input has dimension " + std::to_string(frames.cols()) +
             ", model expects " + std::to_string(model.input_dim()));
  return (frames.rowwise() - model.mean.transpose()) *
         model.projection.transpose();
}

FeatureSeq apply_pca(const PcaModel& model, const FeatureSeq& seq) {
  return {apply_pca(model, seq.data), seq.fps};
}

Moments compute_moments(const Matrix& frames) {
  if (frames.rows() < 2)
    fail(ErrorCode::InvalidArgument, "moments need at least 2 frames");
  Moments m;
  m.mean = frames.colwise().mean();
  const Matrix centered = frames.rowwise() - m.mean.transpose();
  m.std = (centered.array().square().colwise().mean()).sqrt();
  m.std = m.std.cwiseMax(kStdFloor);
  return m;
}

Matrix apply_moments(const Moments& moments, const Matrix& frames) {
  if (frames.cols() != moments.mean.size())
    fail(ErrorCode::DimensionMismatch,
         "moments have dimension " + std::to_string(moments.mean.size()) +
             ", input has " + std::to_string(frames.cols()));
  return (frames.rowwise() - moments.mean.transpose()).array().rowwise() /
         moments.std.transpose().array();
}

FeatureSeq apply_moments(const Moments& moments, const FeatureSeq& seq) {
  return {apply_moments(moments, seq.data), seq.fps};
}

FeatureSeq stack_frames(const FeatureSeq& seq, int window) {
  if (window < 1 || window % 2 == 0)
    fail(ErrorCode::InvalidArgument, "stacking window must be odd and >= 1");
  if (window == 1) return seq;
  const Index t_len = seq.frames();
  const Index d = seq.dim();
  const int half = window / 2;
  FeatureSeq out;
  out.fps = seq.fps;
  out.data.resize(t_len, d * window);
  for (Index t = 0; t < t_len; ++t) {
    for (int k = -half; k <= half; ++k) {
      const Index src = std::clamp<Index>(t + k, 0, t_len - 1);
      out.data.block(t, static_cast<Index>(k + half) * d, 1, d) =
          seq.data.row(src);
    }
  }
  return out;
}

FeatureSeq concat_modalities(const FeatureSeq& a, const FeatureSeq& b) {
  if (a.frames() != b.frames())
    fail(ErrorCode::LengthMismatch,
         "cannot concatenate sequences of " + std::to_string(a.frames()) +
             " and " + std::to_string(b.frames()) + " frames");
  if (a.fps != b.fps)
    fail(ErrorCode::LengthMismatch, "cannot concatenate different frame rates");
  FeatureSeq out;
  out.fps = a.fps;
  out.data.resize(a.frames(), a.dim() + b.dim());
  out.data.leftCols(a.dim()) = a.data;
  out.data.rightCols(b.dim()) = b.data;
  return out;
}

Matrix knockout(const Matrix& frames, const ModalityMask& mask,
                const ModalityLayout& layout) {
  if (layout.total_dim() != frames.cols())
    fail(ErrorCode::LayoutMismatch,
         "layout covers " + std::to_string(layout.total_dim()) +
             " dims, input has " + std::to_string(frames.cols()));
  bool any_kept = false;
  for (const std::string& name : mask.kept)
    if (layout.has(name)) any_kept = true;
  if (!any_kept)
    fail(ErrorCode::LayoutMismatch, "mask keeps no block of this layout");
  Matrix out = frames;
  Index offset = 0;
  for (const auto& [name, width] : layout.blocks) {
    if (!mask.keeps(name)) out.middleCols(offset, width).setZero();
    offset += width;
  }
  return out;
}

FeatureSeq knockout(const FeatureSeq& seq, const ModalityMask& mask,
                    const ModalityLayout& layout) {
  return {knockout(seq.data, mask, layout), seq.fps};
}

void save_pca(const std::filesystem::path& path, const PcaModel& model) {
  Matrix packed(model.output_dim() + 1, model.input_dim());
  packed.row(0) = model.mean.transpose();
  packed.bottomRows(model.output_dim()) = model.projection;
  write_wsmf(path, packed);
  Json sidecar;
  sidecar["role"] = "pca_whitener";
  sidecar["input_dim"] = model.input_dim();
  sidecar["output_dim"] = model.output_dim();
  sidecar["eigenvalues"] = std::vector<double>(
      model.eigenvalues.data(), model.eigenvalues.data() + model.eigenvalues.size());
  atomic_write_file(path.string() + ".json", sidecar.dump() + "\n");
}

PcaModel load_pca(const std::filesystem::path& path) {
  const Matrix packed = read_wsmf(path);
  if (packed.rows() < 2)
    fail(ErrorCode::MalformedManifest, path.string() + ": not a PCA bundle");
  PcaModel model;
  model.mean = packed.row(0).transpose();
  model.projection = packed.bottomRows(packed.rows() - 1);
  const Json sidecar = read_json_file(path.string() + ".json");
  if (sidecar.contains("eigenvalues")) {
    const auto vals = sidecar.at("eigenvalues").get<std::vector<double>>();
    model.eigenvalues = Eigen::Map<const Vector>(vals.data(), vals.size());
  }
  return model;
}

void save_moments(const std::filesystem::path& path, const Moments& moments) {
  Matrix packed(2, moments.mean.size());
  packed.row(0) = moments.mean.transpose();
  packed.row(1) = moments.std.transpose();
  write_wsmf(path, packed);
  Json sidecar;
  sidecar["role"] = "moments";
  sidecar["dim"] = static_cast<int>(moments.mean.size());
  atomic_write_file(path.string() + ".json", sidecar.dump() + "\n");
}

Moments load_moments(const std::filesystem::path& path) {
  const Matrix packed = read_wsmf(path);
  if (packed.rows() != 2)
    fail(ErrorCode::MalformedManifest, path.string() + ": not a moments bundle");
  Moments m;
  m.mean = packed.row(0).transpose();
  m.std = packed.row(1).transpose().cwiseMax(kStdFloor);
  return m;
}

}  // namespace wsm
