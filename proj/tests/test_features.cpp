// tests/test_features.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "oracles/jacobi_eigen.hpp"
#include "oracles/spline_oracle.hpp"
#include "wsm/features.hpp"
#include "wsm/rng.hpp"

using namespace wsm;

namespace {

FeatureSeq seq_of(std::initializer_list<std::initializer_list<double>> rows,
                  double fps = 100.0) {
  FeatureSeq seq;
  seq.fps = fps;
  seq.data.resize(static_cast<Index>(rows.size()),
                  static_cast<Index>(rows.begin()->size()));
  Index r = 0;
  for (const auto& row : rows) {
    Index c = 0;
    for (const double v : row) seq.data(r, c++) = v;
    ++r;
  }
  return seq;
}

Matrix random_matrix(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("repeat_upsample repeats each frame factor times") {
  const FeatureSeq seq = seq_of({{1.0}, {2.0}});
  const FeatureSeq up = repeat_upsample(seq, 4);
  REQUIRE(up.frames() == 8);
  CHECK(up.fps == doctest::Approx(400.0));
  const std::vector<double> expected = {1, 1, 1, 1, 2, 2, 2, 2};
  for (Index t = 0; t < 8; ++t) CHECK(up.data(t, 0) == expected[t]);
}

TEST_CASE("repeat_upsample factor 1 is the identity") {
  const FeatureSeq seq = seq_of({{1.0, 2.0}, {3.0, 4.0}});
  const FeatureSeq up = repeat_upsample(seq, 1);
  CHECK(up.data == seq.data);
  CHECK(up.fps == seq.fps);
}

TEST_CASE("repeat_upsample length arithmetic") {
  const FeatureSeq seq = seq_of({{1.0}, {2.0}, {3.0}});
  CHECK(repeat_upsample(seq, 2).frames() == 6);
}

TEST_CASE("repeat_upsample composes multiplicatively") {
  Rng rng(7);
  FeatureSeq seq;
  seq.data = random_matrix(rng, 5, 3);
  for (const auto [a, b] : {std::pair{2, 3}, {3, 2}, {4, 1}}) {
    const FeatureSeq once = repeat_upsample(seq, a * b);
    const FeatureSeq twice = repeat_upsample(repeat_upsample(seq, a), b);
    CHECK(once.data == twice.data);
  }
}

TEST_CASE("cubic_resample keeps constants constant") {
  const FeatureSeq seq = seq_of({{2.5}, {2.5}, {2.5}, {2.5}});
  const FeatureSeq out = cubic_resample(seq, 11);
  REQUIRE(out.frames() == 11);
  for (Index t = 0; t < 11; ++t)
    CHECK(out.data(t, 0) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("cubic_resample reproduces linear data exactly") {
  // ramp 0..1 over 5 frames, resampled to 9 -> k/8
  FeatureSeq seq;
  seq.data.resize(5, 1);
  for (Index t = 0; t < 5; ++t) seq.data(t, 0) = t / 4.0;
  const FeatureSeq out = cubic_resample(seq, 9);
  for (Index t = 0; t < 9; ++t)
    CHECK(out.data(t, 0) == doctest::Approx(t / 8.0).epsilon(1e-12));
}

TEST_CASE("cubic_resample matches the dense natural-spline oracle") {
  FeatureSeq seq;
  seq.data.resize(12, 2);
  for (Index t = 0; t < 12; ++t) {
    seq.data(t, 0) = std::sin(0.7 * static_cast<double>(t));
    seq.data(t, 1) = std::cos(1.3 * static_cast<double>(t)) + 0.1 * t;
  }
  const Index target = 48;
  const FeatureSeq out = cubic_resample(seq, target);
  for (Index d = 0; d < 2; ++d) {
    const Vector oracle =
        testing::natural_spline_resample(seq.data.col(d), target);
    for (Index t = 0; t < target; ++t)
      CHECK(out.data(t, d) == doctest::Approx(oracle[t]).epsilon(1e-9));
  }
}

TEST_CASE("cubic_resample at the same length returns the input") {
  Rng rng(3);
  FeatureSeq seq;
  seq.data = random_matrix(rng, 9, 4);
  const FeatureSeq out = cubic_resample(seq, 9);
  CHECK((out.data - seq.data).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("cubic_resample endpoints are bit-exact and length-1 replicates") {
  Rng rng(5);
  FeatureSeq seq;
  seq.data = random_matrix(rng, 7, 3);
  const FeatureSeq out = cubic_resample(seq, 23);
  CHECK(out.data.row(0) == seq.data.row(0));
  CHECK(out.data.row(22) == seq.data.row(6));

  const FeatureSeq single = seq_of({{4.0, 5.0}});
  const FeatureSeq rep = cubic_resample(single, 5);
  REQUIRE(rep.frames() == 5);
  for (Index t = 0; t < 5; ++t) CHECK(rep.data.row(t) == single.data.row(0));
}

TEST_CASE("fit_pca_whitener explains a line with one component") {
  Matrix pts(50, 2);
  for (Index i = 0; i < 50; ++i) {
    pts(i, 0) = 0.1 * i - 2.0;
    pts(i, 1) = 2.0 * pts(i, 0);  // exactly on a line
  }
  const PcaModel model = fit_pca_whitener(pts, 1);
  const double total_var =
      (pts.rowwise() - pts.colwise().mean()).array().square().sum() / 50.0;
  CHECK(model.eigenvalues[0] == doctest::Approx(total_var).epsilon(1e-9));
}

TEST_CASE("whitening already-white data keeps identity covariance") {
  Rng rng(11);
  const Matrix data = random_matrix(rng, 4000, 3);
  const PcaModel model = fit_pca_whitener(data, 3);
  const Matrix proj = apply_pca(model, data);
  const Matrix cov =
      (proj.rowwise() - proj.colwise().mean()).transpose() *
      (proj.rowwise() - proj.colwise().mean()) / static_cast<double>(4000);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j)
      CHECK(cov(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-6));
}

TEST_CASE("PCA eigenvalues match the Jacobi oracle") {
  Rng rng(13);
  const Matrix data = random_matrix(rng, 50, 5);
  const PcaModel model = fit_pca_whitener(data, 3);
  const Matrix centered = data.rowwise() - data.colwise().mean();
  const Matrix cov = centered.transpose() * centered / 50.0;
  const Vector oracle = testing::jacobi_eigenvalues(cov);
  for (Index k = 0; k < 3; ++k)
    CHECK(model.eigenvalues[k] == doctest::Approx(oracle[k]).epsilon(1e-8));
}

TEST_CASE("fit_pca_whitener rejects rank-deficient requests") {
  Matrix pts(40, 3);
  for (Index i = 0; i < 40; ++i) {
    pts(i, 0) = 0.25 * i;
    pts(i, 1) = -0.5 * pts(i, 0);
    pts(i, 2) = pts(i, 0) + 2.0 * pts(i, 1);  // rank 1 overall
  }
  CHECK_THROWS_WITH_AS(fit_pca_whitener(pts, 2), doctest::Contains("floor"),
                       Error);
  try {
    fit_pca_whitener(pts, 2);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
}

TEST_CASE("apply_pca maps the mean frame to zero and preserves length") {
  Rng rng(17);
  const Matrix data = random_matrix(rng, 60, 4);
  const PcaModel model = fit_pca_whitener(data, 2);
  FeatureSeq seq;
  seq.data.resize(3, 4);
  seq.data.row(0) = model.mean.transpose();
  seq.data.row(1) = data.row(0);
  seq.data.row(2) = data.row(1);
  const FeatureSeq out = apply_pca(model, seq);
  REQUIRE(out.frames() == 3);
  CHECK(out.dim() == 2);
  CHECK(out.data.row(0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("whitened fitting data has unit variance per output dimension") {
  Rng rng(19);
  Matrix data = random_matrix(rng, 500, 6);
  data.col(2) *= 8.0;  // anisotropic
  data.col(4) *= 0.2;
  const PcaModel model = fit_pca_whitener(data, 4);
  const Matrix proj = apply_pca(model, data);
  for (Index d = 0; d < 4; ++d) {
    const double var =
        (proj.col(d).array() - proj.col(d).mean()).square().mean();
    CHECK(var == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("apply_pca checks dimensions") {
  Rng rng(23);
  const PcaModel model = fit_pca_whitener(random_matrix(rng, 30, 4), 2);
  FeatureSeq wrong;
  wrong.data = random_matrix(rng, 3, 5);
  CHECK_THROWS_AS(apply_pca(model, wrong), Error);
}

TEST_CASE("compute_moments basics") {
  Matrix two(2, 2);
  two << 0.0, 7.0, 2.0, 7.0;
  const Moments m = compute_moments(two);
  CHECK(m.mean[0] == doctest::Approx(1.0));
  CHECK(m.std[0] == doctest::Approx(1.0));
  CHECK(m.std[1] == doctest::Approx(kStdFloor));  // constant column floored
}

TEST_CASE("compute_moments matches a two-pass oracle") {
  Rng rng(29);
  const Matrix data = random_matrix(rng, 64, 5);
  const Moments m = compute_moments(data);
  for (Index d = 0; d < 5; ++d) {
    double mean = 0.0;
    for (Index r = 0; r < 64; ++r) mean += data(r, d);
    mean /= 64.0;
    double var = 0.0;
    for (Index r = 0; r < 64; ++r)
      var += (data(r, d) - mean) * (data(r, d) - mean);
    var /= 64.0;
    CHECK(m.mean[d] == doctest::Approx(mean).epsilon(1e-10));
    CHECK(m.std[d] == doctest::Approx(std::sqrt(var)).epsilon(1e-10));
  }
}

TEST_CASE("apply_moments normalizes the fitting set") {
  Rng rng(31);
  const Matrix data = random_matrix(rng, 100, 3);
  const Moments m = compute_moments(data);
  const Matrix normed = apply_moments(m, data);
  const Moments refit = compute_moments(normed);
  for (Index d = 0; d < 3; ++d) {
    CHECK(refit.mean[d] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(refit.std[d] == doctest::Approx(1.0).epsilon(1e-9));
  }
  // applying the refit moments again changes nothing
  const Matrix again = apply_moments(refit, normed);
  CHECK((again - normed).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("apply_moments maps the mean frame to zero") {
  Matrix data(4, 2);
  data << 1, 10, 3, 14, 5, 18, 7, 22;
  const Moments m = compute_moments(data);
  FeatureSeq seq;
  seq.data = m.mean.transpose();
  const FeatureSeq out = apply_moments(m, seq);
  CHECK(out.data.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("stack_frames window 1 is the identity") {
  const FeatureSeq seq = seq_of({{1.0, 2.0}, {3.0, 4.0}});
  CHECK(stack_frames(seq, 1).data == seq.data);
}

TEST_CASE("stack_frames output dimensions") {
  Rng rng(37);
  FeatureSeq seq;
  seq.data = random_matrix(rng, 10, 40);
  const FeatureSeq out = stack_frames(seq, 7);
  CHECK(out.frames() == 10);
  CHECK(out.dim() == 280);
}

TEST_CASE("stack_frames clamps at the edges") {
  const FeatureSeq seq = seq_of({{0.0}, {1.0}, {2.0}, {3.0}});
  const FeatureSeq out = stack_frames(seq, 3);
  CHECK(out.data(0, 0) == 0.0);  // clamped left
  CHECK(out.data(0, 1) == 0.0);
  CHECK(out.data(0, 2) == 1.0);
  CHECK(out.data(3, 0) == 2.0);
  CHECK(out.data(3, 1) == 3.0);
  CHECK(out.data(3, 2) == 3.0);  // clamped right
}

TEST_CASE("stack_frames center block is the raw frame") {
  Rng rng(41);
  FeatureSeq seq;
  seq.data = random_matrix(rng, 9, 5);
  const FeatureSeq out = stack_frames(seq, 7);
  for (Index t = 3; t < 6; ++t)
    CHECK(out.data.block(t, 3 * 5, 1, 5) == seq.data.row(t));
}

TEST_CASE("stack_frames rejects even windows") {
  const FeatureSeq seq = seq_of({{1.0}});
  CHECK_THROWS_AS(stack_frames(seq, 4), Error);
}

TEST_CASE("concat_modalities puts the first block first") {
  Rng rng(43);
  FeatureSeq a, v;
  a.data = random_matrix(rng, 10, 4);
  v.data = random_matrix(rng, 10, 3);
  const FeatureSeq out = concat_modalities(a, v);
  CHECK(out.dim() == 7);
  CHECK(out.data.leftCols(4) == a.data);
  CHECK(out.data.rightCols(3) == v.data);
}

TEST_CASE("concat_modalities rejects length mismatches") {
  FeatureSeq a, v;
  a.data = Matrix::Zero(10, 2);
  v.data = Matrix::Zero(9, 2);
  CHECK_THROWS_AS(concat_modalities(a, v), Error);
  try {
    concat_modalities(a, v);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LengthMismatch);
  }
}

TEST_CASE("knockout zeroes exactly the dropped blocks") {
  Rng rng(47);
  FeatureSeq seq;
  seq.data = random_matrix(rng, 10, 80);
  const ModalityLayout layout{{{"audio", 40}, {"visual", 40}}};

  const FeatureSeq keep_all =
      knockout(seq, ModalityMask::keeping({"audio", "visual"}), layout);
  CHECK(keep_all.data == seq.data);

  const FeatureSeq no_visual =
      knockout(seq, ModalityMask::keeping({"audio"}), layout);
  CHECK(no_visual.data.leftCols(40) == seq.data.leftCols(40));
  CHECK(no_visual.data.rightCols(40).cwiseAbs().maxCoeff() == 0.0);

  const FeatureSeq no_audio =
      knockout(seq, ModalityMask::keeping({"visual"}), layout);
  CHECK(no_audio.data.leftCols(40).cwiseAbs().maxCoeff() == 0.0);
  CHECK(no_audio.data.rightCols(40) == seq.data.rightCols(40));
}

TEST_CASE("knockout is idempotent and commutes with moments on kept blocks") {
  Rng rng(53);
  FeatureSeq seq;
  seq.data = random_matrix(rng, 30, 6);
  const ModalityLayout layout{{{"audio", 2}, {"visual", 4}}};
  const ModalityMask mask = ModalityMask::keeping({"visual"});

  const FeatureSeq once = knockout(seq, mask, layout);
  const FeatureSeq twice = knockout(once, mask, layout);
  CHECK(once.data == twice.data);

  const Moments m = compute_moments(seq.data);
  const Matrix a = knockout(apply_moments(m, seq), mask, layout).data;
  const Matrix b = apply_moments(m, knockout(seq, mask, layout)).data;
  CHECK(a.rightCols(4) == b.rightCols(4));
}

TEST_CASE("knockout validates the layout") {
  FeatureSeq seq;
  seq.data = Matrix::Zero(4, 5);
  const ModalityLayout layout{{{"audio", 2}, {"visual", 4}}};  // sums to 6
  CHECK_THROWS_AS(knockout(seq, ModalityMask::keeping({"audio"}), layout),
                  Error);
  const ModalityLayout ok{{{"audio", 2}, {"visual", 3}}};
  CHECK_THROWS_AS(knockout(seq, ModalityMask::keeping({"other"}), ok), Error);
}

TEST_CASE("stacked layouts repeat the block structure") {
  const ModalityLayout layout{{{"audio", 2}, {"visual", 3}}};
  const ModalityLayout stacked = layout.repeated(3);
  CHECK(stacked.total_dim() == 15);
  Rng rng(59);
  FeatureSeq seq;
  seq.data = random_matrix(rng, 6, 5);
  const FeatureSeq big = stack_frames(seq, 3);
  const FeatureSeq masked =
      knockout(big, ModalityMask::keeping({"audio"}), stacked);
  // every window copy of the visual block is zeroed
  for (int w = 0; w < 3; ++w)
    CHECK(masked.data.middleCols(w * 5 + 2, 3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pca and moments round-trip through WSMF files") {
  Rng rng(61);
  const Matrix data = random_matrix(rng, 80, 6);
  const PcaModel model = fit_pca_whitener(data, 4);
  const Moments m = compute_moments(data);
  const auto dir = std::filesystem::temp_directory_path() / "wsm_feat_io";
  std::filesystem::create_directories(dir);
  save_pca(dir / "pca.wsmf", model);
  save_moments(dir / "mom.wsmf", m);
  const PcaModel model2 = load_pca(dir / "pca.wsmf");
  const Moments m2 = load_moments(dir / "mom.wsmf");
  CHECK(model2.input_dim() == 6);
  CHECK(model2.output_dim() == 4);
  CHECK((model2.mean - model.mean).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((model2.projection - model.projection).cwiseAbs().maxCoeff() < 1e-5);
  CHECK((m2.mean - m.mean).cwiseAbs().maxCoeff() < 1e-6);
  std::filesystem::remove_all(dir);
}
