// wsm/python/bindings.cpp

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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wsm/abx.hpp"
#include "wsm/cli.hpp"
#include "wsm/distance.hpp"
#include "wsm/error.hpp"
#include "wsm/features.hpp"
#include "wsm/network.hpp"
#include "wsm/pairing.hpp"
#include "wsm/structure.hpp"

namespace py = pybind11;

namespace {

wsm::FeatureSeq as_seq(const wsm::Matrix& data, double fps) {
  return {data, fps};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "multimodal phone representation toolkit (core operations)";

  py::register_exception<wsm::Error>(m, "WsmError");

  m.def(
      "dtw_align",
      [](const wsm::Matrix& a, const wsm::Matrix& b) {
        const wsm::DtwResult res = wsm::dtw_align(a, b);
        return py::make_tuple(res.path, res.total_cost);
      },
      py::arg("a"), py::arg("b"),
      "Minimum-cost monotone alignment between two frame sequences "
      "(cosine frame distance). Returns (path, total_cost).");

  m.def("diagonal_align", &wsm::diagonal_align, py::arg("len_a"),
        py::arg("len_b"));

  m.def("divergence", &wsm::divergence, py::arg("x"), py::arg("y"),
        "Smallest mean frame cosine distance over all monotone paths.");

  m.def("cosine_distance",
        [](const wsm::Vector& u, const wsm::Vector& v) {
          return wsm::cosine_distance(u, v);
        });

  m.def("margin_cosine_loss", &wsm::margin_cosine_loss, py::arg("e1"),
        py::arg("e2"), py::arg("label"), py::arg("margin") = 0.5,
        py::arg("blocks") = 1);

  m.def(
      "stack_frames",
      [](const wsm::Matrix& x, int window) {
        return wsm::stack_frames(as_seq(x, 100.0), window).data;
      },
      py::arg("x"), py::arg("window") = 7);

  m.def(
      "repeat_upsample",
      [](const wsm::Matrix& x, int factor) {
        return wsm::repeat_upsample(as_seq(x, 100.0), factor).data;
      },
      py::arg("x"), py::arg("factor"));

  m.def(
      "cubic_resample",
      [](const wsm::Matrix& x, long target_len) {
        return wsm::cubic_resample(as_seq(x, 100.0), target_len).data;
      },
      py::arg("x"), py::arg("target_len"));

  py::class_<wsm::PcaModel>(m, "PcaModel")
      .def_readonly("mean", &wsm::PcaModel::mean)
      .def_readonly("projection", &wsm::PcaModel::projection)
      .def_readonly("eigenvalues", &wsm::PcaModel::eigenvalues)
      .def("apply", [](const wsm::PcaModel& model, const wsm::Matrix& x) {
        return wsm::apply_pca(model, x);
      });

  m.def("fit_pca_whitener", &wsm::fit_pca_whitener, py::arg("frames"),
        py::arg("out_dim"));

  py::class_<wsm::Moments>(m, "Moments")
      .def_readonly("mean", &wsm::Moments::mean)
      .def_readonly("std", &wsm::Moments::std)
      .def("apply", [](const wsm::Moments& mm, const wsm::Matrix& x) {
        return wsm::apply_moments(mm, x);
      });

  m.def("compute_moments", &wsm::compute_moments, py::arg("frames"));

  m.def(
      "parallelism_scores",
      [](const std::vector<std::pair<std::string, std::vector<wsm::Vector>>>&
             vectors) {
        const wsm::ParallelismReport report = wsm::parallelism_score(vectors);
        std::map<std::string, double> out;
        for (const auto& f : report.features) out[f.feature] = f.score;
        return out;
      },
      py::arg("vectors"),
      "Per-feature relative-parallelism rank scores from named lists of "
      "difference vectors.");

  m.def("run_cli", py::overload_cast<const std::vector<std::string>&>(
                       &wsm::run_cli),
        py::arg("args"),
        "Run a toolkit command line in-process; returns the exit code.");

  m.attr("__version__") = "0.1.0";
}
