# Copyright 2026  The wsm authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Weakly supervised multimodal phone representations: python surface.

The heavy lifting lives in the C++ extension ``wsm._core``; this package
re-exports the main operations and the in-process CLI entry point.
"""

from wsm._core import (
    Moments,
    PcaModel,
    WsmError,
    __version__,
    compute_moments,
    cosine_distance,
    cubic_resample,
    diagonal_align,
    divergence,
    dtw_align,
    fit_pca_whitener,
    margin_cosine_loss,
    parallelism_scores,
    repeat_upsample,
    run_cli,
    stack_frames,
)

__all__ = [
    "Moments",
    "PcaModel",
    "WsmError",
    "__version__",
    "compute_moments",
    "cosine_distance",
    "cubic_resample",
    "diagonal_align",
    "divergence",
    "dtw_align",
    "fit_pca_whitener",
    "margin_cosine_loss",
    "parallelism_scores",
    "repeat_upsample",
    "run_cli",
    "stack_frames",
]
