# Copyright 2026 The castbench Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python access to the castbench stability metrics and runners."""

import json

from ._castbench import (
    CastbenchError,
    decompose_query,
    kendall_p_value,
    kendall_tau,
    majority_ratio,
    mean_std,
    mock_demo,
    pearson,
    positional_score,
    report,
    run,
    shannon_entropy,
)
from . import _castbench

__all__ = [
    "CastbenchError",
    "cast_s",
    "cast_t",
    "decompose_query",
    "kendall_p_value",
    "kendall_tau",
    "majority_ratio",
    "mean_std",
    "mock_demo",
    "parse_structured_output",
    "pearson",
    "positional_score",
    "report",
    "run",
    "shannon_entropy",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def parse_structured_output(raw, task="summarize", expected_items=0, require_intermediates=False):
    """Parse raw model output into {"ok", "document", "intermediates"[, "error_kind"]}."""
    return json.loads(
        _castbench._parse_structured_output(raw, task, expected_items, require_intermediates)
    )


def cast_s(left, right, alpha=0.9):
    """Score two summary documents (dicts or JSON text) with the lexical judge."""
    return json.loads(_castbench._cast_s(_text(left), _text(right), alpha))


def cast_t(cells):
    """Tagging stability for a per-item list of per-run tag strings."""
    return json.loads(_castbench._cast_t([list(row) for row in cells]))
