# Copyright 2026 The cellsort Authors
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

"""Parallel integer sort on a simulated distributed-memory machine."""

import json

from ._core import (
    ConfigError,
    Fault,
    batcher_schedule,
    block_merge,
    bucket_index,
    chunk_lengths,
    detect_width,
    generate,
    radix_sort,
)
from ._core import run as _run

__all__ = [
    "ConfigError",
    "Fault",
    "batcher_schedule",
    "block_merge",
    "bucket_index",
    "chunk_lengths",
    "detect_width",
    "generate",
    "radix_sort",
    "sort",
]


def sort(**kwargs):
    """Run the full sort; returns (report dict, list of per-cell arrays)."""
    report, cells = _run(**kwargs)
    return json.loads(report), cells
