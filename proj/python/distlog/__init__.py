# Copyright 2026 The distlog Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python access to the distlog solvers, resource formulas and property suites."""

import json

from ._core import (
    ConfigError,
    __version__,
    circ_dist,
    correct,
    dist_compare,
    make_plan,
    resources,
    suite_names,
    validate_instance,
    verify,
    wrap_add,
)
from ._core import run as _run


def run(N, a, b, **kwargs):
    """Runs trials; returns (records, summary) parsed from the NDJSON stream."""
    lines = [json.loads(line) for line in _run(N, a, b, **kwargs).splitlines()]
    return lines[:-1], lines[-1]["summary"]


__all__ = [
    "ConfigError",
    "__version__",
    "circ_dist",
    "correct",
    "dist_compare",
    "make_plan",
    "resources",
    "run",
    "suite_names",
    "validate_instance",
    "verify",
    "wrap_add",
]
