# SPDX-License-Identifier: Apache-2.0
#
# nsmimo: non-stationary massive MIMO channel simulation library
# Copyright (C) 2026 The nsmimo authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------

"""Non-stationary wideband massive-MIMO channel model.

Configs are plain dicts with the same schema as the CLI's JSON config files.
"""

import json as _json

from ._nsmimo import (
    __version__,
    ConfigError,
    ResourceError,
    EstimatorError,
    Realization,
    synthesize,
    acf_analytic,
    ccf_analytic,
    ccf_curve_analytic,
    power_track,
    k_factor_track,
    power_dynamic_range_db,
    sliding_aps,
    write_realization,
    run_cli,
)
from . import _nsmimo


def default_config():
    """Built-in defaults as a dict."""
    return _json.loads(_nsmimo.default_config_json())


def canonical_config(config):
    """Validate a config dict and return it with every key filled in."""
    return _json.loads(_nsmimo.canonical_config_json(_json.dumps(config)))


def config_hash(config):
    return _nsmimo.config_hash(_json.dumps(config))


def build_scenario(config=None):
    return _nsmimo.Scenario(_json.dumps(default_config() if config is None else config))


def read_tensor(path):
    """Returns (header dict, complex128 ndarray)."""
    header, data = _nsmimo.read_tensor(str(path))
    return _json.loads(header), data
