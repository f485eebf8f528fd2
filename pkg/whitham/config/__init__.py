# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

from whitham.config.config import (
    ConfigErrorBase,
    ConfigValidationError,
    ConfigYAMLError,
    ContinuationConfig,
)
from whitham.config.schema import BRANCH_CONFIG_SCHEMA, WAVE_SCHEMA

__all__ = [
    "ConfigErrorBase",
    "ConfigValidationError",
    "ConfigYAMLError",
    "ContinuationConfig",
    "BRANCH_CONFIG_SCHEMA",
    "WAVE_SCHEMA",
]
