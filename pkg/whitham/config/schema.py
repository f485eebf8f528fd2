# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

import json
from importlib import resources
from typing import Any, Dict

__all__ = ["BRANCH_CONFIG_SCHEMA", "WAVE_SCHEMA"]


def _load_schema(name: str) -> Dict[str, Any]:
    schema_file = resources.files("whitham.config").joinpath("schemas").joinpath(name)
    with schema_file.open("r", encoding="utf-8") as f:
        return json.load(f)


BRANCH_CONFIG_SCHEMA = _load_schema("branch_config.json")
WAVE_SCHEMA = _load_schema("wave.json")
