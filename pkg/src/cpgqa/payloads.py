"""Canonical JSON text shared by the library, CLI, and HTTP surfaces.

All three interfaces emit payloads through :func:`canonical_json` so that
identical inputs produce byte-identical JSON everywhere.
"""

from __future__ import annotations

import json


def canonical_json(payload) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False)
