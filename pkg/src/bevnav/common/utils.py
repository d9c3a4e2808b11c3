from __future__ import annotations

import hashlib
import json
import math
from typing import Any

from pydantic import ValidationError


def json_dumps_canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True, default=str)


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def make_config_hash(*parts: Any) -> str:
    # 16 hex chars identify a configuration across artifacts.
    payload = json_dumps_canonical(list(parts))
    return sha256_text(payload)[:16]


def wrap_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.atan2(math.sin(theta), math.cos(theta))
    if wrapped == -math.pi:
        return math.pi
    return wrapped


def format_validation_error(err: ValidationError, prefix: str = "") -> str:
    """One ``path: message`` entry per offending field."""
    parts = []
    for item in err.errors():
        loc = ".".join(str(p) for p in item["loc"])
        if prefix:
            loc = f"{prefix}.{loc}" if loc else prefix
        parts.append(f"{loc}: {item['msg']}")
    return "invalid configuration: " + "; ".join(parts)
