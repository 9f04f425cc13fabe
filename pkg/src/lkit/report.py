"""Versioned experiment reports and reproducible seeding."""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

FORMAT_VERSION = 1

__all__ = ["FORMAT_VERSION", "Report", "trial_rng", "write_atomic", "render_text"]


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """PCG64 stream for one trial, derived from (seed, trial) by SeedSequence.

    Streams do not depend on execution order, so concurrent runs reproduce
    sequential ones bit for bit.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(trial)])))


@dataclass
class Report:
    command: str
    config: dict
    records: list = field(default_factory=list)
    aggregate: dict = field(default_factory=dict)
    timings: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "format_version": FORMAT_VERSION,
            "command": self.command,
            "config": self.config,
            "records": self.records,
            "aggregate": self.aggregate,
        }
        if self.timings is not None:
            out["timings"] = self.timings
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.6g}"
    if isinstance(x, dict) and "terms" in x:
        return f"<({x['p']},{x['q']})-form on C^{x['n']}, {len(x['terms'])} terms>"
    if isinstance(x, dict):
        return "{" + ", ".join(f"{k}: {_fmt(v)}" for k, v in x.items()) + "}"
    if isinstance(x, list) and len(x) > 8:
        return f"[{len(x)} items]"
    return str(x)


def render_text(report: Report) -> str:
    """Plain-text summary: config, one line per record, aggregate."""
    lines = [f"lkit {report.command} (format {FORMAT_VERSION})"]
    lines.append("config: " + ", ".join(f"{k}={_fmt(v)}" for k, v in sorted(report.config.items())))
    for rec in report.records:
        lines.append("  " + "  ".join(f"{k}={_fmt(v)}" for k, v in rec.items()
                                      if not isinstance(v, (dict, list)) or k in ("min_sigma", "signature")))
    lines.append("aggregate: " + ", ".join(f"{k}={_fmt(v)}" for k, v in sorted(report.aggregate.items())))
    return "\n".join(lines) + "\n"
