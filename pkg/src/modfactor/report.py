"""Verification reports printed by the CLI."""
from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Report:
    """Outcome of one command.

    Each defect is compared against its own threshold (``verify_tol``
    unless listed in ``thresholds``); ``passed`` holds iff every defect is
    within its threshold and no mathematical error was raised.
    """

    command: str
    config: dict
    defects: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    dims: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    seed: int | None = None
    error: str | None = None

    def threshold(self, name) -> float:
        return self.thresholds.get(name, self.config["verify_tol"])

    @property
    def passed(self) -> bool:
        if self.error is not None:
            return False
        return all(d <= self.threshold(k) for k, d in self.defects.items())

    def as_dict(self) -> dict:
        out = {
            "command": self.command,
            "pass": self.passed,
            "defects": {k: float(v) for k, v in self.defects.items()},
            "dims": {k: int(v) for k, v in self.dims.items()},
        }
        if self.thresholds:
            out["thresholds"] = dict(self.thresholds)
        if self.values:
            out["values"] = self.values
        out["config"] = self.config
        if self.seed is not None:
            out["seed"] = self.seed
        if self.error is not None:
            out["error"] = self.error
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=False) + "\n"

    def to_text(self) -> str:
        lines = [f"{self.command}: {'PASS' if self.passed else 'FAIL'}"]
        if self.error:
            lines.append(f"  error: {self.error}")
        for k, v in self.defects.items():
            mark = "ok" if v <= self.threshold(k) else "FAIL"
            lines.append(f"  {k:<28} {v:.3e}  (<= {self.threshold(k):.1e}) {mark}")
        for k, v in self.dims.items():
            lines.append(f"  dim {k:<24} {v}")
        for k, v in self.values.items():
            lines.append(f"  {k:<28} {v}")
        return "\n".join(lines) + "\n"
