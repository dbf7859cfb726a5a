"""Check results shared by the verification routines."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Iterator

PASS, FAIL, SKIP = "pass", "fail", "skip"


@dataclass
class CheckResult:
    id: str
    params: dict[str, Any] = field(default_factory=dict)
    status: str = PASS
    witness: dict[str, Any] | None = None
    elapsed: float = 0.0
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.status not in (PASS, FAIL, SKIP):
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == FAIL and not self.witness:
            raise ValueError(f"failing check {self.id} needs a witness")

    @property
    def ok(self) -> bool:
        return self.status != FAIL

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "id": self.id,
            "params": self.params,
            "status": self.status,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        out["elapsed_ms"] = round(self.elapsed * 1000.0, 3)
        return out


def passed(id: str, params: dict[str, Any], **details: Any) -> CheckResult:
    return CheckResult(id, params, PASS, None, 0.0, dict(details))


def failed(id: str, params: dict[str, Any], witness: dict[str, Any], **details: Any) -> CheckResult:
    return CheckResult(id, params, FAIL, witness, 0.0, dict(details))


def skipped(id: str, params: dict[str, Any], reason: str) -> CheckResult:
    return CheckResult(id, params, SKIP, {"reason": reason})


@contextmanager
def timed() -> Iterator[list[float]]:
    """``with timed() as t: ...`` leaves the wall time in t[0]."""
    box = [0.0]
    t0 = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = time.perf_counter() - t0


def merge(results: list[CheckResult], extra: CheckResult) -> CheckResult:
    """Fold ``results`` into one check named like ``extra``; first failure wins."""
    for r in results:
        if r.status == FAIL:
            w = dict(r.witness or {})
            w.setdefault("sub_check", r.id)
            return CheckResult(extra.id, extra.params, FAIL, w, sum(x.elapsed for x in results))
    return CheckResult(extra.id, extra.params, extra.status, extra.witness, sum(x.elapsed for x in results), extra.details)
