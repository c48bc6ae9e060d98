from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one invariant check.

    ``residual`` is the worst deviation observed and ``passed`` says whether
    it stayed within ``tol``. ``data`` carries check-specific extras such as
    the offending index pair, in JSON-friendly form.
    """

    name: str
    passed: bool
    residual: float
    tol: float
    detail: str = ""
    data: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        out = {
            "name": self.name,
            "passed": bool(self.passed),
            "residual": float(self.residual),
            "tol": float(self.tol),
        }
        if self.detail:
            out["detail"] = self.detail
        if self.data:
            out["data"] = _jsonable(self.data)
        return out

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        msg = f"[{status}] {self.name}: residual={self.residual:.3e} tol={self.tol:.1e}"
        if self.detail:
            msg += f" ({self.detail})"
        return msg


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj
