"""Interpolation schedules s(t) with closed-form derivatives.

s must be monotone non-decreasing with s(0)=0 and s(1)=1; the derivative
is the analytic one (endpoints use the closed form, never a numerical
difference).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ContractError


@dataclass(frozen=True)
class Schedule:
    kind: str
    s: Callable[[float], float]
    sdot: Callable[[float], float]

    def validate(self, grid_points: int = 1001) -> None:
        if abs(self.s(0.0)) > 1e-12 or abs(self.s(1.0) - 1.0) > 1e-12:
            raise ContractError("schedule must satisfy s(0)=0, s(1)=1")
        ts = np.linspace(0.0, 1.0, grid_points)
        vals = np.array([self.s(float(t)) for t in ts])
        if np.any(np.diff(vals) < -1e-12):
            raise ContractError("schedule must be monotone non-decreasing")


def make_schedule(kind: str, s: Callable | None = None, sdot: Callable | None = None) -> Schedule:
    """linear: s(t)=t; cubic: s(t)=1-(1-t)^3; custom: caller-provided pair."""
    if kind == "linear":
        sched = Schedule("linear", lambda t: float(t), lambda t: 1.0)
    elif kind == "cubic":
        sched = Schedule("cubic", lambda t: 1.0 - (1.0 - t) ** 3, lambda t: 3.0 * (1.0 - t) ** 2)
    elif kind == "custom":
        if s is None or sdot is None:
            raise ContractError("custom schedule needs s and sdot callables")
        sched = Schedule("custom", s, sdot)
    else:
        raise ContractError(f"unknown schedule kind {kind!r}")
    sched.validate()
    return sched
