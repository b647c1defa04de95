"""Named numeric checks shared by circuit files, reproduce bundles and reports."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: float
    expected: float
    tolerance: float

    def to_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return (f"{mark}  {self.name}: measured={self.measured:.12g} "
                f"expected={self.expected:.12g} tol={self.tolerance:.3g}")


def close(name: str, measured: float, expected: float, tolerance: float) -> Check:
    measured = float(measured)
    return Check(name, abs(measured - expected) <= tolerance, measured, float(expected), float(tolerance))


def near_one(name: str, measured: float, tolerance: float) -> Check:
    """Fidelity-style check: passes when ``measured >= 1 - tolerance``."""
    measured = float(measured)
    return Check(name, measured >= 1.0 - tolerance, measured, 1.0, float(tolerance))


def below(name: str, measured: float, bound: float) -> Check:
    measured = float(measured)
    return Check(name, measured < bound, measured, 0.0, float(bound))


def holds(name: str, condition: bool) -> Check:
    return Check(name, bool(condition), float(bool(condition)), 1.0, 0.0)
