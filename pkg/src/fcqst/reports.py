"""Small report records returned by constraint checkers."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Violation:
    """One bound violation: |value| exceeded ``bound`` for control ``label``."""

    label: str
    value: float
    bound: float


@dataclass(frozen=True)
class ConstraintReport:
    """Outcome of checking a set of amplitude bounds.

    ``max_ratio`` is max |value| / bound over all checked controls (0.0 when
    nothing was checked), so a report with no violations and max_ratio == 1
    means the bounds are exactly saturated somewhere.
    """

    violations: tuple[Violation, ...] = field(default_factory=tuple)
    max_ratio: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations
