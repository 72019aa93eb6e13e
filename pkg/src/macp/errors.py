"""Exceptions and the shared violation record type."""

from __future__ import annotations

from dataclasses import dataclass, field


class MacpError(Exception):
    """Base class for all package errors."""


class RankDeficient(MacpError):
    """Input vectors/matrix do not span the required rank."""


class InvalidChirotope(MacpError):
    """Sign data fails the rank-2 Grassmann-Pluecker validation."""


class LoopElement(MacpError):
    """Operation requires a non-loop element."""


class NotAPartialOrder(MacpError):
    """Relation failed reflexivity, antisymmetry, or transitivity."""


class NotComparable(MacpError):
    """Interval endpoints are not comparable."""


class BudgetExceeded(MacpError):
    """Search node budget exhausted; increase the budget and retry."""


class LimitExceeded(MacpError):
    """Requested ground-set size above the configured enumeration limit."""


class ElementNotFound(MacpError):
    """Element is not a member of the poset."""


class RealizationMismatch(MacpError):
    """Supplied vector realization does not realize the oriented matroid."""


class NotACoatom(MacpError):
    """Supplied face is not produced by any covering move."""


class EmptyBelowSet(MacpError):
    """No nonzero covector lies below the given sign vector."""


class NonUniqueMax(MacpError):
    """Maximal dominated covector is not unique; upstream data is corrupt."""


class InvalidFlag(MacpError):
    """Pair is not a valid rank-1-in-rank-2 flag."""


class NotContained(MacpError):
    """Row space containment required by the flag map fails."""


@dataclass(frozen=True)
class Violation:
    """First failed check of a validator, with a witness.

    Validators return ``None`` on success and a ``Violation`` otherwise, so
    a failed mathematical property is a value, not an exception.
    """

    rule: str
    witness: tuple = field(default_factory=tuple)
    detail: str = ""

    def __str__(self) -> str:
        msg = f"violation of {self.rule}: witness={self.witness}"
        return msg + (f" ({self.detail})" if self.detail else "")
