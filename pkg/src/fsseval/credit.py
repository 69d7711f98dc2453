"""Author credit shares (fractional contribution to a publication)."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .corpus import AuthorSlot
from .corpus import decimal_fraction as _dec


class PolicyKind(str, enum.Enum):
    EQUAL_SPLIT = "EqualSplit"
    FIRST_LAST_EMPHASIS = "FirstLastEmphasis"


@dataclass(frozen=True)
class WeightTable:
    """Position weights for the FirstLastEmphasis policy.

    Intramural bylines (first and last author at the same institution) give
    ``intra_ends`` to each end and split ``intra_others`` among the rest.
    Extramural bylines give ``extra_ends`` to each end, ``extra_seconds`` to
    the second and second-to-last author, and split ``extra_others``.
    """

    intra_ends: float = 0.40
    intra_others: float = 0.20
    extra_ends: float = 0.30
    extra_seconds: float = 0.15
    extra_others: float = 0.10

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            if getattr(self, name) < 0:
                raise ValueError(f"negative weight {name}={getattr(self, name)}")
        if not math.isclose(2 * self.intra_ends + self.intra_others, 1.0, abs_tol=1e-9):
            raise ValueError("intramural weights must sum to 1")
        if not math.isclose(
            2 * self.extra_ends + 2 * self.extra_seconds + self.extra_others, 1.0, abs_tol=1e-9
        ):
            raise ValueError("extramural weights must sum to 1")
        if self.intra_ends == 0 or self.extra_ends == 0:
            raise ValueError("end weights must be positive")


@dataclass(frozen=True)
class BylinePolicy:
    kind: PolicyKind = PolicyKind.EQUAL_SPLIT
    weights: WeightTable = field(default_factory=WeightTable)

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.kind is PolicyKind.FIRST_LAST_EMPHASIS:
            d["weights"] = {k: getattr(self.weights, k) for k in self.weights.__dataclass_fields__}
        return d

    @classmethod
    def from_dict(cls, data) -> "BylinePolicy":
        if isinstance(data, str):
            return cls(PolicyKind(data))
        weights = WeightTable(**data.get("weights", {}))
        return cls(PolicyKind(data.get("kind", PolicyKind.EQUAL_SPLIT.value)), weights)


EQUAL_SPLIT = BylinePolicy(PolicyKind.EQUAL_SPLIT)
FIRST_LAST_EMPHASIS = BylinePolicy(PolicyKind.FIRST_LAST_EMPHASIS)


@dataclass(frozen=True)
class PolicyConfig:
    """Byline policy per publication field; unlisted fields use ``default``."""

    by_field: Mapping[str, BylinePolicy] = field(default_factory=dict)
    default: BylinePolicy = EQUAL_SPLIT

    def policy_for(self, field_id: str) -> BylinePolicy:
        return self.by_field.get(field_id, self.default)

    def to_dict(self) -> dict:
        return {
            "default": self.default.to_dict(),
            "by_field": {f: self.by_field[f].to_dict() for f in sorted(self.by_field)},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "PolicyConfig":
        by_field = {f: BylinePolicy.from_dict(p) for f, p in data.get("by_field", {}).items()}
        default = BylinePolicy.from_dict(data.get("default", PolicyKind.EQUAL_SPLIT.value))
        return cls(by_field, default)


def is_intramural(byline: Sequence[AuthorSlot]) -> bool:
    return byline[0].institution_id == byline[-1].institution_id


def byline_weights_exact(byline: Sequence[AuthorSlot], policy: BylinePolicy) -> list[Fraction]:
    """Rational credit share of every position in ``byline`` (sums to exactly 1)."""
    n = len(byline)
    if n == 0:
        raise ValueError("empty byline")
    if n == 1:
        return [Fraction(1)]
    if policy.kind is PolicyKind.EQUAL_SPLIT:
        return [Fraction(1, n)] * n

    t = policy.weights
    if is_intramural(byline):
        ends, seconds, others = _dec(t.intra_ends), Fraction(0), _dec(t.intra_others)
        n_seconds = 0
    else:
        ends, seconds, others = _dec(t.extra_ends), _dec(t.extra_seconds), _dec(t.extra_others)
        # position 2 and n-1 coincide at n == 3 and vanish into the ends at n == 2
        n_seconds = min(2, n - 2)
    n_others = n - 2 - n_seconds

    w = [Fraction(0)] * n
    w[0] = w[-1] = ends
    if n_seconds:
        w[1] = w[-2] = seconds
    if n_others:
        share = others / n_others
        for i in range(1 + n_seconds // 2, n - 1 - n_seconds // 2):
            w[i] = share
    total = sum(w)
    if total != 1:
        # roles missing (or a table that doesn't sum to 1 exactly): rescale
        w = [x / total for x in w]
    return w


def byline_weights(byline: Sequence[AuthorSlot], policy: BylinePolicy) -> list[float]:
    """Credit share of every position in ``byline`` (sums to 1)."""
    return [float(x) for x in byline_weights_exact(byline, policy)]


def fractional_contribution(
    byline: Sequence[AuthorSlot], position: int, policy: BylinePolicy = EQUAL_SPLIT
) -> float:
    """Share of credit for the author at 1-based ``position``."""
    if not 1 <= position <= len(byline):
        raise ValueError(f"position {position} outside 1..{len(byline)}")
    return byline_weights(byline, policy)[position - 1]
