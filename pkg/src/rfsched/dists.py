"""Discrete positive-integer-valued period distributions.

These model ON/OFF period lengths of the alternating-renewal channels and
expose the survival-ratio and hazard quantities that the rate-function
formulas consume.  Instances are immutable and safe to share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

GEOMETRIC = 0
DETERMINISTIC = 1
TABLE = 2

_MASS_TOL = 1e-12


@dataclass(frozen=True)
class DiscretePositiveDist:
    """Distribution on {1, 2, ...}: geometric(s), deterministic(d), or a
    finite pmf table over {1..K}.

    Heavy-tailed inputs with infinite mean are rejected at construction;
    aperiodicity of user-supplied tables is not checked (documented
    limitation: the stationary OFF-probability limit needs U+D aperiodic).
    """

    kind: int
    param: float = 0.0
    table: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        if self.kind == GEOMETRIC:
            if not (0.0 < self.param <= 1.0):
                raise ValueError(f"geometric parameter must be in (0, 1], got {self.param}")
        elif self.kind == DETERMINISTIC:
            d = self.param
            if d < 1 or d != int(d):
                raise ValueError(f"deterministic value must be a positive integer, got {d}")
        elif self.kind == TABLE:
            pmf = np.asarray(self.table, dtype=float)
            if pmf.ndim != 1 or pmf.size == 0:
                raise ValueError("table pmf must be a nonempty 1-d sequence")
            if np.any(pmf < 0):
                raise ValueError("table pmf entries must be nonnegative")
            if abs(pmf.sum() - 1.0) > _MASS_TOL:
                raise ValueError(f"table pmf must sum to 1 within {_MASS_TOL}, got {pmf.sum()!r}")
            object.__setattr__(self, "table", pmf)
        else:
            raise ValueError(f"unknown distribution kind {self.kind}")

    @classmethod
    def geometric(cls, s: float) -> "DiscretePositiveDist":
        return cls(GEOMETRIC, float(s))

    @classmethod
    def deterministic(cls, d: int) -> "DiscretePositiveDist":
        return cls(DETERMINISTIC, float(d))

    @classmethod
    def from_table(cls, pmf) -> "DiscretePositiveDist":
        return cls(TABLE, 0.0, np.asarray(pmf, dtype=float))

    # -- basic law ---------------------------------------------------------

    def pmf(self, k: int) -> float:
        """P(X = k) for integer k >= 1 (0 outside the support)."""
        if k < 1:
            return 0.0
        if self.kind == GEOMETRIC:
            s = self.param
            return s * (1.0 - s) ** (k - 1)
        if self.kind == DETERMINISTIC:
            return 1.0 if k == int(self.param) else 0.0
        return float(self.table[k - 1]) if k <= self.table.size else 0.0

    def survival(self, k: int) -> float:
        """P(X >= k+1) = 1 - F(k); survival(0) == 1."""
        if k <= 0:
            return 1.0
        if self.kind == GEOMETRIC:
            return (1.0 - self.param) ** k
        if self.kind == DETERMINISTIC:
            return 1.0 if k < int(self.param) else 0.0
        if k >= self.table.size:
            return 0.0
        return float(self.table[k:].sum())

    def mean(self) -> float:
        if self.kind == GEOMETRIC:
            return 1.0 / self.param
        if self.kind == DETERMINISTIC:
            return self.param
        k = np.arange(1, self.table.size + 1)
        return float((k * self.table).sum())

    @property
    def support_max(self) -> int | None:
        """Largest support point; None for the geometric (unbounded)."""
        if self.kind == GEOMETRIC:
            return None
        if self.kind == DETERMINISTIC:
            return int(self.param)
        nz = np.nonzero(self.table)[0]
        return int(nz[-1] + 1) if nz.size else 0

    def sample(self, rng: np.random.Generator, size=None):
        if self.kind == GEOMETRIC:
            return rng.geometric(self.param, size=size)
        if self.kind == DETERMINISTIC:
            d = int(self.param)
            return d if size is None else np.full(size, d, dtype=np.int64)
        cdf = np.cumsum(self.table)
        u = rng.random(size if size is not None else 1)
        out = np.searchsorted(cdf, u, side="right") + 1
        out = np.minimum(out, self.table.size)
        return int(out[0]) if size is None else out.astype(np.int64)

    # -- rate-function inputs ---------------------------------------------

    def min_off_hazard(self) -> float:
        """min over k >= 0 of P(X = k+1) / P(X >= k+1).

        This is the worst-case one-slot escape probability of an OFF period
        (constantly s for geometric, 0 whenever the support has an interior
        gap before its edge)."""
        if self.kind == GEOMETRIC:
            return self.param
        k_top = self.support_max
        best = 1.0
        for k in range(k_top):
            surv = self.survival(k)
            if surv <= 0.0:
                break
            best = min(best, self.pmf(k + 1) / surv)
        return best

    def min_on_survival_ratio(self) -> float:
        """min over k >= 0 of P(X >= k+2) / P(X >= k+1).

        Worst-case one-slot continuation probability of an ON period; hits 0
        at the edge of any finite support (degenerate case for the bound)."""
        if self.kind == GEOMETRIC:
            return 1.0 - self.param
        k_top = self.support_max
        best = 1.0
        for k in range(k_top):
            surv = self.survival(k)
            if surv <= 0.0:
                break
            best = min(best, self.survival(k + 1) / surv)
        return best

    def max_survival_ratio(self, b: int):
        """sup over tau >= 0 of survival(tau) / survival(tau + b).

        Returns +inf when some tau has survival(tau) > 0 but
        survival(tau + b) == 0; exactly 1.0 for b == 0."""
        value, _ = self._max_survival_ratio_detail(b)
        return value

    def log_max_survival_ratio(self, b: int):
        """log of max_survival_ratio(b), evaluated analytically for the
        geometric so the Theorem-2 identity holds to float precision."""
        if b < 0:
            raise ValueError("b must be >= 0")
        if b == 0:
            return 0.0
        if self.kind == GEOMETRIC:
            if self.param >= 1.0:
                return math.inf
            return -b * math.log1p(-self.param)
        value, _ = self._max_survival_ratio_detail(b)
        return math.log(value) if value != math.inf else math.inf

    def _max_survival_ratio_detail(self, b: int):
        if b < 0:
            raise ValueError("b must be >= 0")
        if b == 0:
            return 1.0, True
        if self.kind == GEOMETRIC:
            if self.param >= 1.0:
                return math.inf, True
            return (1.0 - self.param) ** (-b), True
        k_top = self.support_max
        best = 1.0
        for tau in range(k_top):
            num = self.survival(tau)
            if num <= 0.0:
                break
            den = self.survival(tau + b)
            if den <= 0.0:
                return math.inf, True
            best = max(best, num / den)
        return best, True

    # -- kernel / config plumbing -----------------------------------------

    def kernel_pack(self):
        """(kind, param, cdf, equilibrium-residual cdf) arrays for the slot
        engine; analytic kinds pass empty arrays."""
        empty = np.empty(0)
        if self.kind == GEOMETRIC:
            return GEOMETRIC, self.param, empty, empty
        if self.kind == DETERMINISTIC:
            return DETERMINISTIC, self.param, empty, empty
        cdf = np.cumsum(self.table)
        cdf[-1] = 1.0
        mean = self.mean()
        surv = np.concatenate(([1.0], 1.0 - cdf[:-1]))
        eq_cdf = np.cumsum(surv / mean)
        eq_cdf[-1] = 1.0
        return TABLE, 0.0, cdf, eq_cdf

    def equilibrium_residual_pmf(self, r: int) -> float:
        """Integrated-tail law P(R = r) = survival(r-1) / mean, r >= 1."""
        if r < 1:
            return 0.0
        return self.survival(r - 1) / self.mean()

    def spec_string(self) -> str:
        if self.kind == GEOMETRIC:
            return f"geometric({self.param:g})"
        if self.kind == DETERMINISTIC:
            return f"deterministic({int(self.param)})"
        return "table(" + ",".join(f"{p:g}" for p in self.table) + ")"

    def cache_key(self):
        if self.kind == TABLE:
            return (self.kind, tuple(self.table.tolist()))
        return (self.kind, self.param)
