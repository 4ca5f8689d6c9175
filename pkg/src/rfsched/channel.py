"""Alternating-renewal ON/OFF channel matrix and correlation conditions.

Each of the n*n queue-server links alternates independently between ON
periods ~ U and OFF periods ~ D.  The matrix initializes from the
time-stationary law (phase by mean-proportional probability, residual by
the integrated-tail law), which realizes a system "started at minus
infinity".
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dists import DiscretePositiveDist


class CondA(enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class MarkovChannelParams:
    """Two-state Markov channel: OFF->ON w.p. p01, ON->OFF w.p. p10."""

    p01: float
    p10: float

    def __post_init__(self):
        if not (0.0 < self.p01 < 1.0 and 0.0 < self.p10 < 1.0):
            raise ValueError("transition probabilities must lie in (0, 1)")


@dataclass(frozen=True)
class ChannelSpec:
    """Channel family: iid(q), markov(p01, p10), or renewal(on, off).

    The iid and Markov families are geometric-period special cases; the
    renewal family takes arbitrary period distributions.  The seven
    simulation-study settings are addressable as preset(1)..preset(7).
    """

    kind: str
    q: float = 0.0
    markov: MarkovChannelParams | None = None
    on: DiscretePositiveDist | None = None
    off: DiscretePositiveDist | None = None
    preset: int | None = None

    @classmethod
    def iid(cls, q: float, preset: int | None = None) -> "ChannelSpec":
        if not (0.0 < q < 1.0):
            raise ValueError("iid ON probability must be in (0, 1)")
        return cls("iid", q=q, preset=preset)

    @classmethod
    def markov_chain(cls, p01: float, p10: float, preset: int | None = None) -> "ChannelSpec":
        return cls("markov", markov=MarkovChannelParams(p01, p10), preset=preset)

    @classmethod
    def renewal(cls, on: DiscretePositiveDist, off: DiscretePositiveDist) -> "ChannelSpec":
        return cls("renewal", on=on, off=off)

    def dists(self) -> tuple[DiscretePositiveDist, DiscretePositiveDist]:
        """(on-period, off-period) distributions of this channel."""
        if self.kind == "iid":
            return (
                DiscretePositiveDist.geometric(1.0 - self.q),
                DiscretePositiveDist.geometric(self.q),
            )
        if self.kind == "markov":
            return (
                DiscretePositiveDist.geometric(self.markov.p10),
                DiscretePositiveDist.geometric(self.markov.p01),
            )
        return self.on, self.off

    def pi0(self) -> float:
        on, off = self.dists()
        return pi0(on, off)

    def spec_string(self) -> str:
        if self.preset is not None:
            return f"preset({self.preset})"
        if self.kind == "iid":
            return f"iid({self.q:g})"
        if self.kind == "markov":
            return f"markov({self.markov.p01:g},{self.markov.p10:g})"
        return f"renewal(on={self.on.spec_string()},off={self.off.spec_string()})"


def preset(k: int) -> ChannelSpec:
    """Channel settings 1..7 of the simulation study: 1-2 iid (q=0.6, 0.5),
    3-7 Markov with increasing negative correlation from 3-4 to 5-7."""
    table = {
        1: ChannelSpec.iid(0.6, preset=1),
        2: ChannelSpec.iid(0.5, preset=2),
        3: ChannelSpec.markov_chain(0.06, 0.04, preset=3),
        4: ChannelSpec.markov_chain(0.15, 0.10, preset=4),
        5: ChannelSpec.markov_chain(0.99, 0.99, preset=5),
        6: ChannelSpec.markov_chain(0.90, 0.90, preset=6),
        7: ChannelSpec.markov_chain(0.75, 0.75, preset=7),
    }
    if k not in table:
        raise ValueError(f"preset must be 1..7, got {k}")
    return table[k]


def pi0(on_dist: DiscretePositiveDist, off_dist: DiscretePositiveDist) -> float:
    """Stationary OFF probability E[D] / (E[U] + E[D])."""
    eu, ed = on_dist.mean(), off_dist.mean()
    return ed / (eu + ed)


def condition_a_check(spec: ChannelSpec) -> CondA:
    """Non-negative correlation condition.

    iid channels always satisfy it; a Markov channel iff p01 + p10 <= 1;
    for general renewal periods there is no checkable criterion, so the
    answer is Unknown rather than a guess.
    """
    if spec.kind == "iid":
        return CondA.HOLDS
    if spec.kind == "markov":
        return CondA.HOLDS if spec.markov.p01 + spec.markov.p10 <= 1.0 else CondA.FAILS
    return CondA.UNKNOWN


def condition_b_check(off_dist: DiscretePositiveDist, tol: float = 1e-9) -> bool:
    """True iff the OFF period is memoryless: geometric by kind, or a table
    matching a geometric pmf within ``tol`` over its whole support."""
    if off_dist.kind == 0:
        return True
    if off_dist.kind == 1:
        return False
    s = off_dist.pmf(1)
    if s <= 0.0:
        return False
    k_top = off_dist.support_max
    for k in range(1, k_top + 1):
        if abs(off_dist.pmf(k) - s * (1.0 - s) ** (k - 1)) > tol:
            return False
    return True


def min_conditional_on_prob(params: MarkovChannelParams) -> float:
    """Exact floor of P(C(t)=1 | any history) for a Markov channel:
    min(p01, 1 - p10), attained at whichever previous state is worse."""
    return min(params.p01, 1.0 - params.p10)


class ChannelMatrix:
    """rows x cols independent homogeneous renewal channels (vectorized).

    Single-writer: one simulation replication owns an instance.  ``step``
    returns the connectivity of the current slot and then advances every
    cell; cells whose residual hits zero flip phase and draw a fresh
    period from the opposite distribution.
    """

    def __init__(self, rows, cols, on_dist, off_dist, phase, residual):
        self.rows = rows
        self.cols = cols
        self.on_dist = on_dist
        self.off_dist = off_dist
        self.phase = phase  # bool: True = ON
        self.residual = residual  # slots remaining incl. current; >= 1

    @classmethod
    def equilibrium(cls, rows: int, on_dist, off_dist, rng: np.random.Generator, cols: int | None = None):
        """Time-stationary initialization: ON w.p. E[U]/(E[U]+E[D]), residual
        from the equilibrium residual law of the selected phase."""
        cols = rows if cols is None else cols
        p_on = 1.0 - pi0(on_dist, off_dist)
        phase = rng.random((rows, cols)) < p_on
        residual = np.empty((rows, cols), dtype=np.int64)
        residual[phase] = _equilibrium_residuals(on_dist, int(phase.sum()), rng)
        residual[~phase] = _equilibrium_residuals(off_dist, int((~phase).sum()), rng)
        return cls(rows, cols, on_dist, off_dist, phase, residual)

    def step(self, rng: np.random.Generator) -> np.ndarray:
        conn = self.phase.astype(np.uint8)
        self.residual -= 1
        renew = self.residual == 0
        if renew.any():
            to_off = renew & self.phase
            to_on = renew & ~self.phase
            n_off = int(to_off.sum())
            n_on = int(to_on.sum())
            if n_off:
                self.residual[to_off] = self.off_dist.sample(rng, n_off)
            if n_on:
                self.residual[to_on] = self.on_dist.sample(rng, n_on)
            self.phase[to_off] = False
            self.phase[to_on] = True
        return conn

    def connectivity(self) -> np.ndarray:
        return self.phase.astype(np.uint8)


def _equilibrium_residuals(dist: DiscretePositiveDist, count: int, rng: np.random.Generator):
    if count == 0:
        return np.empty(0, dtype=np.int64)
    if dist.kind == 0:  # geometric residual law is the period law itself
        return rng.geometric(dist.param, size=count)
    if dist.kind == 1:
        d = int(dist.param)
        return rng.integers(1, d + 1, size=count)
    _, _, _, eq_cdf = dist.kernel_pack()
    r = np.searchsorted(eq_cdf, rng.random(count), side="right") + 1
    return np.minimum(r, eq_cdf.size).astype(np.int64)


def equilibrium_init(rows: int, on_dist, off_dist, rng: np.random.Generator, cols: int | None = None) -> ChannelMatrix:
    return ChannelMatrix.equilibrium(rows, on_dist, off_dist, rng, cols=cols)


def stationary_off_frequency(spec: ChannelSpec, cells: int, rng: np.random.Generator) -> float:
    """Fraction of OFF links among ``cells`` independent equilibrium-
    initialized channels observed for one slot (iid Bernoulli(pi0) draws,
    so a plain binomial error band applies)."""
    on, off = spec.dists()
    rows = max(1, cells // 1000)
    cols = (cells + rows - 1) // rows
    mat = ChannelMatrix.equilibrium(rows, on, off, rng, cols=cols)
    conn = mat.step(rng).ravel()[:cells]
    return float((conn == 0).mean())
