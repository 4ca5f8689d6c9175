"""Per-queue arrival processes and their cumulant generating functions.

All processes are bounded (at most L packets per queue per slot), emit the
maximum batch with positive probability, and have mean rate below one
packet per slot per queue -- the regime in which the delay rate-function
analysis applies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

BATCH = 0
GENERAL_IID = 1
TWO_STATE_MM = 2


@dataclass(frozen=True)
class ArrivalProcess:
    """Arrival law for a single queue; i.i.d. copies across queues.

    kinds:
      * batch(L, mu): L packets w.p. mu, else none;
      * general_iid(pmf): arbitrary pmf on {0..L};
      * two_state_mm(a01, a10, pmf0, pmf1): a two-state modulating chain
        (0 -> 1 w.p. a01, 1 -> 0 w.p. a10), per-state arrival pmfs.
    """

    kind: int
    L: int = 0
    mu: float = 0.0
    pmf0: np.ndarray = field(default_factory=lambda: np.empty(0))
    pmf1: np.ndarray = field(default_factory=lambda: np.empty(0))
    a01: float = 0.0
    a10: float = 0.0

    def __post_init__(self):
        if self.kind == BATCH:
            if self.L < 1:
                raise ValueError("batch size L must be >= 1")
            if not (0.0 < self.mu < 1.0):
                raise ValueError("batch probability must be in (0, 1)")
        elif self.kind == GENERAL_IID:
            pmf = self._clean_pmf(self.pmf0)
            object.__setattr__(self, "pmf0", pmf)
            object.__setattr__(self, "L", pmf.size - 1)
        elif self.kind == TWO_STATE_MM:
            p0 = self._clean_pmf(self.pmf0, trim=False)
            p1 = self._clean_pmf(self.pmf1, trim=False)
            width = max(p0.size, p1.size)
            p0 = np.pad(p0, (0, width - p0.size))
            p1 = np.pad(p1, (0, width - p1.size))
            object.__setattr__(self, "pmf0", p0)
            object.__setattr__(self, "pmf1", p1)
            object.__setattr__(self, "L", width - 1)
            if not (0.0 < self.a01 < 1.0 and 0.0 < self.a10 < 1.0):
                raise ValueError("modulating transition probabilities must be in (0, 1)")
        else:
            raise ValueError(f"unknown arrival kind {self.kind}")
        if self.max_batch_prob() <= 0.0:
            raise ValueError("P(A = L) must be positive for the maximum batch L")
        if self.mean_rate() >= 1.0:
            raise ValueError(
                f"mean arrival rate {self.mean_rate():.4f} >= 1 packet/slot: unstable by assumption"
            )

    @staticmethod
    def _clean_pmf(pmf, trim=True):
        p = np.asarray(pmf, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("arrival pmf must be a nonempty 1-d sequence")
        if np.any(p < 0):
            raise ValueError("arrival pmf entries must be nonnegative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("arrival pmf must sum to 1 within 1e-12")
        if trim:
            nz = np.nonzero(p)[0]
            p = p[: nz[-1] + 1] if nz.size else p[:1]
        return p

    @classmethod
    def batch(cls, L: int, mu: float) -> "ArrivalProcess":
        return cls(BATCH, L=int(L), mu=float(mu))

    @classmethod
    def general_iid(cls, pmf) -> "ArrivalProcess":
        return cls(GENERAL_IID, pmf0=np.asarray(pmf, dtype=float))

    @classmethod
    def two_state_mm(cls, a01, a10, pmf0, pmf1) -> "ArrivalProcess":
        return cls(
            TWO_STATE_MM,
            pmf0=np.asarray(pmf0, dtype=float),
            pmf1=np.asarray(pmf1, dtype=float),
            a01=float(a01),
            a10=float(a10),
        )

    # -- law ----------------------------------------------------------------

    def slot_pmf(self) -> np.ndarray:
        """Marginal per-slot pmf on {0..L} (stationary for the MM kind)."""
        if self.kind == BATCH:
            p = np.zeros(self.L + 1)
            p[0] = 1.0 - self.mu
            p[self.L] = self.mu
            return p
        if self.kind == GENERAL_IID:
            return self.pmf0.copy()
        pi1 = self.a01 / (self.a01 + self.a10)
        return (1.0 - pi1) * self.pmf0 + pi1 * self.pmf1

    def mean_rate(self) -> float:
        p = self.slot_pmf()
        return float((np.arange(p.size) * p).sum())

    def max_batch_prob(self) -> float:
        return float(self.slot_pmf()[self.L])

    @property
    def iid(self) -> bool:
        return self.kind in (BATCH, GENERAL_IID)

    def sample_slot(self, n: int, rng: np.random.Generator, mm_state: np.ndarray | None = None):
        """One slot of arrivals for n queues (i.i.d. across queues).

        For the MM kind, pass a persistent int8 state vector (updated in
        place); initialize it with ``new_mm_state``.
        """
        if self.kind == BATCH:
            return np.where(rng.random(n) < self.mu, self.L, 0).astype(np.int64)
        if self.kind == GENERAL_IID:
            cdf = np.cumsum(self.pmf0)
            return np.searchsorted(cdf, rng.random(n), side="right").astype(np.int64)
        if mm_state is None:
            raise ValueError("two-state MM sampling needs a persistent state vector")
        cdf0 = np.cumsum(self.pmf0)
        cdf1 = np.cumsum(self.pmf1)
        u = rng.random(n)
        out = np.where(
            mm_state == 0,
            np.searchsorted(cdf0, u, side="right"),
            np.searchsorted(cdf1, u, side="right"),
        ).astype(np.int64)
        flip = rng.random(n)
        nxt = np.where(mm_state == 0, flip < self.a01, np.logical_not(flip < self.a10))
        mm_state[:] = nxt.astype(np.int8)
        return out

    def new_mm_state(self, n: int, rng: np.random.Generator) -> np.ndarray:
        pi1 = self.a01 / (self.a01 + self.a10) if self.kind == TWO_STATE_MM else 0.0
        return (rng.random(n) < pi1).astype(np.int8)

    # -- cumulants ------------------------------------------------------------

    def cumulant(self, t: int, theta: float) -> float:
        """log E[exp(theta * A(1..t))] for one queue over t slots.

        i.i.d. kinds reduce to t * log-sum-exp of the one-slot pmf; the MM
        kind multiplies the tilted kernel exactly t times in scaled
        arithmetic, so small-t values carry no spectral approximation.
        """
        if t < 1:
            raise ValueError("t must be >= 1")
        if self.kind in (BATCH, GENERAL_IID):
            p = self.slot_pmf()
            sup = np.nonzero(p)[0]
            return t * float(logsumexp(theta * sup, b=p[sup]))
        logphi = []
        for pmf in (self.pmf0, self.pmf1):
            sup = np.nonzero(pmf)[0]
            logphi.append(float(logsumexp(theta * sup, b=pmf[sup])) if sup.size else -math.inf)
        return self._mm_log_product(t, logphi[0], logphi[1])

    def boundary_logprob(self, t: int) -> float:
        """log P(A(1..t) = L * t): every slot emits the maximum batch."""
        if t < 1:
            raise ValueError("t must be >= 1")
        if self.kind in (BATCH, GENERAL_IID):
            pL = self.max_batch_prob()
            return t * math.log(pL)
        w0 = float(self.pmf0[self.L]) if self.L < self.pmf0.size else 0.0
        w1 = float(self.pmf1[self.L]) if self.L < self.pmf1.size else 0.0
        l0 = math.log(w0) if w0 > 0 else -math.inf
        l1 = math.log(w1) if w1 > 0 else -math.inf
        return self._mm_log_product(t, l0, l1)

    def _mm_log_product(self, t: int, logw0: float, logw1: float) -> float:
        # log( pi diag(w) (P diag(w))^(t-1) 1 ) with per-step rescaling.
        pi1 = self.a01 / (self.a01 + self.a10)
        P = np.array([[1.0 - self.a01, self.a01], [self.a10, 1.0 - self.a10]])
        shift = max(logw0, logw1)
        if shift == -math.inf:
            return -math.inf
        w = np.exp(np.array([logw0, logw1]) - shift)
        v = np.array([1.0 - pi1, pi1]) * w
        acc = shift
        for _ in range(t - 1):
            v = (v @ P) * w
            c = v.sum()
            if c <= 0.0:
                return -math.inf
            v = v / c
            acc += shift + math.log(c)
        s = v.sum()
        if s <= 0.0:
            return -math.inf
        return acc + math.log(s)

    # -- plumbing ------------------------------------------------------------

    def kernel_pack(self):
        """(kind, L, mu, cdf0, cdf1, a01, a10) for the slot engine."""
        empty = np.empty(0)
        if self.kind == BATCH:
            return BATCH, self.L, self.mu, empty, empty, 0.0, 0.0
        if self.kind == GENERAL_IID:
            cdf = np.cumsum(self.pmf0)
            cdf[-1] = 1.0
            return GENERAL_IID, self.L, 0.0, cdf, empty, 0.0, 0.0
        cdf0 = np.cumsum(self.pmf0)
        cdf0[-1] = 1.0
        cdf1 = np.cumsum(self.pmf1)
        cdf1[-1] = 1.0
        return TWO_STATE_MM, self.L, 0.0, cdf0, cdf1, self.a01, self.a10

    def spec_string(self) -> str:
        if self.kind == BATCH:
            return f"batch({self.L},{self.mu:g})"
        if self.kind == GENERAL_IID:
            return "pmf(" + ",".join(f"{p:g}" for p in self.pmf0) + ")"
        return (
            f"mm2({self.a01:g},{self.a10:g},"
            + "pmf(" + ",".join(f"{p:g}" for p in self.pmf0) + "),"
            + "pmf(" + ",".join(f"{p:g}" for p in self.pmf1) + "))"
        )

    def cache_key(self):
        if self.kind == BATCH:
            return (self.kind, self.L, self.mu)
        if self.kind == GENERAL_IID:
            return (self.kind, tuple(self.pmf0.tolist()))
        return (self.kind, self.a01, self.a10, tuple(self.pmf0.tolist()), tuple(self.pmf1.tolist()))
