"""Per-slot simulation engine: arrivals -> framing -> W(t) sampling ->
policy decision -> service, with violation counting for P(W > b).

Slot ordering (fixed): (1) channel step, (2) arrivals appended and framed,
(3) W(t) sampled, (4) policy decides, (5) serve and remove.  A packet
served in its arrival slot therefore has delay 0, and an arrival at slot
-b-1 blocked through slot -1 carries delay b+1 at slot 0.

Replications are embarrassingly parallel: each owns a counter-seeded RNG
stream, so Metrics are bit-identical for a given (seed, replication index)
regardless of execution order, and aggregation is order-insensitive.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .arrivals import ArrivalProcess
from .channel import ChannelSpec
from .policies import PolicySpec


@dataclass(frozen=True)
class SimConfig:
    n: int = 10
    horizon: int = 200_000
    warmup: int | None = None      # default 10 * n * b_max
    sample_gap: int | None = None  # default ~2 (E[U] + E[D]), decorrelates samples
    b_max: int = 12
    policy: PolicySpec = field(default_factory=lambda: PolicySpec("dwm"))
    channel: ChannelSpec = field(default_factory=lambda: ChannelSpec.iid(0.6, preset=1))
    arrivals: ArrivalProcess = field(default_factory=lambda: ArrivalProcess.batch(5, 0.15))
    seed: int = 1
    replications: int = 1
    n_batches: int = 32
    qcap: int = 4096

    def resolved_warmup(self) -> int:
        w = 10 * self.n * self.b_max if self.warmup is None else self.warmup
        return min(w, max(0, self.horizon - 1))

    def resolved_gap(self) -> int:
        if self.sample_gap is not None:
            return self.sample_gap
        on, off = self.channel.dists()
        return max(1, round(2 * (on.mean() + off.mean())))

    def validate(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.horizon < 2:
            raise ValueError("horizon must be >= 2")
        if self.resolved_warmup() >= self.horizon:
            raise ValueError("warmup must be smaller than horizon")
        if self.resolved_gap() < 1:
            raise ValueError("sample_gap must be >= 1")
        if self.b_max < 0:
            raise ValueError("b_max must be >= 0")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        self.policy.resolve_h(self.n, self.arrivals.L)

    @property
    def fbs_h(self) -> int:
        return self.policy.resolve_h(self.n, self.arrivals.L)


@dataclass
class Metrics:
    """Violation counts per threshold plus engine tallies.

    ``batch_viol``/``batch_samples`` partition the samples into contiguous
    batches (per replication) for the batch-means effective-sample-size
    correction used by ``estimate_violation``.
    """

    b_max: int
    viol: np.ndarray              # viol[b] = samples with W > b
    samples: int
    batch_viol: np.ndarray        # (total batches, b_max+1)
    batch_samples: np.ndarray
    x_success: int = 0
    x_opportunities: int = 0
    mean_queue_len: float = 0.0
    max_w: int = 0
    arrived: int = 0
    served: int = 0
    slots: int = 0

    def violation_prob(self, b: int) -> float:
        return self.viol[b] / self.samples if self.samples else 0.0

    @classmethod
    def merge(cls, parts: list["Metrics"]) -> "Metrics":
        first = parts[0]
        total_slots = sum(p.slots for p in parts)
        return cls(
            b_max=first.b_max,
            viol=np.sum([p.viol for p in parts], axis=0),
            samples=sum(p.samples for p in parts),
            batch_viol=np.concatenate([p.batch_viol for p in parts], axis=0),
            batch_samples=np.concatenate([p.batch_samples for p in parts]),
            x_success=sum(p.x_success for p in parts),
            x_opportunities=sum(p.x_opportunities for p in parts),
            mean_queue_len=sum(p.mean_queue_len * p.slots for p in parts) / total_slots,
            max_w=max(p.max_w for p in parts),
            arrived=sum(p.arrived for p in parts),
            served=sum(p.served for p in parts),
            slots=total_slots,
        )

    @classmethod
    def from_indicator_stream(cls, hits: np.ndarray, b_max: int = 0, n_batches: int = 32):
        """Build single-threshold Metrics from a 0/1 sample stream (test
        and calibration helper)."""
        hits = np.asarray(hits, dtype=np.int64)
        samples = hits.size
        edges = np.linspace(0, samples, n_batches + 1).astype(int)
        bv = np.zeros((n_batches, b_max + 1), np.int64)
        bs = np.zeros(n_batches, np.int64)
        for k in range(n_batches):
            seg = hits[edges[k]:edges[k + 1]]
            bv[k, 0] = seg.sum()
            bs[k] = seg.size
        viol = np.full(b_max + 1, hits.sum(), np.int64)
        return cls(b_max=b_max, viol=viol, samples=samples, batch_viol=bv, batch_samples=bs)


def run(cfg: SimConfig) -> Metrics:
    """Simulate ``cfg.replications`` independent replications and merge.

    Deterministic given (cfg.seed, replication index).  Raises on queue
    overflow (capacity ``cfg.qcap``); warns when the backlog keeps growing
    (superlinear growth heuristic for unstable configurations).
    """
    cfg.validate()
    parts = [_run_one(cfg, rep) for rep in range(cfg.replications)]
    return Metrics.merge(parts)


def _run_one(cfg: SimConfig, rep: int) -> Metrics:
    on_dist, off_dist = cfg.channel.dists()
    on_pack = on_dist.kernel_pack()
    off_pack = off_dist.kernel_pack()
    arr_pack = cfg.arrivals.kernel_pack()
    warmup = cfg.resolved_warmup()
    gap = cfg.resolved_gap()
    h = cfg.fbs_h
    n0 = cfg.n - cfg.arrivals.L * h if cfg.policy.kind == "fbs" else cfg.n
    nb = cfg.n_batches
    viol = np.zeros((nb, cfg.b_max + 1), np.int64)
    samples = np.zeros(nb, np.int64)
    x_bits = np.zeros(2, np.int64)
    tallies = np.zeros(7, np.int64)
    state = K.make_stream(cfg.seed, rep)
    K._run_slots(
        cfg.n,
        cfg.horizon,
        warmup,
        gap,
        cfg.b_max,
        nb,
        cfg.policy.code,
        h,
        n0,
        1.0 - cfg.channel.pi0(),
        on_pack[0], on_pack[1], on_pack[2], on_pack[3],
        off_pack[0], off_pack[1], off_pack[2], off_pack[3],
        arr_pack[0], arr_pack[1], arr_pack[2], arr_pack[3], arr_pack[4], arr_pack[5], arr_pack[6],
        state,
        cfg.qcap,
        viol,
        samples,
        x_bits,
        tallies,
    )
    if tallies[5]:
        raise RuntimeError(
            f"queue capacity {cfg.qcap} exceeded (replication {rep}); "
            "the configuration is likely unstable"
        )
    arrived, served = int(tallies[0]), int(tallies[1])
    mid_backlog, end_backlog = int(tallies[2]), int(tallies[3])
    post_slots = cfg.horizon - warmup
    if end_backlog > 2 * mid_backlog + 20 * cfg.n and end_backlog > 50 * cfg.n:
        warnings.warn(
            f"backlog grew from {mid_backlog} at mid-run to {end_backlog}: "
            "configuration may be unstable",
            RuntimeWarning,
        )
    if arrived - served != end_backlog:
        raise AssertionError("conservation violated: arrivals - services != backlog")
    return Metrics(
        b_max=cfg.b_max,
        viol=viol.sum(axis=0),
        samples=int(samples.sum()),
        batch_viol=viol,
        batch_samples=samples,
        x_success=int(x_bits[0]),
        x_opportunities=int(x_bits[1]),
        mean_queue_len=float(tallies[4]) / (post_slots * cfg.n),
        max_w=int(tallies[6]),
        arrived=arrived,
        served=served,
        slots=post_slots,
    )


def effective_sample_size(metrics: Metrics, b: int) -> float:
    """Samples discounted by the batch-means variance inflation factor.

    Splits come from the engine's contiguous sample batches; when the
    batch-mean variance exceeds the i.i.d. binomial prediction, the sample
    count is shrunk by that ratio (never grown).
    """
    n = metrics.samples
    if n == 0:
        return 0.0
    p = metrics.viol[b] / n
    if p <= 0.0 or p >= 1.0:
        return float(n)
    bs = metrics.batch_samples
    keep = bs >= 8
    if keep.sum() < 4:
        return float(n)
    means = metrics.batch_viol[keep, b] / bs[keep]
    var_batch = float(np.var(means, ddof=1))
    nb = int(keep.sum())
    mean_bs = float(bs[keep].mean())
    # var of overall mean ~ var_batch / nb; iid prediction p(1-p)/ (nb*mean_bs)
    iid_var = p * (1.0 - p) / (nb * mean_bs)
    actual_var = var_batch / nb
    if actual_var <= 0.0 or iid_var <= 0.0:
        return float(n)
    inflation = max(1.0, actual_var / iid_var)
    return n / inflation


def estimate_violation(metrics: Metrics, b: int, confidence: float = 0.95):
    """Point estimate and Wilson interval for P(W > b).

    The interval uses the batch-means effective sample size, so per-slot
    (correlated) sampling still yields honest coverage.
    """
    if metrics.samples == 0:
        raise ValueError("no samples recorded")
    if not 0 <= b <= metrics.b_max:
        raise ValueError(f"threshold b={b} outside recorded range 0..{metrics.b_max}")
    p = metrics.viol[b] / metrics.samples
    ess = max(1.0, effective_sample_size(metrics, b))
    z = {0.95: 1.959963984540054, 0.99: 2.5758293035489004}.get(confidence)
    if z is None:
        from scipy.stats import norm

        z = float(norm.ppf(0.5 + confidence / 2.0))
    denom = 1.0 + z * z / ess
    center = (p + z * z / (2.0 * ess)) / denom
    half = z * math.sqrt(p * (1.0 - p) / ess + z * z / (4.0 * ess * ess)) / denom
    lo = max(0.0, center - half)
    hi = min(1.0, center + half)
    return p, (lo, hi)
