"""A seeded sampling model for the Selmer step of the criterion.

Each trial draws a Selmer rank r from a named distribution, then r sigma-image
rows uniformly from F_2^g minus 0, and runs the criterion against a fixed
rho-log image.  The empirical pass rate is compared with the counting floor
1 - #I * 2^{1-g}, where #I = (image cardinality) + 1.

This is a heuristic model, not the Bhargava-Gross theorem: it only mimics the
averaged statement that the bound relies on.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .chabauty import MAX_SELMER_RANK, SelmerInput, _image_points, criterion
from .errors import DimensionMismatch, SeedMissing
from .modp import F2Vec, ProjPtF2

MODEL_LABEL = "heuristic model, not the Bhargava-Gross theorem"
POONEN_RAINS = "poonen-rains"
RANK_ZERO = "rank-zero"
RANK_MODELS = (POONEN_RAINS, RANK_ZERO)
DEFAULT_CHUNK = 4096
Z_95 = 1.959963984540054


def rank_distribution(model: str, g: int) -> list[Fraction]:
    """P(r = k) for k = 0..rmax.

    The Poonen-Rains weights are proportional to prod_{j=1}^k 2/(2^j - 1),
    which untruncated give E[2^r] = 3 (two nonzero Selmer elements on
    average).  They are truncated at min(20, 2g) and renormalized.
    """
    if model == RANK_ZERO:
        return [Fraction(1)]
    if model != POONEN_RAINS:
        raise ValueError(f"unknown rank model {model!r}; choose from {RANK_MODELS}")
    rmax = min(MAX_SELMER_RANK, 2 * g)
    w = [Fraction(1)]
    for j in range(1, rmax + 1):
        w.append(w[-1] * Fraction(2, 2 ** j - 1))
    total = sum(w)
    return [x / total for x in w]


def expected_nonzero(dist: list[Fraction]) -> float:
    return float(sum(p * (2 ** k - 1) for k, p in enumerate(dist)))


@dataclass(frozen=True)
class SimConfig:
    genus: int
    trials: int
    seed: int | None = None
    rank_model: str = POONEN_RAINS
    chunk: int = DEFAULT_CHUNK
    strict: bool = False
    workers: int = 1
    torsion_ok: bool = True

    def __post_init__(self):
        if self.trials < 0:
            raise ValueError("trials must be non-negative")
        if self.chunk <= 0:
            raise ValueError("chunk must be positive")
        if self.rank_model not in RANK_MODELS:
            raise ValueError(f"unknown rank model {self.rank_model!r}")


@dataclass(frozen=True)
class SimReport:
    genus: int
    trials: int
    passes: int
    proportion: float
    stderr: float
    half_width: float
    image_cardinality: int
    preimage_size: int
    floor: Fraction
    floor_sigma: float
    rank_model: str
    expected_nonzero_selmer: float
    seed: int | None
    model: str = MODEL_LABEL

    @property
    def sigmas_above_floor(self) -> float:
        if self.floor_sigma == 0:
            return math.inf if self.proportion >= self.floor else -math.inf
        return (self.proportion - float(self.floor)) / self.floor_sigma

    def as_dict(self) -> dict:
        d = asdict(self)
        d["floor"] = str(self.floor)
        d["floor_float"] = float(self.floor)
        d["sigmas_above_floor"] = self.sigmas_above_floor
        return d


def _chunk_rng(seed: int | None, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(index,))
    return np.random.default_rng(ss)


def _run_chunk(args) -> int:
    seed, index, size, g, model, pts, torsion_ok = args
    rng = _chunk_rng(seed, index)
    dist = rank_distribution(model, g)
    ranks = rng.choice(len(dist), size=size, p=[float(p) for p in dist])
    rows = rng.integers(1, 1 << g, size=int(ranks.sum()), dtype=np.int64)
    passes = 0
    pos = 0
    for r in ranks:
        sel = SelmerInput(g, tuple(int(x) for x in rows[pos:pos + r]))
        pos += r
        passes += criterion(pts, sel, torsion_ok).overall
    return passes


def run_trials(cfg: SimConfig, image) -> SimReport:
    """Tally criterion passes over cfg.trials sampled Selmer images."""
    if cfg.strict and cfg.seed is None:
        raise SeedMissing("strict mode requires an explicit seed")
    seed = cfg.seed
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (1 << 63))
    g, bits = _image_points(image)
    if g != cfg.genus:
        raise DimensionMismatch(f"image genus {g} != configured genus {cfg.genus}")
    pts = tuple(ProjPtF2(F2Vec(g, b)) for b in sorted(bits))
    jobs = []
    left, index = cfg.trials, 0
    while left > 0:
        size = min(cfg.chunk, left)
        jobs.append((seed, index, size, g, cfg.rank_model, pts, cfg.torsion_ok))
        left -= size
        index += 1
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            passes = sum(pool.map(_run_chunk, jobs))
    else:
        passes = sum(map(_run_chunk, jobs))
    n = cfg.trials
    p = passes / n if n else float("nan")
    se = math.sqrt(p * (1 - p) / n) if n else float("nan")
    card = len(bits)
    floor = 1 - Fraction(card + 1, 2 ** (g - 1))
    ff = min(max(float(floor), 0.0), 1.0)
    floor_sigma = math.sqrt(ff * (1 - ff) / n) if n else float("nan")
    return SimReport(
        genus=g, trials=n, passes=passes, proportion=p, stderr=se,
        half_width=Z_95 * se, image_cardinality=card, preimage_size=card + 1,
        floor=floor, floor_sigma=floor_sigma, rank_model=cfg.rank_model,
        expected_nonzero_selmer=expected_nonzero(rank_distribution(cfg.rank_model, g)),
        seed=seed,
    )
