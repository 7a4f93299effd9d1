"""Exact uniform Monte-Carlo sampling of the microcanonical ensemble.

A configuration is drawn uniformly from the allowed set *without enumerating
it*: first the excitation number ``nu`` with its exact probability
(count ratio of big integers), then the ground-atom gaps around the
excitations, uniformly via the stars-and-bars bijection.  A sorted
``nu``-subset ``{b_1 < ... < b_nu}`` of ``{1, ..., N - (nu-1) n_b}`` maps to
the excited sites ``x_j = b_j - 1 + (j - 1) n_b``; subsets are drawn with
Floyd's algorithm, so sampling is exact and rejection-free in O(nu log nu).

Randomness comes from the counter-based Philox-4x64-10 generator.  Each
repetition ``r`` of a run uses the independent substream keyed by
``(seed, r)``, so parallel and serial executions produce bit-identical
results and any repetition can be reproduced in isolation.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .basis import ChainSpec, Configuration
from .micro import ExcitationStats, discrete_counts

__all__ = [
    "RNG_NAME",
    "GridMismatchError",
    "McRun",
    "repetition_rng",
    "sample_config",
    "sample_sites",
    "run_histogram",
    "compare_to_analytic",
]

RNG_NAME = "philox4x64-10"
_U64 = (1 << 64) - 1


class GridMismatchError(ValueError):
    """Raised when a Monte-Carlo histogram and an analytic profile use different grids."""


def repetition_rng(seed: int, rep: int) -> Generator:
    """Independent generator for one repetition, keyed by (seed, rep)."""
    if not 0 <= seed <= _U64:
        raise ValueError("seed must fit in 64 bits")
    return Generator(Philox(key=np.array([seed, rep], dtype=np.uint64)))


class _Words:
    """Buffered 64-bit words from a bit generator."""

    __slots__ = ("_raw", "_buf", "_pos")

    def __init__(self, bit_generator):
        self._raw = bit_generator.random_raw
        self._buf = ()
        self._pos = 0

    def next_word(self) -> int:
        if self._pos >= len(self._buf):
            self._buf = self._raw(64).tolist()
            self._pos = 0
        w = self._buf[self._pos]
        self._pos += 1
        return w

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n), exact for arbitrary-precision n."""
        if n <= 0:
            raise ValueError("n must be positive")
        k = n.bit_length()
        words = (k + 63) // 64
        shift = 64 * words - k
        while True:
            v = 0
            for _ in range(words):
                v = (v << 64) | self.next_word()
            v >>= shift
            if v < n:
                return v


def _floyd_subset(words: _Words, m: int, k: int) -> list[int]:
    # Uniform k-subset of {1, ..., m}, sorted.
    chosen: set[int] = set()
    for j in range(m - k + 1, m + 1):
        t = 1 + words.randbelow(j)
        chosen.add(j if t in chosen else t)
    return sorted(chosen)


def _draw_sites(spec: ChainSpec, words: _Words, cumulative: list[int],
                total: int) -> list[int]:
    r = words.randbelow(total)
    nu = bisect_right(cumulative, r)
    if nu == 0:
        return []
    m = spec.n_atoms - (nu - 1) * spec.n_b
    bars = _floyd_subset(words, m, nu)
    n_b = spec.n_b
    return [b - 1 + j * n_b for j, b in enumerate(bars)]


def _cumulative_counts(spec: ChainSpec) -> tuple[list[int], int]:
    counts = discrete_counts(spec)
    cumulative = []
    acc = 0
    for c in counts:
        acc += c
        cumulative.append(acc)
    return cumulative, acc


def sample_config(spec: ChainSpec, rng: Generator) -> Configuration:
    """Draw one configuration uniformly from the allowed set."""
    words = _Words(rng.bit_generator)
    cumulative, total = _cumulative_counts(spec)
    return Configuration(tuple(_draw_sites(spec, words, cumulative, total)))


def sample_sites(spec: ChainSpec, seed: int, n_rep: int):
    """Yield the excited-site lists of ``n_rep`` independent repetitions."""
    if not 0 <= seed <= _U64:
        raise ValueError("seed must fit in 64 bits")
    cumulative, total = _cumulative_counts(spec)
    # One Philox instance rekeyed per repetition; bit-identical to fresh
    # construction with key (seed, rep), an order of magnitude cheaper.
    bg = Philox(key=np.array([seed, 0], dtype=np.uint64))
    state = bg.state
    key = state["state"]["key"]
    counter = state["state"]["counter"]
    for rep in range(n_rep):
        key[1] = rep
        counter[:] = 0
        state["buffer_pos"] = 4
        bg.state = state
        yield _draw_sites(spec, _Words(bg), cumulative, total)


@dataclass(frozen=True)
class McRun:
    """Result of a Monte-Carlo histogram run.

    ``counts[b]`` is the number of excitations whose normalized position fell
    in bin ``b``; ``density`` is the same histogram normalized to an average
    excitation density of 1.  ``sample_mean_nu`` / ``sample_std_nu`` are the
    sample moments of the excitation number.
    """

    spec: ChainSpec
    n_rep: int
    n_bins: int
    seed: int
    counts: np.ndarray
    density: np.ndarray
    sample_mean_nu: float
    sample_std_nu: float
    rng_name: str = RNG_NAME

    @property
    def bin_centers(self) -> np.ndarray:
        return (np.arange(self.n_bins) + 0.5) / self.n_bins


def run_histogram(spec: ChainSpec, n_rep: int, n_bins: int, seed: int) -> McRun:
    """Sample ``n_rep`` configurations and histogram the excitation positions.

    Positions are the normalized site coordinates ``xi = site / (N - 1)``,
    binned by ``floor(xi * n_bins)`` with the right edge clamped into the last
    bin, so bin ``b`` covers ``[b / n_bins, (b + 1) / n_bins)``.
    """
    if n_rep < 1:
        raise ValueError("n_rep must be >= 1")
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    if spec.n_atoms < 2:
        raise ValueError("histogram needs n_atoms >= 2")
    counts = np.zeros(n_bins, dtype=np.int64)
    scale = n_bins / (spec.n_atoms - 1)
    top = n_bins - 1
    sum_nu = 0
    sum_nu2 = 0
    for sites in sample_sites(spec, seed, n_rep):
        nu = len(sites)
        sum_nu += nu
        sum_nu2 += nu * nu
        for s in sites:
            b = int(s * scale)
            counts[b if b < top else top] += 1
    mean = sum_nu / n_rep
    var = max(sum_nu2 / n_rep - mean * mean, 0.0)
    total = counts.sum()
    density = counts * (n_bins / total) if total > 0 else counts.astype(float)
    return McRun(spec=spec, n_rep=n_rep, n_bins=n_bins, seed=seed,
                 counts=counts, density=density, sample_mean_nu=mean,
                 sample_std_nu=math.sqrt(var))


def compare_to_analytic(run: McRun, analytic: ExcitationStats) -> float:
    """Root-mean-square difference between the run and an analytic profile.

    Both profiles are normalized to mean 1 over the bins before comparing;
    the analytic profile must be evaluated on the same bin-center grid.
    """
    if analytic.p_site is None or analytic.xi is None:
        raise GridMismatchError("analytic stats carry no spatial profile")
    if analytic.p_site.shape != (run.n_bins,):
        raise GridMismatchError(
            f"analytic profile has {analytic.p_site.shape[0]} bins, "
            f"run has {run.n_bins}")
    if not np.allclose(analytic.xi, run.bin_centers, rtol=0.0, atol=1e-12):
        raise GridMismatchError("analytic grid is not at the run's bin centers")
    a = analytic.p_site
    a_mean = a.mean()
    if a_mean > 0.0:
        a = a / a_mean
    d = run.density
    d_mean = d.mean()
    if d_mean > 0.0:
        d = d / d_mean
    return float(np.sqrt(np.mean((d - a) ** 2)))
