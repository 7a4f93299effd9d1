"""Chain geometry and enumeration of the blockade-allowed configuration space.

The atoms sit on a regular 1D lattice of ``n_atoms`` sites with spacing ``a``,
so the chain length is ``L = (n_atoms - 1) a``.  Excitations blockade each
other within the radius ``R_b``: a pattern of excited sites is *allowed* when
every pair of excited sites is at least ``n_b + 1`` lattice steps apart,
i.e. at least ``n_b`` ground-state atoms lie strictly between any two
excitations.  Site indices are 0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "BasisSizeError",
    "ChainSpec",
    "Configuration",
    "AllowedBasis",
    "build_basis",
    "is_allowed",
]


class BasisSizeError(RuntimeError):
    """Raised when an enumeration would exceed the configured size cap."""


def _exact_ratio(value) -> Fraction:
    """Interpret a user-supplied real parameter as an exact rational.

    Floats are read through their shortest decimal representation
    (``0.1`` means 1/10, not the nearest binary double), so that integer
    quantities derived by flooring, such as the blockade step count, do not
    fall off an integer boundary by one part in 2**52.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected a real number, got {type(value).__name__}")


@dataclass(frozen=True)
class ChainSpec:
    """Geometry of the chain in blockade units.

    Parameters
    ----------
    n_atoms : int
        Number of lattice sites N.
    n_b : int
        Minimal number of ground-state atoms between two excitations,
        ``n_b = floor(R_b / a)``.
    lam : float
        Chain length in blockade radii, ``lam = L / R_b`` with
        ``L = (N - 1) a``.  Zero only for the degenerate single-atom chain.

    Use :meth:`from_lambda` or :meth:`from_blockade` to construct a spec with
    the two parameters kept mutually consistent.
    """

    n_atoms: int
    n_b: int
    lam: float

    def __post_init__(self) -> None:
        if self.n_atoms < 1:
            raise ValueError("n_atoms must be >= 1")
        if self.n_b < 0:
            raise ValueError("n_b must be >= 0")
        if self.n_atoms == 1:
            if self.lam < 0:
                raise ValueError("lam must be >= 0")
        elif self.lam <= 0:
            raise ValueError("lam must be > 0 for n_atoms >= 2")

    @classmethod
    def from_lambda(cls, n_atoms: int, lam) -> "ChainSpec":
        """Build from (N, lam); derives R_b/a = (N-1)/lam and n_b = floor(R_b/a)."""
        frac = _exact_ratio(lam)
        if n_atoms == 1:
            if frac < 0:
                raise ValueError("lam must be >= 0")
            return cls(1, 0, float(frac))
        if frac <= 0:
            raise ValueError("lam must be > 0")
        rb = Fraction(n_atoms - 1) / frac
        return cls(n_atoms, int(rb.numerator // rb.denominator), float(frac))

    @classmethod
    def from_blockade(cls, n_atoms: int, rb_over_a) -> "ChainSpec":
        """Build from (N, R_b/a); derives lam = (N-1)/(R_b/a) and n_b = floor(R_b/a)."""
        rb = _exact_ratio(rb_over_a)
        if rb <= 0:
            raise ValueError("R_b/a must be > 0")
        lam = Fraction(n_atoms - 1) / rb
        return cls(n_atoms, int(rb.numerator // rb.denominator), float(lam))

    @property
    def nu_max(self) -> int:
        """Maximum number of excitations the chain accommodates, floor(lam) + 1."""
        return int(np.floor(self.lam)) + 1

    @property
    def min_separation(self) -> int:
        """Minimal index distance between two excited sites, n_b + 1."""
        return self.n_b + 1


@dataclass(frozen=True)
class Configuration:
    """One blockade-allowed arrangement of excitations.

    ``sites`` is the sorted tuple of excited 0-based site indices; the empty
    tuple is the vacuum.
    """

    sites: tuple[int, ...]

    @property
    def nu(self) -> int:
        """Number of excitations."""
        return len(self.sites)

    def mask(self) -> int:
        """Bit pattern with bit k set iff site k is excited."""
        m = 0
        for s in self.sites:
            m |= 1 << s
        return m


def is_allowed(spec: ChainSpec, sites: Iterable[int]) -> bool:
    """Check the hardcore separation rule for a set of excited sites.

    True iff every pair of distinct sites differs by at least ``n_b + 1``.
    Duplicated indices are collapsed (exciting an atom twice is the same
    atom).  Raises ``ValueError`` for indices outside ``[0, n_atoms - 1]``.
    """
    ordered = sorted(set(sites))
    if ordered and (ordered[0] < 0 or ordered[-1] >= spec.n_atoms):
        raise ValueError("site index out of range")
    step = spec.n_b + 1
    return all(b - a >= step for a, b in zip(ordered, ordered[1:]))


def _mask_to_sites(mask: int) -> tuple[int, ...]:
    sites = []
    k = 0
    while mask:
        if mask & 1:
            sites.append(k)
        mask >>= 1
        k += 1
    return tuple(sites)


@dataclass(frozen=True)
class AllowedBasis:
    """Indexed enumeration of every allowed configuration of a chain.

    Configurations are ordered by excitation number, then lexicographically
    by the tuple of excited sites, so each nu-sector occupies a contiguous
    index range and index 0 is the vacuum.
    """

    spec: ChainSpec
    site_tuples: tuple[tuple[int, ...], ...]
    by_nu: dict[int, range]
    _index: dict[tuple[int, ...], int] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.site_tuples)

    @property
    def nu_values(self) -> np.ndarray:
        """Excitation count per basis index."""
        return np.fromiter((len(t) for t in self.site_tuples), dtype=np.int64,
                           count=self.size)

    def config(self, index: int) -> Configuration:
        return Configuration(self.site_tuples[index])

    def index_of(self, sites: Iterable[int]) -> int:
        """Basis index of a configuration; KeyError if it is not allowed."""
        return self._index[tuple(sorted(sites))]

    def __contains__(self, sites) -> bool:
        return tuple(sorted(sites)) in self._index

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[Configuration]:
        return (Configuration(t) for t in self.site_tuples)

    def counts_by_nu(self) -> dict[int, int]:
        return {nu: len(r) for nu, r in self.by_nu.items()}

    def site_occupancy(self, weights: np.ndarray) -> np.ndarray:
        """Accumulate per-site excitation weight from per-configuration weights.

        For weights w_i this returns P_k = sum over configurations containing
        site k of w_i, the expectation of the site-k excitation projector when
        the w_i are state populations.
        """
        w = np.asarray(weights, dtype=float)
        if w.shape != (self.size,):
            raise ValueError("weights must have one entry per basis state")
        p = np.zeros(self.spec.n_atoms)
        for wi, sites in zip(w, self.site_tuples):
            for s in sites:
                p[s] += wi
        return p

    def nu_totals(self, weights: np.ndarray) -> dict[int, float]:
        """Sum per-configuration weights within each nu-sector."""
        w = np.asarray(weights, dtype=float)
        if w.shape != (self.size,):
            raise ValueError("weights must have one entry per basis state")
        return {nu: float(w[r.start:r.stop].sum()) for nu, r in self.by_nu.items()}

    def to_rows(self) -> list[tuple[int, int, str]]:
        """Dump rows (index, nu, "s0;s1;...") for the basis CSV."""
        return [(i, len(t), ";".join(str(s) for s in t))
                for i, t in enumerate(self.site_tuples)]


def build_basis(spec: ChainSpec, max_size: int = 10_000_000) -> AllowedBasis:
    """Enumerate all allowed configurations of a chain.

    The search grows configurations level by level from the vacuum, appending
    one excitation to the right of the current rightmost one at distance at
    least ``n_b + 1``; every allowed configuration is produced exactly once,
    in (nu, lexicographic) order.

    Raises
    ------
    BasisSizeError
        If the enumeration exceeds ``max_size`` configurations.
    """
    n, step = spec.n_atoms, spec.n_b + 1
    site_tuples: list[tuple[int, ...]] = [()]
    by_nu: dict[int, range] = {0: range(0, 1)}
    level: list[tuple[int, ...]] = [()]
    total = 1
    nu = 0
    while level:
        nu += 1
        nxt: list[tuple[int, ...]] = []
        for sites in level:
            start = sites[-1] + step if sites else 0
            for t in range(start, n):
                nxt.append(sites + (t,))
        if not nxt:
            break
        total += len(nxt)
        if total > max_size:
            raise BasisSizeError(
                f"allowed basis exceeds max_size={max_size} at nu={nu} "
                f"(N={n}, n_b={spec.n_b})")
        by_nu[nu] = range(len(site_tuples), len(site_tuples) + len(nxt))
        site_tuples.extend(nxt)
        level = nxt
    index = {t: i for i, t in enumerate(site_tuples)}
    return AllowedBasis(spec=spec, site_tuples=tuple(site_tuples),
                        by_nu=by_nu, _index=index)
