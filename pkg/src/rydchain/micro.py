"""Closed-form microcanonical-ensemble analytics for the blockaded chain.

The thermal state is modelled as the equiprobable mixture of all allowed
configurations.  Counting configurations with exactly ``nu`` excitations is a
stars-and-bars problem: with ``n_b`` mandatory ground atoms between
excitations, the count is the binomial

    C(N - (nu - 1) n_b, nu)

In the continuum limit (atom density ``N/L`` with ``L = lam * R_b``) the count
becomes ``(N**nu / nu!) * [1 - (nu - 1)/lam]_+ ** nu``, where ``[x]_+`` clamps
negative arguments to zero.  From the counts follow the excitation-number
distribution P(nu), its moments, and the spatial density of the n-th of nu
excitations at normalized position ``xi = x / L``:

    p(nu, n, xi) = nu! [xi - (n-1)/lam]_+^(n-1) [1 - xi - (nu-n)/lam]_+^(nu-n)
                   / ((n-1)! (nu-n)! [1 - (nu-1)/lam]_+^nu)

which integrates to one over ``xi in [0, 1]`` for each (nu, n) and does not
depend on N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .basis import AllowedBasis, ChainSpec

__all__ = [
    "ExcitationStats",
    "count_discrete",
    "count_continuous",
    "discrete_counts",
    "nu_distribution",
    "spatial_density",
    "total_spatial_distribution",
    "microcanonical_site_probabilities",
]


@dataclass(frozen=True)
class ExcitationStats:
    """Excitation statistics of the equiprobable mixture of allowed states.

    ``p_nu`` maps the excitation number to its probability; ``mean_nu`` and
    ``std_nu`` are the first two moments.  When a spatial profile was
    requested, ``xi`` holds the evaluation grid (bin centers in [0, 1]) and
    ``p_site`` the excitation density on it.
    """

    p_nu: dict[int, float]
    mean_nu: float
    std_nu: float
    mode: str
    xi: np.ndarray | None = None
    p_site: np.ndarray | None = None


def count_discrete(n_atoms: int, n_b: int, nu: int) -> int:
    """Number of allowed configurations with exactly ``nu`` excitations.

    Exact integer arithmetic; returns 0 when the chain cannot hold ``nu``
    excitations and 1 for the vacuum sector ``nu = 0``.
    """
    if n_atoms < 1 or n_b < 0 or nu < 0:
        raise ValueError("need n_atoms >= 1, n_b >= 0, nu >= 0")
    top = n_atoms - (nu - 1) * n_b
    if top < nu:
        return 0
    return math.comb(top, nu)


def _clamp_pow(x: float, k: int) -> float:
    # [x]_+ ** k with 0**0 == 1, so the k = 0 factors at the support edge
    # (leftmost excitation at xi = 0, rightmost at xi = 1) stay finite.
    return max(x, 0.0) ** k


def count_continuous(n_atoms: float, lam: float, nu: int) -> float:
    """Continuum-limit count of nu-excitation configurations.

    ``(N**nu / nu!) * [1 - (nu - 1)/lam]_+ ** nu``; agrees with
    :func:`count_discrete` up to O(N**(nu-1)) corrections at fixed lam.
    """
    if n_atoms <= 0 or lam <= 0 or nu < 0:
        raise ValueError("need n_atoms > 0, lam > 0, nu >= 0")
    if nu == 0:
        return 1.0
    return (n_atoms ** nu / math.factorial(nu)) * _clamp_pow(1.0 - (nu - 1) / lam, nu)


def discrete_counts(spec: ChainSpec) -> list[int]:
    """Exact per-nu state counts, from nu = 0 up to the last nonzero sector."""
    counts = [1]
    nu = 1
    while spec.n_atoms - (nu - 1) * spec.n_b >= nu:
        counts.append(count_discrete(spec.n_atoms, spec.n_b, nu))
        nu += 1
    return counts


def nu_distribution(spec: ChainSpec, mode: str = "discrete") -> ExcitationStats:
    """Distribution of the excitation number under the microcanonical mixture.

    ``mode="discrete"`` uses the exact binomial counts with rational
    arithmetic (no overflow at any N); ``mode="continuous"`` uses the
    continuum-limit counts, evaluated in log space.
    """
    if mode == "discrete":
        counts = discrete_counts(spec)
        total = sum(counts)
        p = {nu: float(Fraction(c, total)) for nu, c in enumerate(counts)}
        mean = sum(Fraction(nu * c, total) for nu, c in enumerate(counts))
        second = sum(Fraction(nu * nu * c, total) for nu, c in enumerate(counts))
        var = second - mean * mean
        return ExcitationStats(p_nu=p, mean_nu=float(mean),
                               std_nu=math.sqrt(float(var)), mode=mode)
    if mode == "continuous":
        if spec.lam <= 0:
            raise ValueError("continuous mode needs lam > 0")
        n, lam = float(spec.n_atoms), spec.lam
        logs = [0.0]
        nu = 1
        while 1.0 - (nu - 1) / lam > 0.0:
            logs.append(nu * math.log(n) - math.lgamma(nu + 1)
                        + nu * math.log(1.0 - (nu - 1) / lam))
            nu += 1
        arr = np.array(logs)
        w = np.exp(arr - arr.max())
        w /= w.sum()
        nus = np.arange(len(w))
        mean = float(nus @ w)
        var = float((nus - mean) ** 2 @ w)
        p = {int(nu): float(pv) for nu, pv in zip(nus, w)}
        return ExcitationStats(p_nu=p, mean_nu=mean, std_nu=math.sqrt(var),
                               mode=mode)
    raise ValueError(f"unknown mode {mode!r}")


def spatial_density(nu: int, n: int, lam: float, xi):
    """Probability density of the n-th of nu excitations at position xi.

    ``xi`` may be a scalar or an array in [0, 1]; the result has the same
    shape.  The density is independent of N and normalized to 1 over
    ``xi in [0, 1]`` for each (nu, n).

    Raises
    ------
    ValueError
        If ``n`` is outside ``[1, nu]``, ``xi`` outside [0, 1], ``nu``
        exceeds ``floor(lam) + 1``, or the sector has zero measure
        (``lam <= nu - 1``, the integer-lam boundary).
    """
    if not 1 <= n <= nu:
        raise ValueError("need 1 <= n <= nu")
    if nu > math.floor(lam) + 1:
        raise ValueError("nu exceeds floor(lam) + 1")
    x = np.asarray(xi, dtype=float)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("xi must lie in [0, 1]")
    denom = _clamp_pow(1.0 - (nu - 1) / lam, nu)
    if denom == 0.0:
        raise ValueError(f"zero-measure sector: lam={lam} <= nu-1={nu - 1}")
    coeff = math.factorial(nu) / (math.factorial(n - 1) * math.factorial(nu - n))
    left = np.maximum(x - (n - 1) / lam, 0.0) ** (n - 1)
    right = np.maximum(1.0 - x - (nu - n) / lam, 0.0) ** (nu - n)
    out = coeff * left * right / denom
    return out if out.ndim else float(out)


def total_spatial_distribution(spec: ChainSpec, n_points: int,
                               mode: str = "discrete",
                               normalize: bool = True) -> ExcitationStats:
    """Total spatial excitation density on a grid of bin centers.

    Evaluates ``P(xi) = sum_nu P(nu) sum_{n<=nu} p(nu, n, xi)`` at the
    ``n_points`` bin centers ``(i + 1/2) / n_points``.  With
    ``normalize=True`` the profile is rescaled to an average excitation
    density of 1 over the grid (the convention used for histogram
    comparisons); otherwise it integrates to the mean excitation number.
    """
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    if spec.n_atoms < 2:
        raise ValueError("spatial profile needs n_atoms >= 2")
    stats = nu_distribution(spec, mode=mode)
    xi = (np.arange(n_points) + 0.5) / n_points
    density = np.zeros(n_points)
    for nu, p in stats.p_nu.items():
        if nu == 0 or p == 0.0:
            continue
        for n in range(1, nu + 1):
            density += p * spatial_density(nu, n, spec.lam, xi)
    if normalize:
        avg = density.mean()
        if avg > 0.0:
            density = density / avg
    return ExcitationStats(p_nu=stats.p_nu, mean_nu=stats.mean_nu,
                           std_nu=stats.std_nu, mode=mode, xi=xi,
                           p_site=density)


def microcanonical_site_probabilities(basis: AllowedBasis) -> np.ndarray:
    """Exact per-site excitation probability of the equiprobable mixture.

    P_k is the fraction of allowed configurations in which site k is excited;
    enumerative counterpart of the continuum profile for small chains.
    """
    w = np.full(basis.size, 1.0 / basis.size)
    return basis.site_occupancy(w)
