"""Seeded random potentials and disorder-averaged observables.

Randomness is counter-based: draw i of stream `seed` is a 64-bit avalanche
hash of (seed, i), so any slice of any realization can be generated in any
order, in parallel, and still match the serial result bit for bit. That
property is load-bearing for the reproducibility contract of the ensemble
routines, which seed realization j as base_seed + j.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .spectra import BandIntervals, Histogram, _sample_values, dos

_MASK64 = (1 << 64) - 1
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_STREAM = np.uint64(0xD1B54A32D192ED03)


def _avalanche(x) -> np.ndarray:
    """64-bit finalizer (splitmix64 style), vectorized on uint64 arrays.

    Inputs are coerced to uint64 arrays of at least one dimension: numpy
    wraps array integer arithmetic silently, while the scalar path would
    emit overflow warnings.
    """
    z = np.atleast_1d(np.asarray(x, dtype=np.uint64)) + _GAMMA
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def hashed_bits(seed: int, index) -> np.ndarray:
    """uint64 hash of (seed, index), vectorized over index."""
    base = _avalanche(int(seed) & _MASK64)
    idx = np.atleast_1d(np.asarray(index, dtype=np.uint64))
    return _avalanche((idx * _STREAM) ^ base)


def hashed_uniform(seed: int, index) -> np.ndarray:
    """Floats in [0, 1), one per counter value."""
    return (hashed_bits(seed, index) >> np.uint64(11)) * 2.0**-53


def hashed_normal(seed: int, index) -> np.ndarray:
    """Standard normals via Box-Muller on counters (2i, 2i+1)."""
    idx = np.atleast_1d(np.asarray(index, dtype=np.uint64))
    u1 = ((hashed_bits(seed, idx * np.uint64(2)) >> np.uint64(11)) + np.uint64(1)) * (
        2.0**-53
    )
    u2 = hashed_uniform(seed, idx * np.uint64(2) + np.uint64(1))
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


@dataclass(frozen=True)
class DisorderRealization:
    """One seeded draw of a random coupling field plus its profile.

    distribution is "uniform" (couplings in [-strength/2, strength/2]) or
    "gaussian" (mean zero, standard deviation = strength); both are centered,
    mean-zero families. profile "onsite" means the couplings are on-site
    energies on the lattice; profile "bump" means the field is the smooth sum
    w(u) = sum_g coupling[g] * exp(-|u - g|^2 / (2 width^2)) over the coarse
    grid, evaluated at u = scale * (x, y).
    """

    seed: int
    shape: tuple
    distribution: str
    strength: float
    couplings: np.ndarray
    profile: str = "onsite"
    profile_width: float = 0.0
    scale: float = 1.0

    def onsite_values(self) -> np.ndarray:
        if self.profile != "onsite":
            raise ConfigError(
                f"profile {self.profile!r} has no on-site values; "
                "evaluate it pointwise instead"
            )
        return self.couplings.ravel()

    def evaluate(self, x, y) -> np.ndarray:
        """Potential value(s) at arbitrary points (bump profile only)."""
        if self.profile != "bump":
            raise ConfigError(
                f"profile {self.profile!r} is not pointwise-evaluable"
            )
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        u = self.scale * np.broadcast_arrays(x, y)[0]
        v = self.scale * np.broadcast_arrays(x, y)[1]
        n1, n2 = self.shape
        g1 = np.arange(n1, dtype=float)
        g2 = np.arange(n2, dtype=float)
        du = u[..., None, None] - g1[:, None]
        dv = v[..., None, None] - g2[None, :]
        weights = np.exp(-(du * du + dv * dv) / (2.0 * self.profile_width**2))
        return np.sum(self.couplings * weights, axis=(-2, -1))


def _draw_couplings(seed: int, count: int, distribution: str, strength: float):
    if distribution == "uniform":
        return (hashed_uniform(seed, np.arange(count)) - 0.5) * strength
    if distribution == "gaussian":
        return hashed_normal(seed, np.arange(count)) * strength
    raise ConfigError(
        f"unknown distribution {distribution!r}; use 'uniform' or 'gaussian'"
    )


def anderson_realization(
    side: int, distribution: str, strength: float, seed: int
) -> DisorderRealization:
    """iid on-site couplings for an side x side box, keyed by (seed, site)."""
    if side < 1:
        raise ConfigError(f"box side must be >= 1, got {side}")
    if strength < 0:
        raise ConfigError(f"disorder strength must be >= 0, got {strength}")
    couplings = _draw_couplings(seed, side * side, distribution, strength)
    return DisorderRealization(
        seed=int(seed),
        shape=(side, side),
        distribution=distribution,
        strength=float(strength),
        couplings=couplings.reshape(side, side),
    )


def scaled_realization(
    seed: int,
    coarse: int | tuple,
    profile_width: float,
    scale: float,
    distribution: str = "uniform",
    strength: float = 1.0,
) -> DisorderRealization:
    """Smooth random field V(x, y) = w(scale * x, scale * y).

    w is a sum of Gaussian bumps of the given width on the integer coarse
    grid with iid weights, so V varies on spatial scale profile_width/scale:
    large scale decorrelates neighboring unit cells, small scale makes them
    nearly equal.
    """
    if scale <= 0:
        raise ConfigError(f"scale must be > 0, got {scale}")
    if profile_width <= 0:
        raise ConfigError(f"profile width must be > 0, got {profile_width}")
    if strength < 0:
        raise ConfigError(f"disorder strength must be >= 0, got {strength}")
    shape = (coarse, coarse) if np.isscalar(coarse) else tuple(coarse)
    n1, n2 = int(shape[0]), int(shape[1])
    if n1 < 1 or n2 < 1:
        raise ConfigError(f"coarse grid must be >= 1 per side, got {shape}")
    couplings = _draw_couplings(seed, n1 * n2, distribution, strength)
    return DisorderRealization(
        seed=int(seed),
        shape=(n1, n2),
        distribution=distribution,
        strength=float(strength),
        couplings=couplings.reshape(n1, n2),
        profile="bump",
        profile_width=float(profile_width),
        scale=float(scale),
    )


@dataclass(frozen=True)
class EnsembleStats:
    """Disorder-averaged histogram with per-bin standard errors."""

    count: int
    histogram: Histogram
    stderr: np.ndarray
    seeds: tuple


def ensemble_dos(
    builder,
    n: int,
    base_seed: int,
    width: float = 0.05,
    bins: int = 200,
    bounds: tuple | None = None,
) -> EnsembleStats:
    """Average the smoothed DOS of builder(seed) over seeds base..base+n-1.

    All realizations share one binning; when no bounds are given they are
    fixed from the pooled eigenvalue range so the average is well defined.
    """
    if n < 1:
        raise ConfigError(f"need at least one realization, got {n}")
    seeds = tuple(int(base_seed) + i for i in range(n))
    values = [_sample_values(builder(s)) for s in seeds]
    if bounds is None:
        pad = 8.0 * width
        bounds = (
            min(float(v.min()) for v in values) - pad,
            max(float(v.max()) for v in values) + pad,
        )
    hists = [dos(v, width=width, bins=bins, bounds=bounds) for v in values]
    stack = np.stack([h.density for h in hists])
    mean = stack.mean(axis=0)
    if n > 1:
        stderr = stack.std(axis=0, ddof=1) / np.sqrt(n)
    else:
        stderr = np.zeros_like(mean)
    return EnsembleStats(
        count=n,
        histogram=Histogram(
            edges=hists[0].edges, density=mean, normalized=hists[0].normalized
        ),
        stderr=stderr,
        seeds=seeds,
    )


def gap_fill_fraction(clean: BandIntervals, disordered) -> float:
    """Fraction of averaged DOS mass inside the gaps of the clean spectrum.

    Bins straddling a gap edge contribute pro rata. Accepts EnsembleStats or
    a bare Histogram.
    """
    gaps = clean.gaps()
    if not gaps:
        raise ConfigError("clean spectrum has no gap to fill")
    hist = disordered.histogram if isinstance(disordered, EnsembleStats) else disordered
    edges = hist.edges
    widths = np.diff(edges)
    total = float(np.sum(hist.density * widths))
    if total <= 0:
        raise ConfigError("histogram carries no mass")
    inside = 0.0
    for lo, hi in gaps:
        overlap = np.minimum(edges[1:], hi) - np.maximum(edges[:-1], lo)
        inside += float(np.sum(hist.density * np.clip(overlap, 0.0, None)))
    return inside / total
