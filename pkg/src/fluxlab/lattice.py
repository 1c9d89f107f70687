"""Tight-binding magnetic lattice builders.

Conventions used throughout:

* Landau-gauge Bloch fibers at rational flux p/q are q x q matrices with
  diagonal 2 cos(k2 + 2 pi (p/q) j) and nearest-neighbor hops e^{i k1}
  including the cyclic wrap, i.e. the Bloch phase is distributed over every
  bond rather than lumped on the corner. Fibers are exactly 2 pi periodic in
  both k components as matrices.
* The symmetric-gauge box uses hopping phases e^{+-i 2 pi m B} along x and
  e^{-+i 2 pi n B} along y for the site (n, m). The flux through one plaquette
  of that operator is 2B mod 1, not B; `plaquette_flux` measures it from the
  assembled matrix so the normalization is never assumed.
* Box operators index site (n, m) as n * L + m with n the x coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import cos, gcd, pi
from typing import Iterable, Sequence

import numpy as np

from .errors import InfeasibleModelError

_HERMITIAN_ATOL = 1e-12


@dataclass(frozen=True)
class RationalFlux:
    """Reduced rational flux p/q in units of one flux quantum per plaquette.

    The pair must be in lowest terms with q >= 1; a non-reduced pair is
    rejected rather than silently reduced so that callers stay aware of the
    fiber dimension q they are asking for.
    """

    p: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"flux denominator must be >= 1, got {self.q}")
        if gcd(self.p, self.q) != 1:
            raise ValueError(
                f"flux {self.p}/{self.q} is not reduced; "
                f"divide out gcd {gcd(self.p, self.q)} first"
            )

    @property
    def value(self) -> float:
        return self.p / self.q

    def wrapped(self) -> "RationalFlux":
        """The same flux with p reduced into [0, q)."""
        return RationalFlux(self.p % self.q, self.q)

    @classmethod
    def reduced(cls, p: int, q: int) -> "RationalFlux":
        f = Fraction(p, q)
        return cls(f.numerator, f.denominator)

    @classmethod
    def from_string(cls, text: str) -> "RationalFlux":
        parts = text.strip().split("/")
        if len(parts) != 2:
            raise ValueError(f"flux must look like 'p/q', got {text!r}")
        try:
            p, q = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ValueError(f"flux must be a pair of integers, got {text!r}") from exc
        return cls(p, q)

    @classmethod
    def from_float(cls, value: float, q_max: int = 64) -> "RationalFlux":
        """Best rational approximation with denominator bounded by q_max.

        Uses the continued-fraction convergent machinery of
        Fraction.limit_denominator.
        """
        if q_max < 1:
            raise ValueError("q_max must be >= 1")
        f = Fraction(value).limit_denominator(q_max)
        return cls(f.numerator, f.denominator)


@dataclass(frozen=True)
class FourierDispersion:
    """Finite Fourier series on the 2-torus: sum_h c_h e^{i (n k1 + m k2)}.

    harmonics is a sequence of (n, m, coefficient). A real-valued dispersion
    must contain the conjugate partner (-n, -m, conj(c)) for every harmonic.
    """

    harmonics: tuple

    def __init__(self, harmonics: Iterable[tuple]):
        entries = []
        for n, m, c in harmonics:
            entries.append((int(n), int(m), complex(c)))
        object.__setattr__(self, "harmonics", tuple(entries))

    def is_real(self, tol: float = 1e-12) -> bool:
        table = {}
        for n, m, c in self.harmonics:
            table[(n, m)] = table.get((n, m), 0.0) + c
        for (n, m), c in table.items():
            if abs(c - np.conj(table.get((-n, -m), 0.0))) > tol:
                return False
        return True

    def evaluate(self, k1, k2):
        k1 = np.asarray(k1, dtype=float)
        k2 = np.asarray(k2, dtype=float)
        out = np.zeros(np.broadcast(k1, k2).shape, dtype=complex)
        for n, m, c in self.harmonics:
            out += c * np.exp(1j * (n * k1 + m * k2))
        return out

    @classmethod
    def nearest_neighbor(cls, amplitude: float = 1.0) -> "FourierDispersion":
        """2 a cos k1 + 2 a cos k2, the square-lattice hopping dispersion."""
        a = float(amplitude)
        return cls([(1, 0, a), (-1, 0, a), (0, 1, a), (0, -1, a)])


@dataclass(frozen=True)
class BlochFiberFamily:
    """k-dependent Hermitian fiber H(k) = sum_t e^{i (n_t k1 + m_t k2)} M_t.

    The terms must come in conjugate pairs so H(k) is Hermitian at every k.
    Storing the harmonic decomposition keeps evaluation over large k grids a
    single einsum instead of a Python loop per point.
    """

    flux: RationalFlux
    dim: int
    terms: tuple  # ((n, m, matrix), ...)
    gauge: str = "landau"

    def matrix(self, k1: float, k2: float) -> np.ndarray:
        h = np.zeros((self.dim, self.dim), dtype=complex)
        for n, m, mat in self.terms:
            h += np.exp(1j * (n * k1 + m * k2)) * mat
        return h

    def batch(self, k1_vals: np.ndarray, k2_vals: np.ndarray) -> np.ndarray:
        """Stack of fibers on the outer product grid, shape (N1, N2, q, q)."""
        k1_vals = np.asarray(k1_vals, dtype=float)
        k2_vals = np.asarray(k2_vals, dtype=float)
        kk1 = k1_vals[:, None]
        kk2 = k2_vals[None, :]
        out = np.zeros((len(k1_vals), len(k2_vals), self.dim, self.dim), dtype=complex)
        for n, m, mat in self.terms:
            out += np.exp(1j * (n * kk1 + m * kk2))[..., None, None] * mat
        return out


def _shift_matrix(q: int) -> np.ndarray:
    """Cyclic up-shift S with S[j+1 mod q, j] = 1."""
    s = np.zeros((q, q), dtype=complex)
    s[(np.arange(q) + 1) % q, np.arange(q)] = 1.0
    return s


def _clock_matrix(q: int, alpha: float) -> np.ndarray:
    return np.diag(np.exp(1j * 2.0 * pi * alpha * np.arange(q)))


def magnetic_translation_pair(flux: RationalFlux):
    """Clock/shift pair (U, V) on C^q with U V = e^{i 2 pi p/q} V U.

    U is the cyclic down-shift and V the clock diag(e^{i 2 pi (p/q) j}).
    """
    u = _shift_matrix(flux.q).conj().T
    v = _clock_matrix(flux.q, flux.value)
    return u, v


def hofstadter_family(flux: RationalFlux) -> BlochFiberFamily:
    """Landau-gauge Bloch fiber family of the square-lattice magnetic model."""
    q = flux.q
    s = _shift_matrix(q)
    # 2 cos(k2 + 2 pi alpha j) split into e^{+-i k2} clock factors.
    v = _clock_matrix(q, flux.value)
    terms = (
        (1, 0, s),
        (-1, 0, s.conj().T),
        (0, 1, v),
        (0, -1, v.conj().T),
    )
    return BlochFiberFamily(flux=flux, dim=q, terms=terms, gauge="landau")


def hofstadter_fiber(flux: RationalFlux, k1: float, k2: float) -> np.ndarray:
    """q x q Bloch fiber at momentum (k1, k2); Hermitian by construction."""
    return hofstadter_family(flux).matrix(k1, k2)


def harper_fiber(flux: RationalFlux, theta: float, k: float) -> np.ndarray:
    """Bloch-reduced 1D quasiperiodic-cosine fiber at rational frequency p/q.

    Diagonal 2 cos(2 pi (theta + j p/q)), hop e^{i k} with the cyclic wrap.
    Built independently of `hofstadter_fiber`; the two constructions are
    cross-checked in the tests.
    """
    q = flux.q
    h = np.zeros((q, q), dtype=complex)
    for j in range(q):
        h[j, j] = 2.0 * cos(2.0 * pi * (theta + j * flux.value))
        h[(j + 1) % q, j] += np.exp(1j * k)
        h[j, (j + 1) % q] += np.exp(-1j * k)
    return h


def harper_family(flux: RationalFlux) -> BlochFiberFamily:
    """Fiber family with axes (k1, k2) = (k, 2 pi theta).

    harper_family(flux).matrix(k, 2 pi theta) agrees with
    harper_fiber(flux, theta, k); the family form exists so the batched
    spectrum machinery applies to the 1D model as well.
    """
    f = hofstadter_family(flux)
    return BlochFiberFamily(flux=flux, dim=f.dim, terms=f.terms, gauge="harper")


def peierls_quantize(disp: FourierDispersion, flux: RationalFlux) -> BlochFiberFamily:
    """Quantize a Bloch dispersion into a magnetic fiber family.

    Each harmonic (n, m, c) maps to c e^{i (n k1 + m k2)} W(n, m) with the
    symmetrically ordered translation product
    W(n, m) = e^{-i pi n m p/q} U^n V^m. The sign of the symmetrization phase
    is pinned by W(n, m)^dag = W(-n, -m), which makes the result Hermitian
    for every real dispersion, mixed harmonics included.
    """
    if not disp.is_real():
        raise ValueError(
            "dispersion is not real: every harmonic (n, m, c) needs the "
            "partner (-n, -m, conj(c))"
        )
    u, v = magnetic_translation_pair(flux)
    alpha = flux.value
    terms = []
    for n, m, c in disp.harmonics:
        un = np.linalg.matrix_power(u if n >= 0 else u.conj().T, abs(n))
        vm = np.linalg.matrix_power(v if m >= 0 else v.conj().T, abs(m))
        w = np.exp(-1j * pi * n * m * alpha) * (un @ vm)
        terms.append((n, m, c * w))
    return BlochFiberFamily(flux=flux, dim=flux.q, terms=tuple(terms), gauge="peierls")


@dataclass(frozen=True)
class BoxOperator:
    """Finite L x L magnetic hopping operator.

    boundary is either "open" or "magnetic-periodic". The matrix acts on
    site indices n * L + m. onsite records any diagonal disorder added later
    so derived operators stay self-describing.
    """

    side: int
    boundary: str
    field: float
    matrix: np.ndarray
    gauge: str = "symmetric"
    onsite: np.ndarray | None = field(default=None, repr=False)

    def site_index(self, n: int, m: int) -> int:
        return (n % self.side) * self.side + (m % self.side)


def symmetric_gauge_box(B: float, L: int, boundary: str = "open") -> BoxOperator:
    """Symmetric-gauge magnetic hopping operator on an L x L box.

    Row (n, m) couples to the four neighbors with phases e^{i 2 pi m B}
    (toward n+1), its conjugate (toward n-1), e^{-i 2 pi n B} (toward m+1)
    and its conjugate (toward m-1). Each plaquette then carries flux 2B.

    With boundary = "magnetic-periodic" the wrap bonds pick up the twists
    e^{+i 2 pi B L m} along x and e^{-i 2 pi B L n} along y, which keep every
    plaquette, wrap plaquettes included, at flux 2B. Consistency of the twist
    around the corner requires the total flux 2 B L^2 to be an integer.
    """
    if L < 1:
        raise ValueError(f"box side must be >= 1, got {L}")
    if boundary not in ("open", "magnetic-periodic"):
        raise ValueError(f"unknown boundary {boundary!r}")
    if boundary == "magnetic-periodic":
        total = 2.0 * B * L * L
        if abs(total - round(total)) > 1e-9:
            raise InfeasibleModelError(
                "magnetic-periodic closure needs integer total flux: "
                f"2*B*L^2 = {total:.6g} is not an integer"
            )

    n_sites = L * L
    h = np.zeros((n_sites, n_sites), dtype=complex)

    def idx(n, m):
        return (n % L) * L + (m % L)

    for n in range(L):
        for m in range(L):
            # bond (n, m) -> (n+1, m)
            if n + 1 < L:
                h[idx(n, m), idx(n + 1, m)] += np.exp(1j * 2.0 * pi * m * B)
            elif boundary == "magnetic-periodic":
                h[idx(n, m), idx(n + 1, m)] += np.exp(1j * 2.0 * pi * m * B) * np.exp(
                    1j * 2.0 * pi * B * L * m
                )
            # bond (n, m) -> (n, m+1)
            if m + 1 < L:
                h[idx(n, m), idx(n, m + 1)] += np.exp(-1j * 2.0 * pi * n * B)
            elif boundary == "magnetic-periodic":
                h[idx(n, m), idx(n, m + 1)] += np.exp(-1j * 2.0 * pi * n * B) * np.exp(
                    -1j * 2.0 * pi * B * L * n
                )
    h = h + h.conj().T
    return BoxOperator(side=L, boundary=boundary, field=float(B), matrix=h)


def plaquette_flux(op: BoxOperator, n: int = 0, m: int = 0) -> float:
    """Flux through one plaquette, in units of the flux quantum, in [0, 1).

    Measured from the assembled matrix: the phases of the four hopping
    amplitudes are summed counterclockwise around the plaquette whose lower
    left corner is site (n, m). Wrap plaquettes are meaningful only for
    magnetic-periodic operators.
    """
    L = op.side
    if L < 2:
        raise ValueError("need at least one plaquette, box side < 2")
    wraps = n + 1 >= L or m + 1 >= L
    if wraps and op.boundary != "magnetic-periodic":
        raise ValueError(f"plaquette ({n}, {m}) wraps an open boundary")
    idx = op.site_index
    hops = (
        op.matrix[idx(n + 1, m), idx(n, m)],
        op.matrix[idx(n + 1, m + 1), idx(n + 1, m)],
        op.matrix[idx(n, m + 1), idx(n + 1, m + 1)],
        op.matrix[idx(n, m), idx(n, m + 1)],
    )
    prod = 1.0 + 0.0j
    for amp in hops:
        if abs(amp) < 1e-14:
            raise ValueError(f"missing bond around plaquette ({n}, {m})")
        prod *= amp
    return float((np.angle(prod) / (2.0 * pi)) % 1.0)


def add_onsite_disorder(op: BoxOperator, values: Sequence[float]) -> BoxOperator:
    """Return a new box operator with real on-site energies added."""
    vals = np.asarray(values, dtype=float).ravel()
    if vals.size != op.side * op.side:
        raise ValueError(
            f"need {op.side * op.side} on-site values for side {op.side}, "
            f"got {vals.size}"
        )
    mat = op.matrix + np.diag(vals)
    prev = op.onsite if op.onsite is not None else 0.0
    return BoxOperator(
        side=op.side,
        boundary=op.boundary,
        field=op.field,
        matrix=mat,
        gauge=op.gauge,
        onsite=np.asarray(prev) + vals,
    )
