"""Graph shift, ordered spectral decomposition, GFT, filters and bandlimited signals.

The shift operator is the adjacency matrix itself.  Frequencies are ordered
by eigenvalue magnitude, largest first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

SIGN_EPS = 1e-12
TIE_RTOL = 1e-10

BANDWIDTH_MODELS = ("BWM1", "BWM2", "BWM3", "BWM4")
COEFF_MEAN = 1.0
COEFF_STD = 0.52


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected weighted graph given by a symmetric adjacency with entries in [0, 1]."""

    adjacency: np.ndarray

    def __post_init__(self):
        a = np.array(self.adjacency, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"adjacency must be a non-empty square array, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be exactly symmetric")
        if np.any(a < 0) or np.any(a > 1):
            raise ValueError("adjacency entries must lie in [0, 1]")
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """Eigenpairs sorted by |eigenvalue| descending.

    ``eigenvectors[:, i]`` pairs with ``eigenvalues[i]``.  ``order[i]`` is the
    position of that eigenvalue in the solver's ascending output.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    order: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def band(self, k_omega: int) -> np.ndarray:
        """Leading ``k_omega`` eigenvectors as an (N, k_omega) block."""
        if not 1 <= k_omega <= self.n:
            raise ValueError(f"k_omega must be in [1, {self.n}], got {k_omega}")
        return self.eigenvectors[:, :k_omega]


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for j in range(out.shape[1]):
        nz = np.flatnonzero(np.abs(out[:, j]) > SIGN_EPS)
        if nz.size and out[nz[0], j] < 0:
            out[:, j] = -out[:, j]
    return out


def _canonical_eigenspace(block: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(block).

    Standard basis vectors are projected onto the span in index order and
    Gram-Schmidt orthonormalized, so the result does not depend on which
    basis the solver happened to return.
    """
    n, d = block.shape
    # coordinates of P e_j in the block's basis are the rows of the block
    coords = np.zeros((d, d))
    found = 0
    for j in range(n):
        c = block[j].copy()
        for _ in range(2):
            c -= coords[:, :found] @ (coords[:, :found].T @ c)
        nrm = np.linalg.norm(c)
        if nrm > 1e-8:
            coords[:, found] = c / nrm
            found += 1
            if found == d:
                break
    if found < d:
        raise np.linalg.LinAlgError("could not build a canonical eigenspace basis")
    return block @ coords


def ordered_eigh(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Symmetric eigendecomposition with the library's ordering and sign rules.

    Eigenvalues within ``TIE_RTOL * max(1, |lambda|_max)`` of each other are
    treated as one eigenspace and given a canonical basis.  Groups are sorted
    by magnitude descending; equal magnitudes by signed value descending.
    Every eigenvector's first entry of magnitude above ``SIGN_EPS`` is positive.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max(initial=0.0))):
        raise ValueError("matrix must be symmetric")
    lam, vec = np.linalg.eigh(a)
    n = lam.shape[0]
    tol = TIE_RTOL * max(1.0, float(np.abs(lam).max(initial=0.0)))

    # eigh returns ascending values, so near-equal values are contiguous
    groups: list[list[int]] = [[0]]
    for i in range(1, n):
        if lam[i] - lam[groups[-1][-1]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    reps = [float(np.mean(lam[g])) for g in groups]

    by_mag = sorted(range(len(groups)), key=lambda g: (-abs(reps[g]), g))
    ordered_groups: list[int] = []
    i = 0
    while i < len(by_mag):
        j = i + 1
        while j < len(by_mag) and abs(abs(reps[by_mag[i]]) - abs(reps[by_mag[j]])) <= tol:
            j += 1
        ordered_groups.extend(sorted(by_mag[i:j], key=lambda g: (-reps[g], g)))
        i = j

    values, vectors, order = [], [], []
    for g in ordered_groups:
        idx = groups[g]
        block = vec[:, idx]
        if len(idx) > 1:
            block = _canonical_eigenspace(block)
        # descending signed value within the eigenspace
        for k in sorted(idx, key=lambda k: (-lam[k], k)):
            values.append(lam[k])
            order.append(k)
        vectors.append(block)
    eigvecs = _fix_signs(np.hstack(vectors))
    return np.asarray(values), eigvecs, np.asarray(order, dtype=int)


def spectral_decompose(graph: Graph) -> SpectralBasis:
    """Ordered, sign-fixed eigendecomposition of the graph shift ``S_G = A``.

    >>> spectral_decompose(Graph(np.array([[0., 1.], [1., 0.]]))).eigenvalues
    array([ 1., -1.])
    """
    lam, vec, order = ordered_eigh(graph.adjacency)
    lam.setflags(write=False)
    vec.setflags(write=False)
    return SpectralBasis(lam, vec, order)


def _check_signal(basis_n: int, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (basis_n,):
        raise ValueError(f"signal must have shape ({basis_n},), got {x.shape}")
    return x


def gft(basis: SpectralBasis, x) -> np.ndarray:
    """Graph Fourier transform ``U^T x``."""
    return basis.eigenvectors.T @ _check_signal(basis.n, x)


def igft(basis: SpectralBasis, coefficients) -> np.ndarray:
    return basis.eigenvectors @ _check_signal(basis.n, coefficients)


def graph_filter(shift, coefficients: Sequence[float], x) -> np.ndarray:
    """Apply ``sum_k h_k S^k`` to ``x`` by Horner's rule.

    ``shift`` is a :class:`Graph` or any square array (e.g. ``A / N``).
    """
    s = shift.adjacency if isinstance(shift, Graph) else np.asarray(shift, dtype=float)
    h = list(coefficients)
    if not h:
        raise ValueError("need at least one filter coefficient")
    x = _check_signal(s.shape[0], x)
    y = h[-1] * x
    for hk in reversed(h[:-1]):
        y = s @ y + hk * x
    return y


def bandwidth_omega(basis: SpectralBasis, k_omega: int) -> float:
    """The ω whose Paley-Wiener space is spanned by the leading ``k_omega`` modes."""
    if not 1 <= k_omega <= basis.n:
        raise ValueError(f"k_omega must be in [1, {basis.n}], got {k_omega}")
    return float(abs(basis.eigenvalues[k_omega - 1]))


def k_omega_for(model: str, m: int) -> int:
    """Number of retained frequencies for a bandwidth model and sample budget.

    Fractions are rounded half-to-even on exact rationals, so e.g. 0.9 * 5 is
    4.5 and rounds to 4.
    """
    model = model.upper()
    if model == "BWM1":
        k = m
    elif model in ("BWM2", "BWM4"):
        k = round(Fraction(9, 10) * m)
    elif model == "BWM3":
        k = round(Fraction(17, 20) * m)
    else:
        raise ValueError(f"unknown bandwidth model {model!r}; expected one of {BANDWIDTH_MODELS}")
    if k < 1:
        raise ValueError(f"{model} with m={m} gives k_omega=0")
    return int(k)


def bwm4_response(n: int, k_omega: int) -> np.ndarray:
    """Frequency response h(k) for k = 1..n: 1 up to k_omega, exp(-4 (k - k_omega)) after."""
    k = np.arange(1, n + 1)
    return np.where(k <= k_omega, 1.0, np.exp(-4.0 * (k - k_omega)))


def generate_bandlimited(basis: SpectralBasis, model: str, m: int, seed) -> np.ndarray:
    """Random low-pass signal under one of the BWM1-BWM4 bandwidth models.

    Fourier coefficients are i.i.d. normal with mean 1 and standard
    deviation 0.52.  ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    n = basis.n
    if not 1 <= m <= n:
        raise ValueError(f"sample budget m must be in [1, {n}], got {m}")
    k = k_omega_for(model, m)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    coeffs = np.zeros(n)
    if model.upper() == "BWM4":
        coeffs = rng.normal(COEFF_MEAN, COEFF_STD, n) * bwm4_response(n, k)
    else:
        coeffs[:k] = rng.normal(COEFF_MEAN, COEFF_STD, k)
    return basis.eigenvectors @ coeffs
