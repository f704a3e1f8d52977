"""Step graphon signals and the graphon shift operator T_W.

For step kernels every computation is exact: the operator ``T_W`` acts on
cell values as ``(T_W x)_i = sum_j A[i, j] x_j w_j`` on a common partition.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graphon import StepGraphon, _check_breakpoints, cell_index, merge_breakpoints, uniform_breakpoints
from .gsp import ordered_eigh


@dataclass(frozen=True, eq=False)
class StepSignal:
    """Piecewise-constant function on a partition of [0, 1]."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = np.array(self.breakpoints, dtype=float)
        vals = np.array(self.values, dtype=float)
        _check_breakpoints(bp)
        if vals.shape != (bp.size - 1,):
            raise ValueError(f"need one value per cell ({bp.size - 1}), got shape {vals.shape}")
        bp.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def __call__(self, t):
        return self.values[cell_index(self.breakpoints, np.asarray(t, dtype=float))]

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.values**2 * self.widths)))

    def inner(self, other: "StepSignal") -> float:
        a, b = align(self, other)
        return float(np.sum(a.values * b.values * a.widths))

    def refine(self, breakpoints) -> "StepSignal":
        bp = np.asarray(breakpoints, dtype=float)
        idx = cell_index(self.breakpoints, (bp[:-1] + bp[1:]) / 2)
        return StepSignal(bp, self.values[idx])

    def __add__(self, other: "StepSignal") -> "StepSignal":
        a, b = align(self, other)
        return StepSignal(a.breakpoints, a.values + b.values)

    def __mul__(self, c: float) -> "StepSignal":
        return StepSignal(self.breakpoints, self.values * c)

    __rmul__ = __mul__

    def to_csv(self) -> str:
        """Rows of (left breakpoint, value); the final row closes the partition at 1."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["breakpoint", "value"])
        for a, v in zip(self.breakpoints[:-1], self.values):
            writer.writerow([f"{a:.17g}", f"{v:.17g}"])
        writer.writerow([f"{self.breakpoints[-1]:.17g}", ""])
        return buf.getvalue()


def align(*signals: StepSignal) -> list[StepSignal]:
    bp = merge_breakpoints(*(s.breakpoints for s in signals))
    return [s.refine(bp) for s in signals]


def step_signal(x) -> StepSignal:
    """Induced graphon signal: value x[i] on the cell [i/N, (i+1)/N)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("graph signal must be a non-empty vector")
    return StepSignal(uniform_breakpoints(x.size), x)


def _shared_partition(w: StepGraphon, x: StepSignal) -> tuple[StepGraphon, np.ndarray]:
    bp = merge_breakpoints(w.breakpoints, x.breakpoints)
    return w.refine(bp), x.refine(bp).values


def _operator_matrix(w: StepGraphon) -> np.ndarray:
    # cell values -> cell values of T_W x
    return w.values * w.widths[None, :]


def apply_tw(w: StepGraphon, x: StepSignal) -> StepSignal:
    """(T_W x)(u) = integral of W(u, v) x(v) dv, exactly for step inputs."""
    wr, xv = _shared_partition(w, x)
    return StepSignal(wr.breakpoints, _operator_matrix(wr) @ xv)


def graphon_filter(w: StepGraphon, coefficients: Sequence[float], x: StepSignal) -> StepSignal:
    """Apply the polynomial ``sum_k h_k T_W^k`` to ``x`` (Horner's rule)."""
    h = list(coefficients)
    if not h:
        raise ValueError("need at least one filter coefficient")
    wr, xv = _shared_partition(w, x)
    t = _operator_matrix(wr)
    y = h[-1] * xv
    for hk in reversed(h[:-1]):
        y = t @ y + hk * xv
    return StepSignal(wr.breakpoints, y)


@dataclass(frozen=True, eq=False)
class GraphonSpectrum:
    """Eigenvalues of T_W (|lambda| descending) and step eigenfunctions.

    ``eigenfunction_values[:, i]`` holds the cell values of the i-th
    eigenfunction on ``breakpoints``.
    """

    breakpoints: np.ndarray
    eigenvalues: np.ndarray
    eigenfunction_values: np.ndarray

    def __len__(self) -> int:
        return self.eigenvalues.size

    def eigenfunction(self, i: int) -> StepSignal:
        return StepSignal(self.breakpoints, self.eigenfunction_values[:, i])

    def synthesize(self, coefficients) -> StepSignal:
        c = np.asarray(coefficients, dtype=float)
        return StepSignal(self.breakpoints, self.eigenfunction_values[:, :c.size] @ c)


def graphon_spectrum(w: StepGraphon) -> GraphonSpectrum:
    """Spectrum of a step kernel, computed on its width-weighted grid.

    Only as many modes as there are cells are materialized; the remaining
    spectrum of T_W is zero.
    """
    lam, vec, _ = ordered_eigh(w.weighted_grid())
    phi = vec / np.sqrt(w.widths)[:, None]
    return GraphonSpectrum(w.breakpoints, lam, phi)


def graphon_fourier(spectrum: GraphonSpectrum, x: StepSignal) -> np.ndarray:
    """Coefficients ``<x, phi_j>`` in L2[0, 1]."""
    bp = merge_breakpoints(spectrum.breakpoints, x.breakpoints)
    idx = cell_index(spectrum.breakpoints, (bp[:-1] + bp[1:]) / 2)
    phi = spectrum.eigenfunction_values[idx]
    xv = x.refine(bp).values
    return phi.T @ (xv * np.diff(bp))


def bandlimited_modes(spectrum: GraphonSpectrum, omega: float) -> np.ndarray:
    """Indices of modes with |lambda| >= omega (ties at omega included)."""
    lam = np.abs(spectrum.eigenvalues)
    tol = 1e-12 * max(1.0, float(lam.max(initial=0.0)))
    return np.flatnonzero(lam >= omega - tol)


def project_bandlimited(spectrum: GraphonSpectrum, x: StepSignal, omega: float) -> StepSignal:
    """Orthogonal projection of ``x`` onto the span of modes with |lambda| >= omega."""
    keep = bandlimited_modes(spectrum, omega)
    coeffs = graphon_fourier(spectrum, x)[keep]
    return StepSignal(spectrum.breakpoints, spectrum.eigenfunction_values[:, keep] @ coeffs)


def bernstein_margin(w: StepGraphon, x: StepSignal, omega: float) -> float:
    """``||T_W x|| - omega ||x||``; nonnegative for omega-bandlimited ``x``."""
    return apply_tw(w, x).norm() - omega * x.norm()
