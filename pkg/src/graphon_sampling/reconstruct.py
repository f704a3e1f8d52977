"""Sampling, noise injection, least-squares bandlimited reconstruction and MSE."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .gsp import SpectralBasis
from .sampling import SamplingSet

PINV_RTOL = 1e-12


class ZeroPowerWarning(UserWarning):
    """Noise was requested for samples with zero power; they are returned unchanged."""


@dataclass(frozen=True)
class NoiseSpec:
    snr_db: float
    seed: int | None = None


def take_samples(x, subset: SamplingSet) -> np.ndarray:
    """``M x``: the entries of ``x`` at the set's nodes, in index order."""
    x = np.asarray(x, dtype=float)
    subset.check(x.size)
    return x[subset.as_array()]


def add_noise(samples, spec: NoiseSpec, rng: np.random.Generator | None = None) -> np.ndarray:
    """Add i.i.d. Gaussian noise at ``spec.snr_db`` relative to the samples' mean power.

    An infinite SNR returns a copy of the samples.
    """
    y = np.asarray(samples, dtype=float)
    if y.size == 0:
        raise ValueError("cannot add noise to an empty sample vector")
    if math.isinf(spec.snr_db) and spec.snr_db > 0:
        return y.copy()
    power = float(np.mean(y**2))
    if power == 0.0:
        warnings.warn("samples have zero power; noise variance is zero", ZeroPowerWarning, stacklevel=2)
        return y.copy()
    rng = rng if rng is not None else np.random.default_rng(spec.seed)
    sigma = math.sqrt(power / 10 ** (spec.snr_db / 10))
    return y + rng.normal(0.0, sigma, y.size)


class Reconstruction(NamedTuple):
    signal: np.ndarray
    rank: int
    rank_deficient: bool


def reconstruct_ls(basis: SpectralBasis, k_omega: int, subset: SamplingSet, samples) -> Reconstruction:
    """Least-squares fit in the span of the leading ``k_omega`` eigenvectors.

    Computes ``U_k (M U_k)^+ y`` with the pseudo-inverse taken through an SVD,
    dropping singular values below ``1e-12 * sigma_max``.  A rank-deficient
    system gives the minimum-norm solution and ``rank_deficient=True``.
    """
    subset.check(basis.n)
    y = np.asarray(samples, dtype=float)
    if y.shape != (len(subset),):
        raise ValueError(f"expected {len(subset)} samples, got shape {y.shape}")
    band = basis.band(k_omega)
    if len(subset) == 0:
        return Reconstruction(np.zeros(basis.n), 0, True)
    u, s, vt = np.linalg.svd(band[subset.as_array()], full_matrices=False)
    keep = s > PINV_RTOL * s[0] if s[0] > 0 else np.zeros_like(s, dtype=bool)
    coeffs = vt[keep].T @ ((u[:, keep].T @ y) / s[keep])
    rank = int(keep.sum())
    return Reconstruction(band @ coeffs, rank, rank < k_omega)


def mse(x, x_rec) -> float:
    x = np.asarray(x, dtype=float)
    x_rec = np.asarray(x_rec, dtype=float)
    if x.shape != x_rec.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {x_rec.shape}")
    return float(np.mean((x - x_rec) ** 2))
