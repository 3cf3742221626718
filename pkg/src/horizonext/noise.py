"""Correlated Gaussian chunk initialization.

A chunk of f latent frames is drawn from a first-order autoregressive
recursion: z_0 is standard normal and z_u = rho*z_{u-1} + sqrt(1-rho^2)*eps_u.
Every frame keeps a standard-normal marginal while adjacent frames carry
correlation rho; negative rho ("antiphase") maximizes frame-to-frame
variation.  Closed-form covariance and difference-energy companions let the
sampler be checked against exact values.

Randomness comes from numpy's PCG64 generators.  Streams are split with
SeedSequence.spawn so parallel Monte-Carlo batches are reproducible and
non-overlapping; the standard-normal method is the generator's ziggurat,
fixed per numpy build (the numpy version is recorded in run manifests).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AnsParams:
    """Sampler settings: correlation rho in [-1, 1], chunk length f, frame dim d."""

    rho: float
    f: int
    d: int
    seed: int = 0

    def __post_init__(self):
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"correlation rho must lie in [-1, 1], got {self.rho}")
        if self.f < 1:
            raise ValueError(f"chunk length f must be >= 1, got {self.f}")
        if self.d < 1:
            raise ValueError(f"frame dimension d must be >= 1, got {self.d}")
        if self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")


@dataclass(frozen=True)
class NoiseChunk:
    """One chunk of correlated latent noise; rows are frames z_0..z_{f-1}."""

    frames: np.ndarray

    def __post_init__(self):
        if self.frames.ndim != 2:
            raise ValueError(f"frames must be a 2-d array, got ndim={self.frames.ndim}")
        if not np.all(np.isfinite(self.frames)):
            raise ValueError("noise chunk contains non-finite entries")


def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator; identical seeds reproduce identical draws."""
    return np.random.default_rng(seed)


def spawn_streams(seed: int, n: int) -> list[np.random.Generator]:
    """n independent child generators for parallel or per-trial sampling."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def _innovation_scale(rho: float) -> float:
    # guards tiny negative arguments from roundoff at |rho| ~ 1
    return float(np.sqrt(max(0.0, 1.0 - rho * rho)))


def sample_chunk(params: AnsParams, rng: np.random.Generator) -> NoiseChunk:
    """Draw one chunk from the recursion, consuming the given stream."""
    z = np.empty((params.f, params.d))
    z[0] = rng.standard_normal(params.d)
    if params.f > 1:
        c = _innovation_scale(params.rho)
        eps = rng.standard_normal((params.f - 1, params.d))
        for u in range(1, params.f):
            z[u] = params.rho * z[u - 1] + c * eps[u - 1]
    return NoiseChunk(z)


def sample_chunks(params: AnsParams, n_chunks: int, rng: np.random.Generator) -> np.ndarray:
    """Batched draw of n_chunks chunks as an (n_chunks, f, d) array.

    Draw order differs from repeated sample_chunk calls (all z_0 rows first,
    then all innovations), so batches are reproducible per seed but not
    splice-compatible with the one-at-a-time stream.
    """
    if n_chunks < 1:
        raise ValueError(f"n_chunks must be >= 1, got {n_chunks}")
    z = np.empty((n_chunks, params.f, params.d))
    z[:, 0, :] = rng.standard_normal((n_chunks, params.d))
    if params.f > 1:
        c = _innovation_scale(params.rho)
        eps = rng.standard_normal((n_chunks, params.f - 1, params.d))
        for u in range(1, params.f):
            z[:, u, :] = params.rho * z[:, u - 1, :] + c * eps[:, u - 1, :]
    return z


def sample_series(rho: float, length: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Long AR(1) run (length, d) under the same recursion, for spectral estimation."""
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"correlation rho must lie in [-1, 1], got {rho}")
    if length < 2:
        raise ValueError(f"series length must be >= 2, got {length}")
    z = np.empty((length, d))
    z[0] = rng.standard_normal(d)
    c = _innovation_scale(rho)
    eps = rng.standard_normal((length - 1, d))
    for u in range(1, length):
        z[u] = rho * z[u - 1] + c * eps[u - 1]
    return z


def toeplitz_correlation(rho: float, f: int) -> np.ndarray:
    """f x f matrix with entries rho^|u-v| (unit diagonal, symmetric Toeplitz)."""
    idx = np.arange(f)
    return float(rho) ** np.abs(np.subtract.outer(idx, idx))


def analytic_covariance(params: AnsParams) -> np.ndarray:
    """Exact frame-pair covariance scale: Cov(z_u, z_v) = rho^|u-v| per coordinate."""
    return toeplitz_correlation(params.rho, params.f)


def analytic_energy(params: AnsParams) -> float:
    """Expected adjacent-difference energy 2*(f-1)*(1-rho)*d."""
    return 2.0 * (params.f - 1) * (1.0 - params.rho) * params.d


def _stack(chunks) -> np.ndarray:
    if isinstance(chunks, np.ndarray):
        if chunks.ndim != 3:
            raise ValueError(f"chunk array must be 3-d (n, f, d), got ndim={chunks.ndim}")
        if chunks.shape[0] == 0:
            raise ValueError("need at least one chunk")
        return chunks
    chunks = list(chunks)
    if not chunks:
        raise ValueError("need at least one chunk")
    return np.stack([c.frames for c in chunks])


def empirical_energy(chunks) -> float:
    """Mean over chunks of sum_u ||z_u - z_{u-1}||^2.

    Accepts a list of NoiseChunk or a stacked (n, f, d) array.
    """
    z = _stack(chunks)
    return float(np.sum(np.diff(z, axis=1) ** 2, axis=(1, 2)).mean())


def empirical_covariance(chunks) -> np.ndarray:
    """Monte-Carlo estimate of the frame-pair covariance, averaged over coordinates."""
    z = _stack(chunks)
    n, _, d = z.shape
    if n < 1000:
        raise ValueError(f"need >= 1000 chunks for a covariance estimate, got {n}")
    return np.einsum("nud,nvd->uv", z, z) / (n * d)
