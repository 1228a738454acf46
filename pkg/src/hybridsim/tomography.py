"""Two-mode iterative maximum-likelihood reconstruction from quadrature pairs.

The fixed-point iteration rho <- N[R rho R] with
R(rho) = sum_j (f_j / p_j(rho)) Pi_j runs over binned same-phase POVM elements
Pi = Pi_theta,i (x) Pi_theta,j.  Detection efficiency is corrected inside the
POVM by composing with the adjoint loss channel, which keeps every iterate a
physical state.  R is accumulated in a fixed bin order so iterates are
bit-stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_legendre

from .errors import RangeTooSmallError, StalledLikelihoodError
from .fock import DensityOp, ModeShape
from .homodyne import SAMPLE_DTYPE, default_phases, hermite_psi, loss_kraus

IDENTITY_WARN = 1e-4
IDENTITY_FAIL = 1e-3
P_FLOOR = 1e-15


@dataclass(frozen=True)
class TomoConfig:
    dims: tuple[int, int] = (3, 10)
    phases: tuple[float, ...] = tuple(default_phases())
    bin_width: float = 0.2
    x_range: float = 6.0
    efficiency: float = 1.0
    max_iter: int = 2000
    tol: float = 1e-9
    dilution: float = 1.0
    stop_window: int = 10

    def validate(self) -> "TomoConfig":
        d1, d2 = self.dims
        if d1 < 2 or d2 < 2:
            raise ValueError("dims must be >= (2, 2)")
        n = self.n_bins
        if abs(n * self.bin_width - 2 * self.x_range) > 1e-9:
            raise ValueError("bins must partition [-x_range, x_range] exactly")
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError("efficiency must lie in (0, 1]")
        if not 0.0 < self.dilution <= 1.0:
            raise ValueError("dilution must lie in (0, 1]")
        return self

    @property
    def n_bins(self) -> int:
        return int(round(2 * self.x_range / self.bin_width))

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(-self.x_range, self.x_range, self.n_bins + 1)


@dataclass(frozen=True)
class TomoResult:
    rho: DensityOp
    loglik_trace: list[float]
    iterations: int
    converged: bool


# ---------------------------------------------------------------------------
# POVM construction
# ---------------------------------------------------------------------------

def _bin_operators(d: int, theta: float, edges: np.ndarray, gl_order: int = 12) -> np.ndarray:
    """Pi_theta,i = integral over bin of |x_theta><x_theta|, stacked (n_bins, d, d)."""
    nodes, weights = roots_legendre(gl_order)
    nb = edges.size - 1
    ph = np.exp(1j * theta * np.arange(d))  # <m|x,th><x,th|n> = e^{i(m-n)th} psi_m psi_n
    ops = np.empty((nb, d, d), dtype=complex)
    for i in range(nb):
        a, b = edges[i], edges[i + 1]
        xg = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        wg = 0.5 * (b - a) * weights
        p = hermite_psi(xg, d)
        base = np.einsum("g,gm,gn->mn", wg, p, p)
        ops[i] = base * ph[:, None] * ph.conj()[None, :]
    return ops


def _loss_adjoint(ops: np.ndarray, eta: float) -> np.ndarray:
    """Compose bin operators with the adjoint loss channel: Pi -> sum_k A_k^dag Pi A_k."""
    d = ops.shape[-1]
    ks = loss_kraus(eta, d)
    return np.einsum("kab,iac,kcd->ibd", ks.conj(), ops, ks, optimize=True)


@dataclass(frozen=True)
class Povm:
    """Factored two-mode POVM: element (phase, i, j) is mode1[phase, i] (x) mode2[phase, j]."""

    config: TomoConfig
    mode1: np.ndarray  # (n_phases, n_bins, d1, d1)
    mode2: np.ndarray  # (n_phases, n_bins, d2, d2)
    identity_deficit: tuple[float, float]

    def element(self, phase_idx: int, i: int, j: int) -> np.ndarray:
        return np.kron(self.mode1[phase_idx, i], self.mode2[phase_idx, j])

    def probabilities(self, rho: np.ndarray) -> np.ndarray:
        """Tr[Pi rho] for every element, shape (n_phases, n_bins, n_bins)."""
        d1 = self.mode1.shape[-1]
        d2 = self.mode2.shape[-1]
        r = rho.reshape(d1, d2, d1, d2)
        return np.einsum("pirc,pjst,ctrs->pij", self.mode1, self.mode2, r,
                         optimize=True).real


def build_povm(config: TomoConfig) -> Povm:
    """Binned, efficiency-corrected POVM for every phase of the config.

    Fails when the truncated x-range misses more than IDENTITY_FAIL of the
    per-phase identity resolution (raise the range or lower the dimension).
    """
    config = config.validate()
    d1, d2 = config.dims
    edges = config.edges
    p1 = np.stack([_bin_operators(d1, th, edges) for th in config.phases])
    p2 = np.stack([_bin_operators(d2, th, edges) for th in config.phases])
    dev1 = max(float(np.abs(p1[k].sum(axis=0) - np.eye(d1)).max())
               for k in range(len(config.phases)))
    dev2 = max(float(np.abs(p2[k].sum(axis=0) - np.eye(d2)).max())
               for k in range(len(config.phases)))
    if max(dev1, dev2) > IDENTITY_FAIL:
        raise RangeTooSmallError(
            f"identity-resolution deficit {max(dev1, dev2):.2e} exceeds {IDENTITY_FAIL}; "
            "x_range too small for the requested dimensions")
    if config.efficiency < 1.0:
        p1 = np.stack([_loss_adjoint(p1[k], config.efficiency)
                       for k in range(len(config.phases))])
        p2 = np.stack([_loss_adjoint(p2[k], config.efficiency)
                       for k in range(len(config.phases))])
    return Povm(config=config, mode1=p1, mode2=p2, identity_deficit=(dev1, dev2))


# ---------------------------------------------------------------------------
# data binning and likelihood
# ---------------------------------------------------------------------------

def bin_counts(data: np.ndarray, config: TomoConfig) -> np.ndarray:
    """Histogram QuadSample records into (n_phases, n_bins, n_bins) counts.

    Every record's theta must match a configured phase; out-of-range samples
    are dropped (they carry negligible probability for a proper range).
    """
    if data.dtype != SAMPLE_DTYPE:
        data = np.asarray(data, dtype=SAMPLE_DTYPE)
    if data.size == 0:
        raise ValueError("empty dataset")
    phases = np.asarray(config.phases, dtype=float)
    th = data["theta"]
    phase_idx = np.argmin(np.abs(phases[None, :] - th[:, None]), axis=1)
    if np.any(np.abs(phases[phase_idx] - th) > 1e-9):
        raise ValueError("dataset contains thetas outside the configured phase set")
    edges = config.edges
    counts = np.zeros((phases.size, config.n_bins, config.n_bins))
    inside = ((data["x1"] >= -config.x_range) & (data["x1"] < config.x_range)
              & (data["x2"] >= -config.x_range) & (data["x2"] < config.x_range))
    for k in range(phases.size):
        m = inside & (phase_idx == k)
        counts[k], _, _ = np.histogram2d(data["x1"][m], data["x2"][m],
                                         bins=[edges, edges])
    return counts


def loglik(data: np.ndarray, rho: DensityOp, povm: Povm) -> float:
    """sum_j f_j log p_j(rho); -inf sentinel when an observed bin has p_j = 0."""
    counts = bin_counts(data, povm.config)
    f = counts / counts.sum()
    p = povm.probabilities(rho.matrix)
    mask = f > 0
    if np.any(p[mask] <= 0):
        return float("-inf")
    return float(np.sum(f[mask] * np.log(p[mask])))


# ---------------------------------------------------------------------------
# reconstruction
# ---------------------------------------------------------------------------

def reconstruct(data: np.ndarray, config: TomoConfig,
                povm: Povm | None = None) -> TomoResult:
    """Iterate rho <- N[R rho R] from the maximally mixed state until the
    relative log-likelihood change over the stop window drops below tol."""
    config = config.validate()
    if povm is None:
        povm = build_povm(config)
    counts = bin_counts(data, config)
    f = counts / counts.sum()
    mask = f > 0
    d1, d2 = config.dims
    dim = d1 * d2
    rho = np.eye(dim, dtype=complex) / dim
    trace: list[float] = []
    converged = False
    it = 0
    for it in range(1, config.max_iter + 1):
        p = povm.probabilities(rho)
        stalled = mask & (p < P_FLOOR)
        if np.any(stalled):
            bins = np.argwhere(stalled)[:5]
            raise StalledLikelihoodError(
                f"observed bins with vanishing probability, e.g. {bins.tolist()}")
        trace.append(float(np.sum(f[mask] * np.log(p[mask]))))
        w = np.where(mask, f / np.where(mask, p, 1.0), 0.0)
        r4 = np.einsum("pij,pirc,pjst->rsct", w, povm.mode1, povm.mode2,
                       optimize=True)
        r = r4.reshape(dim, dim)
        if config.dilution < 1.0:
            r = (1.0 - config.dilution) * np.eye(dim) + config.dilution * r
        rho = r @ rho @ r
        rho = (rho + rho.conj().T) / 2.0
        rho /= np.trace(rho).real
        if len(trace) > config.stop_window:
            rel = abs(trace[-1] - trace[-1 - config.stop_window]) / max(abs(trace[-1]), 1.0)
            if rel < config.tol:
                converged = True
                break
    out = DensityOp(ModeShape((d1, d2)), rho).normalize().validate()
    return TomoResult(rho=out, loglik_trace=trace, iterations=it, converged=converged)
