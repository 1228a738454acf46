"""Synthetic heralded homodyne acquisition with a single detection-efficiency loss.

Each event carries one LO phase shared by both temporal modes and an (x1, x2)
quadrature pair drawn by inverse-CDF sampling from the exact joint density of
the (lossy) state.  Sampling is deterministic given the seed: each phase of the
round-robin schedule owns an independent child stream, so shard order cannot
change the output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import GridTooSmallError
from .fock import DensityOp

DEFAULT_N_PHASES = 9
DEFAULT_N_SAMPLES = 600_000
DEFAULT_EFFICIENCY_PRE = 0.61        # pre-displacement states
DEFAULT_EFFICIENCY_SYMMETRIC = 0.63  # displaced (symmetric) states
DEFAULT_GRID_POINTS = 4096


def default_phases(n: int = DEFAULT_N_PHASES) -> np.ndarray:
    """LO phases evenly spaced in [0, pi); the pi endpoint mirrors theta=0."""
    return np.linspace(0.0, math.pi, n, endpoint=False)


def default_half_width(alpha_max: float) -> float:
    """Quadrature range rule: +-(4 + sqrt(2) alpha_max) keeps normalization error < 1e-6."""
    return 4.0 + math.sqrt(2.0) * alpha_max


@dataclass(frozen=True)
class QuadGrid:
    half_width: float
    n_points: int = DEFAULT_GRID_POINTS

    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n_points)


@dataclass(frozen=True)
class QuadSample:
    event_id: int
    theta: float
    x1: float
    x2: float


SAMPLE_DTYPE = np.dtype([("event_id", np.int64), ("theta", np.float64),
                         ("x1", np.float64), ("x2", np.float64)])


@dataclass(frozen=True)
class HomodyneConfig:
    phases: tuple[float, ...] = tuple(default_phases())
    state_phase_set: tuple[float, ...] = (0.0,)
    n_samples: int = DEFAULT_N_SAMPLES
    efficiency: float = 1.0
    seed: int = 0
    grid: QuadGrid = field(default_factory=lambda: QuadGrid(default_half_width(2.0)))

    def validate(self) -> "HomodyneConfig":
        ph = np.asarray(self.phases, dtype=float)
        if ph.size < 1 or (ph.size > 1 and np.any(np.diff(ph) <= 0)):
            raise ValueError("phases must be nonempty and ascending")
        if ph[0] < 0 or ph[-1] > math.pi:
            raise ValueError("phases must lie in [0, pi]")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError("efficiency must lie in (0, 1]")
        return self


# ---------------------------------------------------------------------------
# loss channel
# ---------------------------------------------------------------------------

def loss_kraus(eta: float, d: int) -> np.ndarray:
    """Kraus operators of the beam-splitter loss channel, stacked (d, d, d)."""
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must lie in (0, 1]")
    ops = np.zeros((d, d, d))
    for k in range(d):
        n = np.arange(k, d)
        logc = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
        ops[k, n - k, n] = np.exp(0.5 * logc) * eta ** ((n - k) / 2) * (1 - eta) ** (k / 2)
    return ops


def apply_loss(rho: DensityOp, eta: float, modes=None) -> DensityOp:
    """Transmissivity-eta loss on each listed mode (default: all modes)."""
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must lie in (0, 1]")
    if eta == 1.0:
        return rho
    if modes is None:
        modes = range(rho.shape.n_modes)
    modes = sorted({rho.shape.check_mode(int(m)) for m in modes})
    nm = rho.shape.n_modes
    t = rho.tensor_view().copy()
    for m in modes:
        ks = loss_kraus(eta, rho.shape.dims[m])
        acc = np.zeros_like(t)
        for a in ks:
            # rows: contract A on axis m; columns: A* on axis nm + m
            tmp = np.moveaxis(np.tensordot(a, t, axes=(1, m)), 0, m)
            tmp = np.moveaxis(np.tensordot(tmp, a.conj(), axes=(nm + m, 1)), -1, nm + m)
            acc += tmp
        t = acc
    total = rho.shape.total
    return DensityOp(rho.shape, t.reshape(total, total))


# ---------------------------------------------------------------------------
# quadrature wavefunctions and densities
# ---------------------------------------------------------------------------

def hermite_psi(x, d: int) -> np.ndarray:
    """Oscillator wavefunctions psi_n(x), n < d, shape (len(x), d); vacuum variance 1/2."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((x.size, d))
    out[:, 0] = math.pi ** -0.25 * np.exp(-x ** 2 / 2.0)
    if d > 1:
        out[:, 1] = math.sqrt(2.0) * x * out[:, 0]
    for n in range(2, d):
        out[:, n] = (math.sqrt(2.0 / n) * x * out[:, n - 1]
                     - math.sqrt((n - 1.0) / n) * out[:, n - 2])
    return out


def quad_wavefunctions(x, theta: float, d: int) -> np.ndarray:
    """<x,theta|n> = e^{-i n theta} psi_n(x), shape (len(x), d)."""
    ph = np.exp(-1j * theta * np.arange(d))
    return hermite_psi(x, d) * ph[None, :]


def quad_pdf_single(rho: DensityOp, theta: float, grid: QuadGrid) -> np.ndarray:
    """p(x) = <x,theta| rho |x,theta> on the grid axis, for a single-mode state."""
    if rho.shape.n_modes != 1:
        raise ValueError("expected a single-mode state")
    m = quad_wavefunctions(grid.axis(), theta, rho.shape.dims[0])
    p = np.einsum("an,nm,am->a", m, rho.matrix, m.conj()).real
    return np.clip(p, 0.0, None)


def quad_pdf(rho: DensityOp, theta: float, grid: QuadGrid,
             norm_tol: float = 1e-6) -> np.ndarray:
    """Joint same-phase density p(x1, x2) on the grid, shape (n, n).

    Raises GridTooSmallError when the trapezoid integral misses mass beyond
    norm_tol.
    """
    if rho.shape.n_modes != 2:
        raise ValueError("expected a two-mode state")
    d1, d2 = rho.shape.dims
    xs = grid.axis()
    m1 = quad_wavefunctions(xs, theta, d1)
    m2 = quad_wavefunctions(xs, theta, d2)
    r = rho.tensor_view()
    c = np.einsum("bk,bl,nkml->nmb", m2, m2.conj(), r, optimize=True)
    p = np.einsum("an,am,nmb->ab", m1, m1.conj(), c, optimize=True).real
    p = np.clip(p, 0.0, None)
    total = float(np.trapezoid(np.trapezoid(p, xs, axis=1), xs))
    if abs(total - 1.0) > norm_tol:
        raise GridTooSmallError(
            f"joint density integrates to {total!r}; enlarge the quadrature grid")
    return p


def _draw_from_rows(xs: np.ndarray, pdf_rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse piecewise-linear (trapezoid) CDF draw, one row per uniform u."""
    dx = xs[1] - xs[0]
    c = np.cumsum((pdf_rows[:, 1:] + pdf_rows[:, :-1]) / 2.0, axis=1) * dx
    c = np.concatenate((np.zeros((c.shape[0], 1)), c), axis=1)
    uu = u * c[:, -1]
    pos = (c < uu[:, None]).sum(axis=1) - 1
    pos = np.clip(pos, 0, xs.size - 2)
    c_lo = np.take_along_axis(c, pos[:, None], axis=1)[:, 0]
    c_hi = np.take_along_axis(c, (pos + 1)[:, None], axis=1)[:, 0]
    frac = np.where(c_hi > c_lo, (uu - c_lo) / (c_hi - c_lo), 0.5)
    return xs[pos] + frac * dx


def sample(rho: DensityOp, config: HomodyneConfig) -> np.ndarray:
    """Draw heralded quadrature pairs from the lossy state.

    Returns a structured array with fields event_id, theta, x1, x2 sorted by
    event_id; phases follow the round-robin schedule event_id mod n_phases.
    x1 is drawn from the exact marginal, x2 from the conditional at the drawn
    x1 (wavefunctions re-evaluated at the exact sample location).
    """
    config = config.validate()
    if rho.shape.n_modes != 2:
        raise ValueError("expected a two-mode state")
    lossy = apply_loss(rho, config.efficiency)
    d1, d2 = lossy.shape.dims
    xs = config.grid.axis()
    quad_pdf(lossy, 0.0, config.grid)  # range guard
    r = lossy.tensor_view()
    rho1 = np.einsum("abcb->ac", r)
    out = np.empty(config.n_samples, dtype=SAMPLE_DTYPE)
    out["event_id"] = np.arange(config.n_samples)
    phases = np.asarray(config.phases, dtype=float)
    children = np.random.SeedSequence(config.seed).spawn(phases.size)
    for ip, theta in enumerate(phases):
        rng = np.random.default_rng(children[ip])
        idx = np.arange(ip, config.n_samples, phases.size)
        if idx.size == 0:
            continue
        m1 = quad_wavefunctions(xs, theta, d1)
        m2 = quad_wavefunctions(xs, theta, d2)
        p1 = np.clip(np.einsum("an,nm,am->a", m1, rho1, m1.conj()).real, 0.0, None)
        x1 = _draw_shared_row(xs, p1, rng.random(idx.size))
        c = np.einsum("bk,bl,nkml->nmb", m2, m2.conj(), r, optimize=True)
        x2 = np.empty(idx.size)
        ph1 = np.exp(-1j * theta * np.arange(d1))
        chunk = 2048
        for i0 in range(0, idx.size, chunk):
            sl = slice(i0, min(i0 + chunk, idx.size))
            psi1 = hermite_psi(x1[sl], d1) * ph1[None, :]
            w = psi1[:, :, None] * psi1.conj()[:, None, :]
            rows = np.clip(np.einsum("enm,nmb->eb", w, c, optimize=True).real, 0.0, None)
            x2[sl] = _draw_from_rows(xs, rows, rng.random(x1[sl].size))
        out["theta"][idx] = theta
        out["x1"][idx] = x1
        out["x2"][idx] = x2
    return out


def _draw_shared_row(xs: np.ndarray, pdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse piecewise-linear CDF draw when all events share one density row."""
    dx = xs[1] - xs[0]
    c = np.concatenate(([0.0], np.cumsum((pdf[1:] + pdf[:-1]) / 2.0) * dx))
    return np.interp(u * c[-1], c, xs)
