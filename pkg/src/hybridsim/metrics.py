"""Figures of merit: fidelity, partial-transpose negativity, Wigner functions.

Negativity is the unnormalized sum of |negative eigenvalues| of the partial
transpose (a maximally entangled qubit pair scores 0.5).  Wigner functions use
the displaced-parity form W(x, p) = Tr[rho D(a) P D(a)^dag]/pi with
a = (x + i p)/sqrt(2), normalized so the grid integral is 1 and the vacuum
peaks at 1/pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateOutcomeError, GridTooSmallError
from .fock import DensityOp, Ket, ModeShape

EIG_CLIP = 1e-13  # density-matrix eigenvalues below this are numerical noise


def overlap(psi: Ket, phi: Ket) -> complex:
    if psi.shape != phi.shape:
        raise ValueError("shape mismatch")
    return complex(np.vdot(psi.amps, phi.amps))


def fidelity(rho: DensityOp, psi: Ket) -> float:
    """<psi|rho|psi> for a normalized psi."""
    if rho.shape != psi.shape:
        raise ValueError("shape mismatch")
    v = psi.normalize().amps
    val = float(np.real(np.vdot(v, rho.matrix @ v)))
    if val < -1e-10 or val > 1.0 + 1e-8:
        raise ValueError(f"fidelity {val!r} outside [0, 1] beyond tolerance")
    return val


def state_fidelity(psi: Ket, phi: Ket) -> float:
    """|<psi|phi>|^2 between normalized pure states."""
    return abs(overlap(psi.normalize(), phi.normalize())) ** 2


def uhlmann_fidelity(rho: DensityOp, sigma: DensityOp) -> float:
    """(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 for two density operators."""
    if rho.shape != sigma.shape:
        raise ValueError("shape mismatch")
    w, v = np.linalg.eigh(rho.matrix)
    w = np.where(w > EIG_CLIP, w, 0.0)
    sq = (v * np.sqrt(w)) @ v.conj().T
    inner = sq @ sigma.matrix @ sq
    lam = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    lam = np.where(lam > EIG_CLIP, lam, 0.0)
    return float(np.sqrt(lam).sum() ** 2)


# ---------------------------------------------------------------------------
# partial-transpose negativity
# ---------------------------------------------------------------------------

def partial_transpose(rho: DensityOp, mode: int) -> np.ndarray:
    if rho.shape.n_modes != 2:
        raise ValueError("partial transpose is defined here for two-mode states")
    rho.shape.check_mode(mode)
    d1, d2 = rho.shape.dims
    t = rho.tensor_view()
    if mode == 0:
        t = t.transpose(2, 1, 0, 3)
    else:
        t = t.transpose(0, 3, 2, 1)
    return t.reshape(d1 * d2, d1 * d2)


def npt(rho: DensityOp, transpose_mode: int = 1) -> float:
    """Sum of |negative eigenvalues| of the partial transpose."""
    m = rho.matrix
    herm_dev = np.abs(m - m.conj().T).max()
    if herm_dev > 1e-8:
        raise ValueError(f"input not Hermitian within tolerance: {herm_dev:.2e}")
    pt = partial_transpose(rho, transpose_mode)
    lam = np.linalg.eigvalsh((pt + pt.conj().T) / 2)
    return float(-lam[lam < 0].sum())


def npt_curve(alpha_i_grid, dims: tuple[int, int] | None = None) -> list[dict]:
    """NPT of the pre-displacement hybrid per grid point, with truncation metadata."""
    from . import states

    rows = []
    for ai in np.asarray(list(alpha_i_grid), dtype=float):
        d = dims if dims is not None else states.default_dims(float(ai))
        ket = states.hybrid_pre(float(ai), dims=d)
        val = npt(DensityOp.from_ket(ket))
        rows.append({"alpha_i": float(ai), "npt": val, "dim_mode2": d[1]})
    return rows


# ---------------------------------------------------------------------------
# conditioning
# ---------------------------------------------------------------------------

def condition_on_mode1(rho: DensityOp, fock_n: int) -> tuple[DensityOp, float]:
    """Project mode 0 of a two-mode state onto |fock_n>; normalized conditional + probability."""
    if rho.shape.n_modes != 2:
        raise ValueError("expected a two-mode density operator")
    d1, d2 = rho.shape.dims
    if not 0 <= fock_n < d1:
        raise ValueError(f"fock_n={fock_n} outside [0, {d1})")
    block = rho.tensor_view()[fock_n, :, fock_n, :]
    p = float(np.trace(block).real)
    if p <= 1e-14:
        raise DegenerateOutcomeError(f"outcome |{fock_n}> on mode 1 has zero probability")
    return DensityOp(ModeShape((d2,)), block / p), p


def mode1_populations(rho: DensityOp) -> np.ndarray:
    if rho.shape.n_modes != 2:
        raise ValueError("expected a two-mode density operator")
    return np.einsum("abab->a", rho.tensor_view()).real


# ---------------------------------------------------------------------------
# Wigner function via displaced parity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WignerGrid:
    x_min: float
    x_max: float
    p_min: float
    p_max: float
    n_x: int
    n_p: int
    values: np.ndarray

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    @property
    def ps(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.n_p)

    def integral(self) -> float:
        return float(np.trapezoid(np.trapezoid(self.values, self.ps, axis=1), self.xs))

    def marginal_x(self) -> np.ndarray:
        """Integral over p (Simpson), approximating the theta=0 quadrature density."""
        from scipy.integrate import simpson

        return simpson(self.values, x=self.ps, axis=1)


def _displaced_parity_row(vecs: np.ndarray, weights: np.ndarray,
                          betas: np.ndarray, d_work: int) -> np.ndarray:
    """sum_j w_j sum_l (-1)^l |<l|D(beta)|v_j>|^2 for a batch of betas.

    Columns of D(beta) follow the exact recurrence
    D|n> = (a_dag - beta*) D|n-1> / sqrt(n) with D|0> = |beta>, so there is no
    cropping error; d_work only truncates the displaced tail.
    """
    r, d = vecs.shape
    npts = betas.size
    n_idx = np.arange(d_work)
    lf = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, d_work)))))
    absb = np.abs(betas)
    safe = np.where(absb > 0, absb, 1.0)
    logmag = n_idx[None, :] * np.log(safe)[:, None]
    phase = np.where(absb > 0, betas / safe, 1.0)
    col = np.exp(-absb[:, None] ** 2 / 2 + logmag - 0.5 * lf[None, :]) \
        * phase[:, None] ** n_idx[None, :]
    col[absb == 0] = 0.0
    col[absb == 0, 0] = 1.0
    acc = vecs[:, 0][:, None, None] * col[None, :, :]
    sq = np.sqrt(np.arange(1.0, d_work))
    bconj = np.conj(betas)[:, None]
    for n in range(1, d):
        nxt = np.empty_like(col)
        nxt[:, 0] = -bconj[:, 0] * col[:, 0]
        nxt[:, 1:] = sq[None, :] * col[:, :-1] - bconj * col[:, 1:]
        nxt /= math.sqrt(n)
        col = nxt
        acc += vecs[:, n][:, None, None] * col[None, :, :]
    par = (-1.0) ** n_idx
    return np.einsum("r,rpl,l->p", weights, np.abs(acc) ** 2, par)


def wigner(rho: DensityOp, x_min: float = -6.0, x_max: float = 6.0,
           p_min: float = -6.0, p_max: float = 6.0,
           n_x: int = 121, n_p: int = 121,
           integral_tol: float = 0.01) -> WignerGrid:
    """W(x, p) of a single-mode state on a rectangular grid.

    Raises GridTooSmallError when the grid misses state mass (integral check);
    the caller chooses the extent, the working dimension is derived internally.
    """
    if rho.shape.n_modes != 1:
        raise ValueError("wigner expects a single-mode density operator")
    d = rho.shape.dims[0]
    w, v = np.linalg.eigh(rho.matrix)
    keep = w > EIG_CLIP
    w, v = w[keep], np.ascontiguousarray(v[:, keep].T)
    amax = max(abs(x_min), abs(x_max), abs(p_min), abs(p_max)) / math.sqrt(2.0)
    d_work = int(math.ceil((math.sqrt(d) + amax) ** 2)) + 30
    xs = np.linspace(x_min, x_max, n_x)
    ps = np.linspace(p_min, p_max, n_p)
    vals = np.empty((n_x, n_p))
    for i, x in enumerate(xs):
        betas = -(x + 1j * ps) / math.sqrt(2.0)
        vals[i] = _displaced_parity_row(v, w, betas, d_work) / math.pi
    grid = WignerGrid(x_min, x_max, p_min, p_max, n_x, n_p, vals)
    if abs(grid.integral() - 1.0) > integral_tol:
        raise GridTooSmallError(
            f"Wigner grid integral {grid.integral():.4f} deviates from 1; enlarge the grid"
        )
    return grid


def wigner_point(rho: DensityOp, x: float, p: float) -> float:
    """Single-point W(x, p) (same displaced-parity evaluation as wigner)."""
    d = rho.shape.dims[0]
    w, v = np.linalg.eigh(rho.matrix)
    keep = w > EIG_CLIP
    w, v = w[keep], np.ascontiguousarray(v[:, keep].T)
    amax = math.hypot(x, p) / math.sqrt(2.0)
    d_work = int(math.ceil((math.sqrt(d) + amax) ** 2)) + 30
    beta = np.array([-(x + 1j * p) / math.sqrt(2.0)])
    return float(_displaced_parity_row(v, w, beta, d_work)[0]) / math.pi
