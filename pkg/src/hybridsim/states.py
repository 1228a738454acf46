"""Named states of the hybrid-entanglement scheme and their closed-form figures.

Builders return normalized kets on explicitly truncated spaces; every closed
form here has a brute-force Fock-space oracle in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_laguerre

from . import fock
from .errors import ZeroNormError
from .fock import Ket, ModeShape


def default_mode2_dim(alpha_i: float) -> int:
    """Truncation for the coherent/photon-added mode: Poisson tail < 1e-10."""
    if alpha_i <= 2.0:
        return 30
    if alpha_i <= 3.25:
        return 50
    return 50 + int(8 * (alpha_i - 3.25) ** 2 + 10 * (alpha_i - 3.25))


def default_dims(alpha_i: float) -> tuple[int, int]:
    return (3, default_mode2_dim(alpha_i))


@dataclass(frozen=True)
class HybridParams:
    """Scalar parameters tying the gain, superposition weights and final amplitude."""

    alpha_i: float
    n_add: int = 1
    g: float = float("nan")
    t: float = float("nan")
    r: float = float("nan")
    alpha_f: float = float("nan")
    phi: float = 0.0

    @classmethod
    def balanced(cls, alpha_i: float, n_add: int = 1, phi: float = 0.0) -> "HybridParams":
        g = gain(n_add, alpha_i)
        t = 1.0 / math.sqrt(alpha_i ** 2 + 2.0)
        r = math.sqrt(1.0 - t ** 2)
        alpha_f = (g * alpha_i - alpha_i) / 2.0
        return cls(alpha_i=alpha_i, n_add=n_add, g=g, t=t, r=r, alpha_f=alpha_f, phi=phi)

    def validate(self) -> "HybridParams":
        if abs(self.r ** 2 + self.t ** 2 - 1.0) > 1e-12:
            raise ValueError("r^2 + t^2 must be 1")
        if self.alpha_i > 0:
            if abs(self.g - gain(self.n_add, self.alpha_i)) > 1e-12:
                raise ValueError("g inconsistent with the gain formula")
            if abs(self.alpha_f - (self.g - 1.0) * self.alpha_i / 2.0) > 1e-12:
                raise ValueError("alpha_f inconsistent with (g-1) alpha_i / 2")
        if not 0.0 <= self.phi <= math.pi:
            raise ValueError("phi must lie in [0, pi]")
        return self


def gain(n_add: int, alpha: float) -> float:
    """Amplitude gain of n-photon addition: g = 1/2 + sqrt(1/4 + n/alpha^2)."""
    if n_add < 1:
        raise ValueError("n_add must be >= 1")
    if alpha <= 0:
        raise ValueError("gain diverges as alpha -> 0; need alpha > 0")
    return 0.5 + math.sqrt(0.25 + n_add / alpha ** 2)


def pacs_norm2(alpha: float, n_add: int = 1) -> float:
    """Squared norm of the unnormalized (a_dag)^n |alpha>: n! L_n(-|alpha|^2)."""
    return float(math.factorial(n_add) * eval_laguerre(n_add, -abs(alpha) ** 2))


def photon_added_coherent(alpha: float, n_add: int, d: int) -> Ket:
    """Normalized photon-added coherent state N^{-1/2} (a_dag)^n |alpha>."""
    ket = fock.coherent(alpha, d)
    for _ in range(n_add):
        ket = fock.apply_creation_audited(ket, 0)
    return ket.normalize()


def fidelity_pacs_coherent(alpha: float, n_add: int = 1) -> float:
    """Closed-form fidelity of the n-photon-added |alpha> to the ideal |g alpha>."""
    if alpha <= 0:
        raise ValueError("need alpha > 0")
    g = gain(n_add, alpha)
    norm = pacs_norm2(alpha, n_add)
    return (g ** (2 * n_add) * alpha ** (2 * n_add) / norm
            * math.exp(-alpha ** 2 * (g - 1.0) ** 2))


def apply_superposed_addition(r: float, t: float, state: Ket) -> tuple[Ket, float]:
    """Apply the superposed addition r a_dag_1 + t a_dag_2 to a two-mode ket.

    Returns the normalized result and the pre-normalization squared norm
    (the relative heralding probability of the event).
    """
    if state.shape.n_modes != 2:
        raise ValueError("expected a two-mode ket")
    if abs(r ** 2 + t ** 2 - 1.0) > 1e-12:
        raise ValueError("weights must satisfy r^2 + t^2 = 1")
    parts = []
    if r != 0.0:
        parts.append(r * fock.apply_creation_audited(state, 0).amps)
    if t != 0.0:
        parts.append(t * fock.apply_creation_audited(state, 1).amps)
    if not parts:
        raise ValueError("r and t cannot both vanish")
    amps = parts[0] if len(parts) == 1 else parts[0] + parts[1]
    raw = Ket(state.shape, amps)
    n2 = raw.norm2()
    if n2 < 1e-150:
        raise ZeroNormError("superposed addition produced a zero-norm state")
    return raw.normalize(), n2


def hybrid_pre(alpha_i: float, phi: float = 0.0,
               dims: tuple[int, int] | None = None) -> Ket:
    """Pre-displacement hybrid: (|1>|a_i> + e^{i phi} |0> a_dag|a_i>/sqrt(a_i^2+1))/sqrt(2)."""
    if dims is None:
        dims = default_dims(alpha_i)
    d1, d2 = dims
    coh = fock.coherent(alpha_i, d2)
    pacs = fock.apply_creation_audited(fock.tensor(fock.fock(0, d1), coh), 1)
    pacs_amps = pacs.amps / math.sqrt(pacs.norm2())
    one_coh = fock.tensor(fock.fock(1, d1), coh).amps
    amps = (one_coh + np.exp(1j * phi) * pacs_amps) / math.sqrt(2.0)
    return Ket(ModeShape((d1, d2)), amps).normalize()


def hybrid_displaced(alpha_i: float, alpha_mid: float, phi: float = 0.0,
                     dims: tuple[int, int] | None = None) -> Ket:
    """Hybrid state with mode 2 displaced so its coherent branch sits at -alpha_mid.

    alpha_mid = (g-1) alpha_i / 2 gives the symmetric small hybrid; other values
    are used as the free intermediate amplitude of tele-amplification.  The
    pre-displacement state is built in an over-provisioned space and cropped
    afterwards (the displaced state needs far fewer levels than the input).
    """
    if dims is None:
        dims = default_dims(alpha_i)
    d1, d2 = dims
    d2_work = max(d2, default_mode2_dim(alpha_i))
    pre = hybrid_pre(alpha_i, phi, (d1, d2_work))
    beta = -(alpha_i + alpha_mid)
    disp = fock.displacement_op(beta, d2_work)
    out = fock.apply_unitary_audited(disp, pre, mode=1, rel_tol=1e-8)
    return fock.crop_mode(out, 1, d2, rel_tol=1e-9).normalize()


def hybrid_symmetric(alpha_i: float, dims: tuple[int, int] | None = None,
                     phi: float = 0.0) -> tuple[Ket, HybridParams]:
    """Symmetric small hybrid ~ (|0>|a_f> + |1>|-a_f>)/sqrt(2) plus its parameters."""
    params = HybridParams.balanced(alpha_i, phi=phi)
    ket = hybrid_displaced(alpha_i, params.alpha_f, phi, dims)
    return ket, params


def fidelity_symmetric(alpha_i: float) -> tuple[float, float]:
    """Closed-form fidelity of the symmetric hybrid to the ideal one, and alpha_f."""
    if alpha_i <= 0:
        raise ValueError("need alpha_i > 0")
    g = gain(1, alpha_i)
    alpha_f = (g - 1.0) * alpha_i / 2.0
    s2 = 1.0 + alpha_i ** 2
    f = 0.25 * (1.0
                + (g * alpha_i) ** 2 * math.exp(-4.0 * alpha_f ** 2) / s2
                + 2.0 * g * alpha_i * math.exp(-2.0 * alpha_f ** 2) / math.sqrt(s2))
    return f, alpha_f


def ideal_hybrid(alpha: float, dims: tuple[int, int] | None = None) -> Ket:
    """Ideal hybrid (|0>|alpha> + |1>|-alpha>)/sqrt(2)."""
    if dims is None:
        dims = (3, default_mode2_dim(abs(alpha)))
    d1, d2 = dims
    amps = (fock.tensor(fock.fock(0, d1), fock.coherent(alpha, d2)).amps
            + fock.tensor(fock.fock(1, d1), fock.coherent(-alpha, d2)).amps)
    return Ket(ModeShape((d1, d2)), amps / math.sqrt(2.0)).normalize()


def ecs_norm_const(alpha_f: float, alpha_f_prime: float) -> float:
    """N' = [2 (1 - e^{-2 a_f^2 - 2 a_f'^2})]^{-1/2}."""
    val = 2.0 * (1.0 - math.exp(-2.0 * alpha_f ** 2 - 2.0 * alpha_f_prime ** 2))
    if val <= 0:
        raise ZeroNormError("ECS vanishes at alpha_f = alpha_f' = 0")
    return 1.0 / math.sqrt(val)


def ecs(alpha_f: float, alpha_f_prime: float,
        dims: tuple[int, int] | None = None) -> Ket:
    """Unbalanced entangled coherent state N'(|a_f>|a_f'> - |-a_f>|-a_f'>)."""
    if not alpha_f_prime > alpha_f > 0:
        raise ValueError("require alpha_f_prime > alpha_f > 0")
    if dims is None:
        dims = (default_mode2_dim(alpha_f), default_mode2_dim(alpha_f_prime))
    d3, d2p = dims
    plus = fock.tensor(fock.coherent(alpha_f, d3), fock.coherent(alpha_f_prime, d2p)).amps
    minus = fock.tensor(fock.coherent(-alpha_f, d3), fock.coherent(-alpha_f_prime, d2p)).amps
    amps = ecs_norm_const(alpha_f, alpha_f_prime) * (plus - minus)
    return Ket(ModeShape((d3, d2p)), amps).normalize()


# ---------------------------------------------------------------------------
# Fidelity-vs-amplitude sweep (small hybrid)
# ---------------------------------------------------------------------------

def alpha_i_for_target(alpha_f: float) -> float:
    """Inverse of the bijection alpha_f = (g-1) alpha_i / 2 on (0, 1/2)."""
    if not 0.0 < alpha_f < 0.5:
        raise ValueError("alpha_f must lie in (0, 1/2)")
    return (1.0 - 4.0 * alpha_f ** 2) / (2.0 * alpha_f)


def _overlap_to_ideal(alpha_i: float, mu: float, alpha_f_target: float) -> float:
    """|<Psi(af_t)|Psi_S(alpha_i, coherent branch at mu)>|^2, closed coherent algebra."""
    s = math.sqrt(1.0 + alpha_i ** 2)
    t1 = math.exp(-(mu + alpha_f_target) ** 2 / 2.0)
    t2 = (alpha_f_target - mu + alpha_i) * math.exp(-(alpha_f_target - mu) ** 2 / 2.0) / s
    return 0.25 * (t1 + t2) ** 2


def sweep_fidelity_small(alpha_f_grid, search: str = "alpha-i",
                         n_param: int = 24001) -> list[dict]:
    """Fig.-2a-style sweep: F against the output amplitude alpha_f.

    F_mapped evaluates the closed form at the exact inverse-mapped alpha_i.
    search='alpha-i': F_search interpolates a dense forward parametric sweep
    (alpha_f(a_i), F(a_i)) at the target, an independent route to the same curve.
    search='free': F_search additionally frees the displacement magnitude and
    reports the maximum overlap with the target ideal hybrid (no optimality
    claim is attached to the mapped value under this mode).
    """
    if search not in ("alpha-i", "free"):
        raise ValueError("search must be 'alpha-i' or 'free'")
    grid = np.asarray(list(alpha_f_grid), dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("alpha_f grid must be nonempty and ascending")
    rows = []
    if search == "alpha-i":
        ais = np.linspace(0.05, 14.0, n_param)
        pts = np.array([fidelity_symmetric(a) for a in ais])
        order = np.argsort(pts[:, 1])
        afs, fs = pts[order, 1], pts[order, 0]
    for af in grid:
        ai = alpha_i_for_target(af)
        f_mapped = fidelity_symmetric(ai)[0]
        if search == "alpha-i":
            f_search = float(np.interp(af, afs, fs))
        else:
            best = -1.0
            for a in np.linspace(max(0.05, 0.2 * ai), 3.0 * ai + 2.0, 241):
                for mu in np.linspace(-af - 0.6, -max(af - 0.6, 0.0), 121):
                    best = max(best, _overlap_to_ideal(a, mu, af))
            f_search = best
        rows.append({"alpha_f": float(af), "alpha_i": float(ai),
                     "F_mapped": float(f_mapped), "F_search": float(f_search),
                     "diff": float(f_search - f_mapped)})
    return rows
