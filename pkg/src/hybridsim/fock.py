"""Truncated-Fock-space linear algebra: states, operators, composition, reduction.

Conventions (fixed here, used everywhere else):

* Basis ordering is mode-major lexicographic: the last mode's index varies
  fastest, i.e. a multi-mode amplitude vector is ``amps.reshape(dims)`` in
  C order with mode 0 as the slowest axis.
* Creation-operator truncation discards the amplitude pushed past the top
  level (no wrap-around); builders must over-provision dimensions and can
  audit the discarded mass.
* Beam splitter: ``B = exp(theta (a_dag b - a b_dag))`` so that
  ``B |alpha>_a |0>_b = |alpha cos(theta)> |-alpha sin(theta)>``.
* Quadrature: ``x_theta = (a e^{-i theta} + a_dag e^{i theta})/sqrt(2)``,
  vacuum variance 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import TruncationError, ZeroNormError

NORM_ATOL = 1e-10
HERM_ATOL = 1e-10
TRACE_ATOL = 1e-8
PSD_ATOL = 1e-8


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ModeShape:
    """Per-mode truncation dimensions of a multi-mode Fock space."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 2 for d in dims):
            raise ValueError(f"every mode dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total(self) -> int:
        return math.prod(self.dims)

    @property
    def n_modes(self) -> int:
        return len(self.dims)

    def check_mode(self, mode: int) -> int:
        if not 0 <= mode < self.n_modes:
            raise ValueError(f"mode {mode} out of range for {self.n_modes} modes")
        return mode


@dataclass(frozen=True)
class Ket:
    """Pure state: complex amplitudes over a truncated multi-mode Fock basis."""

    shape: ModeShape
    amps: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).ravel()
        if amps.size != self.shape.total:
            raise ValueError(f"amplitude length {amps.size} != {self.shape.total}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("non-finite amplitudes")
        object.__setattr__(self, "amps", _readonly(amps))
        if self.normalized and abs(self.norm2() - 1.0) > NORM_ATOL:
            raise ValueError("normalized flag set but ||amps||^2 deviates from 1")

    def norm2(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def normalize(self) -> "Ket":
        n = math.sqrt(self.norm2())
        if n < 1e-150:
            raise ZeroNormError("cannot normalize a zero-norm ket")
        return Ket(self.shape, self.amps / n, normalized=True)

    def tensor_view(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per mode (read-only view)."""
        return self.amps.reshape(self.shape.dims)


@dataclass(frozen=True)
class LinOp:
    """Dense operator on a truncated multi-mode Fock space."""

    shape: ModeShape
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        t = self.shape.total
        if m.shape != (t, t):
            raise ValueError(f"matrix shape {m.shape} != ({t}, {t})")
        if not np.all(np.isfinite(m)):
            raise ValueError("non-finite matrix entries")
        object.__setattr__(self, "matrix", _readonly(m))

    def dag(self) -> "LinOp":
        return LinOp(self.shape, self.matrix.conj().T)

    def __matmul__(self, other):
        if isinstance(other, LinOp):
            if other.shape != self.shape:
                raise ValueError("shape mismatch")
            return LinOp(self.shape, self.matrix @ other.matrix)
        if isinstance(other, Ket):
            return apply_op(self, other)
        return NotImplemented


@dataclass(frozen=True)
class DensityOp:
    """Hermitian, unit-trace, PSD operator with mode structure."""

    shape: ModeShape
    matrix: np.ndarray
    validated: bool = field(default=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        t = self.shape.total
        if m.shape != (t, t):
            raise ValueError(f"matrix shape {m.shape} != ({t}, {t})")
        object.__setattr__(self, "matrix", _readonly(m))

    @classmethod
    def from_ket(cls, ket: Ket) -> "DensityOp":
        psi = ket.normalize().amps
        return cls(ket.shape, np.outer(psi, psi.conj()), validated=True)

    @classmethod
    def maximally_mixed(cls, shape: ModeShape) -> "DensityOp":
        t = shape.total
        return cls(shape, np.eye(t, dtype=complex) / t, validated=True)

    def normalize(self) -> "DensityOp":
        tr = np.trace(self.matrix).real
        if tr <= 0:
            raise ZeroNormError("non-positive trace")
        return DensityOp(self.shape, self.matrix / tr)

    def validate(self) -> "DensityOp":
        m = self.matrix
        herm = np.abs(m - m.conj().T).max()
        if herm > HERM_ATOL:
            raise ValueError(f"not Hermitian within tolerance: {herm:.2e}")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace deviates from 1: {tr!r}")
        lam_min = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())
        if lam_min < -PSD_ATOL:
            raise ValueError(f"not PSD within tolerance: min eigenvalue {lam_min:.2e}")
        return DensityOp(self.shape, m, validated=True)

    def tensor_view(self) -> np.ndarray:
        """Matrix reshaped to (dims..., dims...): row axes then column axes."""
        return self.matrix.reshape(self.shape.dims + self.shape.dims)


# ---------------------------------------------------------------------------
# single-mode builders
# ---------------------------------------------------------------------------

def _log_factorials(d: int) -> np.ndarray:
    return np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, d)))))


def coherent_amps(alpha: complex, d: int) -> np.ndarray:
    """Truncated Fock coefficients of |alpha>; not renormalized."""
    n = np.arange(d)
    if alpha == 0:
        amps = np.zeros(d, dtype=complex)
        amps[0] = 1.0
        return amps
    lognorm = -abs(alpha) ** 2 / 2 + n * np.log(abs(complex(alpha))) - 0.5 * _log_factorials(d)
    phase = np.exp(1j * np.angle(complex(alpha)) * n)
    return np.exp(lognorm) * phase


def coherent_truncation_tail(alpha: complex, d: int) -> float:
    """Probability mass of |alpha> beyond Fock level d-1."""
    return max(0.0, 1.0 - float(np.sum(np.abs(coherent_amps(alpha, d)) ** 2)))


def coherent(alpha: complex, d: int) -> Ket:
    """Coherent state |alpha> in a d-level space.

    The amplitudes are the exact (untruncated) coefficients, so the norm falls
    short of 1 by the truncation tail; the ``normalized`` flag is set only
    when that tail is <= 1e-10 (query it with :func:`coherent_truncation_tail`).
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    alpha = complex(alpha)
    if not (np.isfinite(alpha.real) and np.isfinite(alpha.imag)):
        raise ValueError("alpha must be finite")
    amps = coherent_amps(alpha, d)
    tail = coherent_truncation_tail(alpha, d)
    return Ket(ModeShape((d,)), amps, normalized=tail <= NORM_ATOL)


def fock(n: int, d: int) -> Ket:
    """Number state |n> in a d-level space."""
    if not 0 <= n < d:
        raise ValueError(f"n={n} outside [0, {d})")
    amps = np.zeros(d, dtype=complex)
    amps[n] = 1.0
    return Ket(ModeShape((d,)), amps, normalized=True)


def creation_op(d: int) -> LinOp:
    """a_dag with the top level discarded: the |d-1> amplitude maps to nothing."""
    if d < 2:
        raise ValueError("d must be >= 2")
    m = np.zeros((d, d), dtype=complex)
    n = np.arange(d - 1)
    m[n + 1, n] = np.sqrt(n + 1.0)
    return LinOp(ModeShape((d,)), m)


def annihilation_op(d: int) -> LinOp:
    return creation_op(d).dag()


def number_op(d: int) -> LinOp:
    return LinOp(ModeShape((d,)), np.diag(np.arange(d).astype(complex)))


def parity_op(d: int) -> LinOp:
    return LinOp(ModeShape((d,)), np.diag(((-1.0) ** np.arange(d)).astype(complex)))


def phase_op(phi: float, d: int) -> LinOp:
    """exp(i phi n_hat); phi = pi is the photon-number parity."""
    return LinOp(ModeShape((d,)), np.diag(np.exp(1j * phi * np.arange(d))))


def displacement_work_dim(beta: complex, d: int) -> int:
    """Margin rule for the enlarged working dimension of displacement_op."""
    return d + math.ceil(10 * abs(beta)) + 10


def displacement_op(beta: complex, d: int, d_work: int | None = None) -> LinOp:
    """Top-left d x d block of exp(beta a_dag - beta* a) built in d_work levels.

    The block is unitary to truncation accuracy on states supported well below
    d, provided d_work satisfies the margin rule d_work >= d + 10|beta| + 10.
    """
    beta = complex(beta)
    if not (np.isfinite(beta.real) and np.isfinite(beta.imag)):
        raise ValueError("beta must be finite")
    if d_work is None:
        d_work = displacement_work_dim(beta, d)
    if d_work < d:
        raise ValueError(f"d_work={d_work} smaller than d={d}")
    adag = creation_op(d_work).matrix
    gen = beta * adag - np.conj(beta) * adag.conj().T
    big = expm(gen)
    return LinOp(ModeShape((d,)), big[:d, :d])


def beam_splitter_op(theta: float, mode_a: int, mode_b: int, shape: ModeShape) -> LinOp:
    """exp(theta (a_dag b - a b_dag)) on the given shape; theta=pi/4 is 50:50.

    Conserves total photon number in the two modes exactly (block diagonal in
    the sum).  Cost is an expm on the full space: keep the shape to the two
    modes involved and contract with apply_two_mode_op for larger systems.
    """
    mode_a = shape.check_mode(mode_a)
    mode_b = shape.check_mode(mode_b)
    if mode_a == mode_b:
        raise ValueError("mode_a and mode_b must differ")
    adag = _mode_matrix(creation_op(shape.dims[mode_a]).matrix, mode_a, shape)
    bdag = _mode_matrix(creation_op(shape.dims[mode_b]).matrix, mode_b, shape)
    a = adag.conj().T
    b = bdag.conj().T
    gen = theta * (adag @ b - a @ bdag)
    return LinOp(shape, expm(gen))


def _mode_matrix(m: np.ndarray, mode: int, shape: ModeShape) -> np.ndarray:
    """Embed a single-mode matrix into the full space by kron with identities."""
    out = np.eye(1, dtype=complex)
    for k, dk in enumerate(shape.dims):
        out = np.kron(out, m if k == mode else np.eye(dk, dtype=complex))
    return out


def embed_op(op: LinOp, mode: int, shape: ModeShape) -> LinOp:
    """Single-mode LinOp acting on one mode of a larger shape."""
    shape.check_mode(mode)
    if op.shape.dims != (shape.dims[mode],):
        raise ValueError("operator dimension does not match the target mode")
    return LinOp(shape, _mode_matrix(op.matrix, mode, shape))


# ---------------------------------------------------------------------------
# application, composition, reduction
# ---------------------------------------------------------------------------

def apply_op(op: LinOp, ket: Ket) -> Ket:
    if op.shape != ket.shape:
        raise ValueError("shape mismatch between operator and ket")
    return Ket(ket.shape, op.matrix @ ket.amps)


def apply_mode_op(op: LinOp, ket: Ket, mode: int) -> Ket:
    """Apply a single-mode operator to one mode of a multi-mode ket."""
    ket.shape.check_mode(mode)
    d = ket.shape.dims[mode]
    if op.shape.dims != (d,):
        raise ValueError("operator dimension does not match the target mode")
    t = np.moveaxis(ket.tensor_view(), mode, 0)
    out = np.tensordot(op.matrix, t, axes=(1, 0))
    out = np.moveaxis(out, 0, mode)
    return Ket(ket.shape, out.ravel())


def apply_two_mode_op(op: LinOp, ket: Ket, modes: tuple[int, int]) -> Ket:
    """Contract a two-mode operator onto a chosen pair of modes of a ket."""
    ma, mb = (ket.shape.check_mode(m) for m in modes)
    if ma == mb:
        raise ValueError("modes must differ")
    da, db = ket.shape.dims[ma], ket.shape.dims[mb]
    if op.shape.dims != (da, db):
        raise ValueError("operator dims do not match the target modes")
    t = np.moveaxis(ket.tensor_view(), (ma, mb), (0, 1))
    m4 = op.matrix.reshape(da, db, da, db)
    out = np.tensordot(m4, t, axes=([2, 3], [0, 1]))
    out = np.moveaxis(out, (0, 1), (ma, mb))
    return Ket(ket.shape, out.ravel())


def apply_creation_audited(ket: Ket, mode: int, rel_tol: float = NORM_ATOL) -> Ket:
    """Apply a_dag to one mode; fail if the discarded top-level mass matters.

    Discarded mass is d * |amplitude at the top level|^2 relative to the
    result norm (truncation convention: the top level maps to nothing).
    """
    ket.shape.check_mode(mode)
    d = ket.shape.dims[mode]
    top = np.moveaxis(ket.tensor_view(), mode, 0)[d - 1]
    discarded = d * float(np.sum(np.abs(top) ** 2))
    out = apply_mode_op(creation_op(d), ket, mode)
    n2 = out.norm2()
    if n2 <= 0 or discarded > rel_tol * (n2 + discarded):
        raise TruncationError(
            f"creation on mode {mode} discards {discarded:.3e} of squared norm; "
            f"increase the mode dimension (currently {d})"
        )
    return out


def apply_unitary_audited(op: LinOp, ket: Ket, mode: int, rel_tol: float = NORM_ATOL) -> Ket:
    """Apply a cropped unitary (e.g. displacement) to one mode, auditing norm loss."""
    n_in = ket.norm2()
    out = apply_mode_op(op, ket, mode)
    loss = n_in - out.norm2()
    if abs(loss) > rel_tol * n_in:
        raise TruncationError(
            f"cropped unitary on mode {mode} changed squared norm by {loss:.3e}; "
            "over-provision the truncation dimension"
        )
    return out


def crop_mode(ket: Ket, mode: int, new_dim: int, rel_tol: float = NORM_ATOL) -> Ket:
    """Drop Fock levels >= new_dim on one mode, auditing the discarded mass."""
    ket.shape.check_mode(mode)
    d = ket.shape.dims[mode]
    if not 2 <= new_dim <= d:
        raise ValueError(f"new_dim={new_dim} outside [2, {d}]")
    if new_dim == d:
        return ket
    t = np.moveaxis(ket.tensor_view(), mode, 0)
    kept = np.moveaxis(t[:new_dim], 0, mode)
    discarded = ket.norm2() - float(np.sum(np.abs(kept) ** 2))
    if discarded > rel_tol * ket.norm2():
        raise TruncationError(
            f"cropping mode {mode} to {new_dim} levels discards {discarded:.3e} "
            "of squared norm")
    dims = list(ket.shape.dims)
    dims[mode] = new_dim
    return Ket(ModeShape(tuple(dims)), kept.ravel())


def tensor(a, b):
    """Tensor product of two Kets or two DensityOps (mode lists concatenate)."""
    if isinstance(a, Ket) and isinstance(b, Ket):
        shape = ModeShape(a.shape.dims + b.shape.dims)
        return Ket(shape, np.kron(a.amps, b.amps),
                   normalized=a.normalized and b.normalized)
    if isinstance(a, DensityOp) and isinstance(b, DensityOp):
        shape = ModeShape(a.shape.dims + b.shape.dims)
        return DensityOp(shape, np.kron(a.matrix, b.matrix))
    raise TypeError("tensor expects two Kets or two DensityOps")


def partial_trace(rho: DensityOp, keep) -> DensityOp:
    """Trace out all modes not listed in keep (order of kept modes preserved)."""
    keep = sorted({rho.shape.check_mode(int(m)) for m in np.atleast_1d(list(keep))})
    if not keep:
        raise ValueError("must keep at least one mode")
    n = rho.shape.n_modes
    t = rho.tensor_view()
    drop = [m for m in range(n) if m not in keep]
    for m in sorted(drop, reverse=True):
        t = np.trace(t, axis1=m, axis2=m + (t.ndim // 2))
    dims = tuple(rho.shape.dims[m] for m in keep)
    tot = math.prod(dims)
    return DensityOp(ModeShape(dims), t.reshape(tot, tot))


def project_mode(psi: Ket, mode: int, fock_n: int) -> tuple[Ket, float]:
    """Project one mode onto |fock_n>.

    Returns the unnormalized conditional ket on the remaining modes and the
    outcome probability (squared norm of the projection).
    """
    psi.shape.check_mode(mode)
    d = psi.shape.dims[mode]
    if not 0 <= fock_n < d:
        raise ValueError(f"fock_n={fock_n} outside [0, {d})")
    if psi.shape.n_modes < 2:
        raise ValueError("projection would leave no modes")
    t = np.moveaxis(psi.tensor_view(), mode, 0)[fock_n]
    dims = psi.shape.dims[:mode] + psi.shape.dims[mode + 1:]
    cond = Ket(ModeShape(dims), t.ravel())
    return cond, cond.norm2()


def overlap(a: Ket, b: Ket) -> complex:
    if a.shape != b.shape:
        raise ValueError("shape mismatch")
    return complex(np.vdot(a.amps, b.amps))


# ---------------------------------------------------------------------------
# JSON dump format (External Interface): {"dims": [...], "re": [...], "im": [...]}
# ---------------------------------------------------------------------------

def to_json_dict(obj) -> dict:
    """Serialize a Ket (vector) or LinOp/DensityOp (row-major matrix)."""
    if isinstance(obj, Ket):
        flat = obj.amps
    elif isinstance(obj, (LinOp, DensityOp)):
        flat = obj.matrix.reshape(-1)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return {
        "dims": list(obj.shape.dims),
        "re": [float(v) for v in flat.real],
        "im": [float(v) for v in flat.imag],
    }


def from_json_dict(d: dict):
    """Inverse of to_json_dict; vector length selects Ket, squared selects matrix."""
    shape = ModeShape(tuple(int(x) for x in d["dims"]))
    flat = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
    t = shape.total
    if flat.size == t:
        return Ket(shape, flat)
    if flat.size == t * t:
        m = flat.reshape(t, t)
        if np.abs(m - m.conj().T).max() <= HERM_ATOL and abs(np.trace(m).real - 1) <= 1e-6:
            return DensityOp(shape, m)
        return LinOp(shape, m)
    raise ValueError(f"flat length {flat.size} fits neither vector nor matrix for dims {shape.dims}")
