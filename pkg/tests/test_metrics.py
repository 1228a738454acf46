import math

import numpy as np
import pytest

from hybridsim import fock, homodyne, metrics, states
from hybridsim.errors import DegenerateOutcomeError
from hybridsim.fock import DensityOp, Ket, ModeShape


def analytic_hybrid_pre_npt(alpha_i: float) -> float:
    # two-branch pure state with branch overlap c = alpha/sqrt(1+alpha^2):
    # negative partial-transpose eigenvalue sum sqrt(1-c^2)/2
    return 1.0 / (2.0 * math.sqrt(1.0 + alpha_i ** 2))


def bell_in_3x3() -> DensityOp:
    amps = np.zeros((3, 3), dtype=complex)
    amps[0, 0] = amps[1, 1] = 1 / math.sqrt(2)
    return DensityOp.from_ket(Ket(ModeShape((3, 3)), amps.ravel()))


def test_fidelity_pure_state_is_one():
    psi = states.hybrid_pre(1.0, dims=(3, 20))
    assert abs(metrics.fidelity(DensityOp.from_ket(psi), psi) - 1.0) <= 1e-12


def test_fidelity_maximally_mixed():
    shape = ModeShape((4,))
    rho = DensityOp.maximally_mixed(shape)
    assert abs(metrics.fidelity(rho, fock.fock(2, 4)) - 0.25) <= 1e-12


def test_fidelity_matches_symmetric_closed_form():
    ket, _ = states.hybrid_symmetric(1.0, dims=(3, 40))
    ideal = DensityOp.from_ket(states.ideal_hybrid(0.31, dims=(3, 40)))
    assert abs(metrics.fidelity(ideal, ket) - 0.946) <= 2e-3


def test_overlap_symmetry():
    a = states.hybrid_pre(0.8, dims=(3, 20))
    b = states.ideal_hybrid(0.4, dims=(3, 20))
    assert abs(abs(metrics.overlap(a, b)) - abs(metrics.overlap(b, a))) <= 1e-14


def test_npt_product_state_is_zero():
    prod = fock.tensor(DensityOp.from_ket(fock.coherent(1.0, 15)),
                       DensityOp.from_ket(fock.fock(1, 6)))
    assert metrics.npt(prod) <= 1e-10


def test_npt_bell_state():
    assert abs(metrics.npt(bell_in_3x3()) - 0.5) <= 1e-10


def test_npt_hybrid_pre_golden_and_mode_symmetry():
    rho = DensityOp.from_ket(states.hybrid_pre(1.4, dims=(3, 30)))
    v1 = metrics.npt(rho, 1)
    v0 = metrics.npt(rho, 0)
    assert abs(v1 - analytic_hybrid_pre_npt(1.4)) <= 1e-8
    assert abs(v1 - v0) <= 1e-9


def test_npt_invariant_under_local_displacement_and_phase():
    rho = DensityOp.from_ket(states.hybrid_pre(1.0, dims=(3, 40)))
    base = metrics.npt(rho)
    rng = np.random.default_rng(123)
    for _ in range(3):
        beta = complex(*rng.normal(scale=0.25, size=2))
        phi = rng.uniform(0, 2 * math.pi)
        d_op = fock.embed_op(fock.displacement_op(beta, 40), 1, rho.shape)
        p_op = fock.embed_op(fock.phase_op(phi, 3), 0, rho.shape)
        u = d_op.matrix @ p_op.matrix
        moved = DensityOp(rho.shape, u @ rho.matrix @ u.conj().T)
        assert abs(metrics.npt(moved) - base) <= 1e-8


def test_npt_displacement_invariance_pre_vs_symmetric():
    pre = DensityOp.from_ket(states.hybrid_pre(1.4, dims=(3, 30)))
    sym = DensityOp.from_ket(states.hybrid_symmetric(1.4, dims=(3, 30))[0])
    assert abs(metrics.npt(pre) - metrics.npt(sym)) <= 1e-8


def test_npt_curve_contents_and_convergence():
    grid = np.append(np.arange(1.4, 3.25, 0.25), 3.25)
    rows = metrics.npt_curve(grid)
    assert rows[0]["alpha_i"] == pytest.approx(1.4)
    assert rows[-1]["alpha_i"] >= 3.25 - 1e-9
    for r in rows:
        assert r["npt"] > 0
        assert abs(r["npt"] - analytic_hybrid_pre_npt(r["alpha_i"])) <= 1e-7
    small = metrics.npt(DensityOp.from_ket(states.hybrid_pre(2.0, dims=(3, 30))))
    big = metrics.npt(DensityOp.from_ket(states.hybrid_pre(2.0, dims=(3, 60))))
    assert abs(small - big) <= 1e-6


def test_npt_rejects_non_hermitian():
    m = np.zeros((4, 4), dtype=complex)
    m[0, 1] = 1.0
    with pytest.raises(ValueError):
        metrics.npt(DensityOp(ModeShape((2, 2)), m))


def test_wigner_vacuum_and_single_photon_points():
    w0 = metrics.wigner_point(DensityOp.from_ket(fock.fock(0, 12)), 0.0, 0.0)
    w1 = metrics.wigner_point(DensityOp.from_ket(fock.fock(1, 12)), 0.0, 0.0)
    assert abs(w0 - 1 / math.pi) <= 1e-6
    assert abs(w1 + 1 / math.pi) <= 1e-6


def test_wigner_grid_normalization_and_coherent_peak():
    rho = DensityOp.from_ket(fock.coherent(1.2, 25))
    w = metrics.wigner(rho, n_x=101, n_p=101)
    assert abs(w.integral() - 1.0) <= 0.01
    peak = metrics.wigner_point(rho, math.sqrt(2) * 1.2, 0.0)
    assert abs(peak - 1 / math.pi) <= 1e-6


def test_wigner_grid_too_small_raises():
    rho = DensityOp.from_ket(fock.coherent(2.5, 30))
    with pytest.raises(Exception):
        metrics.wigner(rho, -1.5, 1.5, -1.5, 1.5, 41, 41)


def test_conditional_branches_of_hybrid_pre():
    rho = DensityOp.from_ket(states.hybrid_pre(1.4, dims=(3, 25)))
    cond1, p1 = metrics.condition_on_mode1(rho, 1)
    cond0, p0 = metrics.condition_on_mode1(rho, 0)
    assert abs(p0 - 0.5) <= 1e-10 and abs(p1 - 0.5) <= 1e-10
    coh = fock.coherent(1.4, 25)
    pacs = states.photon_added_coherent(1.4, 1, 25)
    assert metrics.fidelity(cond1, coh) >= 1 - 1e-10
    assert metrics.fidelity(cond0, pacs) >= 1 - 1e-10


def test_conditional_zero_probability_branch():
    rho = DensityOp.from_ket(states.hybrid_pre(1.0, dims=(3, 20)))
    with pytest.raises(DegenerateOutcomeError):
        metrics.condition_on_mode1(rho, 2)


def test_conditional_wigner_negativity_pattern():
    # vacuum-heralded branch is photon-added (negative dip); photon-heralded
    # branch is coherent (non-negative everywhere)
    rho = DensityOp.from_ket(states.hybrid_pre(1.4, dims=(3, 25)))
    cond0, _ = metrics.condition_on_mode1(rho, 0)
    cond1, _ = metrics.condition_on_mode1(rho, 1)
    w0 = metrics.wigner(cond0, n_x=81, n_p=81)
    w1 = metrics.wigner(cond1, n_x=81, n_p=81)
    assert w0.values.min() < -0.01
    assert w1.values.min() >= -1e-6


def test_wigner_marginal_matches_quadrature_pdf():
    rho = DensityOp.from_ket(states.photon_added_coherent(1.4, 1, 25))
    w = metrics.wigner(rho, n_x=161, n_p=321)
    marg = w.marginal_x()
    pdf = homodyne.quad_pdf_single(rho, 0.0, homodyne.QuadGrid(6.0, 161))
    l1 = float(np.trapezoid(np.abs(marg - pdf), w.xs))
    assert l1 < 1e-4


def test_uhlmann_fidelity_basic():
    a = DensityOp.from_ket(fock.coherent(0.5, 15))
    b = DensityOp.from_ket(fock.coherent(0.5, 15))
    assert abs(metrics.uhlmann_fidelity(a, b) - 1.0) <= 1e-10
    c = DensityOp.maximally_mixed(ModeShape((15,)))
    f = metrics.uhlmann_fidelity(a, c)
    assert 0 < f < 1
