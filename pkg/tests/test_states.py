import math

import numpy as np
import pytest

from hybridsim import fock, states
from hybridsim.errors import ZeroNormError
from hybridsim.fock import DensityOp


def test_gain_point_values():
    assert abs(states.gain(1, 2.0) * 2.0 - 2.414214) <= 1e-6
    assert abs(states.gain(1, 1.0) - 1.618034) <= 1e-6
    assert abs(states.gain(1, 4.0) * 4.0 - 4.236068) <= 1e-6


def test_gain_limit_and_domain():
    assert states.gain(1, 1e6) - 1.0 <= 1e-9
    with pytest.raises(ValueError):
        states.gain(1, 0.0)
    with pytest.raises(ValueError):
        states.gain(0, 1.0)


def test_hybrid_params_balanced():
    p = states.HybridParams.balanced(1.0).validate()
    assert abs(p.t - 1 / math.sqrt(3.0)) <= 1e-12
    assert abs(p.r ** 2 + p.t ** 2 - 1.0) <= 1e-12
    assert abs(p.alpha_f - 0.309017) <= 1e-6


def test_pacs_at_zero_alpha_is_single_photon():
    k = states.photon_added_coherent(0.0, 1, 10)
    np.testing.assert_allclose(k.amps, fock.fock(1, 10).amps, atol=1e-14)


@pytest.mark.parametrize("alpha", [0.3, 1.0, 1.4, 2.0, 3.0])
def test_pacs_has_no_vacuum_component(alpha):
    k = states.photon_added_coherent(alpha, 1, 50)
    assert abs(k.amps[0]) == 0.0


def test_pacs_unnormalized_norm_against_laguerre():
    # || a_dag |alpha> ||^2 = 1 + alpha^2 = 1! L_1(-alpha^2)
    raw = fock.apply_creation_audited(fock.coherent(2.0, 40), 0)
    assert abs(raw.norm2() - 5.0) <= 1e-10
    assert abs(states.pacs_norm2(2.0, 1) - 5.0) <= 1e-12


def test_fidelity_pacs_point_values():
    assert abs(states.fidelity_pacs_coherent(2.0) - 0.98) <= 5e-3
    assert abs(states.fidelity_pacs_coherent(4.0) - 0.998) <= 1e-3


def test_fidelity_pacs_closed_form_vs_numeric():
    alpha, d = 1.4, 40
    g = states.gain(1, alpha)
    pacs = states.photon_added_coherent(alpha, 1, d)
    num = abs(fock.overlap(fock.coherent(g * alpha, d), pacs)) ** 2
    assert abs(states.fidelity_pacs_coherent(alpha) - num) <= 1e-8


@pytest.mark.parametrize("alpha", np.arange(0.5, 4.01, 0.25))
def test_fidelity_pacs_grid_against_oracle(alpha):
    d = 90
    g = states.gain(1, float(alpha))
    pacs = states.photon_added_coherent(float(alpha), 1, d)
    num = abs(fock.overlap(fock.coherent(g * alpha, d), pacs)) ** 2
    assert abs(states.fidelity_pacs_coherent(float(alpha)) - num) <= 1e-6


@pytest.mark.parametrize("alpha_i", [0.5, 1.0, 1.4, 2.0, 3.25])
def test_superposed_route_equals_direct_construction(alpha_i):
    p = states.HybridParams.balanced(alpha_i)
    d2 = states.default_mode2_dim(alpha_i)
    base = fock.tensor(fock.fock(0, 3), fock.coherent(alpha_i, d2))
    route, _ = states.apply_superposed_addition(p.r, p.t, base)
    direct = states.hybrid_pre(alpha_i, dims=(3, d2))
    assert abs(fock.overlap(route, direct)) ** 2 >= 1 - 1e-10


def test_superposed_single_branch():
    base = fock.tensor(fock.fock(0, 3), fock.coherent(1.0, 25))
    out, n2 = states.apply_superposed_addition(1.0, 0.0, base)
    target = fock.tensor(fock.fock(1, 3), fock.coherent(1.0, 25)).normalize()
    assert abs(fock.overlap(out, target)) ** 2 >= 1 - 1e-12
    assert abs(n2 - 1.0) <= 1e-10  # a_dag_1 on |0>_1 keeps unit norm


def test_superposed_balance_equalizes_event_norms():
    alpha = 1.3
    t = 1 / math.sqrt(alpha ** 2 + 2)
    r = math.sqrt(1 - t ** 2)
    base = fock.tensor(fock.fock(0, 3), fock.coherent(alpha, 30))
    n_r = r ** 2 * fock.apply_creation_audited(base, 0).norm2()
    n_t = t ** 2 * fock.apply_creation_audited(base, 1).norm2()
    assert abs(n_r - n_t) <= 1e-10


def test_superposed_rejects_bad_weights():
    base = fock.tensor(fock.fock(0, 2), fock.fock(0, 4))
    with pytest.raises(ValueError):
        states.apply_superposed_addition(0.9, 0.9, base)


def test_hybrid_pre_vacuum_limit_is_single_photon_ebit():
    k = states.hybrid_pre(0.0, dims=(3, 4))
    expect = np.zeros((3, 4), dtype=complex)
    expect[1, 0] = expect[0, 1] = 1 / math.sqrt(2)
    np.testing.assert_allclose(k.tensor_view(), expect, atol=1e-12)


def test_hybrid_pre_is_entangled():
    rho = DensityOp.from_ket(states.hybrid_pre(1.4, dims=(3, 30)))
    red = fock.partial_trace(rho, keep=[0])
    purity = float(np.trace(red.matrix @ red.matrix).real)
    assert purity < 1 - 1e-3


def test_hybrid_pre_mode1_statistics():
    k = states.hybrid_pre(1.7, dims=(3, 35))
    probs = np.sum(np.abs(k.tensor_view()) ** 2, axis=1)
    assert abs(probs[0] - 0.5) <= 1e-12
    assert abs(probs[1] - 0.5) <= 1e-12
    assert probs[2] <= 1e-20


def test_hybrid_pre_phase_knob():
    plus = states.hybrid_pre(1.0, phi=0.0, dims=(3, 25))
    minus = states.hybrid_pre(1.0, phi=math.pi, dims=(3, 25))
    # orthogonal branch signs: overlap = (1 + e^{i pi} )/2 ... = 0 on the PACS part
    ov = fock.overlap(plus, minus)
    assert abs(ov - 0.5 * (1 + np.exp(1j * math.pi))) <= 1e-10


@pytest.mark.parametrize("alpha_i,expect_af", [(2.0, 0.207107), (1.0, 0.309017)])
def test_hybrid_symmetric_alpha_f(alpha_i, expect_af):
    _, p = states.hybrid_symmetric(alpha_i)
    assert abs(p.alpha_f - expect_af) <= 1e-6


def test_fidelity_symmetric_point_values():
    f2, af2 = states.fidelity_symmetric(2.0)
    f1, af1 = states.fidelity_symmetric(1.0)
    assert abs(f2 - 0.991) <= 2e-3 and abs(af2 - 0.21) <= 5e-3
    assert abs(f1 - 0.946) <= 2e-3 and abs(af1 - 0.31) <= 5e-3


@pytest.mark.parametrize("alpha_i", [0.7, 1.0, 1.5, 2.0])
def test_fidelity_symmetric_against_numeric_oracle(alpha_i):
    f, af = states.fidelity_symmetric(alpha_i)
    ket, _ = states.hybrid_symmetric(alpha_i, dims=(3, 40))
    ideal = states.ideal_hybrid(af, dims=(3, 40))
    num = abs(fock.overlap(ideal, ket)) ** 2
    assert abs(f - num) <= 1e-6


def test_ideal_hybrid_vacuum_point_is_product():
    from hybridsim import metrics

    rho = DensityOp.from_ket(states.ideal_hybrid(0.0, (3, 6)))
    assert metrics.npt(rho) <= 1e-10


def test_ecs_normalization_against_closed_form():
    k = states.ecs(0.31, 1.58, dims=(20, 30))
    assert abs(k.norm2() - 1.0) <= 1e-10
    # numeric norm of the unnormalized combination against 1/N'^2
    plus = fock.tensor(fock.coherent(0.31, 20), fock.coherent(1.58, 30)).amps
    minus = fock.tensor(fock.coherent(-0.31, 20), fock.coherent(-1.58, 30)).amps
    raw = plus - minus
    n2 = float(np.vdot(raw, raw).real)
    assert abs(n2 - 1.0 / states.ecs_norm_const(0.31, 1.58) ** 2) <= 1e-10


def test_ecs_requires_ordered_amplitudes():
    with pytest.raises(ValueError):
        states.ecs(1.0, 0.5)
    with pytest.raises((ValueError, ZeroNormError)):
        states.ecs(0.0, 0.0)


def test_alpha_i_for_target_inverts_the_map():
    for af in (0.1, 0.21, 0.309, 0.45):
        ai = states.alpha_i_for_target(af)
        g = states.gain(1, ai)
        assert abs((g - 1) * ai / 2 - af) <= 1e-12


def test_sweep_fidelity_small_parametric_consistency():
    rows = states.sweep_fidelity_small(np.arange(0.05, 0.46, 0.05))
    assert all(abs(r["diff"]) <= 1e-4 for r in rows)
    # fidelity falls as the target amplitude grows
    fs = [r["F_mapped"] for r in rows]
    assert all(a > b for a, b in zip(fs, fs[1:]))


def test_sweep_fidelity_small_free_search_reports_only():
    rows = states.sweep_fidelity_small([0.2, 0.3], search="free")
    for r in rows:
        assert r["F_search"] >= r["F_mapped"] - 1e-9  # a free knob can't do worse
