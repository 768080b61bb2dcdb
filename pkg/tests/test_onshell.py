import numpy as np
import pytest
from scipy import integrate

from worldlineqm.errors import ContractViolation
from worldlineqm.onshell import (
    INDUCED_2E,
    SYMMETRIC_SQRT2E,
    MomentumGrid,
    OnShellState,
    concentration,
    dual_pairing_time_state,
    fw_phase_evolve,
    identity_resolution_apply,
    induced_inner_product,
    localized_wavefunction,
    momentum_state_profile,
    onshell_propagator_momentum,
)


def test_onshell_propagator_on_pole():
    e = np.sqrt(1.0 + 0.25)
    eps = 1e-3
    value = onshell_propagator_momentum((e, 0.5), 1.0, +1, eps)
    assert abs(value) == pytest.approx(1.0 / (2 * e * eps), rel=1e-12)


def test_onshell_propagator_asymptotics():
    e = 1.0
    value = onshell_propagator_momentum((e + 50.0, 0.0), 1.0, +1, 1e-6)
    assert abs(value) == pytest.approx(1.0 / (2 * e * 50.0), rel=1e-4)


def test_onshell_propagator_against_damped_quadrature():
    p0, psp, eps = 1.7, 0.6, 5e-2
    e = np.sqrt(psp ** 2 + 1.0)
    t = np.arange(0.0, 25.0 / eps, 5e-4)
    oracle = integrate.simpson(np.exp(1j * (p0 - e) * t - eps * t), x=t) / (2 * e)
    value = onshell_propagator_momentum((p0, psp), 1.0, +1, eps)
    assert abs(value - oracle) < 1e-8


def profile_grid(e, eps, halfrange=50.0):
    step = eps / 5
    return np.arange(-halfrange, halfrange + step, step) + 0.0


def test_profile_peaks_on_shell():
    eps = 1e-2
    e = np.sqrt(1.0 + 0.09)
    for sign in (+1, -1):
        grid = sign * e + np.linspace(-1, 1, 2001)
        prof = momentum_state_profile((0.3,), 1.0, sign, 0.0, eps, grid)
        peak = prof.p0[np.argmax(np.abs(prof.amplitude))]
        assert peak == pytest.approx(sign * e, abs=2e-3)
        assert prof.center == pytest.approx(sign * e)


def test_profile_halfwidth():
    eps = 1e-2
    e = 1.0
    grid = e + np.linspace(-0.2, 0.2, 40001)
    prof = momentum_state_profile((0.0,), 1.0, +1, 0.0, eps, grid)
    w = np.abs(prof.amplitude) ** 2
    half = w.max() / 2
    above = prof.p0[w >= half]
    hwhm = (above.max() - above.min()) / 2
    assert hwhm == pytest.approx(eps, rel=5e-2)


def lorentzian_concentration_oracle(window, eps):
    # Int_{-w}^{w} dx/(x^2+e^2) over Int_{-inf}^{inf} = (2/pi) arctan(w/e)
    return (2 / np.pi) * np.arctan(window / eps)


def test_concentration_matches_lorentzian_oracle():
    window = 1.0
    for eps in (1e-1, 1e-2, 1e-3):
        step = eps / 4
        grid = 1.0 + np.arange(-400.0, 400.0 + step, step)
        prof = momentum_state_profile((0.0,), 1.0, +1, 0.0, eps, grid)
        measured = concentration(prof, window)
        oracle = lorentzian_concentration_oracle(window, eps)
        assert abs(measured - oracle) / oracle < 1e-2


def test_concentration_equal_window():
    eps = 1e-2
    grid = 1.0 + np.arange(-100.0, 100.0, eps / 6)
    prof = momentum_state_profile((0.0,), 1.0, +1, 0.0, eps, grid)
    assert concentration(prof, eps) == pytest.approx(0.5, abs=2e-2)


def test_concentration_monotone_in_epsilon():
    window = 0.5
    values = []
    for eps in (1e-3, 1e-2, 1e-1, 1.0, 10.0):
        grid = 1.0 + np.arange(-3000.0, 3000.0, min(eps / 4, 0.5))
        prof = momentum_state_profile((0.0,), 1.0, +1, 0.0, eps, grid)
        values.append(concentration(prof, window))
    assert all(a > b for a, b in zip(values, values[1:]))
    assert values[-1] < 0.05


def test_induced_inner_product_point_mass():
    grid = MomentumGrid(1, 33, 0.25)
    psi = np.zeros(grid.shape)
    psi[16] = 1.0  # unit amplitude at p = 0
    value = induced_inner_product(psi, psi, grid, mass=1.0)
    assert value == pytest.approx(grid.cell_volume / 2.0, rel=1e-13)


def test_biorthonormality_of_basis_pairing():
    grid = MomentumGrid(1, 17, 0.5)
    p = grid.axis()
    k = 11
    basis = np.zeros(grid.shape)
    basis[k] = 1.0 / grid.cell_volume  # Kronecker / dp
    e = np.sqrt(p[k] ** 2 + 1.0)
    value = induced_inner_product(basis, basis, grid, mass=1.0)
    assert value == pytest.approx(1.0 / (2 * e) / grid.cell_volume, rel=1e-12)


def test_induced_product_large_mass_limit():
    grid = MomentumGrid(1, 33, 0.25)
    rng = np.random.default_rng(8)
    psi1 = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    psi2 = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    m = 1e4
    value = induced_inner_product(psi1, psi2, grid, mass=m)
    flat = np.sum(np.conj(psi1) * psi2) * grid.cell_volume
    assert value == pytest.approx(flat / (2 * m), rel=1e-6)


def test_identity_resolution_round_trip():
    grid = MomentumGrid(1, 17, 0.3)
    rng = np.random.default_rng(10)
    psi = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    back = identity_resolution_apply(psi, grid, mass=1.0)
    assert np.max(np.abs(back - psi)) < 1e-12
    basis = np.zeros(grid.shape, dtype=complex)
    basis[4] = 1.0 / grid.cell_volume
    assert np.max(np.abs(identity_resolution_apply(basis, grid, 1.0) - basis)) < 1e-12
    two = np.zeros(grid.shape, dtype=complex)
    two[3], two[12] = 0.6, -0.8j
    back2 = identity_resolution_apply(two, grid, 1.0)
    assert back2[3] == pytest.approx(0.6, abs=1e-14)
    assert back2[12] == pytest.approx(-0.8j, abs=1e-14)


def test_dual_pairing_time_independence():
    grid = MomentumGrid(1, 17, 0.5)
    state = OnShellState(+1, (1.5,), 1.0)
    values = [dual_pairing_time_state(state, state, t0, grid)
              for t0 in (-7.3, -0.2, 0.0, 1.9, 42.0)]
    for v in values[1:]:
        assert abs(v - values[0]) < 1e-12
    assert values[0] == pytest.approx(1.0 / (2 * state.energy) / grid.cell_volume)
    anti = OnShellState(-1, (1.5,), 1.0)
    assert dual_pairing_time_state(state, anti, 0.0, grid) == 0j


def test_localized_wavefunction_conventions():
    p = (0.7,)
    e = np.sqrt(0.49 + 1.0)
    a = localized_wavefunction((0.3,), 1.2, p, 1.0, +1, INDUCED_2E)
    b = localized_wavefunction((0.3,), 1.2, p, 1.0, +1, SYMMETRIC_SQRT2E)
    assert a / b == pytest.approx(np.sqrt(2 * e), rel=1e-13)
    # plane-wave magnitude independent of momentum in the induced convention
    mags = {abs(localized_wavefunction((0.1,), 0.5, (pp,), 1.0, +1, INDUCED_2E))
            for pp in (0.0, 0.3, 2.0)}
    assert max(mags) - min(mags) < 1e-14
    # conventional localized profile at t = 0
    nw = localized_wavefunction((0.4,), 0.0, p, 1.0, +1, SYMMETRIC_SQRT2E)
    expected = (2 * np.pi) ** (-0.5) * (2 * e) ** (-0.5) * np.exp(-1j * 0.7 * 0.4)
    assert nw == pytest.approx(expected, rel=1e-13)


def test_profile_argmax_invariant_under_convention():
    # the convention factor depends on the spatial momentum only, so the
    # frequency-profile peak cannot move
    eps = 1e-2
    for psp in (0.0, 0.4, 1.1):
        e = np.sqrt(psp ** 2 + 1.0)
        grid = e + np.linspace(-0.5, 0.5, 4001)
        prof = momentum_state_profile((psp,), 1.0, +1, 0.0, eps, grid)
        scaled = prof.amplitude / np.sqrt(2 * e)
        assert np.argmax(np.abs(prof.amplitude)) == np.argmax(np.abs(scaled))


def test_fw_phase_zero_momentum():
    grid = MomentumGrid(1, 5, 0.5)
    psi = np.ones(grid.shape, dtype=complex)
    out = fw_phase_evolve(psi, grid, mass=1.0, sign=+1, dt=0.9)
    k0 = 2  # p = 0 entry
    assert out[k0] == pytest.approx(np.exp(1j * 0.9), rel=1e-13)
    assert np.abs(out).max() == pytest.approx(1.0, rel=1e-13)


def test_fw_phase_rate_gap_against_taylor():
    m, pm = 1.0, 0.1
    e = np.sqrt(pm ** 2 + m ** 2)
    gap = abs(e - (m + pm ** 2 / (2 * m)))
    taylor = pm ** 4 / (8 * m ** 3)
    assert gap == pytest.approx(1.24e-5, rel=1e-2)
    assert abs(gap - taylor) / taylor < 1e-2


def test_nonrelativistic_phase_bound():
    # packets supported on |p| <= 0.1 m: L2 gap against the quadratic phase
    m, dt = 1.0, 3.0
    grid = MomentumGrid(1, 41, 0.005)  # support |p| <= 0.1
    rng = np.random.default_rng(4)
    psi = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * grid.cell_volume)
    full = fw_phase_evolve(psi, grid, m, +1, dt)
    p = grid.axis()
    quadratic = psi * np.exp(1j * (m + p * p / (2 * m)) * dt)
    dist = np.sqrt(np.sum(np.abs(full - quadratic) ** 2) * grid.cell_volume)
    assert dist <= 2 * 1.3e-5 * m * dt


def test_guards():
    grid = MomentumGrid(1, 5, 0.5)
    with pytest.raises(ContractViolation):
        OnShellState(2, (0.0,), 1.0)
    with pytest.raises(ContractViolation):
        induced_inner_product(np.ones(3), np.ones(5), grid, 1.0)
    with pytest.raises(ContractViolation):
        localized_wavefunction((0.1,), 0.0, (0.1,), 1.0, +1, "bogus")
