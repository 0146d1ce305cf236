import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wavelet_qm import (CalibrationError, GridMismatchError, MinimalPacketWavelet,
                        PhysicalParams, PreconditionError, ScalePositionGrid, SpatialGrid,
                        TruncationError, UnderResolutionError, WaveFunction, WaveletField,
                        admissibility_constant, admissibility_group_quadrature, apply_affine,
                        calibrate_frame, evaluate_wavelet, forward_cwt, inverse_cwt, l2_norm)
from wavelet_qm.wavelet import boundary_leakage, effective_band

import oracles

P = PhysicalParams()


def rel_err(a, b):
    return l2_norm(WaveFunction(b.grid, a.values - b.values)) / l2_norm(b)


# ------------------------------------------------------------ evaluation

def test_wavelet_center_value():
    g = SpatialGrid(-10, 10, 201)
    v = evaluate_wavelet(MinimalPacketWavelet(1.0, 0.0, 0.0), P, g)
    assert v.values[100] == pytest.approx((2 * np.pi) ** -0.25, abs=1e-15)
    assert abs(v.values[100]) == pytest.approx(0.63161878, abs=1e-8)


@pytest.mark.parametrize("delta_x,p", [(0.5, 3.0), (2.0, -1.5), (1.7, 0.0)])
def test_wavelet_modulus_at_center(delta_x, p):
    w = MinimalPacketWavelet(delta_x, p, 1.0)
    assert abs(w(1.0, P)) == pytest.approx((2 * np.pi * delta_x**2) ** -0.25, rel=1e-15)


def test_wavelet_value_off_center():
    g = SpatialGrid(-10, 10, 201)
    v = evaluate_wavelet(MinimalPacketWavelet(1.0, 2.0, 0.0), P, g)
    expected = (2 * np.pi) ** -0.25 * np.exp(-0.25) * (np.cos(2) + 1j * np.sin(2))
    high = complex(oracles.packet_mp(1, 1, 2, 0, 1))
    assert abs(expected - high) < 1e-15
    assert abs(v.values[110] - expected) < 1e-15


def test_wavelet_hbar_enters_phase():
    w = MinimalPacketWavelet(1.0, 2.0, 0.0)
    assert w(1.0, PhysicalParams(hbar=2.0)) == pytest.approx(
        (2 * np.pi) ** -0.25 * np.exp(-0.25 + 1j), abs=1e-15)


def test_wavelet_truncation_error():
    with pytest.raises(TruncationError):
        evaluate_wavelet(MinimalPacketWavelet(1.0, 0.0, 0.0), P, SpatialGrid(-5, 5, 100))


def test_affine_identity():
    g = SpatialGrid(-10, 10, 401)
    w = MinimalPacketWavelet(1.2, 1.0, 0.3)
    np.testing.assert_array_equal(apply_affine(w, 1.0, 0.0, P, g).values,
                                  evaluate_wavelet(w, P, g).values)


def test_affine_value():
    g = SpatialGrid(-20, 30, 501)
    atom = apply_affine(MinimalPacketWavelet(1.0, 0.0, 0.0), 2.0, 3.0, P, g)
    assert atom.values[230] == pytest.approx(2**-0.5 * (2 * np.pi) ** -0.25, abs=1e-15)
    assert l2_norm(atom) == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(a=st.floats(0.3, 4.0), b=st.floats(-10.0, 10.0))
def test_affine_unitarity(a, b):
    g = SpatialGrid(-40, 40, 4096)
    atom = apply_affine(MinimalPacketWavelet(1.0, 5.0, 0.0), a, b, P, g)
    assert abs(l2_norm(atom) - 1.0) <= 1e-9


def test_affine_support_violation():
    with pytest.raises(TruncationError):
        apply_affine(MinimalPacketWavelet(1.0), 4.0, 0.0, P, SpatialGrid(-20, 20, 400))
    with pytest.raises(PreconditionError):
        apply_affine(MinimalPacketWavelet(1.0), -1.0, 0.0, P, SpatialGrid(-20, 20, 400))


# ----------------------------------------------------------- forward cwt

def test_forward_of_zero(ab_grid, wavelet):
    psi = WaveFunction(ab_grid.b, np.zeros(ab_grid.b.n_points))
    assert not np.any(forward_cwt(psi, wavelet, ab_grid, P).coefficients)


def test_forward_self_overlap_is_peak(ab_grid, wavelet, x_grid):
    j0, l0 = 13, 1100
    a0, b0 = ab_grid.scales[j0], ab_grid.positions[l0]
    atom = apply_affine(wavelet, a0, b0, P, x_grid)
    c = forward_cwt(atom, wavelet, ab_grid, P).coefficients
    assert abs(c[j0, l0] - 1.0) <= 1e-6
    assert np.unravel_index(np.argmax(np.abs(c)), c.shape) == (j0, l0)


def test_forward_translation_covariance(ab_grid, wavelet, x_grid):
    shift = 37
    delta = shift * x_grid.dx
    base = WaveFunction(x_grid, oracles.packet(x_grid.x, 1.3, 4.0, 0.0))
    moved = WaveFunction(x_grid, oracles.packet(x_grid.x - delta, 1.3, 4.0, 0.0))
    c0 = forward_cwt(base, wavelet, ab_grid, P).coefficients
    c1 = forward_cwt(moved, wavelet, ab_grid, P).coefficients
    assert np.abs(c1[:, shift:] - c0[:, :-shift]).max() <= 1e-10


@pytest.mark.parametrize("x,b_grid,x_bar", [
    (SpatialGrid(-12, 12, 121), SpatialGrid(-6, 6, 61), 0.0),       # positions on samples
    (SpatialGrid(-12, 12, 121), SpatialGrid(-6, 6, 121), 0.0),      # positions twice as dense
    (SpatialGrid(-12, 12, 241), SpatialGrid(-5.6, 6.4, 41), 0.25),  # every third sample, offset
])
def test_forward_matches_brute_force(backend, x, b_grid, x_bar):
    grid = ScalePositionGrid(0.6, 2.5, 5, b_grid)
    w = MinimalPacketWavelet(1.0, 2.0, x_bar)
    psi = WaveFunction(x, oracles.packet(x.x, 0.9, 1.5, 0.4) + 0.2 * oracles.packet(x.x, 1.1, -1, -2))
    got = forward_cwt(psi, w, grid, P).coefficients
    ref = oracles.brute_cwt(psi.values, x.x, x.weights, grid.scales, grid.positions, 1.0, 2.0, x_bar)
    assert np.abs(got - ref).max() <= 1e-13


def test_forward_under_resolution(wavelet):
    x = SpatialGrid(-20, 20, 256)
    grid = ScalePositionGrid(0.05, 2.0, 8, x)
    with pytest.raises(UnderResolutionError):
        forward_cwt(WaveFunction(x, np.zeros(256)), wavelet, grid, P)


def test_forward_rejects_incommensurate_positions(wavelet):
    x = SpatialGrid(-20, 20, 256)
    grid = ScalePositionGrid(1.0, 2.0, 4, SpatialGrid(-20, 20, 314))
    with pytest.raises(GridMismatchError):
        forward_cwt(WaveFunction(x, np.zeros(256)), wavelet, grid, P)


# ----------------------------------------------------------- inverse cwt

def test_inverse_of_zero(ab_grid, wavelet, calibration, x_grid):
    field = WaveletField(ab_grid, np.zeros(ab_grid.shape))
    assert not np.any(inverse_cwt(field, wavelet, calibration, P, x_grid).values)


def test_inverse_linear_in_scalar(ab_grid, wavelet, calibration, probe, x_grid):
    field = forward_cwt(probe, wavelet, ab_grid, P)
    lam = 2.5 - 1.25j
    base = inverse_cwt(field, wavelet, calibration, P, x_grid).values
    scaled = inverse_cwt(WaveletField(ab_grid, lam * field.coefficients), wavelet,
                         calibration, P, x_grid).values
    assert np.abs(scaled - lam * base).max() <= 1e-12


def test_inverse_superposition(wavelet, calibration, ab_grid, x_grid):
    rng = np.random.default_rng(7)
    f1 = rng.normal(size=ab_grid.shape) + 1j * rng.normal(size=ab_grid.shape)
    f2 = rng.normal(size=ab_grid.shape) + 1j * rng.normal(size=ab_grid.shape)
    alpha, beta = 0.3 + 1j, -2.0
    inv = lambda c: inverse_cwt(WaveletField(ab_grid, c), wavelet, calibration, P, x_grid).values
    lhs = inv(alpha * f1 + beta * f2)
    rhs = alpha * inv(f1) + beta * inv(f2)
    assert np.abs(lhs - rhs).max() <= 1e-10 * np.abs(lhs).max()


def test_roundtrip(probe, wavelet, ab_grid, calibration, x_grid):
    field = forward_cwt(probe, wavelet, ab_grid, P)
    back = inverse_cwt(field, wavelet, calibration, P, x_grid)
    assert rel_err(back, probe) <= 1e-2


def test_inverse_rejects_foreign_calibration(probe, wavelet, ab_grid, calibration, x_grid):
    other = ScalePositionGrid(0.25, 8.0, 31, x_grid)
    field = WaveletField(other, np.zeros(other.shape))
    with pytest.raises(GridMismatchError):
        inverse_cwt(field, wavelet, calibration, P, x_grid)
    with pytest.raises(GridMismatchError):
        inverse_cwt(WaveletField(ab_grid, np.zeros(ab_grid.shape)),
                    MinimalPacketWavelet(1.0, 4.0), calibration, P, x_grid)


# ------------------------------------------------------------ admissibility

def test_admissibility_halving_law():
    w = MinimalPacketWavelet(1.0, 2.0, 0.0)
    k = 1e-6
    r1 = admissibility_constant(w, P, k)
    r2 = admissibility_constant(w, P, k / 2)
    predicted = 2 * np.pi * oracles.spectral_density(0.0, 1.0, 2.0) * np.log(2)
    direct = oracles.fourier_cv_mp(mp.mpf(k) / 2, mp.mpf(k), 1.0, 2.0)
    assert r2.c_v_cutoff - r1.c_v_cutoff == pytest.approx(predicted, rel=1e-2)
    assert r2.c_v_cutoff - r1.c_v_cutoff == pytest.approx(direct, rel=1e-6)


def test_admissibility_matches_mp_quadrature():
    w = MinimalPacketWavelet(0.8, 3.0, 0.5)
    r = admissibility_constant(w, P, 0.1, 12.0)
    assert r.c_v_cutoff == pytest.approx(oracles.fourier_cv_mp(0.1, 12.0, 0.8, 3.0), rel=1e-10)


def test_admissibility_cutoff_independent_for_fast_packet():
    w = MinimalPacketWavelet(1.0, 10.0, 0.0)
    r1 = admissibility_constant(w, P, 1e-4)
    r2 = admissibility_constant(w, P, 1e-8)
    bound = 2 * np.pi * oracles.spectral_density(0.0, 1.0, 10.0) * np.log(1e4)
    assert bound < 1e-80
    assert abs(r1.c_v_cutoff - r2.c_v_cutoff) <= 1e-12 * r1.c_v_cutoff


@pytest.mark.parametrize("p", [0.0, 2.0, 10.0, -3.0])
def test_admissibility_always_divergent(p):
    assert admissibility_constant(MinimalPacketWavelet(1.0, p), P).divergent


@pytest.mark.parametrize("k_min,k_max", [(0.0, 10.0), (5.0, 1.0), (1e-3, 4.0)])
def test_admissibility_bad_cutoffs(k_min, k_max):
    with pytest.raises(PreconditionError):
        admissibility_constant(MinimalPacketWavelet(1.0, 2.0), P, k_min, k_max)


def test_admissibility_defaults():
    w = MinimalPacketWavelet(2.0, 3.0)
    r = admissibility_constant(w, P)
    assert r.k_min == pytest.approx(5e-7) and r.k_max == pytest.approx(8.0)


def test_group_quadrature_matches_fourier_form():
    w = MinimalPacketWavelet(1.0, 2.0, 0.0)
    grid = ScalePositionGrid(0.25, 8.0, 64, SpatialGrid(-110, 110, 4401))
    group = admissibility_group_quadrature(w, P, grid, SpatialGrid(-20, 20, 801))
    fourier = admissibility_constant(w, P, *effective_band(w, P, grid)).c_v_cutoff
    assert group == pytest.approx(fourier, rel=2e-2)


# -------------------------------------------------------------- calibration

def test_calibration_single_atom_vs_band(wavelet, ab_grid, x_grid):
    j0, l0 = 16, 1024
    a0 = ab_grid.scales[j0]
    atom = apply_affine(wavelet, a0, ab_grid.positions[l0], P, x_grid)
    cal = calibrate_frame(wavelet, ab_grid, P, atom)
    band = admissibility_constant(wavelet, P, *effective_band(wavelet, P, ab_grid, a0))
    assert cal.c_eff == pytest.approx(band.c_v_cutoff, rel=0.1)


def test_calibration_converges(wavelet):
    x = SpatialGrid(-40, 40, 2048)
    coarse = ScalePositionGrid(0.25, 8.0, 32, x)
    fine = ScalePositionGrid(0.25, 8.0, 64, SpatialGrid(-40, 40, 2 * 2048 - 1))
    probe = evaluate_wavelet(wavelet, P, x)
    c1 = calibrate_frame(wavelet, coarse, P, probe).c_eff
    c2 = calibrate_frame(wavelet, fine, P, probe).c_eff
    assert abs(c2 / c1 - 1) <= 1e-2


def test_calibration_homogeneous(wavelet, ab_grid, probe, calibration):
    scaled = calibrate_frame(wavelet, ab_grid, P, 7 * probe)
    assert scaled.c_eff == pytest.approx(calibration.c_eff, rel=1e-14)


def test_calibration_makes_probe_unbiased(wavelet, ab_grid, probe, calibration, x_grid):
    from wavelet_qm import inner_product
    back = inverse_cwt(forward_cwt(probe, wavelet, ab_grid, P), wavelet, calibration, P, x_grid)
    assert inner_product(back, probe).real == pytest.approx(1.0, rel=1e-12)


def test_calibration_rejects_leaky_probe(wavelet, x_grid):
    grid = ScalePositionGrid(0.25, 8.0, 32, x_grid)
    wide = evaluate_wavelet(MinimalPacketWavelet(1.0, 1.0), P, x_grid)
    with pytest.raises(CalibrationError) as info:
        calibrate_frame(wavelet, grid, P, wide)
    assert info.value.leakage > 1e-6


@pytest.mark.parametrize("p", [3.0, 5.0, 8.0])
def test_parseval(p, wavelet, ab_grid, calibration, x_grid):
    psi = WaveFunction(x_grid, oracles.packet(x_grid.x, 1.0, p))
    energy = forward_cwt(psi, wavelet, ab_grid, P).energy() / calibration.c_eff
    assert energy == pytest.approx(l2_norm(psi) ** 2, rel=2e-2)


def test_boundary_leakage_of_zero_field(ab_grid):
    assert boundary_leakage(WaveletField(ab_grid, np.zeros(ab_grid.shape))) == 0.0


def test_affine_covariance_dilation_and_translation(wavelet):
    # 8 scale cells per octave so a0 = 2 maps scale nodes onto scale nodes
    x = SpatialGrid(-40, 40, 2049)
    grid = ScalePositionGrid(0.25, 8.0, 40, x)
    a0, s = 2.0, 10
    b0 = s * x.dx
    psi = WaveFunction(x, oracles.packet(x.x, 1.0, 5.0))
    moved = WaveFunction(x, oracles.packet((x.x - b0) / a0, 1.0, 5.0) / np.sqrt(a0))
    c = forward_cwt(psi, wavelet, grid, P).coefficients
    cm = forward_cwt(moved, wavelet, grid, P).coefficients
    mid = (x.n_points - 1) // 2
    worst = 0.0
    for l in range(x.n_points):
        # (b - b0)/a0 must land on a node
        rel = l - mid - s
        if rel % 2:
            continue
        l_src = mid + rel // 2
        worst = max(worst, np.abs(cm[8:, l] - c[:-8, l_src]).max())
    assert worst <= 1e-6
