import cmath
import math

import numpy as np
import pytest

from qosc import flows
from qosc._typing import DomainError
from qosc._typing import NegativeH
from qosc._typing import Singularity
from qosc._typing import TruncationWarning
from qosc.flows import AnnulusSpec
from qosc.flows import VortexState


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def annulus():
    # Q = 4, vortex at the geometric-mean radius
    return AnnulusSpec(1.0, 2.0, M=16)


@pytest.fixture
def wide_annulus():
    return AnnulusSpec(1.0, 3.0, M=24)


def _sector_points(rng, count, r_range, angle_range):
    radii = rng.uniform(*r_range, count)
    angles = rng.uniform(*angle_range, count)
    return radii * np.exp(1j * angles)


def _relative_gap(a, b):
    return abs(a - b) / max(1.0, abs(b))


def test_vortex_velocity():
    Gamma = 3.0
    vortex = flows.base_vortex(0.5j, Gamma)
    z = 0.5j + 1
    assert vortex.complex_velocity(z) == pytest.approx(1j * Gamma / (2 * math.pi))
    assert vortex.velocity(z) == pytest.approx(-1j * Gamma / (2 * math.pi))
    with pytest.raises(Singularity):
        vortex(0.5j)


def test_vortex_stream_on_circles():
    vortex = flows.base_vortex(1 - 2j, 1.7)
    samples = flows.circle_samples(0.8, center=1 - 2j)
    assert flows.boundary_residual(vortex, samples) < 1e-14


def test_uniform_stream():
    uniform = flows.base_uniform(2.5)
    assert uniform.stream(3.0 + 0j) == 0
    assert uniform.stream(1.0 + 0.4j) == pytest.approx(1.0)


def test_conjugate_flow(rng):
    z0, Gamma = 0.7 + 1.3j, 2.0
    conj = flows.conjugate_flow(flows.base_vortex(z0, Gamma))
    mirrored = flows.base_vortex(z0.conjugate(), -Gamma)
    twice = flows.conjugate_flow(conj)
    original = flows.base_vortex(z0, Gamma)
    uniform = flows.base_uniform(1.5)
    for z in _sector_points(rng, 64, (0.2, 4.0), (0.0, 2 * math.pi)):
        assert conj.stream(z) == pytest.approx(mirrored.stream(z), abs=1e-12)
        assert conj.complex_velocity(z) == pytest.approx(
            mirrored.complex_velocity(z), abs=1e-12
        )
        assert twice(z) == pytest.approx(original(z), abs=1e-12)
        assert flows.conjugate_flow(uniform)(z) == pytest.approx(uniform(z))
    assert conj.singularities == (z0.conjugate(),)


def test_uniform_past_circle(rng):
    U, r = 1.3, 0.9
    past = flows.one_circle(flows.base_uniform(U), r)
    for z in _sector_points(rng, 32, (1.0, 5.0), (0.0, 2 * math.pi)):
        assert past(z) == pytest.approx(U * (z + r**2 / z), rel=1e-14)
        assert past.complex_velocity(z) == pytest.approx(U * (1 - r**2 / z**2))
    assert flows.boundary_residual(past, flows.circle_samples(r)) < 1e-12


def test_vortex_outside_circle():
    outside = flows.one_circle(flows.base_vortex(2.5 + 0.7j, 1.0), 1.0)
    assert flows.boundary_residual(outside, flows.circle_samples(1.0)) < 1e-12
    with pytest.raises(DomainError):
        flows.one_circle(flows.base_uniform(1.0), 0.0)


def test_half_plane_vortex(rng):
    z0, Gamma = 0.4 + 0.9j, 1.2
    kappa = 1j * Gamma / (2 * math.pi)
    half = flows.wedge(flows.base_vortex(z0, Gamma), 1)
    for z in _sector_points(rng, 32, (0.1, 3.0), (0.05, math.pi - 0.05)):
        expected = kappa * cmath.log((z - z0) / (z - z0.conjugate()))
        assert half.stream(z) == pytest.approx(expected.imag, abs=1e-12)


@pytest.mark.parametrize("n", (1, 2, 3, 5))
def test_wedge_boundary(n):
    z0 = 1.2 * cmath.exp(1j * math.pi / (2 * n))
    vortex_wedge = flows.wedge(flows.base_vortex(z0, 1.0), n)
    for angle in (0.0, math.pi / n):
        samples = flows.ray_samples(angle)
        assert flows.boundary_residual(vortex_wedge, samples) < 1e-10


@pytest.mark.parametrize("n", (2, 3, 4))
def test_wedge_rotation_symmetry(rng, n):
    z0 = 0.9 * cmath.exp(0.3j * math.pi / n)
    vortex_wedge = flows.wedge(flows.base_vortex(z0, 1.0), n)
    q2 = cmath.exp(2j * math.pi / n)
    for z in _sector_points(rng, 64, (0.2, 3.0), (0.0, 2 * math.pi)):
        assert vortex_wedge.stream(q2 * z) == pytest.approx(
            vortex_wedge.stream(z), abs=1e-10
        )
        rotated = vortex_wedge.complex_velocity(q2 * z)
        assert _relative_gap(rotated, vortex_wedge.complex_velocity(z) / q2) < 1e-10


@pytest.mark.parametrize("n", range(1, 9))
def test_rotation_product(rng, n):
    z0 = 0.8 + 0.3j
    for z in _sector_points(rng, 64, (0.1, 2.0), (0.0, 2 * math.pi)):
        expected = z**n - z0**n
        result = flows.rotation_product(z, z0, n)
        assert abs(result - expected) <= 1e-10 * max(abs(expected), abs(z) ** n)


def test_kummer_n2_factored(rng):
    z0, Gamma = 1.0 * cmath.exp(0.4j), 2.0
    kappa = 1j * Gamma / (2 * math.pi)
    kummer = flows.kummer_kaleidoscope(z0, Gamma, 2)
    zb = z0.conjugate()
    for z in _sector_points(rng, 32, (0.2, 3.0), (0.0, 2 * math.pi)):
        factored = kappa * (
            cmath.log(z - z0)
            + cmath.log(z + z0)
            - cmath.log(z - zb)
            - cmath.log(z + zb)
        )
        assert kummer.stream(z) == pytest.approx(factored.imag, abs=1e-10)


@pytest.mark.parametrize("n", (1, 2, 3, 6))
def test_kummer_matches_wedge(rng, n):
    z0 = 1.1 * cmath.exp(0.4j * math.pi / n)
    kummer = flows.kummer_kaleidoscope(z0, 1.5, n)
    images = flows.wedge(flows.base_vortex(z0, 1.5), n)
    assert len(kummer.singularities) == 2 * n
    expected = [z0 * cmath.exp(2j * math.pi * k / n) for k in range(n)]
    np.testing.assert_allclose(kummer.singularities[:n], expected, atol=1e-14)
    np.testing.assert_allclose(
        kummer.singularities[n:], np.conj(expected), atol=1e-14
    )
    points = _sector_points(rng, 64, (0.1, 3.0), (0.02, math.pi / n - 0.02))
    for z in points:
        if np.min(np.abs(z - np.array(kummer.singularities))) < 0.05:
            continue
        assert _relative_gap(
            kummer.complex_velocity(z), images.complex_velocity(z)
        ) < 1e-8


def test_kummer_outside_wedge():
    with pytest.raises(DomainError, match="open wedge"):
        flows.kummer_kaleidoscope(1.0 + 1.0j, 1.0, 4)
    with pytest.raises(DomainError):
        flows.kummer_kaleidoscope(1.0 + 0.0j, 1.0, 2)


@pytest.mark.parametrize("n", (1, 2, 3))
def test_circular_wedge(rng, n):
    r = 1.0
    z0 = 0.6 * cmath.exp(1j * math.pi / (2 * n))
    images = flows.circular_wedge(flows.base_vortex(z0, 1.0), n, r)
    closed = flows.circular_kaleidoscope(z0, 1.0, n, r)
    assert len(closed.singularities) == 4 * n
    for potential in (images, closed):
        assert flows.boundary_residual(potential, flows.circle_samples(r)) < 1e-10
        for angle in (0.0, math.pi / n):
            samples = flows.ray_samples(angle, r_max=0.99)
            assert flows.boundary_residual(potential, samples) < 1e-10
    points = _sector_points(rng, 64, (0.1, 0.95), (0.02, math.pi / n - 0.02))
    for z in points:
        if abs(z - z0) < 0.05:
            continue
        assert _relative_gap(
            closed.complex_velocity(z), images.complex_velocity(z)
        ) < 1e-8


def test_circular_kaleidoscope_on_circle():
    with pytest.raises(DomainError, match="off the circle"):
        flows.circular_kaleidoscope(cmath.exp(0.2j), 1.0, 2, 1.0)


def test_annulus_spec():
    spec = AnnulusSpec(1.0, 3.0)
    assert spec.Q == 9.0
    assert spec.M == flows.DEFAULT_TRUNCATION
    assert spec.margin == pytest.approx(8e-3)
    assert spec.window == pytest.approx((1.008, 8.992))
    assert spec.contains(4.0)
    assert not spec.contains(1.001)
    with pytest.raises(DomainError):
        AnnulusSpec(2.0, 1.0)
    with pytest.raises(DomainError):
        AnnulusSpec(1.0, 2.0, M=0)
    state = VortexState(1.0 + 1.0j, 2 * math.pi)
    assert state.J == pytest.approx(2.0)
    assert state.kappa == pytest.approx(1.0)


def test_two_circle_boundaries(annulus):
    spec = AnnulusSpec(annulus.r1, annulus.r2, M=12)
    potential = flows.two_circle(flows.base_vortex(1 + 1j, 1.0), spec)
    for r in (spec.r1, spec.r2):
        assert flows.boundary_residual(potential, flows.circle_samples(r)) < 1e-6
    assert flows.boundary_residual(potential, flows.circle_samples(spec.r2)) < 1e-12


def test_two_circle_converges_monotonically():
    residuals = []
    for M in (4, 8, 16, 32):
        spec = AnnulusSpec(1.0, 1.2, M=M)
        z0 = math.sqrt(1.2) * cmath.exp(0.3j)
        potential = flows.two_circle(flows.base_vortex(z0, 1.0), spec)
        residuals.append(flows.boundary_residual(potential, flows.circle_samples(1.0)))
    assert all(b < a for a, b in zip(residuals, residuals[1:]))
    assert residuals[-1] < 1e-4


def test_truncation_warning():
    spec = AnnulusSpec(1.0, 1.2, M=1)
    potential = flows.two_circle(flows.base_vortex(1.05 + 0.2j, 1.0), spec)
    with pytest.warns(TruncationWarning, match="exceeds"):
        flows.boundary_residual(potential, flows.circle_samples(1.0), tol=1e-10)


def test_q_periodic_dipole(rng, annulus):
    dipole = flows.base_dipole(0.5 + 0.5j, 1.0)
    Q = annulus.Q
    gaps = []
    for M in (8, 9):
        periodic = flows.q_periodic(dipole, AnnulusSpec(1.0, 2.0, M=M))
        worst = 0.0
        for z in _sector_points(rng, 64, (0.5, 2.0), (math.pi, 2 * math.pi)):
            shifted = Q * periodic.complex_velocity(Q * z)
            worst = max(worst, abs(shifted - periodic.complex_velocity(z)))
        gaps.append(worst)
    assert gaps[1] < gaps[0]
    assert gaps[1] < 1e-4


def test_double_circular_wedge_n1(rng, annulus):
    f = flows.base_vortex(1 + 1j, 1.0)
    double = flows.double_circular_wedge(f, 1, annulus)
    direct = flows.two_circle(flows.wedge(f, 1), annulus)
    for z in _sector_points(rng, 16, (1.05, 1.95), (0.5 * math.pi, 1.5 * math.pi)):
        assert double(z) == pytest.approx(direct(z), abs=1e-12)


def test_double_circular_wedge_periodicity(rng, annulus):
    z0 = math.sqrt(2) * cmath.exp(1j * math.pi / 4)
    double = flows.double_circular_wedge(flows.base_vortex(z0, 1.0), 3, annulus)
    q2 = cmath.exp(2j * math.pi / 3)
    Q = annulus.Q
    for z in _sector_points(rng, 32, (1.05, 1.9), (0.53 * math.pi, 0.83 * math.pi)):
        assert double.stream(q2 * z) == pytest.approx(double.stream(z), abs=1e-10)
        velocity = double.complex_velocity(z)
        assert _relative_gap(Q * double.complex_velocity(Q * z), velocity) < 1e-8
    for r in (annulus.r1, annulus.r2):
        assert flows.boundary_residual(double, flows.circle_samples(r)) < 1e-6


def test_annulus_vortex_potential(rng, annulus):
    z0 = 1 + 1j
    closed = flows.annulus_vortex_potential(z0, 1.0, annulus)
    images = flows.double_circular_wedge(flows.base_vortex(z0, 1.0), 1, annulus)
    for z in _sector_points(rng, 64, (1.05, 1.95), (0.55 * math.pi, 1.45 * math.pi)):
        assert _relative_gap(
            closed.complex_velocity(z), images.complex_velocity(z)
        ) < 1e-8
    for r in (annulus.r1, annulus.r2):
        assert flows.boundary_residual(closed, flows.circle_samples(r)) < 1e-6
    with pytest.raises(DomainError, match="outside the annulus"):
        flows.annulus_vortex_potential(2.5j * cmath.exp(-0.1j), 1.0, annulus)


def test_annulus_vortex_images_on_lattice(annulus):
    z0 = 1.2 * cmath.exp(0.5j)
    closed = flows.annulus_vortex_potential(z0, 1.0, annulus)
    images = np.array(closed.singularities)
    # per generation: z0/Q^m, conj(z0)/Q^m, Q^m r2^2/z0, Q^m r2^2/conj(z0)
    inner = images[0::4]
    outer = images[2::4]
    assert len(images) == 4 * (2 * annulus.M + 1)
    np.testing.assert_allclose(np.angle(inner), 0.5)
    np.testing.assert_allclose(np.angle(outer), -0.5)
    np.testing.assert_allclose(np.abs(inner[:-1]) / np.abs(inner[1:]), annulus.Q)
    np.testing.assert_allclose(np.abs(outer[1:]) / np.abs(outer[:-1]), annulus.Q)


def test_annulus_wedge_vortex(rng, annulus):
    n = 2
    z0 = math.sqrt(2) * cmath.exp(1j * math.pi / 5)
    closed = flows.annulus_vortex_potential(z0, 1.0, annulus, n=n)
    images = flows.double_circular_wedge(flows.base_vortex(z0, 1.0), n, annulus)
    for z in _sector_points(rng, 32, (1.05, 1.95), (0.25 * math.pi, 0.45 * math.pi)):
        assert _relative_gap(
            closed.complex_velocity(z), images.complex_velocity(z)
        ) < 1e-8


def test_omega_matches_image_velocity(wide_annulus):
    Gamma = 1.3
    for k, radius in enumerate(np.linspace(1.15, 2.85, 8)):
        z0 = radius * cmath.exp(0.8j * k)
        J = abs(z0) ** 2
        omega = flows.annulus_omega(J, Gamma, wide_annulus)
        velocity = flows.annulus_self_velocity(z0, -Gamma, wide_annulus)
        assert _relative_gap(velocity, -1j * omega * z0) < 1e-5
        assert abs(velocity) == pytest.approx(
            abs(omega) * abs(z0), rel=1e-5, abs=1e-12
        )


def test_omega_near_walls(wide_annulus):
    inner = [flows.annulus_omega(J, 1.0, wide_annulus) for J in (1.5, 1.2, 1.05)]
    assert inner[0] < inner[1] < inner[2]
    symmetric = flows.annulus_omega(3.0, 1.0, wide_annulus)
    assert math.isfinite(symmetric)
    with pytest.raises(DomainError, match="window"):
        flows.annulus_omega(1.0, 1.0, wide_annulus)
    with pytest.raises(DomainError):
        flows.annulus_omega(9.5, 1.0, wide_annulus)


def test_hamiltonian_derivative_is_frequency(wide_annulus):
    Gamma = 1.0
    low, high = wide_annulus.window
    for J in np.linspace(low + 0.05, high - 0.05, 16):
        h = 1e-6 * J
        slope = (
            flows.annulus_hamiltonian(J + h, Gamma, wide_annulus)
            - flows.annulus_hamiltonian(J - h, Gamma, wide_annulus)
        ) / (2 * h)
        omega = flows.annulus_omega(J, Gamma, wide_annulus)
        assert abs(2 / Gamma * slope - omega) <= 1e-6 * max(abs(omega), 1e-2)


def test_hamiltonian_scales_with_circulation(wide_annulus):
    for J in (1.5, 3.0, 7.0):
        single = flows.annulus_hamiltonian(J, 1.0, wide_annulus)
        assert single < 0
        doubled = flows.annulus_hamiltonian(J, 2.0, wide_annulus)
        assert doubled == pytest.approx(4 * single, rel=1e-14)


@pytest.fixture
def orbit(wide_annulus):
    Gamma = 10.0
    state = VortexState(1.7 + 0j, Gamma)
    omega = flows.annulus_omega(state.J, Gamma, wide_annulus)
    dt = 0.005 / abs(omega)
    steps = int(round(2 * math.pi / abs(omega) / dt))
    return state, omega, dt, steps


def test_vortex_simulate_one_period(wide_annulus, orbit):
    state, omega, dt, steps = orbit
    trajectory = flows.vortex_simulate(state, wide_annulus, dt, steps)
    assert len(trajectory.t) == steps + 1
    assert trajectory.radius_drift < 1e-8
    assert trajectory.period == pytest.approx(2 * math.pi / abs(omega), rel=1e-3)
    assert np.ptp(trajectory.H) < 1e-8
    angular_momentum = state.Gamma * trajectory.J
    assert np.ptp(angular_momentum) < 2e-8 * angular_momentum[0]
    frame = trajectory.to_frame()
    assert list(frame.columns) == ["t", "re_z", "im_z", "J", "H"]


def test_vortex_simulate_orientation(wide_annulus, orbit):
    state, omega, dt, _ = orbit
    forward = flows.vortex_simulate(state, wide_annulus, dt, 50)
    backward = flows.vortex_simulate(
        VortexState(state.z0, -state.Gamma), wide_annulus, dt, 50
    )
    np.testing.assert_allclose(backward.z, np.conj(forward.z), atol=1e-12)
    turn = np.unwrap(np.angle(forward.z))
    assert np.sign(turn[-1] - turn[0]) == -np.sign(omega)


def test_vortex_simulate_guards(wide_annulus, orbit):
    state, omega, _, _ = orbit
    with pytest.raises(DomainError, match="too large"):
        flows.vortex_simulate(state, wide_annulus, 0.2 / abs(omega), 10)
    with pytest.raises(DomainError):
        flows.vortex_simulate(state, wide_annulus, -1.0, 10)
    with pytest.raises(DomainError):
        flows.vortex_simulate(VortexState(3.5 + 0j, 1.0), wide_annulus, 0.1, 10)


def test_annulus_f_transform(wide_annulus):
    z0 = 1.9 * cmath.exp(0.8j)
    with pytest.raises(NegativeH, match="offset"):
        flows.annulus_f_transform(z0, 1.0, wide_annulus)
    h = flows.annulus_hamiltonian(abs(z0) ** 2, 1.0, wide_annulus)
    zf = flows.annulus_f_transform(z0, 1.0, wide_annulus, offset=1.0)
    assert abs(zf) ** 2 == pytest.approx(h + 1.0, rel=1e-13)
    assert cmath.phase(zf) == pytest.approx(cmath.phase(z0))


def test_bohr_sommerfeld(wide_annulus):
    table = flows.annulus_bohr_sommerfeld(8, 1.0, wide_annulus)
    assert table.first == 1
    assert table.model == "annulus_bs"
    assert list(table.indices) == list(range(1, 9))
    for n, energy in table.levels:
        expected = flows.annulus_hamiltonian(n + 0.5, 1.0, wide_annulus)
        assert energy == pytest.approx(expected, rel=1e-14)
    with pytest.raises(DomainError, match="do not fit"):
        flows.annulus_bohr_sommerfeld(9, 1.0, wide_annulus)


def test_f_spectrum_against_bohr_sommerfeld(wide_annulus):
    f_table = flows.annulus_f_spectrum(7, 1.0, wide_annulus)
    bs_table = flows.annulus_bohr_sommerfeld(7, 1.0, wide_annulus)
    assert f_table.first == 2
    assert f_table.model == "annulus_f"
    bs = dict(bs_table.levels)
    for n, energy in f_table.levels:
        h_n = flows.annulus_hamiltonian(n, 1.0, wide_annulus)
        h_next = flows.annulus_hamiltonian(n + 1, 1.0, wide_annulus)
        assert energy == pytest.approx((h_n + h_next) / 2, rel=1e-14)
        J = np.linspace(n, n + 1, 41)
        H = np.array([flows.annulus_hamiltonian(j, 1.0, wide_annulus) for j in J])
        curvature = np.max(np.abs(np.diff(H, 2))) / (J[1] - J[0]) ** 2
        assert abs(energy - bs[n]) <= 1.05 * curvature / 8
    with pytest.raises(DomainError, match="do not fit"):
        flows.annulus_f_spectrum(8, 1.0, wide_annulus)


@pytest.mark.parametrize(
    "build", (flows.annulus_bohr_sommerfeld, flows.annulus_f_spectrum)
)
@pytest.mark.parametrize("scale", (0.0, -1.0, math.nan))
def test_annulus_spectra_reject_action_scale(wide_annulus, build, scale):
    with pytest.raises(DomainError, match="Action scale"):
        build(3, 1.0, wide_annulus, action_scale=scale)


def test_annulus_profile(wide_annulus):
    profile = flows.annulus_profile(1.0, wide_annulus, action_scale=0.5, offset=2.0)
    assert profile(6.0) == pytest.approx(
        flows.annulus_hamiltonian(3.0, 1.0, wide_annulus) + 2.0
    )
    assert profile.domain[1] == pytest.approx(wide_annulus.window[1] / 0.5)
    with pytest.raises(DomainError):
        profile(1.0)
    with pytest.raises(DomainError):
        flows.annulus_profile(1.0, wide_annulus, action_scale=0.0)


def test_sample_field():
    vortex = flows.base_vortex(0j, 1.0)
    points = [0j, 1e-4 + 0j, 1.0 + 0j, 2.0 + 2.0j]
    frame = flows.sample_field(vortex, points, domain=lambda z: abs(z) < 2)
    assert list(frame.columns) == [
        "re_z",
        "im_z",
        "re_F",
        "im_F",
        "re_V",
        "im_V",
        "masked",
    ]
    assert frame["masked"].tolist() == [True, True, False, True]
    assert frame.loc[frame["masked"], "re_F"].isna().all()
    assert frame.loc[2, "re_V"] == pytest.approx(0.0, abs=1e-15)
    assert frame.loc[2, "im_V"] == pytest.approx(-1 / (2 * math.pi))


def test_sampling_helpers():
    grid = flows.grid_points((-1.0, 1.0), (0.0, 2.0), 5, 3)
    assert grid.shape == (15,)
    assert grid[0] == -1.0 + 0j
    assert grid[-1] == 1.0 + 2.0j
    circle = flows.circle_samples(2.0, count=8, center=1j)
    np.testing.assert_allclose(np.abs(circle - 1j), 2.0)
    ray = flows.ray_samples(math.pi / 4, count=5)
    np.testing.assert_allclose(np.angle(ray), math.pi / 4)
