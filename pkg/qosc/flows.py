"""Complex potentials of planar ideal flows in bounded domains.

A flow is a :class:`ComplexPotential` F(z) whose imaginary part is the
stream function.  Image theorems build new potentials from old ones:

* ``one_circle``: f(z) + fbar(r^2/z), impermeable circle |z| = r
* ``wedge``: sum_k f(q^2k z) + fbar(q^2k z), q = exp(i pi/n)
* ``two_circle``: symmetric image sum over Q^m, Q = r2^2/r1^2 (annulus)

A single vortex in the annulus rotates rigidly with a frequency given by
q-logarithms of base Q; its Hamiltonian is the logarithm of a product of
q-exponentials.
"""
import cmath
import logging
import math
import warnings
from dataclasses import dataclass
from dataclasses import field
from typing import Callable
from typing import Iterable
from typing import Optional
from typing import Sequence

import numpy as np
import pandas as pd

from . import qcore
from ._typing import DomainError
from ._typing import NegativeH
from ._typing import SeriesControl
from ._typing import Singularity
from ._typing import SingularH
from ._typing import SpectrumTable
from ._typing import TruncationWarning
from .oscillators import HamiltonianProfile
from .oscillators import f_spectrum

logger = logging.getLogger(__name__)

SINGULAR_TOL = 1e-12
DEFAULT_TRUNCATION = 16

Evaluator = Callable[[complex], complex]


def _richardson(f: Evaluator, z: complex) -> complex:
    # central difference with one Richardson extrapolation
    h = 1e-6 * max(1.0, abs(z))

    def central(step: float) -> complex:
        return (f(z + step) - f(z - step)) / (2 * step)

    return (4 * central(h / 2) - central(h)) / 3


@dataclass(frozen=True)
class ComplexPotential:
    """F(z) with its derivative and the points where it is singular.

    ``log_coeff`` is the coefficient l of ln z in F as z -> infinity; the
    annulus image sums use it to cancel the vortex each inversion leaves at
    the origin.
    """

    evaluator: Evaluator
    derivative: Optional[Evaluator] = None
    singularities: tuple[complex, ...] = ()
    log_coeff: complex = 0j
    name: str = ""
    _points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        points = np.array(self.singularities, dtype=complex)
        object.__setattr__(self, "_points", points[np.isfinite(points)])

    def _guard(self, z: complex) -> complex:
        z = complex(z)
        if self._points.size:
            near = np.abs(z - self._points) <= SINGULAR_TOL * np.maximum(
                1.0, np.abs(self._points)
            )
            if near.any():
                raise Singularity(f"{self.name or 'potential'} is singular at z={z}")
        return z

    def __call__(self, z: complex) -> complex:
        return self.evaluator(self._guard(z))

    def complex_velocity(self, z: complex) -> complex:
        """dF/dz = u - iv"""
        z = self._guard(z)
        if self.derivative is not None:
            return self.derivative(z)
        return _richardson(self.evaluator, z)

    def velocity(self, z: complex) -> complex:
        """u + iv"""
        return self.complex_velocity(z).conjugate()

    def stream(self, z: complex) -> float:
        return self(z).imag

    def __add__(self, other: "ComplexPotential") -> "ComplexPotential":
        derivative = None
        if self.derivative is not None and other.derivative is not None:
            a, b = self.derivative, other.derivative

            def derivative(z):
                return a(z) + b(z)

        return ComplexPotential(
            lambda z: self.evaluator(z) + other.evaluator(z),
            derivative,
            self.singularities + other.singularities,
            self.log_coeff + other.log_coeff,
            f"{self.name} + {other.name}",
        )


def base_vortex(z0: complex, Gamma: float) -> ComplexPotential:
    """Point vortex (i Gamma/2 pi) ln(z - z0)"""
    kappa = 1j * Gamma / (2 * math.pi)
    return ComplexPotential(
        lambda z: kappa * cmath.log(z - z0),
        lambda z: kappa / (z - z0),
        (complex(z0),),
        kappa,
        f"vortex({z0}, {Gamma})",
    )


def base_uniform(U: float) -> ComplexPotential:
    """Uniform stream U z"""
    return ComplexPotential(lambda z: U * z, lambda z: U + 0j, (), 0j, f"uniform({U})")


def base_dipole(z0: complex, mu: complex) -> ComplexPotential:
    """Doublet mu / (2 pi (z - z0))"""
    strength = mu / (2 * math.pi)
    return ComplexPotential(
        lambda z: strength / (z - z0),
        lambda z: -strength / (z - z0) ** 2,
        (complex(z0),),
        0j,
        f"dipole({z0}, {mu})",
    )


def conjugate_flow(f: ComplexPotential) -> ComplexPotential:
    """fbar(w) = conj(f(conj(w)))"""
    derivative = None
    if f.derivative is not None:
        fd = f.derivative

        def derivative(w):
            return fd(w.conjugate()).conjugate()

    return ComplexPotential(
        lambda w: f.evaluator(w.conjugate()).conjugate(),
        derivative,
        tuple(complex(s).conjugate() for s in f.singularities),
        complex(f.log_coeff).conjugate(),
        f"conj({f.name})",
    )


def _scaled(f: ComplexPotential, scale: complex) -> tuple[Evaluator, Evaluator]:
    # z -> f(scale z) and its derivative
    fd = f.derivative

    def value(z: complex) -> complex:
        return f.evaluator(scale * z)

    def slope(z: complex) -> complex:
        if fd is None:
            return _richardson(value, z)
        return scale * fd(scale * z)

    return value, slope


def _inverted(f: ComplexPotential, c: complex) -> tuple[Evaluator, Evaluator]:
    # z -> f(c / z) and its derivative
    fd = f.derivative

    def value(z: complex) -> complex:
        return f.evaluator(c / z)

    def slope(z: complex) -> complex:
        if fd is None:
            return _richardson(value, z)
        return -c / z**2 * fd(c / z)

    return value, slope


def _image_points(f: ComplexPotential, maps: Iterable[Callable[[complex], complex]]):
    points = []
    for s in f.singularities:
        for m in maps:
            try:
                points.append(m(complex(s)))
            except ZeroDivisionError:
                continue
    return points


def _combine(
    pieces: Sequence[tuple[Evaluator, Evaluator]],
    singularities: Iterable[complex],
    log_coeff: complex,
    name: str,
    extra_log: complex = 0j,
) -> ComplexPotential:
    # sum of pieces plus extra_log * ln z
    def value(z: complex) -> complex:
        total = sum(piece(z) for piece, _ in pieces)
        if extra_log:
            total += extra_log * cmath.log(z)
        return total

    def slope(z: complex) -> complex:
        total = sum(d(z) for _, d in pieces)
        if extra_log:
            total += extra_log / z
        return total

    return ComplexPotential(value, slope, tuple(singularities), log_coeff, name)


def one_circle(f: ComplexPotential, r: float) -> ComplexPotential:
    """Milne-Thomson circle theorem F = f(z) + fbar(r^2/z)"""
    if not r > 0:
        raise DomainError(f"Circle radius must be positive, got {r}")
    fbar = conjugate_flow(f)
    pieces = [_scaled(f, 1), _inverted(fbar, r**2)]
    images = _image_points(f, [lambda s: s, lambda s: r**2 / s.conjugate()])
    return _combine(pieces, images + [0j], f.log_coeff, f"circle({f.name}, r={r})")


def _rotations(n: int) -> list[complex]:
    return [cmath.exp(2j * math.pi * k / n) for k in range(n)]


def wedge(f: ComplexPotential, n: int) -> ComplexPotential:
    """Wedge of opening pi/n: sum over the n rotations q^2k of f + fbar"""
    if n < 1:
        raise DomainError(f"Wedge order must be a positive integer, got {n}")
    fbar = conjugate_flow(f)
    pieces = []
    maps = []
    for rot in _rotations(n):
        pieces += [_scaled(f, rot), _scaled(fbar, rot)]
        maps += [
            lambda s, rot=rot: s / rot,
            lambda s, rot=rot: s.conjugate() / rot,
        ]
    log_coeff = n * (f.log_coeff + complex(f.log_coeff).conjugate())
    return _combine(pieces, _image_points(f, maps), log_coeff, f"wedge({f.name}, {n})")


def rotation_product(z: complex, z0: complex, n: int) -> complex:
    """prod_k (z - z0 q^2k) over the n-th roots of unity q^2k"""
    return complex(np.prod([z - z0 * rot for rot in _rotations(n)]))


def _check_in_wedge(z0: complex, n: int) -> None:
    if n < 1:
        raise DomainError(f"Wedge order must be a positive integer, got {n}")
    angle = cmath.phase(z0)
    if not 0 < angle < math.pi / n:
        raise DomainError(f"z0={z0} is not inside the open wedge 0 < arg z < pi/{n}")


def kummer_kaleidoscope(z0: complex, Gamma: float, n: int) -> ComplexPotential:
    """Vortex in the wedge of opening pi/n in closed form,
    (i Gamma/2 pi) ln((z^n - z0^n)/(z^n - conj(z0)^n))
    """
    _check_in_wedge(z0, n)
    kappa = 1j * Gamma / (2 * math.pi)
    a = complex(z0) ** n
    b = complex(z0).conjugate() ** n

    def value(z: complex) -> complex:
        zn = z**n
        return kappa * (cmath.log(zn - a) - cmath.log(zn - b))

    def slope(z: complex) -> complex:
        zn = z**n
        return kappa * n * z ** (n - 1) * (1 / (zn - a) - 1 / (zn - b))

    images = [z0 * rot for rot in _rotations(n)] + [
        complex(z0).conjugate() * rot for rot in _rotations(n)
    ]
    return ComplexPotential(
        value, slope, tuple(images), 0j, f"kummer({z0}, {Gamma}, {n})"
    )


def circular_wedge(f: ComplexPotential, n: int, r: float) -> ComplexPotential:
    """Wedge of opening pi/n cut by the circle |z| = r"""
    return one_circle(wedge(f, n), r)


def circular_kaleidoscope(
    z0: complex, Gamma: float, n: int, r: float
) -> ComplexPotential:
    """Closed form of the vortex in the circular wedge; the images of the
    Kummer kaleidoscope are doubled by inversion in |z| = r
    """
    _check_in_wedge(z0, n)
    if not r > 0 or math.isclose(abs(z0), r):
        raise DomainError(f"z0={z0} must lie off the circle of radius {r}")
    kappa = 1j * Gamma / (2 * math.pi)
    z0 = complex(z0)
    centres = [z0, z0.conjugate(), r**2 / z0, r**2 / z0.conjugate()]
    signs = [1, -1, 1, -1]
    powers = [c**n for c in centres]

    def value(z: complex) -> complex:
        zn = z**n
        return kappa * sum(s * cmath.log(zn - p) for s, p in zip(signs, powers))

    def slope(z: complex) -> complex:
        zn = z**n
        poles = sum(s / (zn - p) for s, p in zip(signs, powers))
        return kappa * n * z ** (n - 1) * poles

    images = [c * rot for c in centres for rot in _rotations(n)]
    return ComplexPotential(
        value, slope, tuple(images), 0j, f"circular_kaleidoscope({z0}, {n}, {r})"
    )


@dataclass(frozen=True)
class AnnulusSpec:
    """Annulus r1 < |z| < r2 with M image generations on each side"""

    r1: float
    r2: float
    M: int = DEFAULT_TRUNCATION

    def __post_init__(self):
        if not 0 < self.r1 < self.r2:
            raise DomainError(f"Need 0 < r1 < r2, got r1={self.r1}, r2={self.r2}")
        if self.M < 1:
            raise DomainError(f"Truncation M must be at least 1, got {self.M}")

    @property
    def Q(self) -> float:
        return self.r2**2 / self.r1**2

    @property
    def margin(self) -> float:
        return 1e-3 * (self.r2**2 - self.r1**2)

    @property
    def window(self) -> tuple[float, float]:
        """Admissible actions J = |z|^2, kept a margin away from both walls"""
        return self.r1**2 + self.margin, self.r2**2 - self.margin

    def contains(self, J: float) -> bool:
        low, high = self.window
        return low < J < high


@dataclass(frozen=True)
class VortexState:
    z0: complex
    Gamma: float

    @property
    def J(self) -> float:
        return abs(self.z0) ** 2

    @property
    def kappa(self) -> float:
        return self.Gamma / (2 * math.pi)


def _generations(spec: AnnulusSpec) -> range:
    return range(-spec.M, spec.M + 1)


def two_circle(f: ComplexPotential, spec: AnnulusSpec) -> ComplexPotential:
    """Annulus theorem sum_m [f(Q^m z) + fbar(Q^m r2^2/z) + conj(l) ln z]"""
    fbar = conjugate_flow(f)
    Q = spec.Q
    pieces = []
    maps = []
    for m in _generations(spec):
        pieces += [_scaled(f, Q**m), _inverted(fbar, Q**m * spec.r2**2)]
        maps += [
            lambda s, m=m: s / Q**m,
            lambda s, m=m: Q**m * spec.r2**2 / s.conjugate(),
        ]
    renorm = (2 * spec.M + 1) * complex(f.log_coeff).conjugate()
    logger.debug(f"annulus image sum with {len(pieces)} terms, Q={Q}")
    return _combine(
        pieces,
        _image_points(f, maps) + [0j],
        f.log_coeff,
        f"annulus({f.name}, r1={spec.r1}, r2={spec.r2}, M={spec.M})",
        extra_log=renorm,
    )


def double_circular_wedge(
    f: ComplexPotential, n: int, spec: AnnulusSpec
) -> ComplexPotential:
    """Wedge of opening pi/n inside the annulus; periodic under z -> q^2 z
    and, up to the truncation tail, under z -> Q z
    """
    return two_circle(wedge(f, n), spec)


def q_periodic(f: ComplexPotential, spec: AnnulusSpec) -> ComplexPotential:
    """sum_m f(Q^m z), periodic under z -> Q z up to the truncation tail"""
    Q = spec.Q
    pieces = [_scaled(f, Q**m) for m in _generations(spec)]
    images = _image_points(f, [lambda s, m=m: s / Q**m for m in _generations(spec)])
    return _combine(pieces, images, 0j, f"Q-periodic({f.name})")


def annulus_vortex_potential(
    z0: complex, Gamma: float, spec: AnnulusSpec, n: int = 1
) -> ComplexPotential:
    """Vortex in the annular wedge r1 < |z| < r2, 0 < arg z < pi/n, in closed form

    Each generation m contributes vortices at (z0 Q^-m)^(1/n) rotations and
    at (Q^m r2^2/z0)^(1/n) rotations, with opposite circulation at their
    mirror images.
    """
    _check_in_wedge(z0, n)
    if not spec.r1 < abs(z0) < spec.r2:
        raise DomainError(f"|z0|={abs(z0)} outside the annulus ({spec.r1}, {spec.r2})")
    kappa = 1j * Gamma / (2 * math.pi)
    z0 = complex(z0)
    Q = spec.Q
    centres = []
    signs = []
    for m in _generations(spec):
        outer = Q**m * spec.r2**2
        zbar = z0.conjugate()
        centres += [z0 / Q**m, zbar / Q**m, outer / z0, outer / zbar]
        signs += [1, -1, 1, -1]
    powers = np.array([c**n for c in centres])
    weights = np.array(signs, dtype=float)

    def value(z: complex) -> complex:
        return kappa * complex(np.sum(weights * np.log(z**n - powers)))

    def slope(z: complex) -> complex:
        return kappa * n * z ** (n - 1) * complex(np.sum(weights / (z**n - powers)))

    images = [c * rot for c in centres for rot in _rotations(n)]
    return ComplexPotential(
        value,
        slope,
        tuple(images),
        0j,
        f"annular_wedge_vortex({z0}, {Gamma}, n={n}, M={spec.M})",
    )


def annulus_self_velocity(z0: complex, Gamma: float, spec: AnnulusSpec) -> complex:
    """Velocity u + iv induced at a vortex in the full annulus by its images

    Vortices of circulation Gamma sit at z0 Q^-m (m != 0) and of -Gamma at
    Q^m r2^2/conj(z0); the vortex does not act on itself.
    """
    if not spec.r1 < abs(z0) < spec.r2:
        raise DomainError(f"|z0|={abs(z0)} outside the annulus ({spec.r1}, {spec.r2})")
    kappa = 1j * Gamma / (2 * math.pi)
    z0 = complex(z0)
    Q = spec.Q
    w = 0j
    for m in _generations(spec):
        if m != 0:
            w += kappa / (z0 - z0 / Q**m)
        w -= kappa / (z0 - Q**m * spec.r2**2 / z0.conjugate())
    return w.conjugate()


def _check_action(J: float, spec: AnnulusSpec) -> None:
    if not spec.contains(J):
        raise DomainError(
            f"Action J={J} outside the annulus window {spec.window} "
            f"(r1={spec.r1}, r2={spec.r2})"
        )


def annulus_omega(
    J: float,
    Gamma: float,
    spec: AnnulusSpec,
    ctl: SeriesControl = qcore.DEFAULT_CONTROL,
) -> float:
    """Rotation frequency of a vortex at |z0|^2 = J,

    omega = Gamma (Ln_Q(1 - J/r1^2) - Ln_Q(1 - r2^2/J)) / (2 pi (Q - 1) J)
    """
    _check_action(J, spec)
    Q = spec.Q
    logs = qcore.q_log1m(J / spec.r1**2, Q, ctl) - qcore.q_log1m(
        spec.r2**2 / J, Q, ctl
    )
    return Gamma * logs.real / (2 * math.pi * (Q - 1) * J)


def annulus_hamiltonian(
    J: float,
    Gamma: float,
    spec: AnnulusSpec,
    ctl: SeriesControl = qcore.DEFAULT_CONTROL,
    tol: float = 1e-12,
) -> float:
    """H(J) = (Gamma^2/4 pi) ln|e_Q(J/((1-Q) r1^2)) e_Q(r2^2/((1-Q) J))|

    Raises:
        SingularH: if either q-exponential is within tol of zero
    """
    _check_action(J, spec)
    Q = spec.Q
    inner = qcore.q_exp(J / ((1 - Q) * spec.r1**2), Q, ctl)
    outer = qcore.q_exp(spec.r2**2 / ((1 - Q) * J), Q, ctl)
    if abs(inner) < tol or abs(outer) < tol:
        raise SingularH(f"A q-exponential factor of H vanishes at J={J}")
    return Gamma**2 / (4 * math.pi) * math.log(abs(inner * outer))


def annulus_profile(
    Gamma: float,
    spec: AnnulusSpec,
    ctl: SeriesControl = qcore.DEFAULT_CONTROL,
    *,
    action_scale: float = 1.0,
    offset: float = 0.0,
) -> HamiltonianProfile:
    """H(n s) + offset as an f-oscillator profile in the quantum number n"""
    _check_action_scale(action_scale)
    low, high = spec.window
    return HamiltonianProfile(
        lambda n: annulus_hamiltonian(n * action_scale, Gamma, spec, ctl) + offset,
        "annulus_vortex",
        {
            "Gamma": Gamma,
            "r1": spec.r1,
            "r2": spec.r2,
            "action_scale": action_scale,
            "offset": offset,
        },
        omega=lambda n: action_scale
        * Gamma
        / 2
        * annulus_omega(n * action_scale, Gamma, spec, ctl),
        domain=(low / action_scale, high / action_scale),
    )


def annulus_f_transform(
    z0: complex,
    Gamma: float,
    spec: AnnulusSpec,
    ctl: SeriesControl = qcore.DEFAULT_CONTROL,
    offset: float = 0.0,
) -> complex:
    """f-amplitude z_f = sqrt((H(J) + offset)/J) z0 with J = |z0|^2

    Raises:
        NegativeH: if H(J) + offset < 0
    """
    J = abs(z0) ** 2
    h = annulus_hamiltonian(J, Gamma, spec, ctl) + offset
    if h < 0:
        raise NegativeH(f"H(J) + offset = {h} < 0 at J={J}; raise the offset")
    return math.sqrt(h / J) * complex(z0)


def _check_action_scale(action_scale: float) -> None:
    if not action_scale > 0:
        raise DomainError(f"Action scale must be positive, got {action_scale}")


def _first_level(low: float, shift: float, action_scale: float) -> int:
    # smallest n >= 0 with (n + shift) s above the lower wall window
    return max(0, math.floor(low / action_scale - shift) + 1)


def annulus_bohr_sommerfeld(
    n_max: int,
    Gamma: float,
    spec: AnnulusSpec,
    ctl: SeriesControl = qcore.DEFAULT_CONTROL,
    *,
    action_scale: float = 1.0,
) -> SpectrumTable:
    """E_n = H((n + 1/2) s) for every admissible n up to n_max"""
    _check_action_scale(action_scale)
    low, high = spec.window
    first = _first_level(low, 0.5, action_scale)
    if first > n_max or (n_max + 0.5) * action_scale >= high:
        raise DomainError(
            f"Levels {first}..{n_max} do not fit in the action window {spec.window}"
        )
    energies = [
        annulus_hamiltonian((n + 0.5) * action_scale, Gamma, spec, ctl)
        for n in range(first, n_max + 1)
    ]
    return SpectrumTable.from_energies(
        energies,
        "annulus_bs",
        {"Gamma": Gamma, "r1": spec.r1, "r2": spec.r2, "action_scale": action_scale},
        "E_n = H((n + 1/2) s)",
        first=first,
    )


def annulus_f_spectrum(
    n_max: int,
    Gamma: float,
    spec: AnnulusSpec,
    ctl: SeriesControl = qcore.DEFAULT_CONTROL,
    *,
    action_scale: float = 1.0,
) -> SpectrumTable:
    """E_n = (H(n s) + H((n + 1) s))/2 for every admissible n up to n_max"""
    _check_action_scale(action_scale)
    low, high = spec.window
    first = _first_level(low, 0.0, action_scale)
    if first > n_max or (n_max + 1) * action_scale >= high:
        raise DomainError(
            f"Levels {first}..{n_max} do not fit in the action window {spec.window}"
        )
    profile = annulus_profile(Gamma, spec, ctl, action_scale=action_scale)
    table = f_spectrum(profile, n_max, first=first)
    return SpectrumTable(
        table.levels, "annulus_f", table.params, table.formula, table.exact
    )


@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray
    z: np.ndarray
    J: np.ndarray
    H: np.ndarray

    @property
    def radius_drift(self) -> float:
        """Largest relative change of |z| along the trajectory"""
        r = np.abs(self.z)
        return float(np.max(np.abs(r - r[0])) / r[0])

    @property
    def period(self) -> float:
        """2 pi over the mean angular speed of the unwrapped angle"""
        angle = np.unwrap(np.angle(self.z))
        speed = (angle[-1] - angle[0]) / (self.t[-1] - self.t[0])
        if speed == 0:
            return math.inf
        return 2 * math.pi / abs(speed)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "t": self.t,
                "re_z": self.z.real,
                "im_z": self.z.imag,
                "J": self.J,
                "H": self.H,
            }
        )


def vortex_simulate(
    state: VortexState,
    spec: AnnulusSpec,
    dt: float,
    steps: int,
    ctl: SeriesControl = qcore.DEFAULT_CONTROL,
) -> Trajectory:
    """RK4 integration of dz/dt = -i omega(|z|^2) z

    Raises:
        DomainError: if dt |omega| >= 0.1 or the vortex leaves the action window
    """
    if steps < 1 or not dt > 0:
        raise DomainError(f"Need dt > 0 and steps >= 1, got dt={dt}, steps={steps}")
    omega0 = annulus_omega(state.J, state.Gamma, spec, ctl)
    if dt * abs(omega0) >= 0.1:
        raise DomainError(
            f"Step dt={dt} too large for omega={omega0}: need dt |omega| < 0.1"
        )

    def rhs(z: complex) -> complex:
        return -1j * annulus_omega(abs(z) ** 2, state.Gamma, spec, ctl) * z

    z = np.empty(steps + 1, dtype=complex)
    z[0] = state.z0
    for k in range(steps):
        zk = z[k]
        k1 = rhs(zk)
        k2 = rhs(zk + dt / 2 * k1)
        k3 = rhs(zk + dt / 2 * k2)
        k4 = rhs(zk + dt * k3)
        z[k + 1] = zk + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        _check_action(abs(z[k + 1]) ** 2, spec)
    J = np.abs(z) ** 2
    H = np.array([annulus_hamiltonian(j, state.Gamma, spec, ctl) for j in J])
    logger.debug(f"vortex simulated for {steps} steps of {dt}")
    return Trajectory(dt * np.arange(steps + 1), z, J, H)


def circle_samples(r: float, count: int = 256, center: complex = 0j) -> np.ndarray:
    theta = 2 * np.pi * np.arange(count) / count
    return center + r * np.exp(1j * theta)


def ray_samples(
    angle: float, r_min: float = 0.1, r_max: float = 10.0, count: int = 256
) -> np.ndarray:
    return np.linspace(r_min, r_max, count) * np.exp(1j * angle)


def boundary_residual(
    potential: ComplexPotential,
    samples: Iterable[complex],
    tol: Optional[float] = None,
) -> float:
    """Standard deviation of the stream function over boundary samples"""
    values = np.array([potential.stream(z) for z in samples])
    residual = float(np.std(values))
    if tol is not None and residual > tol:
        warnings.warn(
            f"Boundary residual {residual:.3e} of {potential.name} exceeds {tol}",
            TruncationWarning,
        )
    return residual


def grid_points(
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    nx: int,
    ny: int,
) -> np.ndarray:
    xs = np.linspace(*x_range, nx)
    ys = np.linspace(*y_range, ny)
    return (xs[None, :] + 1j * ys[:, None]).ravel()


def sample_field(
    potential: ComplexPotential,
    points: Iterable[complex],
    mask_radius: float = 1e-3,
    domain: Optional[Callable[[complex], bool]] = None,
) -> pd.DataFrame:
    """F and V = conj(dF/dz) at each point; points outside ``domain`` or within
    mask_radius of a singularity are masked and carry NaN
    """
    singular = np.array(potential.singularities, dtype=complex)
    singular = singular[np.isfinite(singular)]
    rows = []
    for z in points:
        z = complex(z)
        masked = domain is not None and not domain(z)
        if not masked and singular.size:
            masked = bool(np.any(np.abs(z - singular) < mask_radius))
        if not masked:
            try:
                F = potential(z)
                V = potential.velocity(z)
            except (Singularity, ZeroDivisionError, ValueError):
                masked = True
        if masked:
            F = V = complex(math.nan, math.nan)
        rows.append(
            {
                "re_z": z.real,
                "im_z": z.imag,
                "re_F": F.real,
                "im_F": F.imag,
                "re_V": V.real,
                "im_V": V.imag,
                "masked": masked,
            }
        )
    return pd.DataFrame(rows)
