"""f-oscillators: a Hamiltonian H(J) of the action, its classical flow and its
quantum spectrum E_n = (H(n) + H(n+1))/2, with the linear, symmetric q,
semi-relativistic and golden (Fibonacci) instances.
"""
import cmath
import logging
import math
from dataclasses import dataclass
from dataclasses import field
from fractions import Fraction
from typing import Any
from typing import Callable
from typing import Mapping
from typing import Optional

import numpy as np

from . import qcore
from ._typing import DomainError
from ._typing import NoConvergence
from ._typing import SeriesControl
from ._typing import SpectrumTable

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HamiltonianProfile:
    """Energy as a function of the action variable J.

    Arguments:
        h: H(J)
        name: label used in spectrum tables
        params: physical parameters of the model
        omega: analytic frequency dH/dJ, if known
        domain: closed interval of admissible actions
    """

    h: Callable[[float], float]
    name: str
    params: Mapping[str, Any] = field(default_factory=dict)
    omega: Optional[Callable[[float], float]] = field(default=None, kw_only=True)
    domain: tuple[float, float] = field(default=(0.0, math.inf), kw_only=True)

    def __call__(self, J: float) -> float:
        if not self.domain[0] <= J <= self.domain[1]:
            raise DomainError(
                f"Action J={J} outside the domain {self.domain} of {self.name}"
            )
        try:
            value = float(self.h(J))
        except (ValueError, OverflowError, ZeroDivisionError) as exc:
            raise DomainError(f"H({J}) of {self.name} is undefined") from exc
        if not math.isfinite(value):
            raise DomainError(f"H({J}) of {self.name} is not finite")
        return value


@dataclass(frozen=True)
class ComplexAmplitude:
    """alpha = i sqrt(J) exp(-i theta)"""

    value: complex

    @property
    def J(self) -> float:
        return abs(self.value) ** 2

    @property
    def theta(self) -> float:
        # alpha / i = sqrt(J) exp(-i theta)
        return -math.atan2((self.value / 1j).imag, (self.value / 1j).real)

    @classmethod
    def from_action_angle(cls, J: float, theta: float) -> "ComplexAmplitude":
        if J < 0:
            raise DomainError(f"The action must be nonnegative, got {J}")
        return cls(1j * math.sqrt(J) * complex(math.cos(theta), -math.sin(theta)))


@dataclass(frozen=True)
class CoherentState:
    beta: complex
    coeffs: np.ndarray
    n_max: int

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))


def linear_profile(omega0: float = 1.0) -> HamiltonianProfile:
    return HamiltonianProfile(
        lambda J: omega0 * J,
        "linear",
        {"omega0": omega0},
        omega=lambda J: omega0,
    )


def sym_q_profile(lam: float) -> HamiltonianProfile:
    """Classical symmetric q-oscillator H = sinh(lam J)/sinh(lam)"""
    ratio = 1.0 if lam == 0 else lam / math.sinh(lam)
    return HamiltonianProfile(
        lambda J: qcore.sym_q_number(J, lam),
        "sym_q",
        {"lambda": lam},
        omega=lambda J: ratio * math.cosh(lam * J),
    )


def semi_relativistic_profile(m: float, c: float, omega0: float) -> HamiltonianProfile:
    """H(J) = m c^2 sqrt(1 + 2 omega0 J / (m c^2))"""
    _check_positive(m=m, c=c, omega0=omega0)
    rest = m * c**2
    return HamiltonianProfile(
        lambda J: rest * math.sqrt(1 + 2 * omega0 * J / rest),
        "semirel",
        {"m": m, "c": c, "omega0": omega0},
        omega=lambda J: semi_relativistic_frequency(J, m, c, omega0),
    )


def _check_positive(**kwargs: float) -> None:
    for name, value in kwargs.items():
        if not value > 0:
            raise DomainError(f"Parameter {name} must be positive, got {value}")


def f_frequency(profile: HamiltonianProfile, J: float) -> float:
    """dH/dJ, analytic when the profile carries it, else finite differences"""
    if profile.omega is not None:
        profile(J)
        return float(profile.omega(J))
    eps = 1e-6 * max(1.0, abs(J))
    if J - eps < profile.domain[0]:
        # second order one-sided difference at the lower edge of the domain
        return (-3 * profile(J) + 4 * profile(J + eps) - profile(J + 2 * eps)) / (
            2 * eps
        )
    return (profile(J + eps) - profile(J - eps)) / (2 * eps)


def f_spectrum(
    profile: HamiltonianProfile, n_max: int, *, first: int = 0
) -> SpectrumTable:
    """Quantum f-oscillator levels E_n = (H(n) + H(n+1))/2, n = first..n_max"""
    if n_max < first:
        raise DomainError(f"n_max={n_max} lies below the first level {first}")
    h = np.array([profile(n) for n in range(first, n_max + 2)])
    return SpectrumTable.from_energies(
        (h[:-1] + h[1:]) / 2,
        profile.name,
        profile.params,
        "E_n = (H(n) + H(n+1))/2",
        first=first,
    )


def f_commutator(profile: HamiltonianProfile, n_max: int) -> np.ndarray:
    """Diagonal of [a_f, a_f^+] in the Fock basis: H(n+1) - H(n)"""
    h = np.array([profile(n) for n in range(n_max + 2)])
    return np.diff(h)


def f_transform(
    alpha: ComplexAmplitude, profile: HamiltonianProfile
) -> ComplexAmplitude:
    """alpha_f = sqrt(H(J)/J) alpha, so that |alpha_f|^2 = H(J)

    Raises:
        DomainError: if H(J)/J < 0, or at J = 0 when H(0) != 0
    """
    J = alpha.J
    if J == 0:
        if profile(0.0) != 0:
            raise DomainError(f"H(J)/J diverges at J=0 for {profile.name}")
        ratio = f_frequency(profile, 0.0)
    else:
        ratio = profile(J) / J
    if ratio < 0:
        raise DomainError(f"H(J)/J = {ratio} < 0 at J={J}: no real f-amplitude")
    return ComplexAmplitude(math.sqrt(ratio) * alpha.value)


def evolve_classical(
    alpha0: ComplexAmplitude, profile: HamiltonianProfile, t: float
) -> ComplexAmplitude:
    """Exact flow alpha(t) = alpha0 exp(-i omega(J0) t); J is conserved"""
    omega = f_frequency(profile, alpha0.J)
    return ComplexAmplitude(alpha0.value * cmath.exp(-1j * omega * t))


def sym_q_spectrum(lam: float, n_max: int) -> SpectrumTable:
    """Symmetric q-oscillator E_n = ([n] + [n+1])/2 = sinh((n+1/2)lam)/(2 sinh(lam/2))

    Both forms are evaluated and must agree to 1e-12 relative.
    """
    if lam < 0:
        raise DomainError(f"lambda must be nonnegative, got {lam}")
    n = np.arange(n_max + 1)
    by_numbers = np.array(
        [(qcore.sym_q_number(k, lam) + qcore.sym_q_number(k + 1, lam)) / 2 for k in n]
    )
    if lam == 0:
        closed = n + 0.5
    else:
        closed = np.sinh((n + 0.5) * lam) / (2 * math.sinh(lam / 2))
    if not np.allclose(by_numbers, closed, rtol=1e-12, atol=0):
        raise RuntimeError(
            f"Symmetric q-spectrum forms disagree at lambda={lam}: "
            f"max relative gap {np.max(np.abs(by_numbers / closed - 1))}"
        )
    return SpectrumTable.from_energies(
        closed,
        "sym_q",
        {"lambda": lam},
        "E_n = sinh((n+1/2)lambda)/(2 sinh(lambda/2))",
    )


def semi_relativistic_frequency(J: float, m: float, c: float, omega0: float) -> float:
    """omega(J) = omega0 / sqrt(1 + 2 omega0 J/(m c^2))"""
    if J < 0:
        raise DomainError(f"The action must be nonnegative, got {J}")
    _check_positive(m=m, c=c, omega0=omega0)
    return omega0 / math.sqrt(1 + 2 * omega0 * J / (m * c**2))


def semi_relativistic_weak_frequency(
    J: float, m: float, c: float, omega0: float
) -> float:
    """Leading relativistic correction omega0 (1 - omega0 J/(m c^2))"""
    if J < 0:
        raise DomainError(f"The action must be nonnegative, got {J}")
    _check_positive(m=m, c=c, omega0=omega0)
    return omega0 * (1 - omega0 * J / (m * c**2))


def semi_relativistic_f_frequency(
    af2: float, m: float, c: float, omega0: float
) -> float:
    """Frequency in terms of the f-amplitude: omega0 m c^2 / |alpha_f|^2"""
    _check_positive(m=m, c=c, omega0=omega0)
    if not af2 > 0:
        raise DomainError(f"|alpha_f|^2 must be positive, got {af2}")
    return omega0 * m * c**2 / af2


def semi_relativistic_spectrum(
    m: float, c: float, omega0: float, n_max: int, variant: str = "sum"
) -> SpectrumTable:
    """Quantized semi-relativistic oscillator.

    ``variant="sum"`` is the f-oscillator spectrum (H(n) + H(n+1))/2;
    ``variant="difference"`` gives (H(n+1) - H(n))/2, the form with a minus
    between the square roots, kept for comparison.
    """
    profile = semi_relativistic_profile(m, c, omega0)
    if variant == "sum":
        return f_spectrum(profile, n_max)
    if variant != "difference":
        raise DomainError(f"Unknown semi-relativistic variant {variant!r}")
    gaps = f_commutator(profile, n_max) / 2
    return SpectrumTable.from_energies(
        gaps,
        "semirel",
        {**profile.params, "variant": variant},
        "E_n = (H(n+1) - H(n))/2",
    )


def golden_spectrum(n_max: int, hbar_omega: float = 1.0) -> SpectrumTable:
    """Golden oscillator E_n = (hbar omega / 2) F_{n+2}, exact in rationals"""
    if n_max < 0:
        raise DomainError(f"n_max must be nonnegative, got {n_max}")
    scale = Fraction(hbar_omega) / 2
    exact = [scale * qcore.fibonacci(n + 2) for n in range(n_max + 1)]
    return SpectrumTable.from_energies(
        (float(e) for e in exact),
        "golden",
        {"hbar_omega": hbar_omega},
        "E_n = (hbar omega/2) F_(n+2)",
        exact=exact,
    )


def golden_ratio_limit(n: int) -> float:
    """Level spacing over level, (E_{n+1} - E_n)/E_n = F_{n+1}/F_{n+2} -> 1/phi"""
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    return float(Fraction(qcore.fibonacci(n + 1), qcore.fibonacci(n + 2)))


def golden_coherent(
    beta: complex, n_max: int, ctl: SeriesControl = qcore.DEFAULT_CONTROL
) -> CoherentState:
    """Golden coherent state c_n = c_0 beta^n / sqrt(F_n!), truncated at n_max

    Raises:
        NoConvergence: if |beta|^(2(n_max+1)) / F_(n_max+1)! is not below ctl.tol
            relative to the retained weight
    """
    raw = np.empty(n_max + 1, dtype=complex)
    raw[0] = 1.0
    a, b = 1, 1
    for n in range(n_max):
        raw[n + 1] = raw[n] * beta / math.sqrt(a)
        a, b = b, a + b
    weight = float(np.sum(np.abs(raw) ** 2))
    if beta != 0:
        log_tail = 2 * (n_max + 1) * math.log(abs(beta)) - math.log(
            qcore.fib_factorial(n_max + 1)
        )
        if log_tail - math.log(weight) >= math.log(ctl.tol):
            raise NoConvergence(
                f"Coherent state with beta={beta} needs more than {n_max} levels"
            )
    coeffs = raw / math.sqrt(weight)
    logger.debug(f"golden coherent state beta={beta}: retained weight {weight}")
    return CoherentState(beta, coeffs, n_max)


def golden_lower(coeffs: np.ndarray) -> np.ndarray:
    """Lowering map (b c)_n = c_{n+1} sqrt(F_{n+1}) on a coefficient vector"""
    fibs = np.sqrt([float(qcore.fibonacci(n + 1)) for n in range(len(coeffs) - 1)])
    return coeffs[1:] * fibs


def golden_overlap(
    alpha: complex, beta: complex, ctl: SeriesControl = qcore.DEFAULT_CONTROL
) -> complex:
    """<alpha|beta> = e_F(conj(alpha) beta) / sqrt(e_F(|alpha|^2) e_F(|beta|^2))"""
    cross = qcore.fib_exp(alpha.conjugate() * beta, ctl)
    norms = qcore.fib_exp(abs(alpha) ** 2, ctl) * qcore.fib_exp(abs(beta) ** 2, ctl)
    return cross / math.sqrt(norms.real)


def fock_bargmann(coeffs: np.ndarray, z: complex) -> complex:
    """Analytic wave function sum_n c_n z^n / sqrt(F_n!)"""
    total = 0j
    power = 1 + 0j
    fact = 1.0
    a, b = 1, 1
    for n, c in enumerate(coeffs):
        if n > 0:
            power *= z
            fact *= a
            a, b = b, a + b
        total += c * power / math.sqrt(fact)
    return total


def golden_deformed_commutators(n_max: int) -> dict[str, float]:
    """Largest violation, over n <= n_max, of the Fock-diagonal relations

    F_{n+1} - phi F_n = phi'^n, F_{n+1} - phi' F_n = phi^n (floating point)
    and F_{n+1} - F_n = F_{n-1} (exact integers).
    """
    fib = [qcore.fibonacci(n) for n in range(n_max + 2)]
    phi_res = max(
        abs(fib[n + 1] - qcore.PHI * fib[n] - qcore.PHI_PRIME**n) / qcore.PHI**n
        for n in range(n_max + 1)
    )
    phi_prime_res = max(
        abs(fib[n + 1] - qcore.PHI_PRIME * fib[n] - qcore.PHI**n) / qcore.PHI**n
        for n in range(n_max + 1)
    )
    integer_res = max(
        (abs(fib[n + 1] - fib[n] - fib[n - 1]) for n in range(1, n_max + 1)), default=0
    )
    return {"phi": phi_res, "phi_prime": phi_prime_res, "fibonacci": float(integer_res)}
