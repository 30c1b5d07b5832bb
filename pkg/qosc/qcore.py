"""q-calculus and Fibonacci special functions.

Series are truncated according to a :class:`~qosc.SeriesControl`: summation
stops at the first term below ``tol`` whose successor is smaller still.
"""
import logging
import math
from typing import Callable
from typing import Iterator

from ._typing import DomainError
from ._typing import NoConvergence
from ._typing import SeriesControl

logger = logging.getLogger(__name__)

PHI = (1 + math.sqrt(5)) / 2
PHI_PRIME = (1 - math.sqrt(5)) / 2
DEFAULT_CONTROL = SeriesControl()


def _sum_terms(terms: Iterator[complex], ctl: SeriesControl, label: str) -> complex:
    """Add terms until one drops below ctl.tol and the next one is smaller

    Raises:
        NoConvergence if ctl.max_terms terms are used up first
    """
    prev = next(terms)
    total = complex(prev)
    for count, term in enumerate(terms, start=1):
        if abs(prev) < ctl.tol and abs(term) <= abs(prev):
            logger.debug(f"{label}: truncated after {count} terms")
            return total
        if count >= ctl.max_terms:
            raise NoConvergence(
                f"{label} did not reach tol={ctl.tol} within {ctl.max_terms} terms"
            )
        total += term
        prev = term
    return total


def q_number(n: int, q: float) -> float:
    """[n] = 1 + q + ... + q^(n-1)"""
    if n < 0:
        raise DomainError(f"q-numbers need a nonnegative integer, got {n}")
    if q <= 0:
        raise DomainError(f"q-numbers need q > 0, got {q}")
    if q == 1:
        return float(n)
    return (q**n - 1) / (q - 1)


def sym_q_number(n: float, lam: float) -> float:
    """Symmetric q-number sinh(lam n)/sinh(lam); exactly n at lam = 0"""
    if lam == 0:
        return float(n)
    return math.sinh(lam * n) / math.sinh(lam)


def q_factorial(n: int, q: float) -> float:
    if n < 0:
        raise DomainError(f"Factorials need a nonnegative integer, got {n}")
    return math.prod(q_number(k, q) for k in range(1, n + 1))


def sym_q_factorial(n: int, lam: float) -> float:
    if n < 0:
        raise DomainError(f"Factorials need a nonnegative integer, got {n}")
    return math.prod(sym_q_number(k, lam) for k in range(1, n + 1))


def q_exp(z: complex, q: float, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """Jackson q-exponential e_q(z) = sum z^n/[n]!

    Entire in z for q > 1.

    Raises:
        DomainError: if q <= 0
        NoConvergence: if the series has not settled after ctl.max_terms terms
    """
    if q <= 0:
        raise DomainError(f"q-exponential needs q > 0, got {q}")

    def terms() -> Iterator[complex]:
        term = 1 + 0j
        yield term
        n = 0
        while True:
            n += 1
            term = term * z / q_number(n, q)
            yield term

    return _sum_terms(terms(), ctl, f"q_exp({z}, q={q})")


def q_exp_product(z: complex, q: float, factors: int) -> complex:
    """Finite product prod_{k=1}^{factors} (1 - z/q^k)"""
    return complex(math.prod((1 - z / q**k for k in range(1, factors + 1)), start=1))


def q_log1m(x: complex, q: float, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """q-logarithm Ln_q(1 - x) = -sum_{n>=1} x^n/[n], for |x| < q and q > 1

    Close to the rim |x| = q the power series is replaced by its Lambert
    resummation -(q - 1) sum_{k>=1} x/(q^k - x), which converges like q^-k.
    """
    if q <= 1:
        raise DomainError(f"q-logarithm needs q > 1, got {q}")
    if abs(x) >= q:
        raise DomainError(f"q-logarithm needs |x| < q, got |x|={abs(x)} and q={q}")

    def power_terms() -> Iterator[complex]:
        power = 1 + 0j
        n = 0
        while True:
            n += 1
            power = power * x
            yield -power / q_number(n, q)

    def lambert_terms() -> Iterator[complex]:
        k = 0
        while True:
            k += 1
            yield -(q - 1) * x / (q**k - x)

    label = f"q_log1m({x}, q={q})"
    if abs(x) / q <= 0.5:
        return _sum_terms(power_terms(), ctl, label)
    return _sum_terms(lambert_terms(), ctl, label)


def q_harmonic(q: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """q-harmonic series H(q) = sum_{n>=1} 1/[n], convergent for q > 1"""
    if q <= 1:
        raise DomainError(f"q-harmonic series diverges for q={q} <= 1")

    def terms() -> Iterator[complex]:
        n = 0
        while True:
            n += 1
            yield 1 / q_number(n, q)

    return _sum_terms(terms(), ctl, f"q_harmonic(q={q})").real


def q_derivative(f: Callable[[complex], complex], z: complex, q: complex) -> complex:
    """Jackson derivative (f(qz) - f(z)) / ((q - 1) z)"""
    if z == 0:
        raise DomainError("The q-derivative is undefined at z = 0")
    if q == 1:
        raise DomainError("The q-derivative needs q != 1")
    return (f(q * z) - f(z)) / ((q - 1) * z)


def _fib_pair(n: int) -> tuple[int, int]:
    # (F_n, F_{n+1}) by fast doubling
    if n == 0:
        return 0, 1
    a, b = _fib_pair(n >> 1)
    c = a * (2 * b - a)
    d = a * a + b * b
    if n & 1:
        return d, c + d
    return c, d


def fibonacci(n: int) -> int:
    """Exact Fibonacci number F_n"""
    if n < 0:
        raise DomainError(f"Fibonacci numbers need n >= 0, got {n}")
    return _fib_pair(n)[0]


def binet_float(n: int) -> float:
    """Floating-point Binet formula, only as a cross-check of :func:`fibonacci`"""
    return (PHI**n - PHI_PRIME**n) / (PHI - PHI_PRIME)


def fib_factorial(n: int) -> int:
    """F_1 F_2 ... F_n, with F_0! = 1"""
    if n < 0:
        raise DomainError(f"Fibonacci factorial needs n >= 0, got {n}")
    result, a, b = 1, 1, 1
    for _ in range(n):
        result *= a
        a, b = b, a + b
    return result


def fib_exp(z: complex, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """Fibonacci exponential e_F(z) = sum z^n / F_n!"""

    def terms() -> Iterator[complex]:
        term = 1 + 0j
        yield term
        a, b = 1, 1
        while True:
            term = term * z / a
            a, b = b, a + b
            yield term

    return _sum_terms(terms(), ctl, f"fib_exp({z})")


def golden_derivative(f: Callable[[complex], complex], z: complex) -> complex:
    """Binet-Fibonacci derivative (f(phi z) - f(-z/phi)) / ((phi + 1/phi) z)"""
    if z == 0:
        raise DomainError("The golden derivative is undefined at z = 0")
    return (f(PHI * z) - f(PHI_PRIME * z)) / ((PHI - PHI_PRIME) * z)
