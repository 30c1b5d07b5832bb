import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qosc import qcore
from qosc._typing import DomainError
from qosc._typing import NoConvergence
from qosc._typing import SeriesControl


def _exact_q_number(n: int, q: int) -> Fraction:
    return Fraction(sum(q**k for k in range(n)))


@pytest.mark.parametrize(
    ("n", "q", "expected"),
    ((0, 2, 0), (3, 2, 7), (5, 1, 5), (1, 7.5, 1)),
    ids=("empty", "direct", "degenerate", "unit"),
)
def test_q_number(n, q, expected):
    assert qcore.q_number(n, q) == expected


@pytest.mark.parametrize("q", (1.1, 2, 5))
def test_q_number_recursion(q):
    for n in range(51):
        lhs = qcore.q_number(n + 1, q)
        rhs = 1 + q * qcore.q_number(n, q)
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_q_number_bad_args():
    with pytest.raises(DomainError):
        qcore.q_number(-1, 2)
    with pytest.raises(DomainError, match="q > 0"):
        qcore.q_number(3, 0)


@pytest.mark.parametrize(
    ("n", "lam", "expected"),
    ((1, 0.7, 1), (2, math.log(2), 2.5), (4, 0, 4)),
    ids=("unit", "q+1/q", "undeformed"),
)
def test_sym_q_number(n, lam, expected):
    assert qcore.sym_q_number(n, lam) == pytest.approx(expected, rel=1e-14)


@given(st.integers(1, 50), st.floats(0.05, 1.0))
def test_sym_q_number_recursion(n, lam):
    q = math.exp(lam)
    lhs = qcore.sym_q_number(n + 1, lam) + qcore.sym_q_number(n - 1, lam)
    rhs = (q + 1 / q) * qcore.sym_q_number(n, lam)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_factorials():
    assert qcore.q_factorial(0, 3) == 1
    assert qcore.q_factorial(3, 2) == 21
    assert qcore.q_factorial(2, 1) == 2
    assert qcore.sym_q_factorial(3, 0) == 6
    expected = qcore.sym_q_number(2, 0.4) * qcore.sym_q_number(3, 0.4)
    assert qcore.sym_q_factorial(3, 0.4) == pytest.approx(expected)


def test_q_exp_values():
    assert qcore.q_exp(0, 2) == 1
    expected = 0
    factorial = Fraction(1)
    for n in range(200):
        if n:
            factorial *= _exact_q_number(n, 2)
        expected += 1 / factorial
    assert qcore.q_exp(1, 2) == pytest.approx(float(expected), abs=1e-13)


@pytest.mark.parametrize("q", (1.5, 2, 4))
@pytest.mark.parametrize("z", (0.5, 0.9, -0.7, 0.3 + 0.4j, -0.6j))
def test_q_exp_product(z, q):
    product = qcore.q_exp_product(z, q, 64)
    series = qcore.q_exp(-z / (1 - 1 / q), q) / (1 - z)
    assert abs(product - series) < 1e-10


def test_q_exp_budget():
    with pytest.raises(NoConvergence):
        qcore.q_exp(1e6, 1.01, SeriesControl(max_terms=8))


def test_q_log1m():
    assert qcore.q_log1m(0, 2) == 0
    expected = -sum(
        Fraction(1, 2**n) / _exact_q_number(n, 2) for n in range(1, 200)
    )
    assert qcore.q_log1m(0.5, 2) == pytest.approx(float(expected), abs=1e-13)


def test_q_log1m_resummation():
    # |x|/q > 1/2 takes the Lambert branch; compare with the raw power series
    x, q = Fraction(3, 2), 2
    expected = -sum(x**n / _exact_q_number(n, q) for n in range(1, 400))
    assert qcore.q_log1m(1.5, q).real == pytest.approx(float(expected), abs=1e-12)
    assert qcore.q_log1m(1.9j, 2.5) == pytest.approx(
        -sum((1.9j) ** n / qcore.q_number(n, 2.5) for n in range(1, 600)), abs=1e-11
    )


def test_q_log1m_domain():
    with pytest.raises(DomainError, match=r"\|x\| < q"):
        qcore.q_log1m(2, 2)
    with pytest.raises(DomainError):
        qcore.q_log1m(0.1, 1)


def test_q_harmonic():
    ctl = SeriesControl(tol=1e-12)
    expected = sum(Fraction(1, 2**n - 1) for n in range(1, 200))
    harmonic = qcore.q_harmonic(2, ctl)
    assert harmonic == pytest.approx(float(expected), abs=1e-11)
    assert abs(harmonic + qcore.q_log1m(1, 2, ctl)) < 2 * ctl.tol
    assert qcore.q_harmonic(1e16) == pytest.approx(1, abs=1e-14)


@pytest.mark.parametrize("n", (0, 1, 4, 9))
@pytest.mark.parametrize("q", (2, 0.5, 1j))
def test_q_derivative_monomial(n, q):
    z = 0.8 - 0.3j
    result = qcore.q_derivative(lambda w: w**n, z, q)
    expected = sum(q**k for k in range(n)) * z ** (n - 1) if n else 0
    assert result == pytest.approx(expected, rel=1e-12, abs=1e-14)


def test_q_derivative_cube_and_domain():
    assert qcore.q_derivative(lambda w: w**3, 1, 2) == 7
    assert qcore.q_derivative(lambda w: 5.0, 1 + 1j, 3) == 0
    with pytest.raises(DomainError):
        qcore.q_derivative(lambda w: w, 0, 2)
    with pytest.raises(DomainError):
        qcore.q_derivative(lambda w: w, 1, 1)


def test_fibonacci_seeds():
    assert qcore.fibonacci(0) == 0
    assert qcore.fibonacci(1) == 1
    assert qcore.fibonacci(10) == 55
    assert round(qcore.binet_float(20)) == qcore.fibonacci(20) == 6765


def test_fibonacci_recursion():
    a, b = 0, 1
    for n in range(301):
        assert qcore.fibonacci(n) == a
        a, b = b, a + b


@given(st.integers(0, 70))
def test_binet_rounds_to_fibonacci(n):
    assert round(qcore.binet_float(n)) == qcore.fibonacci(n)


def test_fib_factorial_and_exp():
    assert qcore.fib_factorial(0) == 1
    assert qcore.fib_factorial(4) == 6
    assert qcore.fib_exp(0) == 1
    expected = sum(Fraction(1, qcore.fib_factorial(n)) for n in range(300))
    assert qcore.fib_exp(1) == pytest.approx(float(expected), abs=1e-13)


def test_golden_derivative_polynomials():
    rng = np.random.default_rng(12)
    z = 0.9 + 0.4j
    for degree in range(13):
        coeffs = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)

        def poly(w, coeffs=coeffs):
            return sum(c * w**k for k, c in enumerate(coeffs))

        expected = sum(
            c * qcore.fibonacci(k) * z ** (k - 1) for k, c in enumerate(coeffs) if k
        )
        result = qcore.golden_derivative(poly, z)
        scale = max(1.0, abs(expected))
        assert abs(result - expected) < 1e-12 * scale


@pytest.mark.parametrize("k", range(1, 12))
def test_golden_eigenfunctions(k):
    norm = math.sqrt(qcore.fib_factorial(k))

    def psi(w):
        return w**k / norm

    z = 0.6 - 1.1j
    result = z * qcore.golden_derivative(psi, z)
    assert result == pytest.approx(qcore.fibonacci(k) * psi(z), rel=1e-12)


def test_golden_derivative_of_fib_exp():
    z = 0.7 + 0.2j
    assert qcore.golden_derivative(qcore.fib_exp, z) == pytest.approx(
        qcore.fib_exp(z), rel=1e-12
    )
    assert qcore.golden_derivative(lambda w: 2.0, z) == 0
    with pytest.raises(DomainError):
        qcore.golden_derivative(qcore.fib_exp, 0)
