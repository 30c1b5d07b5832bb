"""Exact polynomial algebra for the linear q-Schrodinger equation

    i hbar psi_t = sinh(-lambda hbar^2/(2m) d^2/dx^2) psi / sinh(lambda)

and the characteristics of its classical (Burgers) limit.

Polynomials in (x, t) are dense complex coefficient arrays indexed [i, j] for
x^i t^j.  Every operator used here is a power series in d^2/dx^2, which is
nilpotent on polynomials, so all results are exact up to rounding.
"""
import logging
import math
from dataclasses import dataclass
from dataclasses import field
from typing import Any
from typing import Callable
from typing import Mapping
from typing import NamedTuple
from typing import Optional
from typing import Sequence
from typing import Union

import numpy as np
import numpy.polynomial.hermite as herm
import numpy.polynomial.polynomial as P
import pandas as pd
from scipy.optimize import brentq

from ._typing import DomainError
from ._typing import NoConvergence
from ._typing import NoRoot
from ._typing import NoShock

logger = logging.getLogger(__name__)

D2Series = Union[Sequence[complex], Callable[[int], complex]]


@dataclass(frozen=True, eq=False)
class BivarPolynomial:
    """Complex polynomial sum c[i, j] x^i t^j"""

    coeffs: np.ndarray
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim == 0:
            c = c.reshape(1, 1)
        elif c.ndim == 1:
            c = c.reshape(-1, 1)
        elif c.ndim != 2:
            raise DomainError(f"Coefficient array must be 2-D, got shape {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def monomial(
        cls,
        i: int,
        j: int = 0,
        coeff: complex = 1.0,
        params: Optional[Mapping[str, float]] = None,
    ) -> "BivarPolynomial":
        c = np.zeros((i + 1, j + 1), dtype=complex)
        c[i, j] = coeff
        return cls(c, params or {})

    @property
    def x_degree(self) -> int:
        rows = np.flatnonzero(np.any(self.coeffs != 0, axis=1))
        return int(rows[-1]) if rows.size else 0

    @property
    def t_degree(self) -> int:
        cols = np.flatnonzero(np.any(self.coeffs != 0, axis=0))
        return int(cols[-1]) if cols.size else 0

    def _new(self, coeffs: np.ndarray) -> "BivarPolynomial":
        return BivarPolynomial(coeffs, self.params)

    def _padded(self, shape: tuple[int, int]) -> np.ndarray:
        out = np.zeros(shape, dtype=complex)
        out[: self.coeffs.shape[0], : self.coeffs.shape[1]] = self.coeffs
        return out

    def __add__(self, other: "BivarPolynomial") -> "BivarPolynomial":
        shape = (
            max(self.coeffs.shape[0], other.coeffs.shape[0]),
            max(self.coeffs.shape[1], other.coeffs.shape[1]),
        )
        return self._new(self._padded(shape) + other._padded(shape))

    def __neg__(self) -> "BivarPolynomial":
        return self._new(-self.coeffs)

    def __sub__(self, other: "BivarPolynomial") -> "BivarPolynomial":
        return self + (-other)

    def __mul__(self, scalar: complex) -> "BivarPolynomial":
        return self._new(self.coeffs * scalar)

    __rmul__ = __mul__

    def dx(self, order: int = 1) -> "BivarPolynomial":
        if order >= self.coeffs.shape[0]:
            return self._new(np.zeros((1, self.coeffs.shape[1]), dtype=complex))
        return self._new(P.polyder(self.coeffs, m=order, axis=0))

    def dt(self) -> "BivarPolynomial":
        if self.coeffs.shape[1] == 1:
            return self._new(np.zeros((self.coeffs.shape[0], 1), dtype=complex))
        return self._new(P.polyder(self.coeffs, axis=1))

    def times_x(self) -> "BivarPolynomial":
        return self._new(np.pad(self.coeffs, ((1, 0), (0, 0))))

    def times_t(self) -> "BivarPolynomial":
        return self._new(np.pad(self.coeffs, ((0, 0), (1, 0))))

    def __call__(self, x, t):
        x, t = np.broadcast_arrays(
            np.asarray(x, dtype=complex), np.asarray(t, dtype=complex)
        )
        return P.polyval2d(x, t, self.coeffs)

    def x_slice(self, t: float) -> np.ndarray:
        """Coefficients in x of the polynomial at fixed time t"""
        powers = np.asarray(t, dtype=complex) ** np.arange(self.coeffs.shape[1])
        return self.coeffs @ powers

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def terms(self) -> list[tuple[int, int, complex]]:
        rows, cols = np.nonzero(self.coeffs)
        return sorted(
            (int(i), int(j), complex(self.coeffs[i, j])) for i, j in zip(rows, cols)
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "params": dict(self.params),
            "terms": [
                {"i": i, "j": j, "re": c.real, "im": c.imag} for i, j, c in self.terms()
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "BivarPolynomial":
        terms = data["terms"]
        if not terms:
            return cls(np.zeros((1, 1)), data.get("params", {}))
        c = np.zeros(
            (max(t["i"] for t in terms) + 1, max(t["j"] for t in terms) + 1),
            dtype=complex,
        )
        for term in terms:
            c[term["i"], term["j"]] = complex(term["re"], term["im"])
        return cls(c, data.get("params", {}))

    def to_frame(self) -> pd.DataFrame:
        terms = self.terms()
        return pd.DataFrame(
            {
                "i": [i for i, _, _ in terms],
                "j": [j for _, j, _ in terms],
                "re": [c.real for _, _, c in terms],
                "im": [c.imag for _, _, c in terms],
            }
        )


@dataclass(frozen=True)
class DispersionOperator:
    """H0q = sinh(a D^2) / sinh(lambda) with a = -lambda hbar^2 / (2m)"""

    lam: float
    hbar: float = 1.0
    m: float = 1.0

    def __post_init__(self):
        if not self.m > 0 or not self.hbar > 0:
            raise DomainError(
                f"Need m > 0 and hbar > 0, got m={self.m}, hbar={self.hbar}"
            )

    @property
    def params(self) -> dict[str, float]:
        return {"hbar": self.hbar, "lambda": self.lam, "m": self.m}

    @property
    def ratio(self) -> float:
        """lambda / sinh(lambda), 1 at lambda = 0"""
        return 1.0 if self.lam == 0 else self.lam / math.sinh(self.lam)

    @property
    def a(self) -> float:
        return -self.lam * self.hbar**2 / (2 * self.m)

    def hamiltonian_coefficient(self, j: int) -> float:
        """Coefficient of (D^2)^j in sinh(a D^2)/sinh(lambda)"""
        if j % 2 == 0:
            return 0.0
        return (
            (-self.hbar**2 / (2 * self.m)) ** j
            * self.lam ** (j - 1)
            * self.ratio
            / math.factorial(j)
        )

    def cosh_coefficient(self, j: int) -> float:
        """Coefficient of (D^2)^j in cosh(a D^2)"""
        if j % 2:
            return 0.0
        return self.a**j / math.factorial(j)


def apply_d2_series(g: D2Series, poly: BivarPolynomial) -> BivarPolynomial:
    """sum_j g_j (d^2/dx^2)^j applied to poly; stops once 2j exceeds the x-degree"""
    coeff = g if callable(g) else (lambda j: g[j] if j < len(g) else 0.0)
    result = poly * coeff(0)
    for j in range(1, poly.x_degree // 2 + 1):
        gj = coeff(j)
        if gj != 0:
            result = result + poly.dx(2 * j) * gj
    return result


def apply_hamiltonian(
    poly: BivarPolynomial, disp: DispersionOperator
) -> BivarPolynomial:
    return apply_d2_series(disp.hamiltonian_coefficient, poly)


def qkf_polynomial(n: int, disp: DispersionOperator) -> BivarPolynomial:
    """q-Kampe de Feriet polynomial exp(-(i t/hbar) H0q) x^n"""
    if n < 0:
        raise DomainError(f"Polynomial degree must be nonnegative, got {n}")
    coeffs = np.zeros((n + 1, n // 2 + 1), dtype=complex)
    power = BivarPolynomial.monomial(n)
    for r in range(n // 2 + 1):
        column = power._padded((n + 1, 1))[:, 0]
        coeffs[:, r] = (-1j / disp.hbar) ** r / math.factorial(r) * column
        power = apply_hamiltonian(power, disp)
    return BivarPolynomial(coeffs, disp.params)


def boost_apply(poly: BivarPolynomial, disp: DispersionOperator) -> BivarPolynomial:
    """K = x + (i hbar t/m)(lambda/sinh lambda) cosh(a D^2) D"""
    drift = apply_d2_series(disp.cosh_coefficient, poly.dx()).times_t()
    return poly.times_x() + drift * (1j * disp.hbar * disp.ratio / disp.m)


def schrodinger_residual(
    poly: BivarPolynomial, disp: DispersionOperator
) -> BivarPolynomial:
    """i hbar d_t poly - H0q poly"""
    return poly.dt() * (1j * disp.hbar) - apply_hamiltonian(poly, disp)


class CommutatorReport(NamedTuple):
    """Largest relative coefficient residual of each symmetry relation"""

    p0_p1: float
    p1_k: float
    p0_k: float
    grouping: str

    @property
    def max(self) -> float:
        return max(self.p0_p1, self.p1_k, self.p0_k)


BOOST_GROUPING = (
    "K = x + (i hbar t/m)(lambda/sinh lambda) cosh(-lambda hbar^2/(2m) D^2) D"
)


def _relative(residual: BivarPolynomial, *parts: BivarPolynomial) -> float:
    scale = max([1.0] + [p.max_abs() for p in parts])
    return residual.max_abs() / scale


def symmetry_commutators(
    disp: DispersionOperator, test_polys: Sequence[BivarPolynomial]
) -> CommutatorReport:
    """Check [P0, P1] = 0, [P1, K] = -i hbar and
    [P0, K] = -(i hbar/m)(lambda/sinh lambda) cosh(lambda P1^2/(2m)) P1
    on each test polynomial, with P0 = i hbar d_t and P1 = -i hbar d_x.
    """
    hbar = disp.hbar

    def p0(p: BivarPolynomial) -> BivarPolynomial:
        return p.dt() * (1j * hbar)

    def p1(p: BivarPolynomial) -> BivarPolynomial:
        return p.dx() * (-1j * hbar)

    def k(p: BivarPolynomial) -> BivarPolynomial:
        return boost_apply(p, disp)

    def p0_k_closed(p: BivarPolynomial) -> BivarPolynomial:
        # cosh(lambda P1^2/(2m)) expanded in powers of P1^2
        shifted = p1(p)
        total = shifted
        power = shifted
        for j in range(1, p.x_degree // 2 + 1):
            power = p1(p1(power))
            if j % 2 == 0:
                weight = (disp.lam / (2 * disp.m)) ** j / math.factorial(j)
                total = total + power * weight
        return total * (-1j * hbar * disp.ratio / disp.m)

    p0_p1 = p1_k = p0_k = 0.0
    for p in test_polys:
        ab = p0(p1(p))
        ba = p1(p0(p))
        p0_p1 = max(p0_p1, _relative(ab - ba, ab, ba))
        ab = p1(k(p))
        ba = k(p1(p))
        p1_k = max(p1_k, _relative(ab - ba + p * (1j * hbar), ab, ba))
        ab = p0(k(p))
        ba = k(p0(p))
        closed = p0_k_closed(p)
        p0_k = max(p0_k, _relative(ab - ba - closed, ab, ba, closed))
    logger.debug(f"commutator residuals {p0_p1}, {p1_k}, {p0_k}")
    return CommutatorReport(p0_p1, p1_k, p0_k, BOOST_GROUPING)


def boost_grouping_report(disp: DispersionOperator, n_max: int = 7) -> pd.DataFrame:
    """Relative residual of K H_n = H_(n+1) for n = 0..n_max under the
    cosh grouping of the boost
    """
    rows = []
    for n in range(n_max + 1):
        boosted = boost_apply(qkf_polynomial(n, disp), disp)
        target = qkf_polynomial(n + 1, disp)
        rows.append(
            {
                "n": n,
                "residual": _relative(boosted - target, boosted, target),
                "grouping": BOOST_GROUPING,
            }
        )
    return pd.DataFrame(rows)


def monomial_basis(max_weight: int = 10) -> list[BivarPolynomial]:
    """x^i t^j with i + 2j <= max_weight"""
    return [
        BivarPolynomial.monomial(i, j)
        for j in range(max_weight // 2 + 1)
        for i in range(max_weight - 2 * j + 1)
    ]


def schrodinger_polynomial(
    n: int, hbar: float = 1.0, m: float = 1.0
) -> BivarPolynomial:
    """Undeformed solution H_n^(S) = sum n!/((n-2k)! k!) (i hbar t/(2m))^k x^(n-2k)"""
    if n < 0:
        raise DomainError(f"Polynomial degree must be nonnegative, got {n}")
    c = np.zeros((n + 1, n // 2 + 1), dtype=complex)
    for k in range(n // 2 + 1):
        c[n - 2 * k, k] = math.factorial(n) / (
            math.factorial(n - 2 * k) * math.factorial(k)
        ) * (1j * hbar / (2 * m)) ** k
    return BivarPolynomial(c, {"hbar": hbar, "lambda": 0.0, "m": m})


def schrodinger_hermite_value(n: int, x, t, hbar: float = 1.0, m: float = 1.0):
    """H_n^(S)(x, t) as s^n H_n(x / (2 s)) with s^2 = -i hbar t/(2m)"""
    s = np.sqrt(np.asarray(-1j * hbar * t / (2 * m), dtype=complex))
    if np.all(s == 0):
        return np.asarray(x, dtype=complex) ** n
    return s**n * herm.hermval(x / (2 * s), [0] * n + [1])


def listed_polynomial(n: int, disp: DispersionOperator) -> BivarPolynomial:
    """The closed forms of H_0..H_6 as tabulated by hand, H_6 with its printed
    extra term 30 i (hbar ratio/m)(lambda^2 hbar^4/m^2) t
    """
    if not 0 <= n <= 6:
        raise DomainError(f"Only H_0..H_6 are tabulated, got n={n}")
    c = np.zeros((n + 1, n // 2 + 1), dtype=complex)
    step = 1j * disp.hbar * disp.ratio / (2 * disp.m)
    for k in range(n // 2 + 1):
        c[n - 2 * k, k] = (
            math.factorial(n)
            / (math.factorial(n - 2 * k) * math.factorial(k))
            * step**k
        )
    if n == 6:
        c[0, 1] += (
            30j
            * (disp.hbar * disp.ratio / disp.m)
            * (disp.lam**2 * disp.hbar**4 / disp.m**2)
        )
    return BivarPolynomial(c, disp.params)


def h6_report(disp: DispersionOperator, atol: float = 1e-12) -> pd.DataFrame:
    """Coefficient-wise comparison of the generated and the tabulated H_6"""
    generated = qkf_polynomial(6, disp)
    listed = listed_polynomial(6, disp)
    shape = (7, 4)
    gen = generated._padded(shape)
    lst = listed._padded(shape)
    rows = [
        {
            "i": i,
            "j": j,
            "generated_re": gen[i, j].real,
            "generated_im": gen[i, j].imag,
            "listed_re": lst[i, j].real,
            "listed_im": lst[i, j].imag,
            "abs_diff": abs(gen[i, j] - lst[i, j]),
        }
        for i in range(shape[0])
        for j in range(shape[1])
        if gen[i, j] != 0 or lst[i, j] != 0
    ]
    report = pd.DataFrame(rows)
    report["match"] = report["abs_diff"] <= atol * max(1.0, generated.max_abs())
    return report


def complex_velocity(poly: BivarPolynomial, x, t, disp: DispersionOperator):
    """V = -i (hbar/m) d_x ln(psi), evaluated at sample points"""
    value = poly(x, t)
    if np.any(value == 0):
        raise DomainError("The polynomial vanishes at a sample point")
    return -1j * disp.hbar / disp.m * poly.dx()(x, t) / value


def polynomial_roots(
    coeffs: np.ndarray,
    rng: np.random.Generator,
    *,
    tol: float = 1e-10,
    max_iter: int = 500,
) -> np.ndarray:
    """All complex roots of sum c_k x^k by simultaneous (Aberth) iteration

    Starting points lie on a randomly rotated circle of radius
    1 + max|c_k/c_n|.  Roots are polished with Newton steps and accepted when
    |p(z)| <= tol * sum |c_k| |z|^k.

    Raises:
        NoConvergence: if any root misses the residual bound
    """
    c = np.asarray(coeffs, dtype=complex)
    nonzero = np.flatnonzero(c != 0)
    if nonzero.size == 0:
        raise DomainError("The zero polynomial has no isolated roots")
    c = c[nonzero[0] : nonzero[-1] + 1]
    at_origin = np.zeros(nonzero[0], dtype=complex)
    degree = len(c) - 1
    if degree == 0:
        return at_origin

    radius = 1 + np.max(np.abs(c[:-1] / c[-1]))
    angles = 2 * np.pi * np.arange(degree) / degree + rng.uniform(0, 2 * np.pi / degree)
    z = radius * np.exp(1j * (angles + rng.uniform(-0.1, 0.1, degree) / degree))
    dc = P.polyder(c)
    with np.errstate(divide="ignore", invalid="ignore"):
        for iteration in range(max_iter):
            p = P.polyval(z, c)
            dp = P.polyval(z, dc)
            ratio = np.where(dp != 0, p / dp, 0)
            gaps = z[:, None] - z[None, :]
            np.fill_diagonal(gaps, 1)
            repulsion = 1 / gaps
            np.fill_diagonal(repulsion, 0)
            step = ratio / (1 - ratio * repulsion.sum(axis=1))
            step = np.where(np.isfinite(step), step, 0)
            z = z - step
            if np.all(np.abs(step) <= 1e-15 * (1 + np.abs(z))):
                break
        logger.debug(f"Aberth iteration stopped after {iteration + 1} sweeps")
        for _ in range(3):
            dp = P.polyval(z, dc)
            z = np.where(dp != 0, z - P.polyval(z, c) / dp, z)
    scale = P.polyval(np.abs(z), np.abs(c))
    residual = np.abs(P.polyval(z, c)) / scale
    if np.any(residual > tol):
        raise NoConvergence(
            f"Root polishing stalled: worst relative residual {residual.max():.3e}"
        )
    return np.concatenate([at_origin, z])


class RootSlice(NamedTuple):
    """Roots of one time slice; ``roots`` is None when polishing stalled"""

    t: float
    roots: Optional[np.ndarray]
    error: Optional[str] = None

    @property
    def converged(self) -> bool:
        return self.roots is not None


def zeros_over_time(
    n: int,
    disp: DispersionOperator,
    times: Sequence[float],
    seed: int = 0,
    *,
    tol: float = 1e-10,
    max_iter: int = 500,
) -> list[RootSlice]:
    """Roots in x of H_n(x, t) for each t, each slice sorted by (Re, Im)

    A slice whose roots miss the residual bound is kept with its error
    message; the other slices are unaffected.
    """
    if n < 1:
        raise DomainError(f"Need a polynomial of degree n >= 1, got {n}")
    poly = qkf_polynomial(n, disp)
    rng = np.random.default_rng(seed)
    slices = []
    for t in times:
        try:
            roots = polynomial_roots(poly.x_slice(t), rng, tol=tol, max_iter=max_iter)
        except NoConvergence as exc:
            logger.warning(f"Zeros at t={t} not found: {exc}")
            slices.append(RootSlice(t, None, str(exc)))
        else:
            slices.append(RootSlice(t, np.sort(roots)))
    return slices


def roots_frame(slices: Sequence[RootSlice]) -> pd.DataFrame:
    """One row per root; a stalled slice gives a single row with its status"""
    rows: list[dict[str, Any]] = []
    for s in slices:
        if s.roots is None:
            rows.append(
                {"t": s.t, "k": None, "re": np.nan, "im": np.nan, "status": s.error}
            )
            continue
        rows.extend(
            {"t": s.t, "k": k, "re": z.real, "im": z.imag, "status": "ok"}
            for k, z in enumerate(s.roots)
        )
    return pd.DataFrame(rows, columns=["t", "k", "re", "im", "status"])


@dataclass(frozen=True)
class BurgersProfile:
    """Initial velocity f of the classical q-Burgers equation.

    ``x_range`` is where f is sampled to bracket the velocity.
    """

    f: Callable[[float], float]
    lam: float = 0.0
    m: float = 1.0
    x_range: tuple[float, float] = (-10.0, 10.0)

    def speed_factor(self, v):
        """(lambda/sinh lambda) cosh(lambda m v^2/2)"""
        ratio = 1.0 if self.lam == 0 else self.lam / math.sinh(self.lam)
        return ratio * np.cosh(self.lam * self.m * np.asarray(v) ** 2 / 2)

    def sample(self, x: np.ndarray) -> np.ndarray:
        return np.array([float(self.f(xi)) for xi in x])


class BurgersSolution(NamedTuple):
    velocity: float
    multivalued: bool
    roots: tuple[float, ...]


def burgers_solve(
    profile: BurgersProfile, x: float, t: float, points: int = 512
) -> BurgersSolution:
    """Solve V = f(x - V t (lambda/sinh lambda) cosh(lambda m V^2/2)) for V.

    G(V) is scanned on [min f - 1, max f + 1] and every sign change is refined
    with Brent's method.  Past a shock several roots exist; the one closest to
    f(x) is returned and ``multivalued`` is set.

    Raises:
        NoRoot: if the scan finds no sign change
    """
    if t < 0:
        raise DomainError(f"Time must be nonnegative, got {t}")
    if t == 0:
        v = float(profile.f(x))
        return BurgersSolution(v, False, (v,))

    def g(v: float) -> float:
        return v - float(profile.f(x - v * t * float(profile.speed_factor(v))))

    fs = profile.sample(np.linspace(*profile.x_range, points))
    grid = np.linspace(fs.min() - 1, fs.max() + 1, points)
    values = np.array([g(v) for v in grid])
    roots = [float(v) for v, gv in zip(grid, values) if gv == 0]
    for k in np.flatnonzero(values[:-1] * values[1:] < 0):
        roots.append(brentq(g, grid[k], grid[k + 1], xtol=1e-14))
    if not roots:
        raise NoRoot(f"No velocity solves the implicit relation at x={x}, t={t}")
    roots.sort()
    target = float(profile.f(x))
    best = min(roots, key=lambda v: abs(v - target))
    return BurgersSolution(best, len(roots) > 1, tuple(roots))


def shock_time(
    profile: BurgersProfile,
    x_range: tuple[float, float],
    resolution: int = 2048,
    t_max: float = 100.0,
    tol: float = 1e-6,
) -> float:
    """First time the characteristic map x0 -> x0 + t f(x0) c(f(x0)) folds

    Raises:
        NoShock: if the sampled map is still increasing at t_max
    """
    x0 = np.linspace(*x_range, resolution + 1)
    fx = profile.sample(x0)
    speed = fx * profile.speed_factor(fx)

    def folded(t: float) -> bool:
        return bool(np.any(np.diff(x0 + t * speed) <= 0))

    if not folded(t_max):
        raise NoShock(f"Characteristics do not cross on {x_range} before t={t_max}")
    lo, hi = 0.0, t_max
    while hi - lo > tol * max(1.0, hi):
        mid = (lo + hi) / 2
        if folded(mid):
            hi = mid
        else:
            lo = mid
    return hi
