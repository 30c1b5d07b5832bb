"""The NLS hierarchy on a uniform grid.

Fields are carried as the doublet (psi, psibar) with psibar independent of
psi, so the recursion operator

    R = i sigma3 [[d + 2k^2 psi I psibar.,   -2k^2 psi I psi.   ],
                  [-2k^2 psibar I psibar., d + 2k^2 psibar I psi.]]

acts on it exactly as written.  ``I`` integrates from the left grid end and
``d`` is the spectral derivative, so every field must decay at both ends.
The N-th flow reads i sigma3 (psi, psibar)_t = R^N (psi, psibar).
"""
import logging
from dataclasses import dataclass
from typing import Callable
from typing import NamedTuple
from typing import Optional

import numpy as np
import pandas as pd
from scipy import fft
from scipy.integrate import cumulative_trapezoid

from ._typing import DecayViolation
from ._typing import DomainError

logger = logging.getLogger(__name__)

DECAY_TOL = 1e-8
MIN_POINTS = 16

Doublet = tuple[np.ndarray, np.ndarray]


def default_grid(points: int = 2048, length: float = 40.0) -> np.ndarray:
    """Periodic grid on [-length/2, length/2)"""
    if points < MIN_POINTS:
        raise DomainError(f"Grids need at least {MIN_POINTS} points, got {points}")
    return np.linspace(-length / 2, length / 2, points, endpoint=False)


@dataclass(frozen=True, eq=False)
class GridField:
    """The doublet (psi, psibar) sampled at x0 + k dx"""

    x0: float
    dx: float
    psi: np.ndarray
    psibar: np.ndarray
    decay_checked: bool = False

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=complex)
        psibar = np.asarray(self.psibar, dtype=complex)
        if psi.shape != psibar.shape or psi.ndim != 1:
            raise DomainError("psi and psibar must be 1-D arrays of the same length")
        if len(psi) < MIN_POINTS:
            raise DomainError(
                f"Grids need at least {MIN_POINTS} points, got {len(psi)}"
            )
        if not self.dx > 0:
            raise DomainError(f"Grid spacing must be positive, got {self.dx}")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "psibar", psibar)

    @classmethod
    def from_psi(cls, x: np.ndarray, psi: np.ndarray) -> "GridField":
        """Physical field with psibar = conj(psi)"""
        psi = np.asarray(psi, dtype=complex)
        return cls(float(x[0]), float(x[1] - x[0]), psi, psi.conj())

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(len(self.psi))

    @property
    def doublet(self) -> Doublet:
        return self.psi, self.psibar

    def with_doublet(self, psi: np.ndarray, psibar: np.ndarray) -> "GridField":
        return GridField(self.x0, self.dx, psi, psibar, self.decay_checked)

    def check_decay(self, tol: float = DECAY_TOL) -> "GridField":
        """Raises:
        DecayViolation: if |psi| or |psibar| at either end exceeds tol * max
        """
        for name, values in (("psi", self.psi), ("psibar", self.psibar)):
            peak = np.max(np.abs(values))
            ends = max(abs(values[0]), abs(values[-1]))
            if peak > 0 and ends > tol * peak:
                raise DecayViolation(
                    f"{name} does not decay at the grid ends: "
                    f"{ends:.3e} vs max {peak:.3e}"
                )
        return GridField(self.x0, self.dx, self.psi, self.psibar, True)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "x": self.x,
                "re_psi": self.psi.real,
                "im_psi": self.psi.imag,
                "re_psibar": self.psibar.real,
                "im_psibar": self.psibar.imag,
            }
        )

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "GridField":
        x = frame["x"].to_numpy()
        psi = frame["re_psi"].to_numpy() + 1j * frame["im_psi"].to_numpy()
        psibar = frame["re_psibar"].to_numpy() + 1j * frame["im_psibar"].to_numpy()
        return cls(float(x[0]), float(x[1] - x[0]), psi, psibar)


def _wavenumbers(n: int, dx: float) -> np.ndarray:
    return 2 * np.pi * fft.fftfreq(n, d=dx)


def derivative(field: np.ndarray, dx: float, order: int = 1) -> np.ndarray:
    """Spectral derivative on the periodic extension of the grid"""
    field = np.asarray(field, dtype=complex)
    n = len(field)
    if n < MIN_POINTS:
        raise DomainError(f"Grids need at least {MIN_POINTS} points, got {n}")
    symbol = (1j * _wavenumbers(n, dx)) ** order
    if order % 2 and n % 2 == 0:
        symbol[n // 2] = 0
    return fft.ifft(fft.fft(field) * symbol)


def antiderivative(
    field: np.ndarray, dx: float, method: str = "spectral"
) -> np.ndarray:
    """Integral from the left grid end, zero at the first grid point.

    ``method="spectral"`` integrates the zero-mean part in Fourier space and
    the mean linearly; ``method="trapezoid"`` is the composite trapezoid rule.
    """
    field = np.asarray(field, dtype=complex)
    if method == "trapezoid":
        return cumulative_trapezoid(field, dx=dx, initial=0)
    if method != "spectral":
        raise DomainError(f"Unknown integration method: {method}")
    n = len(field)
    mean = field.mean()
    k = _wavenumbers(n, dx)
    spectrum = fft.fft(field - mean)
    nonzero = k != 0
    spectrum[nonzero] /= 1j * k[nonzero]
    spectrum[~nonzero] = 0
    if n % 2 == 0:
        spectrum[n // 2] = 0
    primitive = fft.ifft(spectrum) + mean * dx * np.arange(n)
    return primitive - primitive[0]


def _apply_r(u1: np.ndarray, u2: np.ndarray, f: GridField, kappa: float) -> Doublet:
    psi, psibar = f.doublet
    k2 = 2 * kappa**2
    d1 = derivative(u1, f.dx)
    d2 = derivative(u2, f.dx)
    if kappa == 0:
        return 1j * d1, -1j * d2
    left = antiderivative(psibar * u1, f.dx)
    right = antiderivative(psi * u2, f.dx)
    m1 = d1 + k2 * psi * (left - right)
    m2 = d2 + k2 * psibar * (right - left)
    return 1j * m1, -1j * m2


def _checked(f: GridField) -> GridField:
    return f if f.decay_checked else f.check_decay()


def recursion_apply(f: GridField, kappa: float) -> GridField:
    """R applied to the doublet of f"""
    f = _checked(f)
    return f.with_doublet(*_apply_r(f.psi, f.psibar, f, kappa))


def _powers(f: GridField, kappa: float, top: int) -> list[Doublet]:
    # [R^0 u, R^1 u, ..., R^top u] with u = (psi, psibar)
    f = _checked(f)
    powers = [f.doublet]
    for _ in range(top):
        powers.append(_apply_r(*powers[-1], f, kappa))
    return powers


def _invert_sigma(v: Doublet) -> Doublet:
    # i sigma3 (a, b)_t = (v1, v2)
    return -1j * v[0], 1j * v[1]


def hierarchy_rhs(N: int, f: GridField, kappa: float) -> Doublet:
    """(psi_t, psibar_t) of the N-th flow"""
    if N < 1:
        raise DomainError(f"Flows are numbered from 1, got N={N}")
    return _invert_sigma(_powers(f, kappa, N)[-1])


def explicit_flow(N: int, f: GridField, kappa: float) -> np.ndarray:
    """psi_t of the flows N = 1..4 written out in local form"""
    psi, psibar = f.doublet
    dx = f.dx

    def d(v: np.ndarray, order: int = 1) -> np.ndarray:
        return derivative(v, dx, order)

    k2 = kappa**2
    dens = psi * psibar
    if N == 1:
        return d(psi)
    if N == 2:
        return 1j * (d(psi, 2) + 2 * k2 * dens * psi)
    if N == 3:
        return -(d(psi, 3) + 6 * k2 * dens * d(psi))
    if N == 4:
        psi_x = d(psi)
        psibar_x = d(psibar)
        nonlinear = (
            2 * psi_x * psibar_x * psi
            + 4 * dens * d(psi, 2)
            + d(psibar, 2) * psi**2
            + 3 * psibar * psi_x**2
        )
        return -1j * (d(psi, 4) + 2 * k2 * nonlinear + 6 * kappa**4 * dens**2 * psi)
    raise DomainError(f"Explicit flows are written out for N = 1..4, got N={N}")


def linear_hierarchy_rhs(N: int, f: GridField) -> Doublet:
    """The kappa = 0 flows as Fourier multipliers -i(-k)^N and i k^N"""
    k = _wavenumbers(len(f.psi), f.dx)
    psi_t = fft.ifft(-1j * (-k) ** N * fft.fft(f.psi))
    psibar_t = fft.ifft(1j * k**N * fft.fft(f.psibar))
    return psi_t, psibar_t


def qnls_rhs_order2(
    f: GridField, kappa: float, lam: float, hbar: float = 1.0, m: float = 1.0
) -> Doublet:
    """Flow of c R^2 + (lambda^2/6)(-c R^2 + c^3 R^6), c = hbar^2/(2m)"""
    c = hbar**2 / (2 * m)
    powers = _powers(f, kappa, 6)
    r2, r6 = powers[2], powers[6]
    weight = lam**2 / 6
    combined = tuple(
        c * a + weight * (-c * a + c**3 * b) for a, b in zip(r2, r6)
    )
    return _invert_sigma(combined)


def qnls_linear_multiplier(
    k: np.ndarray, lam: float, hbar: float = 1.0, m: float = 1.0, exact: bool = False
) -> np.ndarray:
    """Symbol of the kappa = 0 q-NLS dispersion on psi-hat

    The truncated symbol is c k^2 + (lambda^2/6)(-c k^2 + c^3 k^6); with
    ``exact`` it is the full sinh(lambda c k^2)/sinh(lambda).
    """
    c = hbar**2 / (2 * m)
    k = np.asarray(k, dtype=float)
    if exact:
        if lam == 0:
            return c * k**2
        return np.sinh(lam * c * k**2) / np.sinh(lam)
    return c * k**2 + lam**2 / 6 * (-c * k**2 + c**3 * k**6)


def soliton(
    x: np.ndarray,
    a: float,
    b: float = 0.0,
    x0: float = 0.0,
    phase: float = 0.0,
    kappa: float = 1.0,
    t: float = 0.0,
) -> GridField:
    """One-soliton (a/kappa) sech(a(x - 2bt - x0)) exp(i(bx + (a^2 - b^2)t + phase))"""
    if not a > 0 or not kappa > 0:
        raise DomainError(
            f"Solitons need a > 0 and kappa > 0, got a={a}, kappa={kappa}"
        )
    x = np.asarray(x, dtype=float)
    envelope = a / kappa / np.cosh(a * (x - 2 * b * t - x0))
    carrier = np.exp(1j * (b * x + (a**2 - b**2) * t + phase))
    return GridField.from_psi(x, envelope * carrier)


def soliton_time_derivative(
    x: np.ndarray,
    a: float,
    b: float = 0.0,
    x0: float = 0.0,
    phase: float = 0.0,
    kappa: float = 1.0,
    t: float = 0.0,
) -> np.ndarray:
    psi = soliton(x, a, b, x0, phase, kappa, t).psi
    s = a * (np.asarray(x, dtype=float) - 2 * b * t - x0)
    return psi * (2 * a * b * np.tanh(s) + 1j * (a**2 - b**2))


class LaxData(NamedTuple):
    """Coefficients of the time part J0 of the Zakharov-Shabat pair

    J1 = [[ip/2, -kappa^2 psibar], [psi, -ip/2]]
    J0 = [[-iA, -kappa^2 Cbar], [C, iA]]
    """

    p: float
    N: int
    C: GridField
    A: np.ndarray
    A_x: np.ndarray


def lax_coefficients(N: int, f: GridField, p: float, kappa: float) -> LaxData:
    """C_N = sum_k p^(N-k) R^(k-1) u and
    A_N = -p^N/2 - i kappa^2 I(psibar C - psi Cbar)
    """
    if N < 1:
        raise DomainError(f"Flows are numbered from 1, got N={N}")
    f = _checked(f)
    powers = _powers(f, kappa, N - 1)
    c1 = sum(p ** (N - k) * powers[k - 1][0] for k in range(1, N + 1))
    c2 = sum(p ** (N - k) * powers[k - 1][1] for k in range(1, N + 1))
    a_x = -1j * kappa**2 * (f.psibar * c1 - f.psi * c2)
    a = -(p**N) / 2 + antiderivative(a_x, f.dx)
    return LaxData(p, N, f.with_doublet(c1, c2), np.asarray(a, dtype=complex), a_x)


def _lax_matrices(f: GridField, lax: LaxData, kappa: float):
    half = 1j * lax.p / 2 * np.ones_like(f.psi)
    j1 = np.array([[half, -(kappa**2) * f.psibar], [f.psi, -half]])
    j0 = np.array([[-1j * lax.A, -(kappa**2) * lax.C.psibar], [lax.C.psi, 1j * lax.A]])
    return j1, j0


def zero_curvature_residual(
    f: GridField,
    p: float,
    kappa: float,
    *,
    N: int = 2,
    flow_order: Optional[int] = None,
) -> float:
    """Largest entry of d_t J1 - d_x J0 + [J1, J0] over the grid.

    d_t psi comes from the ``flow_order``-th flow (default N); d_x of the
    diagonal of J0 is taken from the integrand of A, the off-diagonal
    entries are differentiated spectrally.
    """
    lax = lax_coefficients(N, f, p, kappa)
    psi_t, psibar_t = hierarchy_rhs(flow_order or N, f, kappa)
    j1, j0 = _lax_matrices(f, lax, kappa)
    zero = np.zeros_like(f.psi)
    j1_t = np.array([[zero, -(kappa**2) * psibar_t], [psi_t, zero]])
    j0_x = np.array(
        [
            [-1j * lax.A_x, -(kappa**2) * derivative(lax.C.psibar, f.dx)],
            [derivative(lax.C.psi, f.dx), 1j * lax.A_x],
        ]
    )
    bracket = np.einsum("ijx,jkx->ikx", j1, j0) - np.einsum("ijx,jkx->ikx", j0, j1)
    residual = j1_t - j0_x + bracket
    worst = float(np.max(np.abs(residual)))
    logger.debug(f"zero curvature residual N={N}, flow={flow_order or N}: {worst:.3e}")
    return worst


def rk4_step(
    f: GridField, dt: float, rhs: Callable[[GridField], Doublet]
) -> GridField:
    """One classical Runge-Kutta step of the doublet"""

    def shifted(k: Doublet, scale: float) -> GridField:
        return f.with_doublet(f.psi + scale * k[0], f.psibar + scale * k[1])

    k1 = rhs(f)
    k2 = rhs(shifted(k1, dt / 2))
    k3 = rhs(shifted(k2, dt / 2))
    k4 = rhs(shifted(k3, dt))
    return f.with_doublet(
        f.psi + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
        f.psibar + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
    )


def mass(f: GridField) -> float:
    """Integral of psi psibar over the grid"""
    return float(np.real(np.sum(f.psi * f.psibar)) * f.dx)
