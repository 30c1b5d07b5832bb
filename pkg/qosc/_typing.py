import cmath
import math
from dataclasses import dataclass
from dataclasses import field
from fractions import Fraction
from typing import Any
from typing import Iterable
from typing import Mapping
from typing import Optional

import numpy as np
import pandas as pd


class QoscError(Exception):
    """Base class of every error raised by qosc"""


class DomainError(QoscError, ValueError):
    """An argument lies outside the domain where the quantity is defined"""


class NoConvergence(QoscError, RuntimeError):
    """A series or iteration did not reach its tolerance within its budget"""


class NoRoot(NoConvergence):
    pass


class NoShock(QoscError, RuntimeError):
    pass


class DecayViolation(DomainError):
    """A grid field does not decay at the grid ends"""


class Singularity(DomainError):
    pass


class SingularH(DomainError):
    pass


class NegativeH(DomainError):
    pass


class TruncationWarning(UserWarning):
    """A truncated image sum misses its requested boundary tolerance"""


@dataclass(frozen=True)
class QParameter:
    """Deformation data of a q-calculus.

    Arguments:
        lam: the real deformation for ``kind="real_q"`` (q = exp(lam)), or the
            angle pi/n for ``kind="root_of_unity"`` (q = exp(i lam)).
        q: the base itself
        kind: either "real_q" or "root_of_unity"
        n: order of the root of unity (q**(2n) = 1); None for real bases
    """

    lam: float
    q: complex
    kind: str = "real_q"
    n: Optional[int] = field(default=None, kw_only=True)

    def __post_init__(self):
        q = complex(self.q)
        if self.kind == "real_q":
            if q.imag != 0 or q.real <= 0:
                raise DomainError(f"Real base must be positive, got q={self.q}")
            if not math.isclose(q.real, math.exp(self.lam), rel_tol=1e-14):
                raise DomainError(
                    f"q={self.q} does not match exp(lambda) for lambda={self.lam}"
                )
        elif self.kind == "root_of_unity":
            if self.n is None or self.n < 1:
                raise DomainError(f"Root of unity needs a positive order, got {self.n}")
            if abs(q ** (2 * self.n) - 1) > 1e-14 * 2 * self.n:
                raise DomainError(f"q={self.q} is not a {2 * self.n}-th root of unity")
        else:
            raise DomainError(f"Unknown kind of deformation: {self.kind}")

    @classmethod
    def real(cls, lam: float) -> "QParameter":
        return cls(lam, complex(math.exp(lam)), "real_q")

    @classmethod
    def root_of_unity(cls, n: int) -> "QParameter":
        if n < 1:
            raise DomainError(f"Root of unity needs a positive order, got {n}")
        return cls(math.pi / n, cmath.exp(1j * math.pi / n), "root_of_unity", n=n)

    @property
    def is_real(self) -> bool:
        return self.kind == "real_q"

    def symmetric_number(self, n: float) -> float:
        """sinh(lam n)/sinh(lam) for a real base, sin(lam n)/sin(lam) on the circle"""
        if self.lam == 0:
            return float(n)
        if self.is_real:
            return math.sinh(self.lam * n) / math.sinh(self.lam)
        return math.sin(self.lam * n) / math.sin(self.lam)


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for infinite series.

    Arguments:
        tol: absolute size of the last retained term
        max_terms: number of terms after which the series gives up
    """

    tol: float = 1e-14
    max_terms: int = 512

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError(f"Series tolerance must be positive, got {self.tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be at least 1, got {self.max_terms}")


@dataclass(frozen=True)
class SpectrumTable:
    """Energy levels E_n of a quantized model, indexed contiguously from ``first``

    ``exact`` carries rational levels when the model has them.
    """

    levels: tuple[tuple[int, float], ...]
    model: str
    params: Mapping[str, Any] = field(default_factory=dict)
    formula: str = ""
    exact: Optional[tuple[Fraction, ...]] = None

    def __post_init__(self):
        indices = [n for n, _ in self.levels]
        if indices != list(range(self.first, self.first + len(indices))):
            raise DomainError(f"Spectrum indices are not contiguous: {indices}")

    @classmethod
    def from_energies(
        cls,
        energies: Iterable[float],
        model: str,
        params: Mapping[str, Any],
        formula: str,
        *,
        first: int = 0,
        exact: Optional[Iterable[Fraction]] = None,
    ) -> "SpectrumTable":
        levels = tuple((first + k, float(e)) for k, e in enumerate(energies))
        return cls(
            levels,
            model,
            dict(params),
            formula,
            None if exact is None else tuple(exact),
        )

    @property
    def first(self) -> int:
        return self.levels[0][0] if self.levels else 0

    @property
    def energies(self) -> np.ndarray:
        return np.array([e for _, e in self.levels], dtype=float)

    @property
    def indices(self) -> np.ndarray:
        return np.array([n for n, _ in self.levels], dtype=int)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"n": self.indices, "E": self.energies})

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.model,
            "params": dict(self.params),
            "formula": self.formula,
            "levels": [{"n": n, "E": e} for n, e in self.levels],
        }
