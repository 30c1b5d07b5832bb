from . import flows
from . import nls
from . import oscillators
from . import qcore
from . import qschrodinger
from ._typing import DecayViolation
from ._typing import DomainError
from ._typing import NegativeH
from ._typing import NoConvergence
from ._typing import NoRoot
from ._typing import NoShock
from ._typing import QoscError
from ._typing import QParameter
from ._typing import SeriesControl
from ._typing import Singularity
from ._typing import SingularH
from ._typing import SpectrumTable
from ._typing import TruncationWarning

try:
    from ._version import version as __version__  # noqa: F401
except ImportError:
    __version__ = "0.1.0"

__all__ = [
    "flows",
    "nls",
    "oscillators",
    "qcore",
    "qschrodinger",
    "DecayViolation",
    "DomainError",
    "NegativeH",
    "NoConvergence",
    "NoRoot",
    "NoShock",
    "QoscError",
    "QParameter",
    "SeriesControl",
    "Singularity",
    "SingularH",
    "SpectrumTable",
    "TruncationWarning",
]
