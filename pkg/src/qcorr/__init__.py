"""Two-qubit open-system correlation toolkit.

Evolves two-qubit density matrices under a squeezed-thermal-bath
dissipative master equation or a QND dephasing channel and computes
entanglement, Bell-CHSH, teleportation and discord-type measures.
"""

from qcorr.errors import (
    DimensionMismatch,
    InvalidState,
    NotHermitian,
    NotPSD,
    OutOfRange,
    QcorrError,
    SeparationTooSmall,
    StepSizeTooLarge,
)
from qcorr.states import bell, product, werner
from qcorr.measures import CorrelationReport, correlation_report

__version__ = "0.1.0"

__all__ = [
    "CorrelationReport",
    "DimensionMismatch",
    "InvalidState",
    "NotHermitian",
    "NotPSD",
    "OutOfRange",
    "QcorrError",
    "SeparationTooSmall",
    "StepSizeTooLarge",
    "bell",
    "correlation_report",
    "product",
    "werner",
]
