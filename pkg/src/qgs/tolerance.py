"""A single tolerance policy threaded through every module."""
import os
from dataclasses import dataclass, replace

ENV_VAR = "QGS_TOLERANCE"


@dataclass(frozen=True)
class Tolerance:
    # relative cutoff sigma_min <= rank * sigma_max for rank, kernels, exceptional points
    rank: float = 1e-10
    # absolute defects accepted for Hermitian / unitary inputs
    hermitian: float = 1e-9
    unitary: float = 1e-9
    # LU pivots below pivot * max|m| count as singular
    pivot: float = 1e-12
    # compatible star products with sigma_min below this are flagged
    ill_conditioned: float = 1e-6

    def with_rank(self, rank):
        return replace(self, rank=float(rank))


def default_tolerance():
    """Default policy, with the rank cutoff overridable from the environment."""
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == "":
        return Tolerance()
    value = float(raw)
    if not value > 0:
        raise ValueError(f"{ENV_VAR} must be positive, got {raw!r}")
    return Tolerance(rank=value)


def resolve(tol):
    if tol is None:
        return default_tolerance()
    if isinstance(tol, Tolerance):
        return tol
    return Tolerance(rank=float(tol))
