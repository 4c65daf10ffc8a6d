"""
Potential Landscape Module - Double-well and Mexican-hat potentials.
Evaluates the potentials, locates their minima and performs seeded
spontaneous symmetry breaking.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Union

import numpy as np

from utils import SemwaveError, make_rng

TWO_PI = 2.0 * math.pi

ArrayLike = Union[float, complex, np.ndarray]


@dataclass(frozen=True)
class DoubleWellParams:
    """V(x) = c (x^2 - v^2)^2, minima at x = +/- v."""
    c: float
    v: float

    def __post_init__(self):
        if not (self.c > 0 and self.v > 0):
            raise PotentialError(f"double-well needs c > 0 and v > 0, got c={self.c}, v={self.v}")

    @property
    def barrier_height(self) -> float:
        return self.c * self.v ** 4


@dataclass(frozen=True)
class MexicanHatParams:
    """V(psi) = -mu2 |psi|^2 + 2 lambda |psi|^4."""
    mu2: float
    lam: float

    def __post_init__(self):
        if not (self.mu2 > 0 and self.lam > 0):
            raise PotentialError(f"Mexican hat needs mu2 > 0 and lambda > 0, got {self.mu2}, {self.lam}")


@dataclass(frozen=True)
class VacuumState:
    """A point on the degenerate minimum circle."""
    magnitude: float
    theta: float

    @property
    def value(self) -> complex:
        return self.magnitude * complex(math.cos(self.theta), math.sin(self.theta))

    def to_dict(self) -> Dict:
        return {"magnitude": self.magnitude, "theta": self.theta}


class PotentialKind(Enum):
    DOUBLE_WELL = "double_well"
    MEXICAN_HAT = "mexican_hat"


@dataclass
class PotentialGrid:
    """Uniform samples of a potential along one axis."""
    x: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.x.size < 2 or self.x.size != self.values.size:
            raise PotentialError("potential grid needs >= 2 matching samples")

    def csv_header(self) -> List[str]:
        return ["x", "V(x)"]

    def to_rows(self):
        return [[float(a), float(b)] for a, b in zip(self.x, self.values)]

    def to_dict(self) -> Dict:
        return {"x": self.x.tolist(), "V": self.values.tolist()}


def double_well_eval(params: DoubleWellParams, x: ArrayLike) -> ArrayLike:
    """
    Double-well potential c (x^2 - v^2)^2; works on scalars and arrays.

    Args:
        params: Stiffness and well position
        x: Position(s)

    Returns:
        Potential value(s), all >= 0
    """
    return params.c * (np.square(x) - params.v ** 2) ** 2


def double_well_on_grid(params: DoubleWellParams, grid) -> np.ndarray:
    """Sample the double well on a 1D wave_dynamics Grid."""
    if grid.ndim != 1:
        raise PotentialError("double-well sampling needs a 1D grid")
    return double_well_eval(params, grid.axis(0))


def mexican_hat_eval(params: MexicanHatParams, psi: ArrayLike) -> ArrayLike:
    """
    Mexican-hat potential -mu2 |psi|^2 + 2 lambda |psi|^4; depends on |psi| only.

    Args:
        params: mu2 and lambda
        psi: Complex amplitude(s)

    Returns:
        Potential value(s)
    """
    u = np.abs(psi) ** 2
    return -params.mu2 * u + 2.0 * params.lam * u * u


def mexican_hat_gradient(params: MexicanHatParams, magnitude: ArrayLike) -> ArrayLike:
    """Radial derivative dV/d|psi| = -2 mu2 r + 8 lambda r^3."""
    r = np.asarray(magnitude, dtype=np.float64)
    return -2.0 * params.mu2 * r + 8.0 * params.lam * r ** 3


def vacuum_magnitude(params: MexicanHatParams) -> float:
    """
    Radius of the minimum circle of the implemented potential.

    Stationarity of -mu2 u + 2 lambda u^2 in u = |psi|^2 gives
    u = mu2 / (4 lambda).

    Args:
        params: mu2 and lambda

    Returns:
        sqrt(mu2 / (4 lambda))
    """
    return math.sqrt(params.mu2 / (4.0 * params.lam))


def paper_stated_magnitude(params: MexicanHatParams) -> float:
    """The stated radius sqrt(mu2 / (2 lambda)), kept for comparison only."""
    return math.sqrt(params.mu2 / (2.0 * params.lam))


def break_symmetry(params: MexicanHatParams, seed: int) -> VacuumState:
    """
    Pick one vacuum on the minimum circle.

    Args:
        params: Mexican-hat parameters
        seed: Seed of the Philox generator; equal seeds give equal angles

    Returns:
        VacuumState with the analytic radius and an angle uniform on [0, 2 pi)
    """
    rng = make_rng(seed)
    theta = TWO_PI * float(rng.random())
    if theta >= TWO_PI:
        theta = 0.0
    return VacuumState(magnitude=vacuum_magnitude(params), theta=theta)


def vacuum_diagnostics(params: MexicanHatParams, vacuum: VacuumState) -> Dict[str, float]:
    """Vacuum JSON payload: magnitude, theta and the stated radius."""
    return {
        "magnitude": vacuum.magnitude,
        "theta": vacuum.theta,
        "paper_stated_magnitude": paper_stated_magnitude(params),
        "potential_at_vacuum": float(mexican_hat_eval(params, vacuum.value)),
        "gradient_at_vacuum": float(mexican_hat_gradient(params, vacuum.magnitude)),
    }


def sample_grid(kind: Union[str, PotentialKind], params, lo: float, hi: float, n: int) -> PotentialGrid:
    """
    Sample a potential on n uniform points of [lo, hi], endpoints included.
    For the Mexican hat the abscissa is |psi| along the real axis.

    Args:
        kind: double_well or mexican_hat
        params: Matching parameter object
        lo: Lower end
        hi: Upper end
        n: Number of samples (>= 2)

    Returns:
        PotentialGrid
    """
    kind = PotentialKind(kind)
    if not lo < hi:
        raise PotentialError(f"invalid range [{lo}, {hi}]")
    if n < 2:
        raise PotentialError(f"need at least 2 samples, got {n}")
    x = np.linspace(lo, hi, n)
    if kind is PotentialKind.DOUBLE_WELL:
        values = double_well_eval(params, x)
    else:
        values = mexican_hat_eval(params, x.astype(np.complex128))
    return PotentialGrid(x=x, values=np.asarray(values, dtype=np.float64))


class PotentialError(SemwaveError):
    """Raised for invalid potential parameters or sampling requests."""
    pass
