"""
Gauge Effective Action Module - Green's functions, mean-field potential,
semantic current, Coulomb-gauge check and per-term Lagrangian breakdowns.

Conventions:
- The semantic current J_i = psi* d_i psi - psi d_i psi* is purely
  imaginary; CurrentField stores its imaginary part 2 Im(psi* d_i psi).
- The coupling g is fixed to 1 and only the spatial field strength F_ij
  enters, since A is a static input.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gamma as gamma_fn

from config import COULOMB_MAX_CELLS
from utils import SemwaveError
from wave_dynamics import (
    DerivativeScheme, Grid, WaveField, partial_derivative, read_grid_array, write_grid_array,
)

logger = logging.getLogger(__name__)

TOTAL_TOL = 1e-10
AXIS_NAMES = ("x", "y", "z")
COULOMB_BLOCK_ROWS = 256

TERM_NAMES = (
    "time_kinetic",
    "gradient",
    "scalar_coupling",
    "current_interaction",
    "density_interaction",
    "field_strength",
    "nonlinear",
    "coulomb_nonlocal",
)


class GreensSign(Enum):
    STANDARD = "standard"
    PAPER = "paper"


@dataclass(frozen=True)
class GreensSpec:
    """
    Laplacian Green's function in N dimensions.
    The printed sign flips the N >= 3 kernel; it does not satisfy
    -lap G = delta and is offered for comparison only.
    """
    N: int
    sign: GreensSign = GreensSign.STANDARD

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise GaugeError(f"Green's function dimension must be an integer >= 1, got {self.N}")
        object.__setattr__(self, "sign", GreensSign(self.sign))


@dataclass(eq=False)
class VectorPotentialField:
    """Spatial components A_i on a grid."""
    grid: Grid
    components: tuple

    def __post_init__(self):
        if len(self.components) != self.grid.ndim:
            raise GaugeError(f"need {self.grid.ndim} components, got {len(self.components)}")
        components = []
        for i, c in enumerate(self.components):
            c = np.asarray(c, dtype=np.float64)
            if c.size != self.grid.size:
                raise GaugeError(f"component {AXIS_NAMES[i]} does not match grid {self.grid.shape}")
            if not np.all(np.isfinite(c)):
                raise GaugeError(f"component {AXIS_NAMES[i]} is not finite")
            components.append(c.reshape(self.grid.shape))
        self.components = tuple(components)

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorPotentialField":
        return cls(grid, tuple(np.zeros(grid.shape) for _ in range(grid.ndim)))

    def squared(self) -> np.ndarray:
        return sum(c * c for c in self.components)


@dataclass(eq=False)
class CurrentField:
    """Imaginary parts of the semantic current components."""
    grid: Grid
    components: tuple

    def values(self, axis: int) -> np.ndarray:
        """The purely imaginary current component J_axis."""
        return 1j * self.components[axis]


class NonlinearityKind(Enum):
    NONE = "none"
    CUBIC = "cubic"
    MEXICAN_HAT = "mexican_hat"


@dataclass(frozen=True)
class Nonlinearity:
    """Self-interaction term of the Lagrangian."""
    kind: NonlinearityKind = NonlinearityKind.NONE
    gamma: float = 0.0
    mu2: float = 0.0
    lam: float = 0.0

    @classmethod
    def none(cls) -> "Nonlinearity":
        return cls()

    @classmethod
    def cubic(cls, gamma: float) -> "Nonlinearity":
        return cls(NonlinearityKind.CUBIC, gamma=gamma)

    @classmethod
    def mexican_hat(cls, mu2: float, lam: float) -> "Nonlinearity":
        return cls(NonlinearityKind.MEXICAN_HAT, mu2=mu2, lam=lam)

    def density(self, rho: np.ndarray) -> Optional[np.ndarray]:
        if self.kind is NonlinearityKind.CUBIC:
            return -0.5 * self.gamma * rho * rho
        if self.kind is NonlinearityKind.MEXICAN_HAT:
            return self.mu2 * rho - 2.0 * self.lam * rho * rho
        return None


@dataclass(frozen=True)
class ActionBreakdown:
    """Named Lagrangian (or action) terms; absent terms are omitted."""
    terms: Dict[str, float]
    total: float

    def __post_init__(self):
        unknown = set(self.terms) - set(TERM_NAMES)
        if unknown:
            raise GaugeError(f"unknown terms: {sorted(unknown)}")
        expected = math.fsum(self.terms.values())
        scale = max(1.0, math.fsum(abs(v) for v in self.terms.values()))
        if abs(self.total - expected) > TOTAL_TOL * scale:
            raise GaugeError(f"total {self.total!r} differs from the term sum {expected!r}")

    @classmethod
    def from_terms(cls, terms: Dict[str, float]) -> "ActionBreakdown":
        ordered = {name: float(terms[name]) for name in TERM_NAMES if name in terms}
        return cls(terms=ordered, total=math.fsum(ordered.values()))

    def to_dict(self) -> Dict:
        return {"terms": dict(self.terms), "total": self.total}


def greens_function(spec: GreensSpec, r: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    Fundamental solution of -lap G = delta in N dimensions.

    Args:
        spec: Dimension and sign convention
        r: Distance(s), all > 0

    Returns:
        G(r): Gamma(N/2) / (2 (N-2) pi^(N/2) r^(N-2)) for N >= 3,
        -ln(r) / (2 pi) for N = 2, -r / 2 for N = 1
    """
    r_arr = np.asarray(r, dtype=np.float64)
    if not np.all(np.isfinite(r_arr)) or np.any(r_arr <= 0):
        raise GaugeError("Green's function needs distances r > 0")
    n = spec.N
    if n == 1:
        value = -0.5 * r_arr
    elif n == 2:
        value = -np.log(r_arr) / (2.0 * math.pi)
    else:
        value = gamma_fn(n / 2.0) / (2.0 * (n - 2) * math.pi ** (n / 2.0) * r_arr ** (n - 2))
        if spec.sign is GreensSign.PAPER:
            value = -value
    if np.ndim(r) == 0:
        return float(value)
    return value


def _check_spec(spec: GreensSpec, grid: Grid) -> None:
    if spec.N != grid.ndim:
        raise GaugeError(f"Green's function dimension {spec.N} does not match the {grid.ndim}D grid")


def solve_scalar_potential(density: np.ndarray, grid: Grid,
                           spec: Optional[GreensSpec] = None) -> np.ndarray:
    """
    Solve -lap A0 = density on the periodic grid.

    The periodic problem only has a solution for a neutral source, so the
    mean density is removed first; the constant in A0 is fixed by a zero
    spatial mean. The solution is linear in the density.

    Args:
        density: Non-negative charge density |psi|^2 shaped like the grid
        grid: 1D, 2D or 3D grid
        spec: Sign convention (dimension must match the grid)

    Returns:
        A0 sampled on the grid
    """
    spec = spec or GreensSpec(grid.ndim)
    _check_spec(spec, grid)
    rho = np.asarray(density, dtype=np.float64)
    if rho.size != grid.size:
        raise GaugeError(f"density has {rho.size} samples, grid has {grid.size}")
    rho = rho.reshape(grid.shape)
    if not np.all(np.isfinite(rho)):
        raise GaugeError("density must be finite")
    if np.any(rho < 0):
        raise GaugeError("density must be non-negative")

    k2 = grid.k_squared()
    rho_hat = np.fft.fftn(rho)
    k2[(0,) * grid.ndim] = 1.0
    a0_hat = rho_hat / k2
    a0_hat[(0,) * grid.ndim] = 0.0
    a0 = np.real(np.fft.ifftn(a0_hat))
    if spec.sign is GreensSign.PAPER and spec.N >= 3:
        a0 = -a0
    return a0


def semantic_current(field: WaveField,
                     scheme: DerivativeScheme = DerivativeScheme.SPECTRAL) -> CurrentField:
    """
    Semantic current J_i = psi* d_i psi - psi d_i psi* = 2i Im(psi* d_i psi).

    Args:
        field: Wave field
        scheme: Differencing scheme

    Returns:
        CurrentField holding Im(J_i) per axis
    """
    psi = field.samples
    components = tuple(
        2.0 * np.imag(np.conj(psi) * partial_derivative(psi, field.grid, i, scheme))
        for i in range(field.grid.ndim)
    )
    return CurrentField(field.grid, components)


def divergence(A: VectorPotentialField,
               scheme: DerivativeScheme = DerivativeScheme.SPECTRAL) -> np.ndarray:
    """Pointwise divergence d_i A_i."""
    return sum(np.real(partial_derivative(c, A.grid, i, scheme))
               for i, c in enumerate(A.components))


def divergence_check(A: VectorPotentialField, tol: float,
                     scheme: DerivativeScheme = DerivativeScheme.SPECTRAL) -> Tuple[float, bool]:
    """
    Coulomb-gauge check.

    Returns:
        (max |d_i A_i|, passed) with passed iff the maximum is below tol
    """
    worst = float(np.max(np.abs(divergence(A, scheme))))
    return worst, worst < tol


def coulomb_from_density(density: np.ndarray, grid: Grid, spec: GreensSpec) -> float:
    """
    -1/2 sum_{x != x'} rho(x) G(|x - x'|) rho(x') dV^2 with minimum-image
    distances on the periodic grid. The singular diagonal is dropped.

    Args:
        density: Charge density shaped like the grid
        grid: Periodic grid of at most COULOMB_MAX_CELLS cells
        spec: Green's function (dimension must match the grid)

    Returns:
        Interaction energy
    """
    _check_spec(spec, grid)
    if grid.size > COULOMB_MAX_CELLS:
        raise GaugeError(f"Coulomb sum limited to {COULOMB_MAX_CELLS} cells, grid has {grid.size}")
    rho = np.asarray(density, dtype=np.float64).reshape(-1)
    if rho.size != grid.size:
        raise GaugeError(f"density has {rho.size} samples, grid has {grid.size}")

    occupied = np.flatnonzero(rho)
    if occupied.size < 2:
        return 0.0
    points = np.stack([x.reshape(-1) for x in grid.mesh()], axis=1)[occupied]
    charges = rho[occupied]
    extents = np.asarray(grid.extents)

    block_sums = []
    for start in range(0, occupied.size, COULOMB_BLOCK_ROWS):
        rows = slice(start, start + COULOMB_BLOCK_ROWS)
        delta = points[rows, None, :] - points[None, :, :]
        delta -= extents * np.round(delta / extents)
        r = np.sqrt(np.sum(delta * delta, axis=-1))
        diagonal = r == 0.0
        r[diagonal] = 1.0
        kernel = greens_function(spec, r)
        kernel[diagonal] = 0.0
        block_sums.append(float(np.sum(charges[rows, None] * kernel * charges[None, :])))
    return -0.5 * math.fsum(block_sums) * grid.cell_volume ** 2


def coulomb_interaction(field: WaveField, spec: GreensSpec) -> float:
    """Nonlocal Coulomb term of the charge density |psi|^2."""
    return coulomb_from_density(field.density(), field.grid, spec)


def _check_grid(grid: Grid, other: Grid, what: str) -> None:
    if other != grid:
        raise GaugeError(f"{what} grid does not match the field grid")


def _integrate(density: np.ndarray, grid: Grid) -> float:
    return float(np.sum(density) * grid.cell_volume)


def lagrangian_terms(field_now: WaveField, field_prev: Optional[WaveField] = None,
                     dt: Optional[float] = None, A0: Optional[np.ndarray] = None,
                     A: Optional[VectorPotentialField] = None,
                     nonlinearity: Nonlinearity = Nonlinearity(),
                     spec: Optional[GreensSpec] = None, include_nonlocal: bool = False,
                     scheme: DerivativeScheme = DerivativeScheme.SPECTRAL,
                     field_next: Optional[WaveField] = None) -> ActionBreakdown:
    """
    Integrated Lagrangian terms of one field configuration.

    The time derivative is the backward difference to field_prev; without
    field_prev, field_next gives a forward difference; with neither the
    time-kinetic term is absent. The same differencing scheme feeds the
    gradient and current terms.

    Args:
        field_now: Field at the evaluation time
        field_prev: Field one step earlier
        dt: Step between the snapshots
        A0: Scalar potential on the grid
        A: Vector potential
        nonlinearity: Self-interaction form
        spec: Green's function for the nonlocal term
        include_nonlocal: Add the Coulomb term
        scheme: Spatial differencing scheme
        field_next: Field one step later

    Returns:
        ActionBreakdown of the present terms
    """
    grid = field_now.grid
    psi = field_now.samples
    rho = field_now.density()
    terms: Dict[str, float] = {}

    neighbour = field_prev if field_prev is not None else field_next
    if neighbour is not None:
        _check_grid(grid, neighbour.grid, "neighbouring snapshot")
        if dt is None or not dt > 0:
            raise GaugeError(f"time-kinetic term needs dt > 0, got {dt}")
        if field_prev is not None:
            dpsi_dt = (psi - field_prev.samples) / dt
        else:
            dpsi_dt = (field_next.samples - psi) / dt
        # (i/2)(psi* d0 psi - psi d0 psi*) = -Im(psi* d0 psi)
        terms["time_kinetic"] = _integrate(-np.imag(np.conj(psi) * dpsi_dt), grid)

    derivatives = [partial_derivative(psi, grid, i, scheme) for i in range(grid.ndim)]
    terms["gradient"] = _integrate(-0.5 * sum(np.abs(d) ** 2 for d in derivatives), grid)

    if A0 is not None:
        a0 = np.asarray(A0, dtype=np.float64)
        if a0.shape != grid.shape:
            raise GaugeError(f"A0 shape {a0.shape} does not match grid {grid.shape}")
        terms["scalar_coupling"] = _integrate(a0 * rho, grid)

    if A is not None:
        _check_grid(grid, A.grid, "vector potential")
        # -(i/2) A_i J_i with J_i = 2i Im(psi* d_i psi)
        current = sum(a * np.imag(np.conj(psi) * d) for a, d in zip(A.components, derivatives))
        terms["current_interaction"] = _integrate(current, grid)
        terms["density_interaction"] = _integrate(-0.5 * A.squared() * rho, grid)
        strength = np.zeros(grid.shape)
        for i in range(grid.ndim):
            for j in range(i + 1, grid.ndim):
                f_ij = (np.real(partial_derivative(A.components[j], grid, i, scheme))
                        - np.real(partial_derivative(A.components[i], grid, j, scheme)))
                strength = strength + f_ij * f_ij
        # -1/4 F_ij F_ij over all ordered pairs
        terms["field_strength"] = _integrate(-0.5 * strength, grid)

    nonlinear = nonlinearity.density(rho)
    if nonlinear is not None:
        terms["nonlinear"] = _integrate(nonlinear, grid)

    if include_nonlocal:
        terms["coulomb_nonlocal"] = coulomb_interaction(field_now, spec or GreensSpec(grid.ndim))

    return ActionBreakdown.from_terms(terms)


def effective_action(trajectory: Sequence[WaveField], A0: Optional[np.ndarray] = None,
                     A: Optional[VectorPotentialField] = None,
                     nonlinearity: Nonlinearity = Nonlinearity(),
                     spec: Optional[GreensSpec] = None, include_nonlocal: bool = False,
                     scheme: DerivativeScheme = DerivativeScheme.SPECTRAL
                     ) -> Tuple[ActionBreakdown, float]:
    """
    Trapezoidal time integral of the Lagrangian along a trajectory.

    Snapshot i > 0 uses the backward difference to i - 1; the first
    snapshot uses the forward difference to the second.

    Args:
        trajectory: At least two snapshots with uniformly spaced times
        A0, A, nonlinearity, spec, include_nonlocal, scheme: As for lagrangian_terms

    Returns:
        (per-term accumulated action, total action)
    """
    snapshots = list(trajectory)
    if len(snapshots) < 2:
        raise GaugeError(f"effective action needs at least 2 snapshots, got {len(snapshots)}")
    times = np.array([s.time for s in snapshots], dtype=np.float64)
    steps = np.diff(times)
    dt = float(steps[0])
    if not dt > 0:
        raise GaugeError("snapshot times must increase")
    if np.any(np.abs(steps - dt) > 1e-9 * max(1.0, abs(dt))):
        raise GaugeError("snapshot times must be uniformly spaced")

    weights = np.full(len(snapshots), dt)
    weights[0] = weights[-1] = 0.5 * dt

    accumulated: Dict[str, List[float]] = {}
    for i, snapshot in enumerate(snapshots):
        breakdown = lagrangian_terms(
            snapshot,
            field_prev=snapshots[i - 1] if i > 0 else None,
            field_next=snapshots[1] if i == 0 else None,
            dt=dt, A0=A0, A=A, nonlinearity=nonlinearity, spec=spec,
            include_nonlocal=include_nonlocal, scheme=scheme,
        )
        for name, value in breakdown.terms.items():
            accumulated.setdefault(name, []).append(weights[i] * value)

    action = ActionBreakdown.from_terms({name: math.fsum(v) for name, v in accumulated.items()})
    logger.debug("effective action over %d snapshots: %r", len(snapshots), action.total)
    return action, action.total


def save_vector_potential(A: VectorPotentialField, stem: str) -> List[str]:
    """Write each component as <stem>_<axis>.json + .bin."""
    paths = []
    for i, component in enumerate(A.components):
        paths.extend(write_grid_array(f"{stem}_{AXIS_NAMES[i]}", A.grid, component,
                                      extra={"component": AXIS_NAMES[i]}))
    return paths


def load_vector_potential(stem: str) -> VectorPotentialField:
    """Read the components written by save_vector_potential."""
    grid, samples, _ = read_grid_array(f"{stem}_{AXIS_NAMES[0]}")
    components = [np.real(samples)]
    for i in range(1, grid.ndim):
        component_grid, samples, _ = read_grid_array(f"{stem}_{AXIS_NAMES[i]}")
        if component_grid != grid:
            raise GaugeError(f"component {AXIS_NAMES[i]} grid differs from component x")
        components.append(np.real(samples))
    return VectorPotentialField(grid, tuple(components))


class GaugeError(SemwaveError):
    """Raised for invalid gauge-sector inputs."""
    pass
