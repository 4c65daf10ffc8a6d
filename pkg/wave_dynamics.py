"""
Wave Dynamics Module - Schrodinger evolution of semantic wave fields.
Split-step Fourier propagation on periodic 1D/2D grids, a finite-difference
eigensolver, tunneling measurement and norm (semantic charge) tracking.

Units: hbar = m = 1. The equation of motion is
    i dpsi/dt = -1/2 lap(psi) + V psi + gamma |psi|^2 psi
so gamma < 0 focuses and gamma > 0 defocuses.
"""

import json
import logging
import math
import os
from dataclasses import dataclass, field as dc_field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import eigsh

from config import MAX_2D_POINTS, RECORD_EVERY
from potential_landscape import DoubleWellParams, double_well_on_grid
from utils import SemwaveError

logger = logging.getLogger(__name__)

# Swing of the left-well occupancy around 1/2 that counts as an oscillation
OCCUPANCY_SWING = 0.05


class DerivativeScheme(Enum):
    SPECTRAL = "spectral"
    CENTRAL = "central"


@dataclass(frozen=True)
class Grid:
    """
    Periodic grid. Axis i holds counts[i] points origin[i] + j*h_i with
    h_i = extents[i] / counts[i]; the right endpoint is the periodic image
    of the left one and is not stored.

    Evolution runs on 1D and 2D grids; 3D grids serve the Poisson and
    Coulomb computations.
    """
    extents: tuple
    counts: tuple
    origins: Optional[tuple] = None

    def __post_init__(self):
        extents = tuple(float(e) for e in self.extents)
        counts = tuple(int(n) for n in self.counts)
        if len(extents) != len(counts) or len(counts) not in (1, 2, 3):
            raise GridError(f"grid must be 1D to 3D with matching extents/counts, got {extents}, {counts}")
        if any(e <= 0 or not math.isfinite(e) for e in extents):
            raise GridError(f"extents must be positive, got {extents}")
        if any(n < 2 for n in counts):
            raise GridError(f"each axis needs at least 2 points, got {counts}")
        if len(counts) > 1 and max(counts) > MAX_2D_POINTS:
            raise GridError(f"multi-dimensional grids are capped at {MAX_2D_POINTS} points per axis, got {counts}")
        origins = self.origins
        if origins is None:
            origins = tuple(-e / 2.0 for e in extents)
        origins = tuple(float(o) for o in origins)
        if len(origins) != len(counts):
            raise GridError("origins must match the grid dimension")
        object.__setattr__(self, "extents", extents)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "origins", origins)

    @property
    def ndim(self) -> int:
        return len(self.counts)

    @property
    def shape(self) -> tuple:
        return self.counts

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    @property
    def spacing(self) -> tuple:
        return tuple(e / n for e, n in zip(self.extents, self.counts))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis(self, i: int) -> np.ndarray:
        return self.origins[i] + self.spacing[i] * np.arange(self.counts[i])

    def mesh(self) -> List[np.ndarray]:
        return np.meshgrid(*(self.axis(i) for i in range(self.ndim)), indexing="ij")

    def wavenumbers(self, i: int) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.counts[i], d=self.spacing[i])

    def k_squared(self) -> np.ndarray:
        ks = np.meshgrid(*(self.wavenumbers(i) for i in range(self.ndim)), indexing="ij")
        return sum(k * k for k in ks)

    def to_dict(self) -> Dict:
        return {"dims": self.ndim, "extents": list(self.extents), "counts": list(self.counts),
                "origins": list(self.origins)}


@dataclass(eq=False)
class WaveField:
    """Complex samples on a grid at a given evolution time."""
    grid: Grid
    samples: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.size != self.grid.size:
            raise GridError(f"field has {samples.size} samples, grid has {self.grid.size}")
        samples = samples.reshape(self.grid.shape)
        if not np.all(np.isfinite(samples)):
            raise EvolutionError("field samples must be finite")
        self.samples = samples
        if not self.norm() > 0.0:
            raise EvolutionError("field norm must be positive")

    def density(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def norm(self) -> float:
        """Total charge sum |psi|^2 dV."""
        return float(np.sum(self.density()) * self.grid.cell_volume)

    def mean_position(self) -> List[float]:
        rho = self.density()
        total = np.sum(rho)
        return [float(np.sum(x * rho) / total) for x in self.grid.mesh()]


@dataclass
class EvolutionConfig:
    """Time stepping parameters for evolve."""
    dt: float
    steps: int
    gamma: float = 0.0
    potential: Optional[np.ndarray] = None
    record_every: int = RECORD_EVERY
    occupancy_split: Optional[float] = None
    keep_snapshots: bool = False

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise EvolutionError(f"dt must be positive, got {self.dt}")
        if self.steps < 0:
            raise EvolutionError(f"steps must be non-negative, got {self.steps}")
        if self.record_every < 1:
            raise EvolutionError(f"record_every must be >= 1, got {self.record_every}")
        if not math.isfinite(self.gamma):
            raise EvolutionError("gamma must be finite")
        if self.potential is not None:
            self.potential = np.asarray(self.potential, dtype=np.float64)
            if not np.all(np.isfinite(self.potential)):
                raise EvolutionError("potential must be finite")


@dataclass
class ObservableSeries:
    """Observables recorded along an evolution."""
    times: List[float]
    norm: List[float]
    energy: List[float]
    mean_position: List[List[float]]
    well_occupancy: Optional[Tuple[List[float], List[float]]] = None
    snapshots: List[WaveField] = dc_field(default_factory=list)

    def __post_init__(self):
        n = len(self.times)
        lengths = [len(self.norm), len(self.energy)] + [len(axis) for axis in self.mean_position]
        if self.well_occupancy is not None:
            lengths += [len(self.well_occupancy[0]), len(self.well_occupancy[1])]
        if any(length != n for length in lengths):
            raise EvolutionError("observable series lists must have equal lengths")
        if any(not v > 0 for v in self.norm):
            raise EvolutionError("norm entries must be positive")

    def __len__(self) -> int:
        return len(self.times)

    def csv_header(self) -> List[str]:
        axes = ["mean_x", "mean_y"][:len(self.mean_position)]
        return ["time", "norm", "energy"] + axes + ["p_left", "p_right"]

    def to_rows(self):
        for i, t in enumerate(self.times):
            row = [t, self.norm[i], self.energy[i]] + [axis[i] for axis in self.mean_position]
            if self.well_occupancy is None:
                row += [None, None]
            else:
                row += [self.well_occupancy[0][i], self.well_occupancy[1][i]]
            yield row

    def to_dict(self) -> Dict:
        payload = {"time": self.times, "norm": self.norm, "energy": self.energy,
                   "mean_position": self.mean_position}
        if self.well_occupancy is not None:
            payload["p_left"], payload["p_right"] = self.well_occupancy
        return payload


class ChargeVerdict(Enum):
    CONSERVED = "conserved"
    VIOLATED = "violated"


@dataclass(frozen=True)
class ChargeReport:
    """Relative norm drift along a series, judged at a tolerance."""
    max_relative_drift: float
    drifts: tuple
    verdict: ChargeVerdict
    tolerance: float
    offending_index: Optional[int] = None

    def to_dict(self) -> Dict:
        return {
            "max_relative_drift": self.max_relative_drift,
            "verdict": self.verdict.value,
            "tolerance": self.tolerance,
            "offending_index": self.offending_index,
        }


@dataclass(frozen=True)
class TunnelingResult:
    """Tunneling times from the spectrum and from a time-domain run."""
    t_measured: float
    t_spectral: float
    splitting: float
    return_time: float
    energies: tuple

    @property
    def relative_difference(self) -> float:
        return abs(self.t_measured - self.t_spectral) / self.t_spectral

    def to_dict(self) -> Dict:
        return {
            "T_measured": self.t_measured,
            "T_spectral": self.t_spectral,
            "delta_E": self.splitting,
            "return_time": self.return_time,
            "energies": list(self.energies),
            "relative_difference": self.relative_difference,
        }


def partial_derivative(samples: np.ndarray, grid: Grid, axis: int,
                       scheme: DerivativeScheme = DerivativeScheme.SPECTRAL) -> np.ndarray:
    """
    First derivative of periodic samples along one axis.

    Args:
        samples: Array shaped like the grid
        grid: Grid the samples live on
        axis: Axis index
        scheme: Spectral (exact for band-limited data) or second-order central

    Returns:
        Complex derivative array
    """
    scheme = DerivativeScheme(scheme)
    if scheme is DerivativeScheme.CENTRAL:
        h = grid.spacing[axis]
        return (np.roll(samples, -1, axis=axis) - np.roll(samples, 1, axis=axis)) / (2.0 * h)

    n = grid.counts[axis]
    k = grid.wavenumbers(axis)
    if n % 2 == 0:
        k[n // 2] = 0.0  # Nyquist mode has no odd derivative
    shape = [1] * grid.ndim
    shape[axis] = n
    return np.fft.ifft(1j * k.reshape(shape) * np.fft.fft(samples, axis=axis), axis=axis)


def gradient_squared(samples: np.ndarray, grid: Grid,
                     scheme: DerivativeScheme = DerivativeScheme.SPECTRAL) -> np.ndarray:
    """Pointwise sum over axes of |d_i psi|^2."""
    return sum(np.abs(partial_derivative(samples, grid, i, scheme)) ** 2 for i in range(grid.ndim))


def field_energy(field: WaveField, gamma: float = 0.0,
                 potential: Optional[np.ndarray] = None) -> float:
    """
    E = integral of (1/2 |grad psi|^2 + V |psi|^2 + gamma/2 |psi|^4) dV.
    """
    rho = field.density()
    density = 0.5 * gradient_squared(field.samples, field.grid) + 0.5 * gamma * rho * rho
    if potential is not None:
        density = density + potential * rho
    return float(np.sum(density) * field.grid.cell_volume)


def well_occupancy(field: WaveField, split: float) -> Tuple[float, float]:
    """
    Fraction of the norm on either side of a split coordinate.
    A sample lying exactly on the split counts half to each side.

    Args:
        field: 1D wave field
        split: Split coordinate

    Returns:
        (p_left, p_right), summing to 1
    """
    if field.grid.ndim != 1:
        raise GridError("well occupancy needs a 1D field")
    x = field.grid.axis(0)
    rho = field.density()
    weights = np.where(x < split, 1.0, np.where(x == split, 0.5, 0.0))
    total = float(np.sum(rho))
    p_left = float(np.sum(rho * weights)) / total
    return p_left, 1.0 - p_left


class SplitStepPropagator:
    """
    Second-order Strang splitting: half kinetic step in Fourier space,
    full potential + nonlinear step pointwise, half kinetic step.
    Every factor has unit modulus, so the norm is preserved up to round-off.
    """

    def __init__(self, grid: Grid, dt: float, gamma: float = 0.0,
                 potential: Optional[np.ndarray] = None):
        if grid.ndim > 2:
            raise GridError(f"evolution runs on 1D or 2D grids, got {grid.ndim}D")
        if potential is not None and tuple(np.shape(potential)) != grid.shape:
            raise GridError(f"potential shape {np.shape(potential)} does not match grid {grid.shape}")
        self.grid = grid
        self.dt = dt
        self.gamma = gamma
        self.potential = potential
        self.half_kinetic = np.exp(-1j * grid.k_squared() * dt / 4.0)
        self._potential_phase = None if potential is None else np.exp(-1j * potential * dt)

    def step(self, psi: np.ndarray) -> np.ndarray:
        psi = np.fft.ifftn(self.half_kinetic * np.fft.fftn(psi))
        if self._potential_phase is not None:
            psi = psi * self._potential_phase
        if self.gamma != 0.0:
            psi = psi * np.exp(-1j * self.gamma * np.abs(psi) ** 2 * self.dt)
        return np.fft.ifftn(self.half_kinetic * np.fft.fftn(psi))


def evolve(field: WaveField, config: EvolutionConfig) -> Tuple[WaveField, ObservableSeries]:
    """
    Evolve a field by config.steps split-step updates.

    Observables are recorded at the start, every record_every steps and at
    the final step. The norm is tracked, never forced.

    Args:
        field: Initial field
        config: Time stepping parameters

    Returns:
        (final field, recorded observables)
    """
    grid = field.grid
    propagator = SplitStepPropagator(grid, config.dt, config.gamma, config.potential)
    track_occupancy = config.occupancy_split is not None
    if track_occupancy and grid.ndim != 1:
        raise GridError("occupancy tracking needs a 1D grid")

    times, norms, energies = [], [], []
    means: List[List[float]] = [[] for _ in range(grid.ndim)]
    left, right = [], []
    snapshots: List[WaveField] = []

    def record(current: WaveField) -> None:
        times.append(current.time)
        norms.append(current.norm())
        energies.append(field_energy(current, config.gamma, config.potential))
        for axis, value in zip(means, current.mean_position()):
            axis.append(value)
        if track_occupancy:
            p_left, p_right = well_occupancy(current, config.occupancy_split)
            left.append(p_left)
            right.append(p_right)
        if config.keep_snapshots:
            snapshots.append(current)

    record(field)
    psi = field.samples
    current = field
    progress_every = max(1, config.steps // 10)
    for step in range(1, config.steps + 1):
        psi = propagator.step(psi)
        if not np.all(np.isfinite(psi)):
            raise EvolutionError(f"non-finite samples at step {step}")
        if step % config.record_every == 0 or step == config.steps:
            current = WaveField(grid, psi, field.time + step * config.dt)
            record(current)
        if step % progress_every == 0:
            logger.info("evolve: step %d/%d", step, config.steps)

    series = ObservableSeries(
        times=times, norm=norms, energy=energies, mean_position=means,
        well_occupancy=(left, right) if track_occupancy else None,
        snapshots=snapshots,
    )
    return current, series


def laplacian_matrix(grid: Grid) -> sparse.csr_matrix:
    """Second-order central-difference Laplacian with periodic corners (1D)."""
    n = grid.counts[0]
    h = grid.spacing[0]
    main = np.full(n, -2.0)
    off = np.ones(n - 1)
    lap = sparse.diags([off, main, off], [-1, 0, 1], shape=(n, n), format="lil")
    lap[0, n - 1] = 1.0
    lap[n - 1, 0] = 1.0
    return (lap.tocsr() / (h * h))


def stationary_states(potential: np.ndarray, grid: Grid, k: int) -> List[Tuple[float, np.ndarray]]:
    """
    Lowest k eigenpairs of H = -1/2 D2 + diag(V) on a periodic 1D grid.

    Args:
        potential: Potential sampled on the grid
        grid: 1D grid
        k: Number of states

    Returns:
        (energy, eigenvector) pairs, energies ascending, eigenvectors with
        sum |phi|^2 dx = 1 and their largest component positive
    """
    if grid.ndim != 1:
        raise GridError("stationary states need a 1D grid")
    potential = np.asarray(potential, dtype=np.float64).reshape(-1)
    n = grid.counts[0]
    if potential.size != n:
        raise GridError(f"potential has {potential.size} samples, grid has {n}")
    if not 1 <= k < n - 1:
        raise EvolutionError(f"k must be in [1, {n - 2}], got {k}")

    hamiltonian = -0.5 * laplacian_matrix(grid) + sparse.diags(potential)
    # The spectrum is bounded below by min V, so shift-invert just under it
    sigma = float(potential.min()) - 1.0
    energies, vectors = eigsh(hamiltonian.tocsc(), k=k, sigma=sigma, which="LM")

    order = np.argsort(energies)
    scale = 1.0 / math.sqrt(grid.spacing[0])
    states = []
    for idx in order:
        vec = vectors[:, idx] / np.linalg.norm(vectors[:, idx]) * scale
        if vec[np.argmax(np.abs(vec))] < 0:
            vec = -vec
        states.append((float(energies[idx]), vec))
    return states


def tunneling_splitting(params: DoubleWellParams, grid: Grid) -> Tuple[float, float, list]:
    """
    Splitting of the lowest doublet of a double well.

    Returns:
        (delta_E, T_spectral = pi / delta_E, the two lowest states)
    """
    potential = double_well_on_grid(params, grid)
    states = stationary_states(potential, grid, 2)
    (e0, _), (e1, _) = states
    if e1 >= params.barrier_height:
        raise TunnelingError(
            f"second state E1={e1:.6g} is not below the barrier {params.barrier_height:.6g}; "
            "not a tunneling regime"
        )
    splitting = e1 - e0
    if not splitting > 0:
        raise TunnelingError(f"degenerate doublet, delta_E={splitting!r}")
    return splitting, math.pi / splitting, states


def _refine_peak(values: np.ndarray, i: int) -> float:
    """Sub-sample offset of a local maximum by a three-point parabola."""
    if i <= 0 or i >= len(values) - 1:
        return 0.0
    left, mid, right = values[i - 1], values[i], values[i + 1]
    denom = left - 2.0 * mid + right
    if denom >= 0:
        return 0.0
    return 0.5 * (left - right) / denom


def tunneling_period(params: DoubleWellParams, grid: Grid, dt: float,
                     max_steps: Optional[int] = None, initial: str = "left") -> TunnelingResult:
    """
    Compare the spectral tunneling time with a time-domain measurement.

    The initial state is the left-localized (phi0 + phi1)/sqrt(2). Its
    left-well occupancy oscillates with period 2 pi / delta_E; the measured
    tunneling time is half the return time of the occupancy maximum, which
    is the left-to-right transfer time pi / delta_E.

    Args:
        params: Double-well parameters
        grid: 1D grid
        dt: Time step
        max_steps: Step budget (defaults to three spectral periods)
        initial: "left" or "symmetric" (the even ground state alone)

    Returns:
        TunnelingResult
    """
    if not dt > 0:
        raise EvolutionError(f"dt must be positive, got {dt}")
    splitting, t_spectral, states = tunneling_splitting(params, grid)
    (_, phi0), (_, phi1) = states

    if initial == "left":
        psi0 = (phi0 + phi1) / math.sqrt(2.0)
        if well_occupancy(WaveField(grid, psi0), 0.0)[0] < 0.5:
            psi0 = (phi0 - phi1) / math.sqrt(2.0)
    elif initial == "symmetric":
        psi0 = phi0.astype(np.complex128)
    else:
        raise TunnelingError(f"unknown initial state {initial!r}")

    if max_steps is None:
        max_steps = int(math.ceil(3.0 * t_spectral / dt))
    potential = double_well_on_grid(params, grid)
    propagator = SplitStepPropagator(grid, dt, 0.0, potential)
    left_mask = np.where(grid.axis(0) < 0.0, 1.0, np.where(grid.axis(0) == 0.0, 0.5, 0.0))

    occupancy = np.empty(max_steps + 1)
    psi = psi0.astype(np.complex128)
    rho = np.abs(psi) ** 2
    occupancy[0] = np.sum(rho * left_mask) / np.sum(rho)
    progress_every = max(1, max_steps // 10)
    for step in range(1, max_steps + 1):
        psi = propagator.step(psi)
        rho = np.abs(psi) ** 2
        occupancy[step] = np.sum(rho * left_mask) / np.sum(rho)
        if step % progress_every == 0:
            logger.info("tunneling: step %d/%d", step, max_steps)

    lower, upper = 0.5 - OCCUPANCY_SWING, 0.5 + OCCUPANCY_SWING
    below = np.flatnonzero(occupancy < lower)
    if below.size == 0:
        raise TunnelingError(
            f"no occupancy oscillation within {max_steps} steps "
            f"(p_left stayed in [{occupancy.min():.6g}, {occupancy.max():.6g}])"
        )
    above = np.flatnonzero(occupancy[below[0]:] > upper)
    if above.size == 0:
        raise TunnelingError(f"occupancy did not return to the left well within {max_steps} steps")
    rise = below[0] + above[0]
    fall = np.flatnonzero(occupancy[rise:] < lower)
    end = rise + fall[0] if fall.size else len(occupancy)
    peak = rise + int(np.argmax(occupancy[rise:end]))
    if peak == len(occupancy) - 1:
        raise TunnelingError(f"occupancy maximum not reached within {max_steps} steps")

    return_time = (peak + _refine_peak(occupancy, peak)) * dt
    result = TunnelingResult(
        t_measured=return_time / 2.0,
        t_spectral=t_spectral,
        splitting=splitting,
        return_time=return_time,
        energies=(float(states[0][0]), float(states[1][0])),
    )
    logger.info("tunneling: T_measured=%.6g T_spectral=%.6g", result.t_measured, t_spectral)
    return result


def charge_conservation_report(series: ObservableSeries, tol: float) -> ChargeReport:
    """
    Judge norm conservation along a recorded series.

    Args:
        series: Non-empty observable series
        tol: Relative drift tolerance

    Returns:
        ChargeReport with verdict conserved iff max drift < tol
    """
    if len(series.norm) == 0:
        raise EvolutionError("cannot judge an empty series")
    norms = np.asarray(series.norm, dtype=np.float64)
    drifts = np.abs(norms - norms[0]) / norms[0]
    max_drift = float(drifts.max())
    offending = np.flatnonzero(drifts >= tol)
    conserved = max_drift < tol
    return ChargeReport(
        max_relative_drift=max_drift,
        drifts=tuple(float(d) for d in drifts),
        verdict=ChargeVerdict.CONSERVED if conserved else ChargeVerdict.VIOLATED,
        tolerance=tol,
        offending_index=None if conserved else int(offending[0]),
    )


def gaussian_packet(grid: Grid, center: Sequence[float], sigma: float,
                    momentum: Optional[Sequence[float]] = None) -> WaveField:
    """
    Normalized Gaussian packet psi ~ exp(-|x - x0|^2 / (4 sigma^2) + i p.x);
    sigma is the standard deviation of |psi|^2 along each axis.
    """
    if not sigma > 0:
        raise EvolutionError(f"sigma must be positive, got {sigma}")
    mesh = grid.mesh()
    momentum = momentum if momentum is not None else [0.0] * grid.ndim
    exponent = np.zeros(grid.shape, dtype=np.complex128)
    for x, x0, p in zip(mesh, center, momentum):
        exponent += -((x - x0) ** 2) / (4.0 * sigma * sigma) + 1j * p * x
    psi = np.exp(exponent)
    psi /= math.sqrt(np.sum(np.abs(psi) ** 2) * grid.cell_volume)
    return WaveField(grid, psi)


def sech_profile(grid: Grid, amplitude: float = 1.0, center: float = 0.0) -> WaveField:
    """Bright-soliton profile a sech(a (x - x0)), stationary for gamma = -1."""
    if grid.ndim != 1:
        raise GridError("sech profile needs a 1D grid")
    x = grid.axis(0)
    return WaveField(grid, amplitude / np.cosh(amplitude * (x - center)))


def packet_width(field: WaveField, axis: int = 0) -> float:
    """Standard deviation of |psi|^2 along an axis."""
    rho = field.density()
    x = field.grid.mesh()[axis]
    total = np.sum(rho)
    mean = np.sum(x * rho) / total
    return float(math.sqrt(np.sum((x - mean) ** 2 * rho) / total))


def write_grid_array(stem: str, grid: Grid, samples: np.ndarray, time: float = 0.0,
                     extra: Optional[Dict] = None) -> Tuple[str, str]:
    """
    Write complex samples as <stem>.json (header) and <stem>.bin
    (little-endian float64 pairs re, im in row-major order).

    Returns:
        (header path, data path)
    """
    header_path, data_path = f"{stem}.json", f"{stem}.bin"
    header = {
        "dims": grid.ndim,
        "extents": list(grid.extents),
        "counts": list(grid.counts),
        "origins": list(grid.origins),
        "time": time,
    }
    header.update(extra or {})
    flat = np.asarray(samples, dtype=np.complex128).reshape(-1)
    if flat.size != grid.size:
        raise SnapshotError(f"array has {flat.size} samples, grid has {grid.size}")
    interleaved = np.empty(2 * grid.size, dtype="<f8")
    interleaved[0::2] = flat.real
    interleaved[1::2] = flat.imag
    try:
        parent = os.path.dirname(header_path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(header_path, "w", encoding="utf-8") as f:
            json.dump(header, f, indent=2, sort_keys=True)
        interleaved.tofile(data_path)
    except OSError as e:
        raise SnapshotError(f"failed to write {stem}: {e}") from e
    return header_path, data_path


def read_grid_array(stem: str) -> Tuple[Grid, np.ndarray, Dict]:
    """Read what write_grid_array wrote: (grid, complex samples, header)."""
    try:
        with open(f"{stem}.json", "r", encoding="utf-8") as f:
            header = json.load(f)
        data = np.fromfile(f"{stem}.bin", dtype="<f8")
    except (OSError, json.JSONDecodeError) as e:
        raise SnapshotError(f"failed to read {stem}: {e}") from e

    try:
        grid = Grid(tuple(header["extents"]), tuple(header["counts"]),
                    tuple(header["origins"]) if "origins" in header else None)
        if header["dims"] != grid.ndim:
            raise SnapshotError(f"header dims {header['dims']} disagree with counts {grid.counts}")
        header["time"] = float(header["time"])
    except KeyError as e:
        raise SnapshotError(f"header {stem}.json lacks {e}") from e
    if data.size != 2 * grid.size:
        raise SnapshotError(f"{stem}.bin holds {data.size} floats, expected {2 * grid.size}")
    samples = (data[0::2] + 1j * data[1::2]).reshape(grid.shape)
    return grid, samples, header


def save_snapshot(field: WaveField, stem: str) -> Tuple[str, str]:
    """Write a field snapshot as <stem>.json + <stem>.bin."""
    return write_grid_array(stem, field.grid, field.samples, field.time)


def load_snapshot(stem: str) -> WaveField:
    """Read a field written by save_snapshot."""
    grid, samples, header = read_grid_array(stem)
    return WaveField(grid, samples, header["time"])


class EvolutionError(SemwaveError):
    """Raised for invalid evolution settings or a diverging run."""
    pass


class GridError(EvolutionError):
    """Raised when fields, potentials and grids do not match."""
    pass


class TunnelingError(EvolutionError):
    """Raised when no tunneling oscillation can be measured."""
    pass


class SnapshotError(EvolutionError):
    """Raised when a field snapshot cannot be read or written."""
    pass
