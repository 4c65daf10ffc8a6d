"""
Interference Module - Two-slit intensities for plane-wave semantic states.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from config import ALPHA, BETA
from embedding_geometry import EmbeddingVector, ZeroNormError, cosine_similarity
from utils import SemwaveError

logger = logging.getLogger(__name__)

NEGATIVE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PlaneWave:
    """psi(t, x) = A exp(i(k.x - omega t)), with A carrying the phase at the origin."""
    amplitude: complex
    wavevector: np.ndarray
    omega: float = 0.0

    def __post_init__(self):
        k = np.asarray(self.wavevector, dtype=np.float64).reshape(-1)
        amp = complex(self.amplitude)
        if not (np.all(np.isfinite(k)) and math.isfinite(amp.real) and math.isfinite(amp.imag)
                and math.isfinite(self.omega)):
            raise InterferenceError("plane wave parameters must be finite")
        object.__setattr__(self, "wavevector", k)
        object.__setattr__(self, "amplitude", amp)

    @property
    def dim(self) -> int:
        return int(self.wavevector.size)

    def phase_at(self, x: np.ndarray, t: float) -> float:
        """Total phase k.x - omega t + arg(A)."""
        return float(np.dot(self.wavevector, x)) - self.omega * t + math.atan2(self.amplitude.imag,
                                                                                  self.amplitude.real)

    def evaluate(self, x: Sequence[float], t: float) -> complex:
        x = self._point(x)
        return self.amplitude * complex(np.exp(1j * (np.dot(self.wavevector, x) - self.omega * t)))

    def _point(self, x: Sequence[float]) -> np.ndarray:
        point = np.asarray(x, dtype=np.float64).reshape(-1)
        if point.size != self.dim:
            raise InterferenceError(f"point has {point.size} components, wave has {self.dim}")
        return point


@dataclass(frozen=True)
class InterferenceResult:
    """Intensity split into the two direct terms and the cross term."""
    total: float
    direct_terms: tuple
    interference_term: float

    def to_dict(self) -> Dict:
        return {
            "total": self.total,
            "direct1": self.direct_terms[0],
            "direct2": self.direct_terms[1],
            "interference": self.interference_term,
        }


@dataclass
class IntensitySweep:
    """Intensity results along a list of points."""
    results: List[InterferenceResult]

    def csv_header(self) -> List[str]:
        return ["x_index", "total", "direct1", "direct2", "interference"]

    def to_rows(self):
        return [[i, r.total, r.direct_terms[0], r.direct_terms[1], r.interference_term]
                for i, r in enumerate(self.results)]

    def to_dict(self) -> Dict:
        return {"points": [r.to_dict() for r in self.results]}


def two_wave_intensity(w1: PlaneWave, w2: PlaneWave, x: Sequence[float], t: float) -> InterferenceResult:
    """
    Intensity |psi1 + psi2|^2 of two plane waves at (x, t).

    total = |A1|^2 + |A2|^2 + 2|A1||A2|cos(delta), where delta is the phase
    difference of the two waves at that point.

    Args:
        w1: First wave
        w2: Second wave, same dimension
        x: Evaluation point
        t: Evaluation time

    Returns:
        InterferenceResult with its breakdown
    """
    if w1.dim != w2.dim:
        raise InterferenceError(f"wave dimensions differ: {w1.dim} vs {w2.dim}")
    point = w1._point(x)
    a1, a2 = abs(w1.amplitude), abs(w2.amplitude)
    delta = w1.phase_at(point, t) - w2.phase_at(point, t)

    direct1, direct2 = a1 * a1, a2 * a2
    cross = 2.0 * a1 * a2 * math.cos(delta)
    total = direct1 + direct2 + cross
    if total < 0.0:
        if total < -NEGATIVE_TOL:
            raise InterferenceError(f"negative intensity {total!r} beyond round-off")
        logger.warning("clamping round-off negative intensity %r to 0", total)
        total = 0.0
    return InterferenceResult(total=total, direct_terms=(direct1, direct2), interference_term=cross)


def intensity_sweep(w1: PlaneWave, w2: PlaneWave, points: Sequence[Sequence[float]],
                    t: float = 0.0) -> IntensitySweep:
    """Evaluate two_wave_intensity at each point."""
    return IntensitySweep([two_wave_intensity(w1, w2, x, t) for x in points])


def embedding_waves(v1: EmbeddingVector, v2: EmbeddingVector, a1: float, a2: float,
                    alpha: float = ALPHA, beta: float = BETA) -> tuple:
    """
    Plane waves for two embeddings: k = alpha * v, phi1 = 0,
    phi2 = beta * arccos(S_C(v1, v2)).
    """
    if v1.norm == 0.0 or v2.norm == 0.0:
        raise ZeroNormError("interference needs non-zero embeddings")
    theta = math.acos(max(-1.0, min(1.0, cosine_similarity(v1, v2))))
    w1 = PlaneWave(complex(a1), alpha * v1.values)
    w2 = PlaneWave(a2 * complex(math.cos(beta * theta), math.sin(beta * theta)), alpha * v2.values)
    return w1, w2


def embedding_interference(v1: EmbeddingVector, v2: EmbeddingVector, a1: float, a2: float,
                           alpha: float = ALPHA, beta: float = BETA,
                           x: Sequence[float] = None) -> InterferenceResult:
    """
    Intensity connecting embedding geometry to interference:
    P = A1^2 + A2^2 + 2 A1 A2 cos(-beta*theta + alpha (v1 - v2).x).

    Args:
        v1: First embedding
        v2: Second embedding
        a1: First amplitude
        a2: Second amplitude
        alpha: Wavevector scale
        beta: Phase scale
        x: Evaluation point (defaults to the origin)

    Returns:
        InterferenceResult
    """
    w1, w2 = embedding_waves(v1, v2, a1, a2, alpha, beta)
    if x is None:
        x = np.zeros(v1.dim)
    return two_wave_intensity(w1, w2, x, 0.0)


class InterferenceError(SemwaveError):
    """Raised for invalid interference inputs."""
    pass
