"""
Semantic State Module - Complex-valued states over a token basis.
Builds states from real embeddings, measures, perturbs and compares them.
"""

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from config import BETA, TAU
from embedding_geometry import EmbeddingSet, cosine_similarity
from utils import SemwaveError

TWO_PI = 2.0 * math.pi
NORM_TOL = 1e-10


def wrap_phase(phase: float) -> float:
    """Canonicalize a phase into [0, 2*pi)."""
    wrapped = math.fmod(phase, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod of a tiny negative can land exactly on 2*pi after the shift
    if wrapped >= TWO_PI:
        wrapped = 0.0
    return wrapped + 0.0


@dataclass(frozen=True)
class ComplexAmplitude:
    """A complex coefficient kept in magnitude/phase form."""
    magnitude: float
    phase: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.magnitude) and math.isfinite(self.phase)):
            raise StateError("amplitude must be finite")
        if self.magnitude < 0.0:
            raise StateError(f"magnitude must be non-negative, got {self.magnitude}")
        object.__setattr__(self, "magnitude", float(self.magnitude))
        object.__setattr__(self, "phase", wrap_phase(float(self.phase)))

    @classmethod
    def from_complex(cls, value: complex) -> "ComplexAmplitude":
        return cls(abs(value), math.atan2(value.imag, value.real))

    @property
    def value(self) -> complex:
        return self.magnitude * complex(math.cos(self.phase), math.sin(self.phase))

    @property
    def real(self) -> float:
        """Projection onto the real axis."""
        return self.magnitude * math.cos(self.phase)

    def to_list(self) -> List[float]:
        return [self.magnitude, self.phase]


class MagnitudeRule(Enum):
    """How complexify turns similarities into magnitudes."""
    SOFTMAX = "softmax"
    CLIPPED_COSINE = "clipped_cosine"


@dataclass(frozen=True)
class SemanticState:
    """Labeled complex coefficients over an ordered token basis."""
    basis_labels: tuple
    coefficients: tuple
    normalized: bool = False

    def __post_init__(self):
        labels = tuple(self.basis_labels)
        coeffs = tuple(self.coefficients)
        if len(labels) != len(coeffs):
            raise StateError(f"{len(labels)} labels but {len(coeffs)} coefficients")
        if len(set(labels)) != len(labels):
            raise StateError("basis labels must be unique")
        object.__setattr__(self, "basis_labels", labels)
        object.__setattr__(self, "coefficients", coeffs)
        if self.normalized and abs(self.norm_squared() - 1.0) > NORM_TOL:
            raise StateError(f"state flagged normalized but sum |c|^2 = {self.norm_squared()!r}")

    @classmethod
    def from_complex(cls, labels: Sequence[str], values: Sequence[complex],
                     normalized: Optional[bool] = None) -> "SemanticState":
        """Build from rectangular values; the normalized flag is detected when not given."""
        coeffs = tuple(ComplexAmplitude.from_complex(complex(v)) for v in values)
        if normalized is None:
            total = sum(c.magnitude ** 2 for c in coeffs)
            normalized = abs(total - 1.0) <= NORM_TOL
        return cls(tuple(labels), coeffs, normalized)

    def amplitudes(self) -> np.ndarray:
        """Coefficients as a complex array."""
        return np.array([c.value for c in self.coefficients], dtype=np.complex128)

    def magnitudes(self) -> np.ndarray:
        return np.array([c.magnitude for c in self.coefficients])

    def phases(self) -> np.ndarray:
        return np.array([c.phase for c in self.coefficients])

    def norm_squared(self) -> float:
        return float(math.fsum(c.magnitude ** 2 for c in self.coefficients))

    def to_dict(self) -> Dict:
        return {
            "basis": list(self.basis_labels),
            "coeffs": [c.to_list() for c in self.coefficients],
            "normalized": self.normalized,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "SemanticState":
        try:
            coeffs = tuple(ComplexAmplitude(m, p) for m, p in data["coeffs"])
            return cls(tuple(data["basis"]), coeffs, bool(data.get("normalized", False)))
        except (KeyError, TypeError, ValueError) as e:
            raise StateError(f"invalid state payload: {e}") from e


@dataclass
class MeasurementRecord:
    """Outcome tallies from repeated measurements (e.g. repeated prompting)."""
    counts: Dict[str, int]
    total: int = 0

    def __post_init__(self):
        if any(c < 0 for c in self.counts.values()):
            raise StateError("counts must be non-negative")
        computed = sum(self.counts.values())
        if not self.total:
            self.total = computed
        if self.total != computed:
            raise StateError(f"total {self.total} does not equal the sum of counts {computed}")
        if self.total < 1:
            raise StateError("measurement record has zero total")

    def frequencies(self) -> Dict[str, Fraction]:
        """Exact observed frequencies."""
        return {label: Fraction(count, self.total) for label, count in self.counts.items()}

    def to_dict(self) -> Dict:
        return {"counts": dict(self.counts), "total": self.total}


def normalize(state: SemanticState) -> SemanticState:
    """
    Scale magnitudes so sum |c_i|^2 = 1; phases are kept.

    Args:
        state: State with at least one nonzero magnitude

    Returns:
        Normalized state (the same object when already normalized)
    """
    total = state.norm_squared()
    if total == 0.0:
        raise StateError("cannot normalize an all-zero state")
    if abs(total - 1.0) <= 1e-12:
        if state.normalized:
            return state
        return SemanticState(state.basis_labels, state.coefficients, True)
    scale = 1.0 / math.sqrt(total)
    coeffs = tuple(ComplexAmplitude(c.magnitude * scale, c.phase) for c in state.coefficients)
    return SemanticState(state.basis_labels, coeffs, True)


def complexify(target: str, basis: Sequence[str], embeddings: EmbeddingSet,
               beta: float = BETA, magnitude_rule: MagnitudeRule = MagnitudeRule.SOFTMAX,
               tau: float = TAU) -> SemanticState:
    """
    Map a real embedding onto a complex state over a token basis.

    phase_i = beta * arccos(S_C(target, basis_i)); magnitudes come from the
    chosen rule over the similarities and are then L2-normalized.

    Args:
        target: Token being represented
        basis: Basis tokens
        embeddings: Source of vectors
        beta: Phase proportionality constant
        magnitude_rule: softmax (temperature tau) or clipped_cosine
        tau: Softmax temperature

    Returns:
        Normalized SemanticState over the basis
    """
    basis = list(basis)
    if not basis:
        raise StateError("basis is empty")
    target_vec = embeddings.vector(target)
    sims = np.array([cosine_similarity(target_vec, embeddings.vector(tok)) for tok in basis])

    phases = beta * np.arccos(np.clip(sims, -1.0, 1.0))
    rule = MagnitudeRule(magnitude_rule)
    if rule is MagnitudeRule.SOFTMAX:
        if tau <= 0.0:
            raise StateError(f"softmax temperature must be positive, got {tau}")
        logits = sims / tau
        weights = np.exp(logits - logits.max())
        weights /= weights.sum()
    else:
        weights = np.clip(sims, 0.0, None)
        if not np.any(weights > 0.0):
            raise StateError(f"every similarity to {target!r} is <= 0 under clipped_cosine")

    magnitudes = weights / np.linalg.norm(weights)
    coeffs = tuple(ComplexAmplitude(m, p) for m, p in zip(magnitudes, phases))
    return SemanticState(tuple(basis), coeffs, True)


def measure_probabilities(state: SemanticState) -> Dict[str, float]:
    """
    Born-rule probabilities p_i = |c_i|^2.

    Args:
        state: Normalized state

    Returns:
        Label -> probability
    """
    total = state.norm_squared()
    if abs(total - 1.0) > NORM_TOL:
        raise StateError(f"state is not normalized (sum |c|^2 = {total!r})")
    return {label: c.magnitude ** 2 for label, c in zip(state.basis_labels, state.coefficients)}


def estimate_amplitudes(record: MeasurementRecord) -> SemanticState:
    """
    Amplitudes |c_i| = sqrt(count_i / total) from observed frequencies.
    Phases cannot be observed from frequencies and are set to 0.

    Args:
        record: Measurement tallies

    Returns:
        Normalized state over the recorded labels
    """
    labels = tuple(record.counts)
    coeffs = tuple(ComplexAmplitude(math.sqrt(record.counts[label] / record.total), 0.0)
                   for label in labels)
    return normalize(SemanticState(labels, coeffs, False))


def sample_measurements(state: SemanticState, shots: int,
                        rng: np.random.Generator) -> MeasurementRecord:
    """
    Simulate repeated measurement of a state.

    Args:
        state: Normalized state
        shots: Number of draws (>= 1)
        rng: Seeded generator

    Returns:
        MeasurementRecord of multinomial draws from |c_i|^2
    """
    if shots < 1:
        raise StateError(f"shots must be >= 1, got {shots}")
    probs = measure_probabilities(state)
    p = np.array(list(probs.values()))
    draws = rng.multinomial(shots, p / p.sum())
    return MeasurementRecord({label: int(n) for label, n in zip(probs, draws)}, shots)


def apply_semantic_operator(state: SemanticState,
                            eigenvalues: Mapping[str, ComplexAmplitude]) -> SemanticState:
    """
    Apply a diagonal operator: c_i <- c_i * A_i.
    Magnitudes multiply and phases add; the result is not renormalized.

    Args:
        state: Input state
        eigenvalues: Eigenvalue per basis label

    Returns:
        Transformed state, flagged normalized only if it still is
    """
    coeffs = []
    for label, c in zip(state.basis_labels, state.coefficients):
        if label not in eigenvalues:
            raise StateError(f"missing eigenvalue for basis label {label!r}")
        a = eigenvalues[label]
        coeffs.append(ComplexAmplitude(c.magnitude * a.magnitude, c.phase + a.phase))
    total = math.fsum(c.magnitude ** 2 for c in coeffs)
    return SemanticState(state.basis_labels, tuple(coeffs), abs(total - 1.0) <= NORM_TOL)


def perturb(state: SemanticState, deltas: Mapping[str, complex]) -> SemanticState:
    """
    Context perturbation c_i <- c_i + delta_i, then renormalization.

    Args:
        state: Input state
        deltas: Complex increment per basis label (labels must match)

    Returns:
        Normalized perturbed state
    """
    if set(deltas) != set(state.basis_labels):
        raise StateError("perturbation labels do not match the state's basis")
    values = [c.value + complex(deltas[label]) for label, c in zip(state.basis_labels, state.coefficients)]
    perturbed = SemanticState.from_complex(state.basis_labels, values, normalized=False)
    if perturbed.norm_squared() == 0.0:
        raise StateError("perturbation cancels the whole state")
    return normalize(perturbed)


def superpose(states: Sequence[SemanticState], weights: Sequence[complex]) -> SemanticState:
    """
    Normalized linear combination sum_k w_k |state_k> over a shared basis.

    Args:
        states: States on identical bases
        weights: Complex weight per state

    Returns:
        Normalized superposition
    """
    if not states or len(states) != len(weights):
        raise StateError("superpose needs one weight per state")
    basis = states[0].basis_labels
    for s in states[1:]:
        if s.basis_labels != basis:
            raise StateError("superposed states must share a basis")
    total = sum(complex(w) * s.amplitudes() for s, w in zip(states, weights))
    combined = SemanticState.from_complex(basis, total, normalized=False)
    if combined.norm_squared() == 0.0:
        raise StateError("superposition vanishes")
    return normalize(combined)


def complex_similarity(s1: SemanticState, s2: SemanticState) -> ComplexAmplitude:
    """
    Complex similarity S_T = sum_i conj(c1_i) * c2_i.

    The magnitude measures overlap; the phase is the relative orientation.
    Inputs need not be normalized.

    Args:
        s1: First state
        s2: Second state on the same basis

    Returns:
        S_T as a ComplexAmplitude
    """
    if s1.basis_labels != s2.basis_labels:
        raise StateError("complex similarity needs identical basis label sequences")
    value = complex(np.sum(np.conj(s1.amplitudes()) * s2.amplitudes()))
    return ComplexAmplitude.from_complex(value)


class StateError(SemwaveError):
    """Raised for invalid semantic states or operations on them."""
    pass
