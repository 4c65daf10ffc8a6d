"""
Embedding Geometry Module - Real-valued embeddings and their classical geometry.
Loads and saves embedding sets, computes cosine similarity and PCA projections,
and runs the balanced-token letter scan.
"""

import csv
import itertools
import json
import logging
import os
import struct
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import SCAN_MAX_CANDIDATES
from utils import SemwaveError

logger = logging.getLogger(__name__)

BINARY_MAGIC = b"SEMW"
BINARY_VERSION = 1
_HEADER = struct.Struct("<4sIIQ")  # magic, version, dim, count
_TOKEN_LEN = struct.Struct("<I")


class EmbeddingFormat(Enum):
    """On-disk embedding formats."""
    JSONL = "jsonl"
    CSV = "csv"
    BINARY = "binary"


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    """A real embedding vector with a fixed dimension."""
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64).reshape(-1)
        if arr.size == 0:
            raise EmbeddingError("embedding vector must have at least one component")
        if not np.all(np.isfinite(arr)):
            raise EmbeddingError("embedding vector has non-finite components")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return int(self.values.size)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddingVector):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())


@dataclass(eq=False)
class EmbeddingSet:
    """
    Ordered token -> vector collection sharing one dimension.
    Insertion order is preserved so downstream iteration is deterministic.
    """
    entries: Dict[str, EmbeddingVector]
    model_id: str
    dim: int = 0

    def __post_init__(self):
        if not self.entries:
            raise EmbeddingError("embedding set is empty")
        first = next(iter(self.entries.values()))
        if not self.dim:
            self.dim = first.dim
        for token, vec in self.entries.items():
            if vec.dim != self.dim:
                raise DimensionMismatchError(
                    f"token {token!r} has dimension {vec.dim}, expected {self.dim}"
                )

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[str, Sequence[float]]], model_id: str) -> "EmbeddingSet":
        """
        Build a set from (token, values) pairs, rejecting duplicate tokens.

        Args:
            pairs: Token/vector pairs in the order they should be kept
            model_id: Provenance of the vectors

        Returns:
            Validated EmbeddingSet
        """
        entries: Dict[str, EmbeddingVector] = {}
        dim = 0
        for token, values in pairs:
            if token in entries:
                raise DuplicateTokenError(f"duplicate token {token!r}")
            vec = EmbeddingVector(values)
            if dim and vec.dim != dim:
                raise DimensionMismatchError(
                    f"token {token!r} has dimension {vec.dim}, expected {dim}"
                )
            dim = dim or vec.dim
            entries[token] = vec
        return cls(entries=entries, model_id=model_id, dim=dim)

    @property
    def tokens(self) -> List[str]:
        return list(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, token: str) -> bool:
        return token in self.entries

    def vector(self, token: str) -> EmbeddingVector:
        """Look up a token, raising UnresolvedTokenError when absent."""
        try:
            return self.entries[token]
        except KeyError:
            raise UnresolvedTokenError(f"token {token!r} not in embedding set {self.model_id!r}") from None

    def matrix(self) -> np.ndarray:
        """Vectors stacked row-wise in token order."""
        return np.vstack([v.values for v in self.entries.values()])

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddingSet):
            return NotImplemented
        return (self.tokens == other.tokens and self.dim == other.dim
                and all(self.entries[t] == other.entries[t] for t in self.tokens))


@dataclass
class PCAResult:
    """Projection of an embedding set onto its leading principal components."""
    coordinates: Dict[str, np.ndarray]
    explained_variance_ratio: np.ndarray
    components: np.ndarray  # (k, dim), rows are unit loadings
    mean: np.ndarray

    def csv_header(self) -> List[str]:
        k = self.components.shape[0]
        return ["token"] + [f"pc{i + 1}" for i in range(k)]

    def to_rows(self):
        return [[token, *coords] for token, coords in self.coordinates.items()]

    def to_dict(self) -> Dict:
        return {
            "coordinates": {t: c.tolist() for t, c in self.coordinates.items()},
            "explained_variance_ratio": self.explained_variance_ratio.tolist(),
        }


@dataclass
class ScanResult:
    """Balanced-token scan ranking and per-length winners."""
    ranking: List[Tuple[str, float]]
    best_per_length: Dict[int, Tuple[str, float]] = field(default_factory=dict)

    def csv_header(self) -> List[str]:
        return ["candidate", "length", "delta_d"]

    def to_rows(self):
        return [[cand, len(cand), delta] for cand, delta in self.ranking]

    def to_dict(self) -> Dict:
        return {
            "ranking": [[c, d] for c, d in self.ranking],
            "best_per_length": {str(n): [c, d] for n, (c, d) in self.best_per_length.items()},
        }


def _coerce_format(fmt: Union[str, EmbeddingFormat]) -> EmbeddingFormat:
    try:
        return EmbeddingFormat(fmt) if not isinstance(fmt, EmbeddingFormat) else fmt
    except ValueError:
        raise EmbeddingFormatError(f"unknown embedding format {fmt!r}") from None


def load_embeddings(path: str, fmt: Union[str, EmbeddingFormat],
                    model_id: Optional[str] = None) -> EmbeddingSet:
    """
    Load an embedding set from disk.

    Args:
        path: File path
        fmt: One of jsonl, csv, binary
        model_id: Provenance string (defaults to the file name)

    Returns:
        EmbeddingSet with token order preserved
    """
    fmt = _coerce_format(fmt)
    if not os.path.isfile(path):
        raise EmbeddingFormatError(f"embedding file not found: {path}")
    model_id = model_id or os.path.basename(path)

    if fmt is EmbeddingFormat.BINARY:
        pairs = _read_binary(path)
    elif fmt is EmbeddingFormat.JSONL:
        pairs = _read_jsonl(path)
    else:
        pairs = _read_csv(path)

    result = EmbeddingSet.from_pairs(pairs, model_id=model_id)
    logger.debug("loaded %d embeddings (dim=%d) from %s", len(result), result.dim, path)
    return result


def _read_jsonl(path: str) -> List[Tuple[str, List[float]]]:
    pairs = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                token = row["token"]
                values = [float(v) for v in row["vector"]]
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                raise EmbeddingFormatError(f"{path}:{lineno}: unparseable row ({e})") from e
            if not isinstance(token, str):
                raise EmbeddingFormatError(f"{path}:{lineno}: token must be a string")
            pairs.append((token, values))
    return pairs


def _read_csv(path: str) -> List[Tuple[str, List[float]]]:
    pairs = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        for lineno, row in enumerate(csv.reader(f), start=1):
            if not row:
                continue
            try:
                values = [float(v) for v in row[1:]]
            except ValueError as e:
                raise EmbeddingFormatError(f"{path}:{lineno}: unparseable row ({e})") from e
            if not values:
                raise EmbeddingFormatError(f"{path}:{lineno}: row has no components")
            pairs.append((row[0], values))
    return pairs


def _read_binary(path: str) -> List[Tuple[str, np.ndarray]]:
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < _HEADER.size:
        raise EmbeddingFormatError(f"{path}: truncated header")
    magic, version, dim, count = _HEADER.unpack_from(data, 0)
    if magic != BINARY_MAGIC:
        raise EmbeddingFormatError(f"{path}: bad magic bytes {magic!r}")
    if version != BINARY_VERSION:
        raise EmbeddingFormatError(f"{path}: unsupported version {version}")

    pairs = []
    offset = _HEADER.size
    body = 8 * dim
    for index in range(count):
        try:
            (length,) = _TOKEN_LEN.unpack_from(data, offset)
            offset += _TOKEN_LEN.size
            token = data[offset:offset + length].decode("utf-8")
            offset += length
            if offset + body > len(data):
                raise EmbeddingFormatError(f"{path}: entry {index} truncated")
            values = np.frombuffer(data, dtype="<f8", count=dim, offset=offset)
            offset += body
        except (struct.error, UnicodeDecodeError) as e:
            raise EmbeddingFormatError(f"{path}: entry {index} unparseable ({e})") from e
        pairs.append((token, values))
    return pairs


def save_embeddings(embeddings: EmbeddingSet, path: str, fmt: Union[str, EmbeddingFormat]) -> str:
    """
    Write an embedding set in one of the supported formats.

    Args:
        embeddings: Set to write
        path: Destination path
        fmt: One of jsonl, csv, binary

    Returns:
        The written path
    """
    fmt = _coerce_format(fmt)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    if fmt is EmbeddingFormat.BINARY:
        with open(path, "wb") as f:
            f.write(_HEADER.pack(BINARY_MAGIC, BINARY_VERSION, embeddings.dim, len(embeddings)))
            for token, vec in embeddings.entries.items():
                raw = token.encode("utf-8")
                f.write(_TOKEN_LEN.pack(len(raw)))
                f.write(raw)
                f.write(vec.values.astype("<f8").tobytes())
    elif fmt is EmbeddingFormat.JSONL:
        with open(path, "w", encoding="utf-8") as f:
            for token, vec in embeddings.entries.items():
                f.write(json.dumps({"token": token, "vector": vec.values.tolist()}, ensure_ascii=False))
                f.write("\n")
    else:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            for token, vec in embeddings.entries.items():
                writer.writerow([token] + [repr(float(v)) for v in vec.values])
    return path


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """
    Cosine similarity S_C = (a.b) / (|a||b|).

    Args:
        a: First vector
        b: Second vector, same dimension

    Returns:
        Similarity in [-1, 1]
    """
    if a.dim != b.dim:
        raise DimensionMismatchError(f"cannot compare dimensions {a.dim} and {b.dim}")
    na, nb = a.norm, b.norm
    if na == 0.0 or nb == 0.0:
        raise ZeroNormError("cosine similarity is undefined for a zero-norm vector")
    # A vector is exactly aligned with itself
    if a is b or np.array_equal(a.values, b.values):
        return 1.0
    value = float(np.dot(a.values, b.values) / (na * nb))
    return max(-1.0, min(1.0, value))


def rank_similarities(embeddings: EmbeddingSet, target: str,
                      candidates: Optional[Sequence[str]] = None) -> List[Tuple[str, float]]:
    """
    Distinctness analysis: similarity of one token against many, best first.

    Args:
        embeddings: Source set
        target: Reference token
        candidates: Tokens to compare (defaults to the whole set)

    Returns:
        (candidate, S_C) pairs sorted by descending similarity
    """
    ref = embeddings.vector(target)
    tokens = list(candidates) if candidates is not None else embeddings.tokens
    scores = [(tok, cosine_similarity(ref, embeddings.vector(tok))) for tok in tokens]
    return sorted(scores, key=lambda pair: (-pair[1], pair[0]))


def pca_project(embeddings: EmbeddingSet, k: int) -> PCAResult:
    """
    Project mean-centered embeddings onto the first k principal components.

    Components come from the SVD of the centered data, ordered by explained
    variance; each component's sign makes its largest-magnitude loading positive.

    Args:
        embeddings: Set with at least two entries
        k: Number of components, 1 <= k <= min(dim, entries)

    Returns:
        PCAResult with coordinates and explained-variance ratios
    """
    n = len(embeddings)
    if n < 2:
        raise PCAError("PCA needs at least two embeddings")
    if not 1 <= k <= min(embeddings.dim, n):
        raise PCAError(f"k={k} out of range [1, {min(embeddings.dim, n)}]")

    data = embeddings.matrix()
    mean = data.mean(axis=0)
    centered = data - mean
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    total = float(np.sum(singular ** 2))
    if total <= 0.0:
        raise PCAError("degenerate input: all embeddings are identical")

    components = vt[:k].copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    projected = centered @ components.T
    ratios = singular[:k] ** 2 / total

    coordinates = {tok: projected[i] for i, tok in enumerate(embeddings.tokens)}
    return PCAResult(coordinates=coordinates, explained_variance_ratio=ratios,
                     components=components, mean=mean)


def enumerate_candidates(alphabet: str, max_len: int,
                         cap: int = SCAN_MAX_CANDIDATES) -> List[str]:
    """
    Every string over the alphabet with length 1..max_len, shortest first.

    Args:
        alphabet: Candidate characters (duplicates ignored, order kept)
        max_len: Longest candidate length
        cap: Maximum number of candidates allowed

    Returns:
        Candidate list in lexicographic order per length
    """
    letters = "".join(dict.fromkeys(alphabet))
    if not letters:
        raise ScanError("alphabet is empty")
    if max_len < 1:
        raise ScanError(f"max_len must be >= 1, got {max_len}")
    total = sum(len(letters) ** n for n in range(1, max_len + 1))
    if total > cap:
        raise ScanError(f"{total} candidates exceed the cap of {cap}")
    return ["".join(p) for n in range(1, max_len + 1) for p in itertools.product(letters, repeat=n)]


Fetcher = Callable[[List[str]], EmbeddingSet]


def scan_balanced_tokens(source: Union[EmbeddingSet, Fetcher], target_a: str, target_b: str,
                         alphabet: str, max_len: int,
                         cap: int = SCAN_MAX_CANDIDATES) -> ScanResult:
    """
    Find candidate strings equally similar to two targets.

    Delta d = |S_C(candidate, a) - S_C(candidate, b)|. With an EmbeddingSet
    source, candidates absent from the set are skipped; with a fetcher, all
    candidates and both targets are requested in one call.

    Args:
        source: Embedding set or a callable fetching embeddings for tokens
        target_a: First target token
        target_b: Second target token
        alphabet: Characters used to build candidates
        max_len: Longest candidate length
        cap: Candidate-count cap

    Returns:
        ScanResult sorted ascending by delta d, with per-length winners
    """
    candidates = enumerate_candidates(alphabet, max_len, cap)
    if isinstance(source, EmbeddingSet):
        embeddings = source
    else:
        wanted = list(dict.fromkeys([target_a, target_b] + candidates))
        embeddings = source(wanted)

    vec_a = embeddings.vector(target_a)
    vec_b = embeddings.vector(target_b)

    scored = []
    for cand in candidates:
        if cand not in embeddings:
            continue
        vec = embeddings.vector(cand)
        delta = abs(cosine_similarity(vec, vec_a) - cosine_similarity(vec, vec_b))
        scored.append((cand, delta))
    if not scored:
        raise ScanError("no candidate could be resolved to an embedding")

    ranking = sorted(scored, key=lambda pair: (pair[1], len(pair[0]), pair[0]))
    best: Dict[int, Tuple[str, float]] = {}
    for cand, delta in ranking:
        best.setdefault(len(cand), (cand, delta))
    for length in sorted(best):
        cand, delta = best[length]
        logger.info("best candidate for length %d: %s with difference %r", length, cand, delta)
    return ScanResult(ranking=ranking, best_per_length=dict(sorted(best.items())))


class EmbeddingError(SemwaveError):
    """Base error for embedding data."""
    pass


class EmbeddingFormatError(EmbeddingError):
    """Raised when an embedding file cannot be parsed."""
    pass


class DimensionMismatchError(EmbeddingError):
    """Raised when vectors of different dimensions are mixed."""
    pass


class DuplicateTokenError(EmbeddingError):
    """Raised when a token appears twice in one set."""
    pass


class UnresolvedTokenError(EmbeddingError):
    """Raised when a token has no embedding."""
    pass


class ZeroNormError(EmbeddingError):
    """Raised when a similarity needs a non-zero vector."""
    pass


class PCAError(EmbeddingError):
    """Raised for invalid PCA requests."""
    pass


class ScanError(EmbeddingError):
    """Raised when the balanced-token scan cannot run."""
    pass
