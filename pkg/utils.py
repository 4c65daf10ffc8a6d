"""
Utility Module - Helper functions shared by the semwave modules.
Provides the common error base, the seeded generator, and output writing.
"""

import csv
import json
import logging
import os
import platform
from datetime import datetime
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

VERSION = "0.3.0"


class SemwaveError(Exception):
    """Base class for every error raised by the semwave modules."""
    pass


def make_rng(seed: int) -> np.random.Generator:
    """
    Build the single seeded generator all randomness flows through.

    Philox is a counter-based 64-bit generator: the same integer seed gives the
    same stream on every platform and numpy release that ships it.

    Args:
        seed: Non-negative integer seed

    Returns:
        numpy Generator backed by Philox
    """
    if seed < 0:
        raise SemwaveError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.Philox(key=seed))


def format_timestamp(dt: datetime = None) -> str:
    """
    Format a datetime object to a readable string.

    Args:
        dt: Datetime object (defaults to now)

    Returns:
        Formatted timestamp string
    """
    if dt is None:
        dt = datetime.now()
    return dt.strftime("%Y-%m-%d %H:%M:%S")


def format_number(value: Any) -> str:
    """Shortest round-trip text for a number, stable across runs."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays (recursively) into plain JSON types."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


class Table:
    """Plain tabular result: a header and rows."""

    def __init__(self, header: Sequence[str], rows: Iterable[Sequence[Any]]):
        self.header = list(header)
        self.rows = [list(r) for r in rows]

    def csv_header(self) -> List[str]:
        return self.header

    def to_rows(self) -> List[List[Any]]:
        return self.rows

    def to_dict(self) -> Dict[str, Any]:
        return {"columns": self.header, "rows": self.rows}


class OutputWriter:
    """
    Writes run outputs into one directory.
    Data files are byte-stable for identical inputs; only the manifest
    carries a timestamp.
    """

    def __init__(self, out_dir: str):
        """Initialize writer with output directory."""
        self.out_dir = out_dir
        self.written: List[str] = []

    def _path(self, filename: str) -> str:
        try:
            os.makedirs(self.out_dir, exist_ok=True)
        except OSError as e:
            raise OutputError(f"cannot create output directory {self.out_dir}: {e}") from e
        return os.path.join(self.out_dir, filename)

    def write_csv(self, filename: str, header: Sequence[str],
                  rows: Iterable[Sequence[Any]]) -> str:
        """
        Save rows to a CSV file.

        Args:
            filename: File name inside the output directory
            header: Column names, in order
            rows: Row values; numbers are written in round-trip form

        Returns:
            Path to saved file
        """
        filepath = self._path(filename)
        try:
            with open(filepath, "w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(header)
                for row in rows:
                    writer.writerow([format_number(v) for v in row])
        except OSError as e:
            raise OutputError(f"failed to write {filepath}: {e}") from e
        self.written.append(filepath)
        return filepath

    def write_json(self, filename: str, payload: Any) -> str:
        """
        Save a payload to a JSON file with sorted keys.

        Args:
            filename: File name inside the output directory
            payload: JSON-serializable data (numpy values are converted)

        Returns:
            Path to saved file
        """
        filepath = self._path(filename)
        try:
            with open(filepath, "w", encoding="utf-8") as f:
                json.dump(to_jsonable(payload), f, indent=2, sort_keys=True, ensure_ascii=False)
                f.write("\n")
        except OSError as e:
            raise OutputError(f"failed to write {filepath}: {e}") from e
        self.written.append(filepath)
        return filepath

    def write_manifest(self, subcommand: str, resolved_config: Dict[str, Any],
                       seed: Optional[int]) -> str:
        """
        Write manifest.json: full resolved config, seed, versions and outputs.

        Args:
            subcommand: Name of the executed subcommand
            resolved_config: Every parameter that affected the outputs
            seed: Seed of the run generator

        Returns:
            Path to the manifest
        """
        import scipy

        manifest = {
            "subcommand": subcommand,
            "config": resolved_config,
            "seed": seed,
            "versions": {
                "semwave": VERSION,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
            },
            "outputs": [os.path.basename(p) for p in self.written],
            "created": format_timestamp(),
        }
        return self.write_json("manifest.json", manifest)


def emit_outputs(results: Dict[str, Any], fmt: str, out_dir: str,
                 writer: Optional[OutputWriter] = None) -> List[str]:
    """
    Write a set of named results in the requested format.

    A result with ``csv_header``/``to_rows`` is written as CSV when fmt is
    "csv"; everything else (and every result when fmt is "json") goes through
    ``to_dict`` or is dumped as-is.

    Args:
        results: Mapping of output stem to result object
        fmt: "csv" or "json"
        out_dir: Output directory
        writer: Existing writer to append to (its manifest then lists these files)

    Returns:
        List of written file paths
    """
    if fmt not in ("csv", "json"):
        raise OutputError(f"unknown output format: {fmt}")

    writer = writer or OutputWriter(out_dir)
    for stem, result in results.items():
        if fmt == "csv" and hasattr(result, "to_rows"):
            writer.write_csv(f"{stem}.csv", result.csv_header(), result.to_rows())
        elif hasattr(result, "to_dict"):
            writer.write_json(f"{stem}.json", result.to_dict())
        else:
            writer.write_json(f"{stem}.json", result)
    logger.debug("wrote %d output files to %s", len(writer.written), out_dir)
    return writer.written


class OutputError(SemwaveError):
    """Raised when an output file cannot be written."""
    pass
