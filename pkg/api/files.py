import csv
import io
import json
import math
import sys
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from loguru import logger
from pydantic import BaseModel
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from services import __version__
from services.errors import OutputError, UsageError
from services.rng_service import RNG_NAME

RANCHER_COLUMNS = ["n", "x", "y", "norm", "width", "direction", "alpha", "alpha_prime", "d", "hull_size"]
INVESTOR_COLUMNS = ["n", "x", "rmax", "rmin", "width", "ratio", "status"]
INTEGER_COLUMNS = {"n", "hull_size"}


class RunManifest(BaseModel):
    command: str
    parameters: Dict[str, Any]
    seed: Optional[int] = None
    rng: str = RNG_NAME
    version: str = __version__
    duration_seconds: float = 0.0


def format_value(value: Any, integer: bool = False) -> str:
    """Shortest decimal that parses back to the same float; missing values are empty"""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if integer:
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def clean(value: Any) -> Any:
    """JSON-safe copy with non-finite floats replaced by null"""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean(v) for v in value]
    return value


def render_csv(columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(col), col in INTEGER_COLUMNS) for col in columns])
    return buffer.getvalue()


def render_json(payload: Dict[str, Any]) -> str:
    return json.dumps(clean(payload), indent=2, allow_nan=False) + "\n"


@retry(
    stop=stop_after_attempt(3),
    wait=wait_exponential(multiplier=0.1, min=0.1, max=1),
    retry=retry_if_exception_type(OSError),
    reraise=True
)
def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def write_text(path: Optional[str], text: str) -> None:
    """Write to a file, or stdout for None / '-'"""
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        _write_text(path, text)
        logger.info(f"Wrote {len(text)} bytes to {path}")
    except OSError as e:
        logger.error(f"Error writing {path}: {e}")
        raise OutputError(f"Cannot write {path}: {e}") from e


def write_manifest(path: Optional[str], manifest: RunManifest) -> None:
    """Sidecar manifest next to a data file"""
    if path in (None, "-"):
        logger.info(f"Run manifest: {manifest.model_dump_json()}")
        return
    write_text(f"{path}.manifest.json", render_json(manifest.model_dump()))


def read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as e:
        logger.error(f"Error reading {path}: {e}")
        raise OutputError(f"Cannot read {path}: {e}") from e


def parse_csv(text: str) -> Tuple[List[str], List[Dict[str, Optional[float]]]]:
    """Header and numeric rows; missing fields become None, 'status' stays text"""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise UsageError("Malformed CSV: missing header row")

    rows: List[Dict[str, Optional[float]]] = []
    for number, fields in enumerate(reader, start=2):
        if not fields:
            continue
        if len(fields) != len(header):
            raise UsageError(f"Malformed CSV at row {number}: expected {len(header)} fields, got {len(fields)}")
        row: Dict[str, Any] = {}
        for column, field in zip(header, fields):
            if column == "status":
                row[column] = field
            elif field == "":
                row[column] = None
            else:
                try:
                    row[column] = float(field)
                except ValueError:
                    raise UsageError(f"Malformed CSV at row {number}: {column}={field!r} is not a number")
        rows.append(row)
    return header, rows
