"""
Sample files in, delimited tables out.

A sample file holds one number per line, or a delimited table whose first
numeric column (or a named one) is the sample. A header row is detected when
the first row does not parse as numbers. Every float written out uses 17
significant digits so a reload reproduces it exactly.
"""
import io
import numpy as np
import pandas as pd

from pathlib import Path
from typing import Optional, Union

from pdf_forge.core.exceptions import InvalidSampleError, NonFiniteSampleError, SampleIOError
from pdf_forge.core.logging import get_logger
from pdf_forge.models.sample import RawSample

logger = get_logger(__name__)

FLOAT_FORMAT = "%.17g"


def _has_header(first_line: str, delimiter: Optional[str]) -> bool:
    cells = first_line.split(delimiter) if delimiter else first_line.split()
    try:
        [float(c) for c in cells if c.strip()]
    except ValueError:
        return True
    return False


def parse_sample(text: str, column: Optional[str] = None, source: str = "<text>") -> RawSample:
    """Parse sample text; non-numeric or non-finite entries are rejected with their row index"""
    lines = [line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not lines:
        raise InvalidSampleError(f"{source} holds no values")

    delimiter = "," if "," in lines[0] else None
    header = 0 if _has_header(lines[0], delimiter) else None
    try:
        frame = pd.read_csv(
            io.StringIO("\n".join(lines)),
            header=header,
            sep=delimiter if delimiter else r"\s+",
            engine="python",
            dtype=str,
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise InvalidSampleError(f"cannot parse {source}: {e}") from e

    if column is not None:
        if column not in frame.columns:
            raise InvalidSampleError(f"{source} has no column {column!r}")
        raw = frame[column]
    else:
        numeric = [c for c in frame.columns if pd.to_numeric(frame[c], errors="coerce").notna().any()]
        if not numeric:
            raise InvalidSampleError(f"{source} has no numeric column")
        raw = frame[numeric[0]]

    try:
        # object cells go through float(), which rounds correctly; pandas' fast converter can be one ulp off
        values = raw.to_numpy(dtype=object).astype(np.float64)
    except (TypeError, ValueError):
        index = int(np.argmax(pd.to_numeric(raw, errors="coerce").isna().to_numpy()))
        raise InvalidSampleError(f"{source}: entry {index} ({raw.iloc[index]!r}) is not a number", index=index) from None
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        index = int(bad[0])
        raise NonFiniteSampleError(f"{source}: entry {index} ({raw.iloc[index]!r}) is not a finite number", index=index)
    logger.debug(f"Parsed {values.size} values from {source}")
    return RawSample(values=values)


def read_sample(path: Union[str, Path], column: Optional[str] = None) -> RawSample:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise SampleIOError(f"cannot read sample file {path}: {e}") from e
    return parse_sample(text, column=column, source=str(path))


def format_table(frame: pd.DataFrame) -> str:
    """CSV text with a header row and 17-significant-digit floats"""
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def format_sample(values: np.ndarray) -> str:
    """One value per line"""
    return "".join(f"{v:.17g}\n" for v in np.asarray(values, dtype=np.float64))
