"""
Plain-text storage of measures.

A DiscreteMeasure is a CSV table with the header `support,weight`. A
MeasureSet is a structured text file of `[measure i]` blocks, each holding
such a table, preceded by a `# measure-set` line that records the space and
hull flag.
"""

import csv
import io
import logging
from pathlib import Path
from typing import List, Union

from src.errors import MeasureError
from src.measures.discrete import DiscreteMeasure
from src.measures.sets import MeasureSet
from src.systems.phase_space import PhaseSpace
from src.utils.formatting import format_float

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def measure_to_csv(mu: DiscreteMeasure) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["support", "weight"])
    for x, w in mu.atoms:
        writer.writerow([format_float(x), format_float(w)])
    return buffer.getvalue()


def measure_from_csv(text: str, space: PhaseSpace) -> DiscreteMeasure:
    rows = [row for row in csv.reader(io.StringIO(text)) if row and not row[0].startswith("#")]
    if not rows or [cell.strip() for cell in rows[0]] != ["support", "weight"]:
        raise MeasureError("Measure CSV must start with the header 'support,weight'")
    try:
        support = [float(row[0]) for row in rows[1:]]
        weights = [float(row[1]) for row in rows[1:]]
    except (IndexError, ValueError) as e:
        raise MeasureError(f"Malformed measure row: {e}") from e
    return DiscreteMeasure.from_atoms(support, weights, space)


def write_measure(mu: DiscreteMeasure, path: PathLike) -> None:
    Path(path).write_text(measure_to_csv(mu))


def read_measure(path: PathLike, space: PhaseSpace) -> DiscreteMeasure:
    return measure_from_csv(Path(path).read_text(), space)


def write_measure_set(measure_set: MeasureSet, path: PathLike) -> None:
    """Write every extreme as a `[measure i]` block."""
    parts = [f"# measure-set space={measure_set.space} hull={str(measure_set.hull).lower()}\n"]
    for i, mu in enumerate(measure_set.extremes):
        parts.append(f"[measure {i}]\n")
        parts.append(measure_to_csv(mu))
    Path(path).write_text("".join(parts))
    logger.debug(f"Wrote {len(measure_set)} measures to {path}")


def read_measure_set(path: PathLike) -> MeasureSet:
    """Inverse of write_measure_set."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# measure-set"):
        raise MeasureError(f"{path}: missing '# measure-set' header line")
    fields = dict(token.split("=", 1) for token in lines[0].split()[2:] if "=" in token)
    space = PhaseSpace.parse(fields.get("space", "interval"))
    hull = fields.get("hull", "false") == "true"

    blocks: List[List[str]] = []
    for line in lines[1:]:
        if line.startswith("[measure"):
            blocks.append([])
        elif blocks and line.strip():
            blocks[-1].append(line)
    measures = [measure_from_csv("\n".join(block), space) for block in blocks]
    return MeasureSet(tuple(measures), hull)
