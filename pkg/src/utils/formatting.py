"""Float formatting shared by every file writer."""

from typing import Any


def format_float(value: Any) -> str:
    """17 significant digits: enough to round-trip any double, so reruns are byte-identical."""
    if isinstance(value, bool) or value is None:
        return str(value).lower()
    if isinstance(value, (int, str)):
        return str(value)
    return format(float(value), ".17g")
