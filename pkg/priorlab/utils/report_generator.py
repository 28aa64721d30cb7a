"""Write result records as JSON lines or CSV."""

import csv
import json
import math
from typing import Any, Dict, Iterable, List, Optional, TextIO

from priorlab.config import PriorLabConfig

MACHINE_DIGITS = 17


def format_float(value: float, digits: int = MACHINE_DIGITS) -> str:
    """Fixed significant-digit rendering; non-finite values use JSON's extended tokens."""
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    return f"{value:.{digits}g}"


def encode_json(value: Any, digits: int = MACHINE_DIGITS) -> str:
    """JSON text for records, with every float at a fixed number of significant digits."""
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        return format_float(value, digits)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        items = (f"{json.dumps(str(k))}: {encode_json(v, digits)}" for k, v in value.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(encode_json(v, digits) for v in value) + "]"
    if hasattr(value, "item"):
        return encode_json(value.item(), digits)
    raise TypeError(f"cannot encode {type(value).__name__} in a record")


class ReportGenerator:
    """Writes a stream of flat records, each led by its ``record`` kind."""

    def __init__(self, config: PriorLabConfig, stream: TextIO, output_format: Optional[str] = None):
        """
        Initialize the writer.

        Args:
            config: Configuration (output format and digits)
            stream: Text stream receiving the records
            output_format: Overrides config.output.format
        """
        self.config = config
        self.stream = stream
        self.output_format = output_format or config.output.format
        self.digits = config.output.machine_digits
        self._csv_writer = csv.writer(stream, lineterminator="\n")
        self._csv_header: Optional[List[str]] = None
        self.records_written = 0
        self.errors_written = 0

    def write(self, record: Dict[str, Any]) -> None:
        if record.get("record") == "error":
            self.errors_written += 1
        if self.output_format == "json":
            self.stream.write(encode_json(record, self.digits) + "\n")
        else:
            self._write_csv(record)
        self.records_written += 1

    def write_all(self, records: Iterable[Dict[str, Any]]) -> None:
        for record in records:
            self.write(record)

    def _write_csv(self, record: Dict[str, Any]) -> None:
        header = list(record.keys())
        if header != self._csv_header:
            self._csv_writer.writerow(header)
            self._csv_header = header
        self._csv_writer.writerow([self._csv_cell(v) for v in record.values()])

    def _csv_cell(self, value: Any) -> str:
        if isinstance(value, bool) or value is None:
            return "" if value is None else str(value).lower()
        if isinstance(value, float):
            return format_float(value, self.digits)
        if isinstance(value, (list, tuple, dict)):
            return encode_json(value, self.digits)
        if hasattr(value, "item"):
            return self._csv_cell(value.item())
        return str(value)


def human(value: Any, digits: int = 10) -> str:
    """Terminal rendering of a value at the human digit count."""
    if isinstance(value, float):
        return format_float(value, digits)
    return str(value)
