"""Dataset files and prior records."""

import json
import logging
from pathlib import Path
from typing import Iterable, List, Tuple, Union

import numpy as np

from priorlab.core.models import AR1Model, Dataset, LikelihoodModel, model_from_label
from priorlab.core.numerics import Grid
from priorlab.core.priors import PriorMeasure
from priorlab.exceptions import DatasetFormatError, ModelError
from priorlab.utils.report_generator import encode_json

logger = logging.getLogger(__name__)

HEADER_KEY = "model"
PRIOR_RECORD_FIELDS = ("label", "domain", "atoms", "nodes", "density", "proper", "total_mass", "constant")


def _parse_value(model_label: str, text: str, line_number: int):
    parts = [p.strip() for p in text.split(",")]
    try:
        if model_label == "correlation":
            if len(parts) != 2:
                raise ValueError("expected a comma-separated pair")
            pair = (float(parts[0]), float(parts[1]))
            if not all(np.isfinite(pair)):
                raise ValueError("values must be finite")
            return pair
        if len(parts) != 1:
            raise ValueError("expected a single value")
        if model_label == "ar1":
            value = float(parts[0])
            if not np.isfinite(value):
                raise ValueError("values must be finite")
            return value
        return int(parts[0])
    except ValueError as e:
        raise DatasetFormatError(line_number, f"malformed observation {text!r}: {e}") from e


def parse_dataset(lines: Iterable[str]) -> Tuple[LikelihoodModel, Dataset]:
    """
    Parse the dataset text format.

    The first non-blank line is ``model: <label>``; every following non-blank
    line is one observation (pairs comma-separated). Lines starting with '#'
    are comments.

    Returns:
        The model named by the header and the validated dataset
    """
    label = None
    header_line = 0
    observations: List = []
    for line_number, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        if label is None:
            key, sep, value = text.partition(":")
            if not sep or key.strip() != HEADER_KEY or not value.strip():
                raise DatasetFormatError(line_number, f"expected header 'model: <label>', got {text!r}")
            label = value.strip()
            header_line = line_number
            try:
                first_model = model_from_label(label, T=2)
            except ModelError as e:
                raise DatasetFormatError(line_number, str(e)) from e
            continue
        value = _parse_value(label, text, line_number)
        try:
            if not isinstance(first_model, AR1Model):
                first_model.validate_observation(value)
        except ModelError as e:
            raise DatasetFormatError(line_number, str(e)) from e
        observations.append(value)

    if label is None:
        raise DatasetFormatError(max(header_line, 1), "missing 'model: <label>' header")
    try:
        model = model_from_label(label, T=len(observations)) if label == "ar1" else first_model
    except ModelError as e:
        raise DatasetFormatError(header_line, str(e)) from e
    data = Dataset(tuple(observations), model.label)
    model.validate(data)
    logger.info("read %d %s observations", len(data), model.label)
    return model, data


def read_dataset(path: Union[str, Path]) -> Tuple[LikelihoodModel, Dataset]:
    with open(path, "r") as f:
        return parse_dataset(f)


def write_dataset(data: Dataset, path: Union[str, Path]) -> None:
    lines = [f"{HEADER_KEY}: {data.model_label}"]
    for y in data.observations:
        if isinstance(y, tuple):
            lines.append(", ".join(f"{v:.17g}" for v in y))
        elif isinstance(y, float):
            lines.append(f"{y:.17g}")
        else:
            lines.append(str(y))
    Path(path).write_text("\n".join(lines) + "\n")


def prior_record(prior: PriorMeasure, grid: Grid) -> dict:
    """Serializable record of a prior with its density sampled on a grid."""
    return {
        "label": prior.label,
        "domain": prior.domain.to_dict(),
        "atoms": [[loc, mass] for loc, mass in prior.atoms],
        "nodes": [float(v) for v in grid.nodes],
        "density": [float(v) for v in prior.density_on(grid)],
        "proper": prior.proper,
        "total_mass": prior.total_mass,
        "constant": float(prior.constant),
    }


def dump_prior_record(record: dict, path: Union[str, Path]) -> None:
    ordered = {key: record[key] for key in PRIOR_RECORD_FIELDS}
    Path(path).write_text(encode_json(ordered) + "\n")


def load_prior_record(path: Union[str, Path]) -> dict:
    record = json.loads(Path(path).read_text())
    missing = [key for key in PRIOR_RECORD_FIELDS if key not in record]
    if missing:
        raise ValueError(f"prior record is missing fields {missing}")
    return record
