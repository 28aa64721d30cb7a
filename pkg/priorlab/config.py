"""Configuration file handling and validation using Pydantic."""

import re
from pathlib import Path
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, Field, field_validator, model_validator

from priorlab.core.numerics import GAUSS_LEGENDRE, SCHEMES, TANH_SINH
from priorlab.core.priors import PRIOR_KINDS

OUTPUT_FORMATS = ("json", "csv")
MODEL_LABELS = ("bernoulli", "correlation", "ar1", "multinomial-K")


class NumericsSettings(BaseModel):
    """Grid and quadrature defaults."""
    grid_size: int = Field(default=2048, ge=2, description="Grid nodes")
    unit_scheme: str = Field(default=TANH_SINH, description="Scheme for parameters on [0, 1]")
    symmetric_scheme: str = Field(default=GAUSS_LEGENDRE, description="Scheme for parameters on (-1, 1)")
    rel_tol: float = Field(default=1e-9, gt=0, le=1e-2, description="Adaptive quadrature tolerance")
    fd_step: float = Field(default=1e-3, ge=1e-6, le=1e-3, description="Finite-difference step for the Jeffreys rule prior")

    @field_validator('unit_scheme', 'symmetric_scheme')
    @classmethod
    def validate_scheme(cls, v):
        if v not in SCHEMES:
            raise ValueError(f"scheme must be one of {list(SCHEMES)}")
        return v

    def scheme_for(self, lower: float, upper: float) -> str:
        return self.unit_scheme if (lower, upper) == (0.0, 1.0) else self.symmetric_scheme


class LumpSettings(BaseModel):
    """Demo lump masses for the mixed prior (a convention, not a derived value)."""
    k0: float = Field(default=0.25, ge=0.0, lt=1.0, description="Mass at p = 0")
    k1: float = Field(default=0.25, ge=0.0, lt=1.0, description="Mass at p = 1")

    @model_validator(mode='after')
    def validate_total(self):
        if self.k0 + self.k1 >= 1.0:
            raise ValueError("lump masses k0 + k1 must be below 1")
        return self


class ProcessingSettings(BaseModel):
    """Batch evaluation configuration."""
    max_workers: int = Field(default=4, ge=1, le=32, description="Parallel batch workers")
    show_progress: bool = Field(default=True, description="Show a progress bar on stderr")


class OutputSettings(BaseModel):
    """Record output settings."""
    format: str = Field(default="json", description="Machine output format")
    machine_digits: int = Field(default=17, ge=1, le=17, description="Significant digits in records")
    human_digits: int = Field(default=10, ge=1, le=17, description="Significant digits on the terminal")

    @field_validator('format')
    @classmethod
    def validate_format(cls, v):
        if v not in OUTPUT_FORMATS:
            raise ValueError(f"format must be one of {list(OUTPUT_FORMATS)}")
        return v


class PriorLabConfig(BaseModel):
    """Root configuration model."""
    version: str = Field(default="1.0", description="Config format version")
    numerics: NumericsSettings = Field(default_factory=NumericsSettings)
    lumps: LumpSettings = Field(default_factory=LumpSettings)
    processing: ProcessingSettings = Field(default_factory=ProcessingSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)

    @classmethod
    def from_yaml(cls, yaml_path: str) -> 'PriorLabConfig':
        """Load configuration from YAML file."""
        with open(yaml_path, 'r') as f:
            data = yaml.safe_load(f) or {}
        return cls(**data)

    def to_yaml(self, yaml_path: str) -> None:
        """Save configuration to YAML file."""
        with open(yaml_path, 'w') as f:
            data = self.model_dump(exclude_none=True)
            yaml.dump(data, f, default_flow_style=False, sort_keys=False)

    @classmethod
    def create_default(cls) -> 'PriorLabConfig':
        """Create a default configuration."""
        return cls()


class RunConfig(BaseModel):
    """One command invocation, validated before any computation."""
    command: Literal["prior", "posterior", "succession", "efficiency", "ar1"]
    model_label: str = Field(default="bernoulli")
    prior_kind: Optional[str] = Field(default=None)
    grid_size: int = Field(default=2048, ge=2)
    scheme: Optional[str] = Field(default=None, description="Overrides the per-domain default scheme")
    output_format: Literal["json", "csv"] = Field(default="json")
    seed: Optional[int] = Field(default=None)
    output_path: Optional[Path] = Field(default=None)

    @field_validator('model_label')
    @classmethod
    def validate_model_label(cls, v):
        if v not in MODEL_LABELS[:3] and not re.fullmatch(r"multinomial-\d+", v):
            raise ValueError(f"model must be one of {list(MODEL_LABELS)}")
        return v

    @field_validator('scheme')
    @classmethod
    def validate_scheme(cls, v):
        if v is not None and v not in SCHEMES:
            raise ValueError(f"scheme must be one of {list(SCHEMES)}")
        return v

    @field_validator('prior_kind')
    @classmethod
    def validate_prior_kind(cls, v):
        if v is not None and v not in PRIOR_KINDS:
            raise ValueError(f"prior kind must be one of {list(PRIOR_KINDS)}")
        return v
