"""
JSON artifact models.

Every artifact carries ``schema_version`` and a ``kind`` discriminator. Complex numbers are
stored as ``[re, im]`` pairs, matrices as ``{"rows", "cols", "entries"}`` with the entries in
row-major order, and block states as ``{"layout", "decomp", "x", "y"}``.
"""

import math
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator, model_validator

SCHEMA_VERSION = "1.0"
SUPPORTED_VERSIONS = (SCHEMA_VERSION,)

Complex = Tuple[float, float]
Vector = List[Complex]


def _all_finite(entries: Vector) -> bool:
    return all(math.isfinite(re) and math.isfinite(im) for re, im in entries)


class VersionedModel(BaseModel):
    """Base for top-level artifacts."""

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    schema_version: str = SCHEMA_VERSION

    @field_validator("schema_version")
    @classmethod
    def known_version(cls, value: str) -> str:
        if value not in SUPPORTED_VERSIONS:
            raise ValueError(f"unknown schema version {value!r}; supported: {', '.join(SUPPORTED_VERSIONS)}")
        return value


class MatrixModel(BaseModel):
    """Dense complex matrix, entries in row-major order."""

    model_config = ConfigDict(extra="forbid")

    rows: int = Field(ge=1)
    cols: int = Field(ge=1)
    entries: Vector

    @model_validator(mode="after")
    def consistent_size(self) -> "MatrixModel":
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(f"{self.rows}×{self.cols} matrix needs {self.rows * self.cols} entries, got {len(self.entries)}")
        if not _all_finite(self.entries):
            raise ValueError("matrix entries must be finite")
        return self


class LayoutModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    m: int = Field(ge=1)


class DecompositionModel(BaseModel):
    """Ranks of the cavity blocks A, B, C, D."""

    model_config = ConfigDict(extra="forbid")

    rA: int = Field(ge=0)
    rB: int = Field(ge=0)
    rC: int = Field(ge=0)
    rD: int = Field(ge=0)


class StateModel(BaseModel):
    """Block state: ``x`` holds the m slit-1 vectors of H2, ``y`` the slit-2 ones."""

    model_config = ConfigDict(extra="forbid")

    layout: LayoutModel
    decomp: DecompositionModel
    x: List[Vector]
    y: List[Vector]

    @model_validator(mode="after")
    def consistent_shape(self) -> "StateModel":
        m = self.layout.m
        d = self.decomp
        dim2 = d.rA + d.rB + d.rC + d.rD
        if len(self.x) != m or len(self.y) != m:
            raise ValueError(f"x and y must each hold m = {m} vectors")
        for side, vectors in (("x", self.x), ("y", self.y)):
            for j, vector in enumerate(vectors):
                if len(vector) != dim2:
                    raise ValueError(f"{side}[{j}] has {len(vector)} entries, the decomposition needs {dim2}")
                if not _all_finite(vector):
                    raise ValueError(f"{side}[{j}] has non-finite entries")
        return self


class InstanceModel(VersionedModel):
    """A problem instance: state ``psi``, optional K, optional detector override."""

    kind: Literal["instance"] = "instance"
    family: str = "custom"
    params: Dict[str, Any] = Field(default_factory=dict)
    psi: StateModel
    K: Optional[MatrixModel] = None
    detector: Optional[MatrixModel] = None

    model_config = ConfigDict(
        populate_by_name=True,
        extra="forbid",
        json_schema_extra={
            "example": {
                "schema_version": "1.0",
                "kind": "instance",
                "family": "esw",
                "params": {},
                "psi": {
                    "layout": {"m": 1},
                    "decomp": {"rA": 1, "rB": 0, "rC": 0, "rD": 1},
                    "x": [[[0.7071067811865475, 0.0], [0.0, 0.0]]],
                    "y": [[[0.0, 0.0], [0.7071067811865475, 0.0]]],
                },
                "K": None,
                "detector": None,
            }
        },
    )

    @field_validator("K", "detector")
    @classmethod
    def square(cls, value: Optional[MatrixModel]) -> Optional[MatrixModel]:
        if value is not None and value.rows != value.cols:
            raise ValueError("matrix must be square")
        return value


class ConditionModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    passed: bool = Field(alias="pass")
    residual: float
    detail: Dict[str, float] = Field(default_factory=dict)


class CheckReportModel(VersionedModel):
    """Checker outcome with one top-level entry per condition."""

    kind: Literal["check_report"] = "check_report"
    family: str = "custom"
    C1: ConditionModel
    C2: ConditionModel
    C3: ConditionModel
    C4: ConditionModel
    C5: ConditionModel
    verdict: bool
    correlation: Optional[Dict[str, Any]] = None
    case: Optional[Dict[str, Any]] = None


class RestartModel(BaseModel):
    index: int
    converged: bool
    residual: float
    iterations: int


class SolverReportModel(VersionedModel):
    """Solver outcome. ``best_residual`` is None when no restart ran."""

    kind: Literal["solver_report"] = "solver_report"
    options: Dict[str, Any]
    subspace_dimension: Optional[int] = None
    restarts: List[RestartModel] = Field(default_factory=list)
    solutions: List[InstanceModel] = Field(default_factory=list)
    best_residual: Optional[float] = None
    rejected_reason: Optional[str] = None
    discarded: Dict[str, int] = Field(default_factory=dict)
    found: bool = False


class InfeasibilityModel(VersionedModel):
    kind: Literal["infeasibility"] = "infeasibility"
    exact_infeasible: bool
    exact_steps: List[str]
    trials: int
    seed: int
    solutions_found: int
    best_residual: Optional[float] = None
    rejected_trials: int = 0
    sparse_trials: int = 0
    outcomes: Dict[str, int] = Field(default_factory=dict)
    failed_conditions: Dict[str, int] = Field(default_factory=dict)


Artifact = Annotated[
    Union[InstanceModel, CheckReportModel, SolverReportModel, InfeasibilityModel],
    Field(discriminator="kind"),
]

artifact_adapter: TypeAdapter = TypeAdapter(Artifact)
