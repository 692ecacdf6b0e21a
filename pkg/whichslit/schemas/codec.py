"""
Conversion between domain objects and JSON artifacts.

``dump_*`` functions build pydantic models from domain objects; ``write_artifact`` and
``read_artifact`` move them through files; ``validate_io`` reads a file and returns the
domain object it describes.
"""

import logging
import math
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from whichslit.analysis.checker import CheckReport, CorrelationClass, ProblemInstance
from whichslit.analysis.cases import CaseLabel
from whichslit.analysis.families import InfeasibilityCertificate
from whichslit.analysis.solver import SolverReport
from whichslit.config import config
from whichslit.exceptions import InputError, SchemaError, ZeroStateError
from whichslit.operators.algebra import frobenius
from whichslit.operators.layout import BlockState, CavityDecomposition, SlitLayout, assemble_state, compatibility_report
from whichslit.schemas.models import (
    CheckReportModel,
    DecompositionModel,
    InfeasibilityModel,
    InstanceModel,
    LayoutModel,
    MatrixModel,
    SolverReportModel,
    StateModel,
    Vector,
    artifact_adapter,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _finite_or_none(value: float) -> Optional[float]:
    return float(value) if math.isfinite(value) else None


def _pairs(values) -> Vector:
    return [(float(z.real), float(z.imag)) for z in values]


def matrix_to_model(matrix) -> MatrixModel:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.complex128))
    rows, cols = matrix.shape
    return MatrixModel(rows=rows, cols=cols, entries=_pairs(matrix.reshape(-1)))


def model_to_matrix(model: MatrixModel) -> np.ndarray:
    flat = np.array([complex(re, im) for re, im in model.entries], dtype=np.complex128)
    return flat.reshape(model.rows, model.cols)


def _vectors(vectors) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in vector] for vector in vectors], dtype=np.complex128)


def dump_instance(instance: ProblemInstance) -> InstanceModel:
    psi = instance.psi
    state = StateModel(
        layout=LayoutModel(m=psi.layout.m),
        decomp=DecompositionModel(**psi.decomp.to_dict()),
        x=[_pairs(row) for row in np.atleast_2d(psi.x)],
        y=[_pairs(row) for row in np.atleast_2d(psi.y)],
    )
    return InstanceModel(
        family=instance.family,
        params=dict(instance.params),
        psi=state,
        K=None if instance.K is None else matrix_to_model(instance.K),
        detector=None if instance.detector is None else matrix_to_model(instance.detector),
    )


def load_instance(model: InstanceModel, strict: bool = False) -> ProblemInstance:
    """
    Rebuild a ``ProblemInstance``.

    A state that is not normalized is normalized with a warning, or rejected when
    ``strict`` is set. A non-Hermitian K is accepted with a warning; the checker fails it.

    Raises:
        SchemaError: ``strict`` is set and the state is not normalized.
        ZeroStateError: The state is zero.
    """
    s = model.psi
    decomp = CavityDecomposition(**s.decomp.model_dump())
    x = _vectors(s.x)
    y = _vectors(s.y)
    norm = float(np.sqrt(np.sum(np.abs(x) ** 2) + np.sum(np.abs(y) ** 2)))
    if norm == 0.0:
        raise ZeroStateError("state in file is zero")
    if abs(norm - 1.0) > config.tolerance("equality") * max(1.0, np.sqrt(x.size + y.size)):
        if strict:
            raise SchemaError(f"state is not normalized (norm {norm!r})", field="psi")
        logger.warning("state is not normalized (norm %.17g); normalizing", norm)
        psi = assemble_state(list(x), list(y), decomp)
    else:
        psi = BlockState(SlitLayout(s.layout.m), decomp, np.concatenate([x, y]).reshape(-1))
        report = compatibility_report(psi)
        if not report.holds:
            logger.warning("state violates the detector-compatible form (forbidden norm %.3e)", report.residual)

    K = None if model.K is None else model_to_matrix(model.K)
    if K is not None:
        gap = frobenius(K - K.conj().T)
        if gap > config.tolerance("hermiticity"):
            logger.warning("K is not Hermitian (residual %.3e); the checker will reject it", gap)
    detector = None if model.detector is None else model_to_matrix(model.detector)
    return ProblemInstance(psi=psi, K=K, detector=detector, family=model.family, params=dict(model.params))


def dump_check_report(
    report: CheckReport,
    family: str = "custom",
    correlation: Optional[CorrelationClass] = None,
    case: Optional[CaseLabel] = None,
) -> CheckReportModel:
    return CheckReportModel(
        family=family,
        **report.to_dict(),
        correlation=None if correlation is None else correlation.to_dict(),
        case=None if case is None else case.to_dict(),
    )


def dump_solver_report(report: SolverReport) -> SolverReportModel:
    return SolverReportModel(
        options=report.options.to_dict(),
        subspace_dimension=report.subspace_dimension,
        restarts=[record.to_dict() for record in report.restarts],
        solutions=[dump_instance(instance) for instance in report.instances],
        best_residual=_finite_or_none(report.best_residual),
        rejected_reason=report.rejected_reason,
        discarded=dict(report.discarded),
        found=report.found,
    )


def dump_certificate(certificate: InfeasibilityCertificate) -> InfeasibilityModel:
    data: Dict[str, Any] = certificate.to_dict()
    data["best_residual"] = _finite_or_none(data["best_residual"])
    return InfeasibilityModel(**data)


def write_artifact(model: BaseModel, path: PathLike) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(model.model_dump_json(indent=2, by_alias=True) + "\n", encoding="utf-8")
    logger.info("wrote %s artifact to %s", getattr(model, "kind", "json"), target)
    return target


def _schema_error(error: ValidationError) -> SchemaError:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first.get("loc", ())) or "<root>"
    return SchemaError(f"{location}: {first.get('msg', 'invalid value')}", field=location)


def read_artifact(path: PathLike) -> BaseModel:
    """
    Parse and validate any artifact file.

    Raises:
        InputError: The file cannot be read.
        SchemaError: The content is not valid JSON or fails validation; ``field`` names
            the offending location.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e
    try:
        return artifact_adapter.validate_json(text)
    except ValidationError as e:
        raise _schema_error(e) from e


def validate_io(path: PathLike, strict: bool = False):
    """
    Read an artifact and return its domain object.

    Instances come back as ``ProblemInstance``; reports and certificates come back as
    their validated models.
    """
    model = read_artifact(path)
    if isinstance(model, InstanceModel):
        return load_instance(model, strict=strict)
    return model
