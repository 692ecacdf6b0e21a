"""
JSON artifact schemas and codecs.
"""

from whichslit.schemas.codec import (
    dump_certificate,
    dump_check_report,
    dump_instance,
    dump_solver_report,
    load_instance,
    read_artifact,
    validate_io,
    write_artifact,
)
from whichslit.schemas.models import (
    SCHEMA_VERSION,
    CheckReportModel,
    InfeasibilityModel,
    InstanceModel,
    SolverReportModel,
)

__all__ = [
    "SCHEMA_VERSION",
    "CheckReportModel",
    "InfeasibilityModel",
    "InstanceModel",
    "SolverReportModel",
    "dump_certificate",
    "dump_check_report",
    "dump_instance",
    "dump_solver_report",
    "load_instance",
    "read_artifact",
    "validate_io",
    "write_artifact",
]
