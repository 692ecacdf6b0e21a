"""
WhichSlitLab: the orchestrator the command line drives.

It ties family construction, verification, the projector search, screen statistics and
sampling together, and converts results into artifacts.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
import pandas as pd

from whichslit.analysis.cases import CaseLabel, classify_case
from whichslit.analysis.checker import CheckReport, CorrelationClass, ProblemInstance, check_problem, classify_correlation
from whichslit.analysis.families import FamilyTag, build_family, dim2_infeasibility, mirror_instance
from whichslit.analysis.solver import SolverOptions, search_solutions
from whichslit.exceptions import ConstraintError, InputError
from whichslit.operators.algebra import ket_projector, tensor_product
from whichslit.operators.layout import BlockState
from whichslit.schemas.codec import dump_certificate, dump_solver_report
from whichslit.schemas.models import SCHEMA_VERSION, InfeasibilityModel, SolverReportModel
from whichslit.services.distributions import (
    JointDistribution,
    classical_distribution,
    interference_term,
    joint_outcome_distribution,
    screen_distribution,
    selected_distribution,
)
from whichslit.services.export import distribution_frame, joint_frame
from whichslit.services.sampler import SampleResult, sample_runs
from whichslit.services.screen import ScreenModel, build_screen
from whichslit.utils.cache import Cache

logger = logging.getLogger(__name__)

SELECTIONS = ("none", "T", "Y", "TY", "Tplus")


@dataclass(frozen=True)
class Verification:
    """Check report plus the correlation class and case label where they apply."""

    report: CheckReport
    correlation: Optional[CorrelationClass] = None
    case: Optional[CaseLabel] = None

    @property
    def passed(self) -> bool:
        return self.report.verdict


class WhichSlitLab:
    """Main class that orchestrates the whichslit functionality."""

    def __init__(self, screen_kind: Optional[str] = None, cache: Optional[Cache] = None):
        self.screen_kind = screen_kind
        self.cache = cache or Cache()

    def family(self, name: str, mirror: bool = False, **params) -> ProblemInstance:
        """Build a named family member, optionally with the slits exchanged."""
        instance = build_family(name, **params)
        return mirror_instance(instance) if mirror else instance

    def verify(self, instance: ProblemInstance, tol: Optional[float] = None) -> Verification:
        """
        Run the checker; on a pass, also classify the correlation and the case.

        Raises:
            PreconditionError: The instance has no K.
        """
        report = check_problem(instance, tol=tol)
        correlation = case = None
        if report.verdict:
            correlation = classify_correlation(instance, tol=tol)
        if instance.layout.m in (2, 3):
            try:
                case = classify_case(instance.psi)
            except ConstraintError as e:
                logger.info("no case label: %s", e)
        return Verification(report=report, correlation=correlation, case=case)

    def search(
        self,
        psi: BlockState,
        rank: Optional[int] = None,
        restarts: Optional[int] = None,
        seed: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> SolverReportModel:
        """Search for solutions for ``psi``; reports are cached when caching is on."""
        opts = SolverOptions.from_config(rank_target=rank, restarts=restarts, seed=seed, workers=workers)
        key = {
            "schema_version": SCHEMA_VERSION,
            "decomposition": psi.decomp.to_dict(),
            "state": [[z.real, z.imag] for z in psi.vector],
            "options": {k: v for k, v in opts.to_dict().items() if k != "workers"},
        }
        cached = self.cache.get("solver", key)
        if cached is not None:
            logger.info("solver report served from cache")
            return SolverReportModel.model_validate_json(cached)

        model = dump_solver_report(search_solutions(psi, opts=opts))
        self.cache.set("solver", key, model.model_dump_json(indent=2, by_alias=True))
        return model

    def one_state_search(
        self,
        trials: int,
        seed: Optional[int] = None,
        restarts: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> InfeasibilityModel:
        """Exact and stochastic check that one state per slit admits no solution."""
        opts = SolverOptions.from_config(restarts=restarts, seed=seed, workers=workers)
        certificate = dim2_infeasibility(trials, opts.seed, opts=opts)
        return dump_certificate(certificate)

    def screen(self, dim1: int, n_bins: Optional[int] = None, kind: Optional[str] = None) -> ScreenModel:
        return build_screen(dim1, kind or self.screen_kind, n_bins)

    def selector(self, instance: ProblemInstance, select: str) -> Optional[np.ndarray]:
        """Product-space projector for a ``--select`` choice; None means no selection."""
        if select not in SELECTIONS:
            raise InputError(f"unknown selection {select!r}; choose from {', '.join(SELECTIONS)}")
        ops = instance.operators
        if select == "none":
            return None
        if select == "T":
            return ops.T
        if select == "Y":
            return ops.Y
        if select == "TY":
            return ops.T @ ops.Y
        if not instance.family.startswith(FamilyTag.ESW.value) or instance.decomp.dim2 != 2:
            raise InputError("selection Tplus is defined for the esw family only")
        return tensor_product(np.eye(instance.layout.dim1), ket_projector([1.0, 1.0]))

    def simulate(
        self,
        instance: ProblemInstance,
        select: str = "none",
        n_bins: Optional[int] = None,
        kind: Optional[str] = None,
    ) -> Tuple[pd.DataFrame, JointDistribution]:
        """
        Screen statistics of ``instance``.

        ``cross_term`` is the interference term under the chosen selection; the other
        columns do not depend on it.
        """
        screen = self.screen(instance.layout.dim1, n_bins, kind)
        psi = instance.psi
        ops = instance.operators
        Z = self.selector(instance, select)
        frame = distribution_frame(
            p_quantum=screen_distribution(psi, screen),
            p_classical=classical_distribution(psi, ops.E, screen),
            cross_term=interference_term(psi, ops.E, screen, Z),
            p_selected_y=selected_distribution(psi, ops.Y, screen),
            p_selected_t=selected_distribution(psi, ops.T, screen),
        )
        return frame, joint_outcome_distribution(instance, screen)

    def sample(
        self,
        instance: ProblemInstance,
        n: int,
        seed: Optional[int] = None,
        workers: Optional[int] = None,
        n_bins: Optional[int] = None,
        kind: Optional[str] = None,
    ) -> Tuple[SampleResult, pd.DataFrame]:
        screen = self.screen(instance.layout.dim1, n_bins, kind)
        result = sample_runs(instance, screen, n, seed=seed, workers=workers)
        return result, joint_frame(result.joint, result.counts)

    def screen_check(self, dim1: int, n_bins: Optional[int] = None, kind: Optional[str] = None) -> Dict[str, Any]:
        """
        Build and validate a screen and summarize it.

        Raises:
            DegenerateScreenError: The screen shows no cross terms.
        """
        screen = self.screen(dim1, n_bins, kind)
        resolution = sum(screen.projectors()) - np.eye(dim1)
        cross = screen.cross_terms()
        return {
            "kind": screen.kind,
            "dim1": screen.dim1,
            "bins": screen.n_bins,
            "resolution_residual": float(np.linalg.norm(resolution)),
            "max_cross_term": float(np.max(np.abs(cross))),
        }
