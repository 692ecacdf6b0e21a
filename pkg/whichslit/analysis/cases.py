"""
Case labels (a)–(d) for detector-compatible states.

For two slit states per side (m = 2) the label records which of b_1 and δ_1 vanish once the
dependence x_2 = μ x_1, y_2 = λ y_1 is factored out. For m = 3 it records whether the pairs
(b_1, b_2) and (δ_1, δ_2) are linearly dependent. Only the middle cases can carry solutions
with 0 ≠ GΨ ≠ Ψ.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Union

import numpy as np

from whichslit.config import config
from whichslit.exceptions import DegenerateStateError, IncompatibleStateError, PreconditionError
from whichslit.operators.layout import BlockState, compatibility_report

logger = logging.getLogger(__name__)

Witness = Union[complex, str, None]


@dataclass(frozen=True)
class CaseLabel:
    """
    A case label with its dependence witnesses.

    ``mu`` relates the slit-1 pair and ``lam`` the slit-2 pair (second = coefficient ×
    first). A witness is ``"independent"`` when no such coefficient exists, and None
    when the first member of the pair vanishes.
    """

    label: str
    mu: Witness
    lam: Witness

    def to_dict(self) -> Dict[str, Any]:
        def encode(value: Witness):
            return [value.real, value.imag] if isinstance(value, complex) else value

        return {"label": self.label, "mu": encode(self.mu), "lambda": encode(self.lam)}


def _is_zero(vector: np.ndarray, tol: float) -> bool:
    return float(np.linalg.norm(vector)) <= tol


def _dependence(first: np.ndarray, second: np.ndarray, tol: float) -> Witness:
    """Coefficient c with second = c·first, ``"independent"``, or None if first is zero."""
    stacked = np.vstack([first, second])
    singular = np.linalg.svd(stacked, compute_uv=False)
    if singular[0] == 0.0:
        return 0j
    if singular.size > 1 and singular[1] > tol * singular[0]:
        return "independent"
    norm = np.vdot(first, first).real
    if norm <= (tol * singular[0]) ** 2:
        return None
    return complex(np.vdot(first, second) / norm)


def classify_case(psi: BlockState, tol: Optional[float] = None) -> CaseLabel:
    """
    Label a detector-compatible state with m ∈ {2, 3} as case a, b, c or d.

    Raises:
        IncompatibleStateError: ``psi`` is not detector-compatible.
        PreconditionError: m is not 2 or 3.
        DegenerateStateError: the slit-1 or slit-2 side vanishes entirely.
    """
    report = compatibility_report(psi)
    if not report.holds:
        raise IncompatibleStateError("case labels need a detector-compatible state", residual=report.residual)
    m = psi.layout.m
    if m not in (2, 3):
        raise PreconditionError(f"case labels are defined for m = 2 or 3, got m = {m}")
    dependence_tol = config.tolerance("dependence") if tol is None else tol
    zero_tol = config.tolerance("equality")

    x, y = psi.x, psi.y
    if all(_is_zero(v, zero_tol) for v in x) or all(_is_zero(v, zero_tol) for v in y):
        raise DegenerateStateError("one slit side of the state is identically zero")

    b = [psi.component("x", j, "B") for j in range(m)]
    delta = [psi.component("y", k, "D") for k in range(m)]

    if m == 2:
        mu = _dependence(x[0], x[1], dependence_tol)
        lam = _dependence(y[0], y[1], dependence_tol)
        b_vanishes = all(_is_zero(v, zero_tol) for v in b)
        delta_vanishes = all(_is_zero(v, zero_tol) for v in delta)
        label = {
            (True, True): "a",
            (True, False): "b",
            (False, True): "c",
            (False, False): "d",
        }[(b_vanishes, delta_vanishes)]
        return CaseLabel(label=label, mu=mu, lam=lam)

    mu = _dependence(b[0], b[1], dependence_tol)
    lam = _dependence(delta[0], delta[1], dependence_tol)
    b_independent = mu == "independent"
    delta_independent = lam == "independent"
    label = {
        (True, True): "a",
        (False, True): "b",
        (True, False): "c",
        (False, False): "d",
    }[(b_independent, delta_independent)]
    return CaseLabel(label=label, mu=mu, lam=lam)
