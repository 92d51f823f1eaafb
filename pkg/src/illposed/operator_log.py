"""The operator logarithm and elements of prescribed mixed smoothness.

``log_apply`` realizes log(A) u as the limit of the difference quotients
(A^p u - u)/p along a schedule p -> 0 with one Richardson step; whether the
quotients form a Cauchy sequence is grid-level *evidence* of membership in
the domain of log(A), reported as a flag and never as proof.

``shifted_log_resolvent_power`` realizes (lambda I - log A)^{-nu} w through
its Laplace representation

    (1/(nu-1)!) * int_0^infty q^{nu-1} e^{-lambda q} A^q w dq,

valid for every shift lambda above omega = log ||A||.  On the diagonal kind
the scalar closed form (lambda - log sigma_k)^{-nu} is used instead, because
fixed-width quadrature panels cannot resolve modes whose decay rate
lambda - log sigma_k is much larger than lambda - omega; the quadrature
route stays available for the Volterra kinds and as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fractional import fractional_power_exact
from .grid import GridFunction
from .operators import DiscreteOperator


def default_p_schedule() -> np.ndarray:
    return 2.0 ** -np.arange(3, 13, dtype=float)


@dataclass(frozen=True)
class LogQuotientReport:
    """Convergence diagnostics of the difference quotients (A^p u - u)/p."""

    p_schedule: np.ndarray
    distances: np.ndarray  # ||d_{k+1} - d_k||
    cauchy: bool


def log_apply(
    op: DiscreteOperator, u: GridFunction, p_schedule=None
) -> tuple[GridFunction, LogQuotientReport]:
    """Difference-quotient realization of log(A) u.

    Returns the Richardson extrapolation over the two smallest schedule
    entries together with a convergence report.  ``cauchy`` is True when the
    successive quotient distances keep shrinking by at least a factor 1.5
    over the tail of the schedule (membership evidence), False otherwise;
    non-membership is never an error.
    """
    ps = default_p_schedule() if p_schedule is None else np.asarray(p_schedule, dtype=float)
    if ps.size < 4 or np.any(np.diff(ps) >= 0) or np.any(ps <= 0):
        raise DomainError("p schedule must be strictly decreasing, positive, length >= 4")
    quotients = []
    for p in ps:
        ap = fractional_power_exact(op, float(p), u)
        quotients.append((ap - u) * (1.0 / p))
    dists = np.array(
        [(quotients[k + 1] - quotients[k]).norm() for k in range(len(quotients) - 1)]
    )
    floor = 1e-13 * max(1.0, u.norm())
    if dists[-1] <= floor:
        cauchy = True
    else:
        tail = dists[-3:]
        cauchy = bool(tail[0] >= 1.5 * tail[1] and tail[1] >= 1.5 * tail[2])
    r = ps[-2] / ps[-1]
    extrap = (r * quotients[-1] - quotients[-2]) * (1.0 / (r - 1.0))
    return extrap, LogQuotientReport(p_schedule=ps, distances=dists, cauchy=cauchy)


@dataclass(frozen=True)
class LaplaceQuadrature:
    """Composite Gauss-Legendre rule on [0, q_max] for the Laplace representation."""

    q_max: float
    nodes: int = 400
    points_per_panel: int = 10

    def __post_init__(self):
        if self.q_max <= 0 or self.nodes < 200:
            raise DomainError("need q_max > 0 and at least 200 nodes")

    @classmethod
    def default(cls, lam: float, omega: float) -> "LaplaceQuadrature":
        # panels of width 1/(lam - omega) up to 40/(lam - omega): the
        # neglected tail of the scalar model is below e^{-40} ~ 4e-18
        gap = lam - omega
        if gap <= 0:
            raise DomainError("shift below spectral bound")
        return cls(q_max=40.0 / gap, nodes=400, points_per_panel=10)

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        panels = max(1, self.nodes // self.points_per_panel)
        xi, wi = np.polynomial.legendre.leggauss(self.points_per_panel)
        edges = np.linspace(0.0, self.q_max, panels + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        qs = (mid[:, None] + half[:, None] * xi[None, :]).ravel()
        ws = (half[:, None] * wi[None, :]).ravel()
        return qs, ws


def diagonal_log_values(op: DiscreteOperator) -> np.ndarray:
    """log sigma_k for the diagonal kind (the spectral closed form)."""
    if op.kind != "diagonal":
        raise DomainError("closed-form logarithm exists only for the diagonal kind")
    return np.log(op.weights)


def shifted_log_resolvent_power(
    op: DiscreteOperator,
    lam: float,
    nu: int,
    w: GridFunction,
    quad: LaplaceQuadrature | None = None,
    force_quadrature: bool = False,
) -> GridFunction:
    """(lambda I - log A)^{-nu} w.

    Diagonal kind: exact scalar form unless ``force_quadrature`` is set.
    Volterra kinds: Laplace quadrature, each node one exact power A^q w.
    """
    if nu < 1 or int(nu) != nu:
        raise DomainError("nu must be a positive integer")
    if lam <= op.omega:
        raise DomainError("shift below spectral bound")
    if op.kind == "diagonal" and not force_quadrature:
        return w.with_values(w.values / (lam - np.log(op.weights)) ** nu)
    if quad is None:
        quad = LaplaceQuadrature.default(lam, op.omega)
    if quad.q_max < 10.0 / (lam - op.omega):
        raise DomainError("q_max too small for the shift gap")
    qs, ws = quad.points()
    fac = math.factorial(nu - 1)
    acc = np.zeros(w.dim)
    for q, wt in zip(qs, ws):
        aq = fractional_power_exact(op, float(q), w)
        acc += wt * q ** (nu - 1) * math.exp(-lam * q) / fac * aq.values
    return w.with_values(acc)


@dataclass(frozen=True)
class SourceCondition:
    """Mixed-smoothness descriptor: u = A^p (lambda I - log A)^{-nu} w."""

    p: float
    nu: int
    lam: float
    w: GridFunction

    def __post_init__(self):
        if self.p < 0:
            raise DomainError("p must be nonnegative")
        if self.nu < 1 or int(self.nu) != self.nu:
            raise DomainError("nu must be a positive integer")

    def validate_against(self, op: DiscreteOperator, p0: float = math.inf) -> None:
        if self.lam <= op.omega:
            raise DomainError(
                f"shift lambda = {self.lam} must exceed omega = log ||A|| = {op.omega}"
            )
        if not self.p < p0:
            raise DomainError(f"smoothness p = {self.p} must stay below the saturation {p0}")
        if self.w.dim != op.dim or self.w.norm_kind != op.norm_kind:
            raise DomainError("source element w does not match the operator")


def make_mixed_smooth_element(
    op: DiscreteOperator, sc: SourceCondition, quad: LaplaceQuadrature | None = None
) -> GridFunction:
    """u = A^p (lambda I - log A)^{-nu} w, the ground-truth generator for rate runs."""
    sc.validate_against(op)
    v = shifted_log_resolvent_power(op, sc.lam, sc.nu, sc.w, quad=quad)
    return fractional_power_exact(op, sc.p, v)
