"""Rate functions, the a priori rule, and the residual-band a posteriori rule.

The functions chi_{q, +-mu}(t) = t^q (log(1/t))^{+-mu} on (0, 1) calibrate
every convergence statement in this package; their inverses and scaling
behaviour are what turns noise levels into regularization parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .grid import GridFunction
from .operators import DiscreteOperator, apply
from .schemes import RegularizerConfig, regularize


@dataclass(frozen=True)
class ChiParams:
    """Parameters of chi_{q, sign*mu}(t) = t^q (log(1/t))^{sign*mu}."""

    q: float
    mu: float
    sign: str = "-"

    def __post_init__(self):
        if self.q < 0:
            raise DomainError("q must be nonnegative")
        if self.mu <= 0:
            raise DomainError("mu must be positive")
        if self.sign not in ("+", "-"):
            raise DomainError("sign must be '+' or '-'")


def chi(params: ChiParams, t: float) -> float:
    if not 0.0 < t < 1.0:
        raise DomainError("chi is defined on 0 < t < 1")
    ell = math.log(1.0 / t)
    expo = params.mu if params.sign == "+" else -params.mu
    return t**params.q * ell**expo


def chi_inverse(q: float, mu: float, s: float) -> float:
    """Invert chi_{q,-mu} on its branch t <= exp(-mu/q).

    In ell = log(1/t) the equation reads q ell + mu log ell = log(1/s),
    solved by a safeguarded Newton iteration started from the known
    asymptotic inverse; the result satisfies |chi(t) - s| <= 1e-10 s.
    """
    if q <= 0 or mu <= 0:
        raise DomainError("need q > 0 and mu > 0")
    if s <= 0:
        raise DomainError("need s > 0")
    ell_cap = mu / q  # t_cap = exp(-mu/q)
    s_cap = math.exp(-mu) * ell_cap**-mu  # chi_{q,-mu}(t_cap)
    if s > s_cap * (1.0 + 1e-12):
        raise DomainError("s outside the range of the monotone branch")
    target = math.log(1.0 / s)

    def phi(ell: float) -> float:
        return q * ell + mu * math.log(ell) - target

    ls = math.log(1.0 / s)
    ell = max(ell_cap, (ls - mu * math.log(max(ls / q, 1.5))) / q, 1e-12)
    for _ in range(200):
        f = phi(ell)
        df = q + mu / ell
        step = f / df
        new = ell - step
        if new < ell_cap:
            new = 0.5 * (ell + ell_cap)
        ell = new
        t = math.exp(-ell)
        if 0.0 < t < 1.0 and abs(chi(ChiParams(q, mu, "-"), t) - s) <= 1e-11 * s:
            return t
    t = math.exp(-ell)
    if abs(chi(ChiParams(q, mu, "-"), t) - s) <= 1e-10 * s:
        return t
    raise DomainError("chi inverse iteration failed to converge")


def apriori_alpha(delta: float, p: float, nu: int, c0: float = 1.0) -> float:
    """alpha = c0 * delta^{1/(p+1)} * log^{nu/(p+1)}(1/delta)."""
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0, 1)")
    if p < 0 or nu < 1 or c0 <= 0:
        raise DomainError("need p >= 0, nu >= 1 and c0 > 0")
    ell = math.log(1.0 / delta)
    return c0 * delta ** (1.0 / (p + 1.0)) * ell ** (nu / (p + 1.0))


@dataclass(frozen=True)
class DiscrepancyConfig:
    """Residual-band search parameters.

    ``c0`` is the bound on ||S_alpha|| that the band constants must exceed;
    when None it defaults to the certified scheme constant at p = 0.  An
    instance-sharp value may be passed when known (the certified worst case
    can be far above the actual supremum on a given operator).
    """

    b0: float
    b1: float
    alpha_max: float
    ratio: float = 0.5
    bisect_tol: float = 1e-3
    c0: float | None = None
    alpha_min: float = 1e-14

    def __post_init__(self):
        if not 0.0 < self.ratio < 1.0:
            raise DomainError("ratio must lie in (0, 1)")
        if self.b1 < self.b0 or self.b0 <= 0:
            raise DomainError("need b1 >= b0 > 0")
        if self.alpha_max <= 0 or self.bisect_tol <= 0:
            raise DomainError("alpha_max and bisect_tol must be positive")


@dataclass(frozen=True)
class DiscrepancyResult:
    alpha: float  # math.inf in the degenerate branch
    u: GridFunction
    residual: float


def discrepancy_alpha(
    op: DiscreteOperator,
    cfg: RegularizerConfig,
    dcfg: DiscrepancyConfig,
    f_delta: GridFunction,
    delta: float,
    ubar: GridFunction,
) -> DiscrepancyResult:
    """Residual-band a posteriori choice of the regularization parameter.

    Degenerate branch: if ||A ubar - f_delta|| <= b1 delta the answer is
    (infinity, ubar).  Otherwise walk alpha down a geometric grid until the
    residual drops to b1 delta, then bisect the bracketing pair in log alpha
    until the residual lands in [b0 delta, b1 delta].
    """
    if delta <= 0:
        raise DomainError("delta must be positive")
    if not cfg.p0 > 1:
        raise DomainError("the residual-band rule needs saturation above 1 (Lavrentiev m >= 2)")
    c0 = dcfg.c0
    if c0 is None:
        c0 = cfg.qualification_constant(0.0, op.kappa_star)
    if c0 is not None and not dcfg.b0 > c0:
        raise DomainError(f"b0 = {dcfg.b0} must strictly exceed the companion bound c0 = {c0}")

    lo_t, hi_t = dcfg.b0 * delta, dcfg.b1 * delta
    r_bar = (apply(op, ubar) - f_delta).norm()
    if r_bar <= hi_t:
        return DiscrepancyResult(alpha=math.inf, u=ubar, residual=r_bar)

    def eval_at(a: float) -> tuple[GridFunction, float]:
        u = regularize(op, cfg, a, f_delta, ubar)
        return u, (apply(op, u) - f_delta).norm()

    alpha = dcfg.alpha_max
    u, r = eval_at(alpha)
    # If the residual starts below the band, march alpha upward first: the
    # residual tends to ||A ubar - f_delta|| > b1 delta as alpha -> infinity.
    guard = 0
    while r < lo_t:
        alpha /= dcfg.ratio
        u, r = eval_at(alpha)
        guard += 1
        if guard > 200:
            raise DomainError("discrepancy band unreachable")
    above: tuple[float, float] | None = None
    while True:
        if r <= hi_t:
            if r >= lo_t:
                return DiscrepancyResult(alpha=alpha, u=u, residual=r)
            break  # fell through the band; bisect against the last point above
        above = (alpha, r)
        alpha *= dcfg.ratio
        if alpha < dcfg.alpha_min:
            raise DomainError("discrepancy band unreachable")
        u, r = eval_at(alpha)
    if above is None:
        raise DomainError("discrepancy band unreachable")
    lo_a, hi_a = alpha, above[0]
    for _ in range(200):
        if math.log(hi_a / lo_a) <= dcfg.bisect_tol:
            break
        mid = math.sqrt(lo_a * hi_a)
        u_mid, r_mid = eval_at(mid)
        if lo_t <= r_mid <= hi_t:
            return DiscrepancyResult(alpha=mid, u=u_mid, residual=r_mid)
        if r_mid > hi_t:
            hi_a = mid
        else:
            lo_a = mid
    raise DomainError("discrepancy band unreachable")
