"""Discretized positive-type operators.

Three kinds are provided:

* ``integration`` -- the Volterra integration operator on [0, 1], discretized
  by piecewise-constant product integration (rectangle rule);
* ``abel`` -- the fractional integration operator of order ``0 < alpha <= 1``,
  discretized by product integration with exactly integrated kernel moments;
* ``diagonal`` -- a multiplication operator on a coefficient sequence, the
  Hilbert-space model (sigma_k = exp(-k) gives the exponentially ill-posed
  benchmark).

The Volterra kinds use right-endpoint attribution of the cell weights: cell
[x_{i-1}, x_i] multiplies u(x_i).  This keeps the lag-weight values of the
product rule (exact on constants) while making the shifted resolvent solve
unconditionally stable in alpha; attributing to the left endpoint produces a
strictly lower-triangular matrix whose resolvent blows up once alpha falls
below the grid spacing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import solve_triangular, toeplitz

from .errors import DimensionMismatchError, DomainError
from .grid import GridFunction, NORM_KINDS

DEFAULT_KAPPA_GRID_POINTS = 60
#: default estimation window for the positive-type constant, relative to ||A||
KAPPA_GRID_WINDOW = (1e-8, 1e4)


def product_integration_weights(order: float, n: int) -> np.ndarray:
    """Lag weights of piecewise-constant product integration of order > 0.

    w_m = h^order * ((m+1)^order - m^order) / Gamma(order+1).  The resulting
    convolution is exact on constants: row j of the weight matrix sums to
    x_j^order / Gamma(order+1).
    """
    if order <= 0:
        raise DomainError("product integration requires a positive order")
    h = 1.0 / n
    m = np.arange(n, dtype=float)
    return h**order / math.gamma(order + 1.0) * ((m + 1.0) ** order - m**order)


def _lower_toeplitz(lags: np.ndarray) -> np.ndarray:
    return np.tril(toeplitz(lags, np.zeros_like(lags)))


def _volterra_matrix(lags: np.ndarray) -> np.ndarray:
    """Full (n+1) x (n+1) matrix: node 0 maps to 0 and contributes nothing."""
    n = lags.size
    m = np.zeros((n + 1, n + 1))
    m[1:, 1:] = _lower_toeplitz(lags)
    return m


def _power_iteration_norm(mat: np.ndarray, tol: float = 1e-8, maxit: int = 2000) -> float:
    """Largest singular value by power iteration on M^T M (deterministic start)."""
    x = np.ones(mat.shape[1])
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(maxit):
        y = mat @ x
        z = mat.T @ y
        nz = np.linalg.norm(z)
        if nz == 0.0:
            return 0.0
        new = np.linalg.norm(y)  # ||Mx|| with ||x|| = 1
        x = z / nz
        if abs(new - est) <= tol * max(new, 1e-300):
            return new
        est = new
    return est


def _inverse_power_norm(
    lower: np.ndarray,
    tol: float = 1e-8,
    maxit: int = 2000,
    x0: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """Largest singular value of inv(L) for lower-triangular L, by power iteration.

    Returns (estimate, final vector); passing the vector back in as ``x0``
    warm-starts the next call, which makes sweeps over nearby shifts cheap.
    """
    x = np.ones(lower.shape[0]) if x0 is None else x0.copy()
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(maxit):
        y = solve_triangular(lower, x, lower=True)
        z = solve_triangular(lower, y, lower=True, trans="T")
        nz = np.linalg.norm(z)
        if nz == 0.0:
            return 0.0, x
        new = np.linalg.norm(y)
        x = z / nz
        if abs(new - est) <= tol * max(new, 1e-300):
            return new, x
        est = new
    return est, x


@dataclass(frozen=True)
class DiscreteOperator:
    """Immutable realization of a positive-type operator.

    Fields mirror the construction: ``weights`` holds the Toeplitz lag
    weights (Volterra kinds) or the singular values (diagonal kind);
    ``matrix`` is the dense lower-triangular realization for Volterra kinds
    and ``None`` for diagonal ones.  ``kappa_star`` is the empirical
    positive-type constant, estimated once at construction; ``omega`` is
    log ||A||.
    """

    kind: str
    norm_kind: str
    order: float
    weights: np.ndarray
    matrix: np.ndarray | None
    op_norm: float
    omega: float
    kappa_star: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.matrix is not None:
            m = np.asarray(self.matrix, dtype=float)
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)

    @property
    def is_volterra(self) -> bool:
        return self.kind in ("integration", "abel")

    @property
    def dim(self) -> int:
        """Length of admissible value vectors."""
        if self.is_volterra:
            return self.weights.size + 1
        return self.weights.size

    @property
    def n(self) -> int:
        """Grid cells for Volterra kinds, mode count for the diagonal kind."""
        return self.weights.size

    def grid_function(self, values) -> GridFunction:
        return GridFunction(values, self.norm_kind)

    def ones(self) -> GridFunction:
        return self.grid_function(np.ones(self.dim))

    def zeros(self) -> GridFunction:
        return self.grid_function(np.zeros(self.dim))

    def unit(self, k: int) -> GridFunction:
        v = np.zeros(self.dim)
        v[k] = 1.0
        return self.grid_function(v)

    def scaled(self, a: float) -> "DiscreteOperator":
        """The operator a*A.

        The positive-type constant is scale invariant, the norm scales by a
        and omega shifts by log(a).
        """
        if a <= 0:
            raise DomainError("scale factor must be positive")
        return replace(
            self,
            weights=self.weights * a,
            matrix=None if self.matrix is None else self.matrix * a,
            op_norm=self.op_norm * a,
            omega=self.omega + math.log(a),
        )


def _check_dims(op: DiscreteOperator, u: GridFunction) -> None:
    if u.dim != op.dim:
        raise DimensionMismatchError(
            f"operator of dimension {op.dim} applied to grid function of dimension {u.dim}"
        )
    if u.norm_kind != op.norm_kind:
        raise DimensionMismatchError(
            f"operator norm kind {op.norm_kind!r} does not match grid function {u.norm_kind!r}"
        )


def apply(op: DiscreteOperator, u: GridFunction) -> GridFunction:
    """Forward application A u."""
    _check_dims(op, u)
    if op.is_volterra:
        return u.with_values(op.matrix @ u.values)
    return u.with_values(op.weights * u.values)


def shifted_solve(op: DiscreteOperator, alpha: float, f: GridFunction) -> GridFunction:
    """Solve (A + alpha I) v = f.

    Forward substitution for the Volterra kinds, componentwise division for
    the diagonal kind.
    """
    if alpha <= 0:
        raise DomainError("shift alpha must be positive")
    _check_dims(op, f)
    if op.is_volterra:
        mat = op.matrix + alpha * np.eye(op.dim)
        return f.with_values(solve_triangular(mat, f.values, lower=True))
    return f.with_values(f.values / (op.weights + alpha))


def _postype_ratio_block(
    op: DiscreteOperator,
    alpha: float,
    block: np.ndarray | None = None,
    x0: np.ndarray | None = None,
) -> tuple[float, np.ndarray | None]:
    if op.kind == "diagonal":
        return alpha / (float(np.min(op.weights)) + alpha), None
    if block is None:
        block = _lower_toeplitz(op.weights)
    diag = np.arange(op.n)
    saved = block[diag, diag].copy()
    block[diag, diag] = saved + alpha
    try:
        if op.norm_kind == "sup":
            # the inverse of a lower-triangular Toeplitz matrix is again lower
            # Toeplitz, so its largest absolute row sum is the l1 norm of its
            # first column; node 0 contributes exactly alpha * (1/alpha) = 1
            e0 = np.zeros(op.n)
            e0[0] = 1.0
            col = solve_triangular(block, e0, lower=True)
            return max(1.0, alpha * float(np.abs(col).sum())), None
        sigma, x = _inverse_power_norm(block, x0=x0)
        return max(1.0, alpha * sigma), x
    finally:
        block[diag, diag] = saved


def postype_ratio(op: DiscreteOperator, alpha: float) -> float:
    """alpha * ||(A + alpha I)^{-1}|| in the operator's induced norm.

    Exact max-row-sum for the sup norm (via the Toeplitz structure of the
    inverse), power iteration (tolerance 1e-8) for the scaled l2 norm.
    """
    if alpha <= 0:
        raise DomainError("shift alpha must be positive")
    return _postype_ratio_block(op, alpha)[0]


def estimate_postype_constant(op: DiscreteOperator, alpha_grid) -> float:
    """Empirical positive-type constant over an alpha grid.

    Returns the maximum of alpha * ||(A + alpha I)^{-1}|| over the grid,
    together with the alpha -> infinity limit of that quantity, which equals
    1 for every bounded operator and is therefore always part of the
    supremum being estimated.
    """
    grid = np.asarray(list(alpha_grid), dtype=float)
    if grid.size == 0:
        raise DomainError("alpha grid must be nonempty")
    if np.any(grid <= 0):
        raise DomainError("alpha grid entries must be positive")
    block = None if op.kind == "diagonal" else _lower_toeplitz(op.weights)
    best = 1.0
    x0 = None
    for a in grid:
        val, x0 = _postype_ratio_block(op, float(a), block, x0=x0)
        best = max(best, val)
    return best


def default_kappa_grid(op_norm: float, points: int = DEFAULT_KAPPA_GRID_POINTS) -> np.ndarray:
    lo, hi = KAPPA_GRID_WINDOW
    return np.logspace(np.log10(lo * op_norm), np.log10(hi * op_norm), points)


def _finish(kind, norm_kind, order, weights, matrix) -> DiscreteOperator:
    if kind == "diagonal":
        op_norm = float(np.max(weights))
    elif norm_kind == "sup":
        op_norm = float(np.max(np.abs(matrix).sum(axis=1)))
    else:
        op_norm = _power_iteration_norm(matrix)
    op = DiscreteOperator(
        kind=kind,
        norm_kind=norm_kind,
        order=order,
        weights=weights,
        matrix=matrix,
        op_norm=op_norm,
        omega=math.log(op_norm),
        kappa_star=math.nan,
    )
    kappa = estimate_postype_constant(op, default_kappa_grid(op_norm))
    return replace(op, kappa_star=kappa)


def integration_operator(n: int, norm_kind: str = "sup") -> DiscreteOperator:
    """The discrete integration operator (Ju)(x) = int_0^x u on n cells."""
    if n < 2:
        raise DomainError("need at least two grid cells")
    if norm_kind not in NORM_KINDS:
        raise DomainError(f"unknown norm kind {norm_kind!r}")
    w = product_integration_weights(1.0, n)
    return _finish("integration", norm_kind, 1.0, w, _volterra_matrix(w))


def abel_operator(order: float, n: int, norm_kind: str = "sup") -> DiscreteOperator:
    """The discrete fractional integration operator of order 0 < order <= 1."""
    if not 0.0 < order <= 1.0:
        raise DomainError("abel order must lie in (0, 1]")
    if n < 2:
        raise DomainError("need at least two grid cells")
    if norm_kind not in NORM_KINDS:
        raise DomainError(f"unknown norm kind {norm_kind!r}")
    w = product_integration_weights(order, n)
    return _finish("abel", norm_kind, order, w, _volterra_matrix(w))


def diagonal_operator(sigma, norm_kind: str = "l2_scaled") -> DiscreteOperator:
    """A diagonal operator with positive, nonincreasing singular values."""
    s = np.asarray(sigma, dtype=float)
    if s.ndim != 1 or s.size < 1:
        raise DomainError("sigma must be a nonempty vector")
    if np.any(s <= 0):
        raise DomainError("all singular values must be positive")
    if np.any(np.diff(s) > 0):
        raise DomainError("singular values must be nonincreasing")
    if norm_kind not in NORM_KINDS:
        raise DomainError(f"unknown norm kind {norm_kind!r}")
    return _finish("diagonal", norm_kind, math.nan, s, None)


def exp_decay_diagonal(modes: int, norm_kind: str = "l2_scaled") -> DiscreteOperator:
    """sigma_k = exp(-k), k = 0..modes-1: the exponentially ill-posed model."""
    return diagonal_operator(np.exp(-np.arange(modes, dtype=float)), norm_kind)
