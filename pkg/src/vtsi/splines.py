"""B-spline and NURBS primitives.

Open (clamped) knot vectors, Cox-de Boor basis evaluation with derivatives,
rational basis functions, 3D NURBS curve evaluation, and least-squares curve
fitting. All objects are immutable after construction and evaluation is pure,
so everything here is safe to share across threads.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

__all__ = [
    "KnotVector",
    "BasisSpan",
    "NurbsCurve",
    "make_open_uniform_knots",
    "eval_bspline_basis",
    "eval_nurbs_basis",
    "eval_nurbs",
    "fit_least_squares",
]


@dataclass(frozen=True)
class KnotVector:
    """Clamped knot vector with degree ``p``.

    The first and last knots must each appear exactly ``p + 1`` times and the
    sequence must be non-decreasing.
    """

    values: np.ndarray
    degree: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        p = self.degree
        if p < 1:
            raise ValueError("degree must be >= 1")
        if vals.ndim != 1 or len(vals) < 2 * (p + 1):
            raise ValueError("knot vector too short for degree %d" % p)
        if np.any(np.diff(vals) < 0.0):
            raise ValueError("knots must be non-decreasing")
        if not (np.all(vals[: p + 1] == vals[0]) and vals[p + 1] > vals[0]):
            raise ValueError("first knot must have multiplicity exactly %d" % (p + 1))
        if not (np.all(vals[-(p + 1):] == vals[-1]) and vals[-(p + 2)] < vals[-1]):
            raise ValueError("last knot must have multiplicity exactly %d" % (p + 1))
        if self.n < p + 1:
            raise ValueError("too few basis functions")

    @property
    def n(self) -> int:
        """Number of basis functions."""
        return len(self.values) - self.degree - 1

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.values[self.degree]), float(self.values[-self.degree - 1])

    @property
    def breakpoints(self) -> np.ndarray:
        """Distinct knot values (element boundaries)."""
        return np.unique(self.values)

    @property
    def n_elems(self) -> int:
        """Number of nonzero knot spans."""
        return len(self.breakpoints) - 1

    def find_span(self, xi: float) -> int:
        lo, hi = self.domain
        if not (lo - 1e-12 <= xi <= hi + 1e-12):
            raise ValueError("parameter %g outside knot domain [%g, %g]" % (xi, lo, hi))
        xi = min(max(xi, lo), hi)
        span = int(np.searchsorted(self.values, xi, side="right")) - 1
        return min(max(span, self.degree), self.n - 1)


@dataclass(frozen=True)
class BasisSpan:
    """Nonzero basis functions over one knot span.

    ``table[j, i]`` holds the ``j``-th derivative of the basis function with
    global index ``span_index - p + i``. Row 0 of a rational span sums to one
    (partition of unity); higher rows sum to zero.
    """

    span_index: int
    table: np.ndarray

    @property
    def indices(self) -> np.ndarray:
        p = self.table.shape[1] - 1
        return np.arange(self.span_index - p, self.span_index + 1)


def make_open_uniform_knots(p: int, n_elems: int) -> KnotVector:
    """Open uniform knot vector {0 x (p+1), 1, ..., n_elems x (p+1)}."""
    if p < 1 or n_elems < 1:
        raise ValueError("degree and element count must both be >= 1")
    interior = np.arange(1, n_elems)
    vals = np.concatenate([
        np.zeros(p + 1),
        interior,
        np.full(p + 1, float(n_elems)),
    ])
    return KnotVector(vals, p)


def eval_bspline_basis(knots: KnotVector, xi: float, k: int = 0) -> BasisSpan:
    """Nonzero B-spline basis values and derivatives up to order ``k`` at ``xi``.

    Cox-de Boor recursion with the standard triangular derivative scheme.
    """
    if k < 0:
        raise ValueError("derivative order must be >= 0")
    p = knots.degree
    U = knots.values
    span = knots.find_span(xi)
    lo, hi = knots.domain
    xi = min(max(xi, lo), hi)

    # ndu[j][r]: basis values of degree j and the knot differences.
    ndu = np.zeros((p + 1, p + 1))
    left = np.zeros(p + 1)
    right = np.zeros(p + 1)
    ndu[0, 0] = 1.0
    for j in range(1, p + 1):
        left[j] = xi - U[span + 1 - j]
        right[j] = U[span + j] - xi
        saved = 0.0
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved

    ders = np.zeros((k + 1, p + 1))
    ders[0] = ndu[:, p]
    a = np.zeros((2, p + 1))
    for r in range(p + 1):
        s1, s2 = 0, 1
        a[0, 0] = 1.0
        for kk in range(1, min(k, p) + 1):
            d = 0.0
            rk = r - kk
            pk = p - kk
            if r >= kk:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                d = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = kk - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                d += a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                a[s2, kk] = -a[s1, kk - 1] / ndu[pk + 1, r]
                d += a[s2, kk] * ndu[r, pk]
            ders[kk, r] = d
            s1, s2 = s2, s1
    r = float(p)
    for kk in range(1, min(k, p) + 1):
        ders[kk] *= r
        r *= p - kk
    # Orders beyond the polynomial degree are identically zero inside a span.
    return BasisSpan(span, ders)


@dataclass(frozen=True)
class NurbsCurve:
    """Weighted 3D NURBS curve over a clamped knot vector."""

    knots: KnotVector
    control_points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.control_points, dtype=float))
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "control_points", pts)
        object.__setattr__(self, "weights", w)
        n = self.knots.n
        if pts.shape != (n, 3):
            raise ValueError("expected %d 3D control points, got %r" % (n, pts.shape))
        if w.shape != (n,):
            raise ValueError("expected %d weights" % n)
        if np.any(w <= 0.0):
            raise ValueError("weights must be positive")

    @property
    def degree(self) -> int:
        return self.knots.degree

    @property
    def domain(self) -> tuple[float, float]:
        return self.knots.domain


def _weight_derivs(curve: NurbsCurve, bspan: BasisSpan, k: int):
    """Derivatives of A(xi) = sum N_i w_i x_i and W(xi) = sum N_i w_i."""
    idx = bspan.indices
    w = curve.weights[idx]
    pw = curve.control_points[idx] * w[:, None]
    A = bspan.table @ pw            # (k+1, 3)
    W = bspan.table @ w             # (k+1,)
    return A, W


def eval_nurbs(curve: NurbsCurve, xi: float, k: int = 0) -> np.ndarray:
    """Point and parametric derivatives of a NURBS curve.

    Returns an array of shape ``(k + 1, 3)`` whose row ``j`` is the ``j``-th
    derivative of the curve with respect to ``xi``. Rational derivatives use
    the quotient-rule recurrence on the weighted numerator and the weight sum.
    """
    bspan = eval_bspline_basis(curve.knots, xi, k)
    A, W = _weight_derivs(curve, bspan, k)
    out = np.zeros((k + 1, 3))
    for j in range(k + 1):
        v = A[j].copy()
        for i in range(1, j + 1):
            v -= comb(j, i) * W[i] * out[j - i]
        out[j] = v / W[0]
    return out


def eval_nurbs_basis(curve: NurbsCurve, xi: float, k: int = 0) -> BasisSpan:
    """Rational basis functions R_{i,p} and derivatives up to order ``k``."""
    bspan = eval_bspline_basis(curve.knots, xi, k)
    idx = bspan.indices
    w = curve.weights[idx]
    Nw = bspan.table * w[None, :]   # (k+1, p+1)
    W = bspan.table @ w
    table = np.zeros_like(Nw)
    for j in range(k + 1):
        v = Nw[j].copy()
        for i in range(1, j + 1):
            v -= comb(j, i) * W[i] * table[j - i]
        table[j] = v / W[0]
    return BasisSpan(bspan.span_index, table)


def fit_least_squares(xi_samples, points, p: int, n_ctrl: int) -> NurbsCurve:
    """Least-squares B-spline fit (unit weights) through sampled points.

    Sample parameters are mapped affinely onto the open uniform knot domain
    ``[0, n_ctrl - p]``. The normal equations are solved directly; a sample set
    that leaves basis functions inactive raises ``ValueError``.
    """
    xi = np.asarray(xi_samples, dtype=float)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape != (len(xi), 3):
        raise ValueError("points must be (m, 3) matching the parameter samples")
    if n_ctrl <= p:
        raise ValueError("need n_ctrl > degree")
    if n_ctrl > len(xi):
        raise ValueError("more control points than samples")

    knots = make_open_uniform_knots(p, n_ctrl - p)
    lo, hi = knots.domain
    span = xi.max() - xi.min()
    if span <= 0.0:
        raise ValueError("degenerate parameter samples")
    u = lo + (xi - xi.min()) * (hi - lo) / span

    B = np.zeros((len(u), n_ctrl))
    for row, ui in enumerate(u):
        bspan = eval_bspline_basis(knots, ui, 0)
        B[row, bspan.indices] = bspan.table[0]

    gram = B.T @ B
    if np.any(np.diag(gram) <= 0.0):
        raise ValueError("samples fail to activate every basis function")
    rhs = B.T @ pts
    try:
        ctrl = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError as exc:
        raise ValueError("rank-deficient normal matrix") from exc
    if not np.all(np.isfinite(ctrl)):
        raise ValueError("rank-deficient normal matrix")
    return NurbsCurve(knots, ctrl, np.ones(n_ctrl))
