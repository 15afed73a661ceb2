"""Subset-product sum relations and their rigidity.

The central object is the system of equations, for nonnegative x_1..x_N and
positive y_1..y_N,

    prod_{i in I} x_i + prod_{i in I} y_i = 2a   for every |I| = k,
    prod_{j in J} x_j + prod_{j in J} y_j = 2b   for every |J| = m,

with 1 <= k < m <= N.  When a^m != b^k the coordinatewise ratios x_i/y_i
are forced to be constant, and for m = N-1 every y_i must then belong to an
explicit finite candidate set assembled from low-degree polynomials; when
a^m = b^k an explicit one-parameter family of non-constant solutions exists,
so the margin condition is sharp.  A companion "antipodal" variant couples
each subset I with its mirror I* = {N+1-i : i in I} and forces full
constancy of a sorted positive vector.

This module evaluates hypothesis residuals exactly over all subsets (desk
scale, N <= 8), enumerates the candidate sets with exact rational
coefficient assembly followed by companion-matrix root finding, runs a
damped Gauss-Newton random-restart solver as an experimental oracle for the
hypothesis system, and provides large vectorized falsification campaigns
for the antipodal variant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import NamedTuple, Optional

import numpy as np

from .errors import PreconditionError
from .sampling import as_rng

__all__ = [
    "RelationInstance",
    "Candidate",
    "CandidateSet",
    "HypothesisResiduals",
    "RelationAudit",
    "AntipodalCheckResult",
    "FalsificationReport",
    "hypothesis_residual",
    "ratio_conclusion_check",
    "infinite_family",
    "enumerate_candidates",
    "case2_polynomial",
    "find_hypothesis_solutions",
    "antipodal_product_check",
    "antipodal_falsification",
    "eigenvalue_relation_audit",
    "match_candidates",
]


@dataclass(frozen=True)
class RelationInstance:
    """A candidate solution of the two-level subset-product system."""

    x: tuple
    y: tuple
    a: float
    b: float
    k: int
    m: int

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        y = tuple(float(v) for v in self.y)
        if len(x) != len(y) or not x:
            raise ValueError("x and y must be nonempty and equally long")
        if min(x) < 0:
            raise ValueError("x entries must be nonnegative")
        if min(y) <= 0:
            raise ValueError("y entries must be positive")
        if self.a <= 0 or self.b <= 0:
            raise ValueError("a and b must be positive")
        n = len(x)
        if not 1 <= self.k < self.m <= n:
            raise ValueError(f"grades must satisfy 1 <= k < m <= N, got k={self.k}, m={self.m}, N={n}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def size(self) -> int:
        return len(self.x)


class HypothesisResiduals(NamedTuple):
    k_residual: float
    m_residual: float

    def max(self) -> float:
        return max(self.k_residual, self.m_residual)


def _subset_products(values: np.ndarray, size: int) -> np.ndarray:
    idx = np.array(list(combinations(range(values.size), size)), dtype=np.intp)
    return np.prod(values[idx], axis=1)


def hypothesis_residual(inst: RelationInstance) -> HypothesisResiduals:
    """Exact max residual of both equation levels over all subsets."""
    x = np.asarray(inst.x)
    y = np.asarray(inst.y)
    res_k = np.abs(_subset_products(x, inst.k) + _subset_products(y, inst.k) - 2 * inst.a)
    res_m = np.abs(_subset_products(x, inst.m) + _subset_products(y, inst.m) - 2 * inst.b)
    return HypothesisResiduals(float(res_k.max()), float(res_m.max()))


def ratio_conclusion_check(
    inst: RelationInstance,
    tol: float = 1e-10,
    ratio_tol: Optional[float] = None,
    margin: float = 1e-9,
) -> bool:
    """Check the forced conclusion x_i / y_i = constant.

    Preconditions: hypothesis residuals below ``tol`` and the margin
    |a^m - b^k| >= ``margin`` * scale (the one-parameter family shows the
    conclusion genuinely fails without it).  The deviation tolerance for the
    ratios defaults to sqrt(tol) since residual perturbations propagate
    nonlinearly.
    """
    res = hypothesis_residual(inst)
    if res.max() > tol:
        raise PreconditionError(
            f"hypothesis residual {res.max():.3e} exceeds tolerance {tol:.3e}"
        )
    gap = abs(inst.a**inst.m - inst.b**inst.k)
    scale = max(1.0, abs(inst.a) ** inst.m, abs(inst.b) ** inst.k)
    if gap < margin * scale:
        raise PreconditionError(
            f"degenerate exponent margin: |a^m - b^k| = {gap:.3e} < {margin * scale:.3e}"
        )
    if ratio_tol is None:
        ratio_tol = float(np.sqrt(tol))
    ratios = np.asarray(inst.x) / np.asarray(inst.y)
    med = float(np.median(ratios))
    return bool(np.abs(ratios - med).max() <= ratio_tol * max(1.0, abs(med)))


def infinite_family(t: float, n: int, k: int = 2, m: Optional[int] = None) -> RelationInstance:
    """Non-constant exact solutions in the degenerate case a = b = 1.

    x = (1, ..., 1, t) and y = (1, ..., 1, 2 - t) satisfy both equation
    levels exactly for every subset size: any subset avoiding the last slot
    sums to 1 + 1, and any subset through it sums to t + (2 - t).  Since
    x_N / y_N = t / (2 - t) varies with t, the constancy conclusion fails on
    a continuum, which is why a nondegenerate margin a^m != b^k is required.
    """
    if not 0.0 < t < 2.0:
        raise ValueError("t must lie in (0, 2) to keep all entries positive")
    if n < 3:
        raise ValueError("need N >= 3")
    if m is None:
        m = n - 1
    x = (1.0,) * (n - 1) + (float(t),)
    y = (1.0,) * (n - 1) + (float(2.0 - t),)
    return RelationInstance(x, y, 1.0, 1.0, k, m)


# ---------------------------------------------------------------------------
# candidate enumeration (exact rational polynomial assembly)


def _poly_mul(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        if pi:
            for j, qj in enumerate(q):
                out[i + j] += pi * qj
    return out


def _poly_pow(p: list[Fraction], e: int) -> list[Fraction]:
    out = [Fraction(1)]
    for _ in range(e):
        out = _poly_mul(out, p)
    return out


def _poly_add(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * max(len(p), len(q))
    for i, pi in enumerate(p):
        out[i] += pi
    for j, qj in enumerate(q):
        out[j] += qj
    return out


def _poly_scale(p: list[Fraction], c: Fraction) -> list[Fraction]:
    return [c * pi for pi in p]


def _trim(p: list[Fraction]) -> list[Fraction]:
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
    return p


def _positive_real_roots(coeffs: list[Fraction], imag_tol: float = 1e-9) -> list[float]:
    """Positive real roots via companion-matrix eigenvalues (ascending coeffs)."""
    c = np.array([float(v) for v in _trim(coeffs)])
    if c.size <= 1 or not np.any(c[1:]):
        return []
    roots = np.polynomial.polynomial.polyroots(c)
    out = []
    for r in roots:
        if abs(r.imag) <= imag_tol * (1.0 + abs(r.real)) and r.real > 1e-12:
            out.append(float(r.real))
    return sorted(out)


def _constant_level_poly(a: Fraction, b: Fraction, n: int) -> list[Fraction]:
    """z^{n-1} + (2a - z)^{n-1} - 2b, ascending coefficients."""
    z = [Fraction(0), Fraction(1)]
    mirror = [2 * a, Fraction(-1)]
    poly = _poly_add(_poly_pow(z, n - 1), _poly_pow(mirror, n - 1))
    poly[0] -= 2 * b
    return _trim(poly)


def case2_polynomial(a: float, b: float, l: int, n: int) -> list[Fraction]:
    """Ascending coefficients of the two-value branch polynomial in t.

    For a split into l copies of z1 and n - l copies of z2 (2 <= l <= n-2),
    parameterizing z1 = 2a / (1 + t^{n-l-1}) and z2 = 2a t^{l-1} / (1 + t^{l-1})
    turns the mixed product equation into

        (2a)^{n-1} (t^{(l-1)(n-l)} + t^{(l-1)(n-l-1)})
            = 2b (1 + t^{n-l-1})^{l-1} (1 + t^{l-1})^{n-l},

    a polynomial of degree exactly (l-1)(2(n-l) - 1).
    """
    if not 2 <= l <= n - 2:
        raise ValueError("the parameterized branch needs 2 <= l <= n-2")
    fa, fb = Fraction(a), Fraction(b)
    lhs = [Fraction(0)] * ((l - 1) * (n - l) + 1)
    lhs[(l - 1) * (n - l)] = (2 * fa) ** (n - 1)
    low = (l - 1) * (n - l - 1)
    if len(lhs) <= low:
        lhs += [Fraction(0)] * (low + 1 - len(lhs))
    lhs[low] += (2 * fa) ** (n - 1)
    one_plus = lambda e: _trim([Fraction(1)] + [Fraction(0)] * (e - 1) + [Fraction(1)])  # noqa: E731
    rhs = _poly_mul(_poly_pow(one_plus(n - l - 1), l - 1), _poly_pow(one_plus(l - 1), n - l))
    rhs = _poly_scale(rhs, 2 * fb)
    return _trim(_poly_add(lhs, _poly_scale(rhs, Fraction(-1))))


def _proportional_poly(a: Fraction, b: Fraction, k: int, n: int) -> list[Fraction]:
    """(2a - x^k)^{n-1} - (2b - x^{n-1})^k, ascending coefficients in x."""
    xa = [2 * a] + [Fraction(0)] * (k - 1) + [Fraction(-1)]
    xb = [2 * b] + [Fraction(0)] * (n - 2) + [Fraction(-1)]
    return _trim(_poly_add(_poly_pow(xa, n - 1), _poly_scale(_poly_pow(xb, k), Fraction(-1))))


@dataclass(frozen=True)
class Candidate:
    value: float
    branch: str


@dataclass(frozen=True)
class CandidateSet:
    """Finite set of admissible y-values with branch provenance."""

    candidates: tuple
    a: float
    b: float
    k: int
    m: int
    size: int

    def values(self) -> np.ndarray:
        vals = sorted({round(c.value, 12) for c in self.candidates})
        return np.asarray(vals)

    def contains(self, value: float, tol: float = 1e-6) -> bool:
        vals = np.asarray([c.value for c in self.candidates])
        return bool(np.any(np.abs(vals - value) <= tol * max(1.0, abs(value))))


def enumerate_candidates(a: float, b: float, k: int, m: int, n: int) -> CandidateSet:
    """Enumerate the finite candidate set for y-values when m = N - 1.

    Branches, ordered as in the constancy proof:

    * k = 1, all x equal: positive roots of z^{n-1} + (2a-z)^{n-1} = 2b (the
      y-values solve the same symmetric polynomial).
    * k = 1, two values with a singleton part: the same polynomial gives the
      repeated value, a linear equation the remaining one.
    * k = 1, two values split l / (n - l) with 2 <= l <= n-2: positive roots
      of the parameterized branch polynomial of degree (l-1)(2(n-l)-1).
    * k >= 2, all x positive: constant ratio reduces the system to
      x^k + y^k = 2a, x^{n-1} + y^{n-1} = 2b, eliminated into
      (2a - x^k)^{n-1} = (2b - x^{n-1})^k.
    * some x vanishing: forces y = (b/a)^{1/(n-1-k)} off the zero slot and
      y_1 = 2a / y^{k-1} on it.

    The set is a certified cover: every exact solution of the hypothesis
    system has all its y-values in the set, while some branch values may not
    extend to full solutions.
    """
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 1 <= k < m <= n - 1:
        raise ValueError("need 1 <= k < m <= N-1")
    if m != n - 1:
        raise ValueError("candidate enumeration is implemented for m = N-1 only")
    gap = abs(a**m - b**k)
    if gap < 1e-12 * max(1.0, a**m, b**k):
        raise PreconditionError(
            f"degenerate exponent margin |a^m - b^k| = {gap:.3e}; "
            "a continuum of solutions exists"
        )
    fa, fb = Fraction(a), Fraction(b)
    two_a = 2.0 * a
    cands: list[Candidate] = []

    def push(value: float, branch: str):
        if value > 1e-12 and np.isfinite(value):
            cands.append(Candidate(float(value), branch))

    if k == 1:
        const_roots = _positive_real_roots(_constant_level_poly(fa, fb, n))
        for z in const_roots:
            push(z, "constant")
        # singleton split: repeated value z2 solves the constant-level
        # polynomial, the lone value z1 a linear equation
        for z2 in const_roots:
            denom = z2 ** (n - 2) - (two_a - z2) ** (n - 2)
            if abs(denom) < 1e-10:
                continue
            z1 = (2.0 * b - two_a * (two_a - z2) ** (n - 2)) / denom
            if z1 >= -1e-12:
                push(two_a - z1, "singleton-split")
            push(two_a - z2, "singleton-split")
        for l in range(2, n - 1):
            for t in _positive_real_roots(case2_polynomial(a, b, l, n)):
                z1 = two_a / (1.0 + t ** (n - l - 1))
                z2 = two_a * t ** (l - 1) / (1.0 + t ** (l - 1))
                push(two_a - z1, f"split-l{l}")
                push(two_a - z2, f"split-l{l}")
    else:
        for x in _positive_real_roots(_proportional_poly(fa, fb, k, n)):
            rest_a = 2.0 * a - x**k
            rest_b = 2.0 * b - x ** (n - 1)
            if rest_a <= 0 or rest_b <= 0:
                continue
            y = rest_a ** (1.0 / k)
            if abs(y ** (n - 1) - rest_b) > 1e-7 * max(1.0, abs(rest_b)):
                continue
            push(y, "proportional")
            push(x, "proportional")

    # a vanishing x entry pins the complementary y-values
    if n - 1 - k >= 1:
        y_star = (b / a) ** (1.0 / (n - 1 - k))
        push(y_star, "zero-slot")
        push(2.0 * a / y_star ** (k - 1), "zero-slot")

    return CandidateSet(tuple(cands), a, b, k, m, n)


def match_candidates(values, cset: CandidateSet, tol: float = 1e-6) -> float:
    """Worst distance from each value to its nearest candidate."""
    cand = np.asarray([c.value for c in cset.candidates])
    vals = np.atleast_1d(np.asarray(values, dtype=float))
    return float(max(np.abs(cand - v).min() for v in vals))


# ---------------------------------------------------------------------------
# experimental hypothesis solver


def _residual_and_jacobian(z: np.ndarray, n: int, k: int, m: int, a: float, b: float):
    x, y = z[:n], z[n:]
    rows = []
    jac = []
    for size, rhs in ((k, 2 * a), (m, 2 * b)):
        for idx in combinations(range(n), size):
            px = float(np.prod(x[list(idx)]))
            py = float(np.prod(y[list(idx)]))
            rows.append(px + py - rhs)
            grad = np.zeros(2 * n)
            for i in idx:
                others = [j for j in idx if j != i]
                grad[i] = float(np.prod(x[others])) if others else 1.0
                grad[n + i] = float(np.prod(y[others])) if others else 1.0
            jac.append(grad)
    return np.asarray(rows), np.asarray(jac)


def find_hypothesis_solutions(
    a: float,
    b: float,
    k: int,
    m: int,
    n: int,
    solutions: int,
    seed=0,
    tol: float = 1e-11,
    max_restarts: int = 10000,
    max_iter: int = 80,
) -> list[RelationInstance]:
    """Damped Gauss-Newton random-restart solver for the hypothesis system.

    Starts from uniform random positive points, takes least-squares Newton
    steps with backtracking, projects onto the closed positive orthant, and
    keeps every run whose max residual falls below ``tol``.  Returns up to
    ``solutions`` converged instances (an experimental oracle, not a
    guaranteed enumeration).
    """
    rng = as_rng(seed)
    found: list[RelationInstance] = []
    scale = max(a, b) ** (1.0 / k)
    for _ in range(max_restarts):
        if len(found) >= solutions:
            break
        z = rng.uniform(0.05, 1.8, size=2 * n) * scale
        for _ in range(max_iter):
            f, jmat = _residual_and_jacobian(z, n, k, m, a, b)
            norm0 = np.abs(f).max()
            if norm0 < tol:
                break
            step, *_ = np.linalg.lstsq(jmat, -f, rcond=None)
            lam = 1.0
            for _ in range(30):
                cand = z + lam * step
                cand[:n] = np.maximum(cand[:n], 0.0)
                cand[n:] = np.maximum(cand[n:], 1e-12)
                fc, _ = _residual_and_jacobian(cand, n, k, m, a, b)
                if np.abs(fc).max() < norm0:
                    z = cand
                    break
                lam *= 0.5
            else:
                break
        f, _ = _residual_and_jacobian(z, n, k, m, a, b)
        if np.abs(f).max() < tol and z[n:].min() > 1e-9:
            found.append(
                RelationInstance(tuple(z[:n]), tuple(z[n:]), a, b, k, m)
            )
    return found


# ---------------------------------------------------------------------------
# antipodal subset products


class AntipodalCheckResult(NamedTuple):
    hypothesis_holds: bool
    max_equation_residual: float
    spread: float
    is_constant: bool


def antipodal_product_check(
    x, gamma: float, k: int, tol: float = 1e-10, spread_tol: Optional[float] = None
) -> AntipodalCheckResult:
    """Check x_I + x_{I*} = 2 gamma for all |I| = k with mirrored I*.

    ``x`` must be sorted ascending and positive with M = len(x) >= 4 and
    2 <= k <= M - 2.  If every equation holds within ``tol`` the vector is
    asserted constant within ``spread_tol`` (default sqrt(tol) scaled);
    the returned tuple reports the worst residual and the actual spread.
    """
    x = np.asarray(x, dtype=float)
    mlen = x.size
    if mlen < 4:
        raise ValueError("need at least 4 entries")
    if not 2 <= k <= mlen - 2:
        raise ValueError("need 2 <= k <= M - 2")
    if x.min() <= 0:
        raise ValueError("entries must be positive")
    if np.any(np.diff(x) < -1e-12):
        raise ValueError("entries must be sorted ascending")
    idx = np.array(list(combinations(range(mlen), k)), dtype=np.intp)
    mirrored = mlen - 1 - idx[:, ::-1]
    sums = np.prod(x[idx], axis=1) + np.prod(x[mirrored], axis=1)
    residual = float(np.abs(sums - 2.0 * gamma).max())
    holds = residual <= tol
    spread = float(x[-1] - x[0])
    if spread_tol is None:
        spread_tol = float(np.sqrt(tol)) * max(1.0, float(x[-1]))
    return AntipodalCheckResult(holds, residual, spread, spread <= spread_tol)


@dataclass(frozen=True)
class FalsificationReport:
    """Outcome of a randomized search for non-constant antipodal solutions."""

    trials: int
    best_residual: float
    best_x: np.ndarray
    best_gamma: float
    min_spread: float
    found_violation: bool
    residual_tol: float = field(default=np.nan, compare=False)
    rows: Optional[np.ndarray] = field(default=None, compare=False)


def antipodal_falsification(
    mlen: int,
    k: int,
    trials: int,
    seed=0,
    tol: float = 1e-9,
    min_spread: float = 1e-3,
    chunk: int = 100000,
    keep_rows: bool = False,
) -> FalsificationReport:
    """Vectorized random search for non-constant antipodal solutions.

    Each trial draws a sorted positive vector, picks the gamma that is
    optimal for the squared residual (the subset-sum mean), and records the
    max equation residual.  A violation is a trial with spread >=
    ``min_spread`` and residual < ``tol``; the constancy statement predicts
    none exist.  With ``keep_rows`` the report retains one (residual,
    spread) row per trial for export.
    """
    if mlen < 4 or not 2 <= k <= mlen - 2:
        raise ValueError("need M >= 4 and 2 <= k <= M - 2")
    rng = as_rng(seed)
    idx = np.array(list(combinations(range(mlen), k)), dtype=np.intp)
    mirrored = mlen - 1 - idx[:, ::-1]
    best_residual = np.inf
    best_x = None
    best_gamma = np.nan
    found = False
    row_chunks: list[np.ndarray] = []
    remaining = trials
    while remaining > 0:
        size = min(chunk, remaining)
        remaining -= size
        x = np.sort(rng.uniform(0.2, 2.0, size=(size, mlen)), axis=1)
        sums = np.prod(x[:, idx], axis=2) + np.prod(x[:, mirrored], axis=2)
        gamma = sums.mean(axis=1) / 2.0
        residual = np.abs(sums - 2.0 * gamma[:, None]).max(axis=1)
        spread = x[:, -1] - x[:, 0]
        if keep_rows:
            row_chunks.append(np.column_stack([residual, spread]))
        eligible = spread >= min_spread
        if np.any(eligible):
            sub = np.where(eligible)[0]
            pos = sub[np.argmin(residual[sub])]
            if residual[pos] < best_residual:
                best_residual = float(residual[pos])
                best_x = x[pos].copy()
                best_gamma = float(gamma[pos])
            if residual[pos] < tol:
                found = True
    return FalsificationReport(
        trials=trials,
        best_residual=best_residual,
        best_x=best_x,
        best_gamma=best_gamma,
        min_spread=min_spread,
        found_violation=found,
        residual_tol=tol,
        rows=np.concatenate(row_chunks) if row_chunks else None,
    )


class RelationAudit(NamedTuple):
    max_defect: float
    antitone_ok: bool


def eigenvalue_relation_audit(r, r_tilde, k: int, beta: float, slack: float = 1e-9) -> RelationAudit:
    """Audit r_I + r~_I = 2 beta over all |I| = k plus the pairing shape.

    For an ascending profile r paired with an antipodal profile r~ the
    product relations force r~ to be non-increasing; the audit reports the
    worst product defect and whether that monotone pairing holds within
    ``slack``.
    """
    r = np.asarray(r, dtype=float)
    rt = np.asarray(r_tilde, dtype=float)
    if r.shape != rt.shape or r.ndim != 1:
        raise ValueError("profiles must be two equally long vectors")
    if not 1 <= k <= r.size:
        raise ValueError("grade out of range")
    idx = np.array(list(combinations(range(r.size), k)), dtype=np.intp)
    defect = float(np.abs(np.prod(r[idx], axis=1) + np.prod(rt[idx], axis=1) - 2 * beta).max())
    scale = max(1.0, float(np.abs(rt).max()))
    antitone = bool(np.all(np.diff(rt) <= slack * scale))
    return RelationAudit(defect, antitone)
