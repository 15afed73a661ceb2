"""Reverse Weingarten maps of support functions and their exterior powers.

For a smooth convex body with support function h, the restriction of the
ambient Hessian d^2 h(u) to the tangent hyperplane u^perp is a self-adjoint
map whose eigenvalues are the principal radii of curvature at the boundary
point with outer normal u.  Relative to a second (centrally symmetric,
strictly convex) body with support h0 the natural comparison object is

    M(u) = L0(u)^{-1/2} L(u) L0(u)^{-1/2},

whose determinant is det L(u) / det L0(u).  When the k-th projection
functions of the two bodies are proportional with ratio beta, the exterior
powers satisfy

    wedge^k L(u) + wedge^k L(-u) = 2 beta wedge^k L0(u)

for every direction, with both sides expressed in one frame of u^perp
(u^perp and (-u)^perp coincide as subspaces).  This module measures the
defect of that identity, searches for antipodal umbilic directions, and
checks the eigenvalue structure of bodies of revolution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import multilinear
from .errors import PreconditionError
from .sampling import as_rng, haar_directions, hemisphere_grid

__all__ = [
    "TangentFrame",
    "SelfAdjointMap",
    "EigenProfile",
    "UmbilicResult",
    "AntipodalSearchResult",
    "RevolutionEigenstructure",
    "RevolutionRelationDefects",
    "DetRatioReport",
    "tangent_frame",
    "reverse_weingarten",
    "relative_map",
    "wedge_identity_defect",
    "relative_wedge_defect",
    "eigen_profile",
    "antipodal_search",
    "umbilic_check",
    "revolution_eigenstructure",
    "revolution_relations_check",
    "det_ratio_constancy",
]


# ---------------------------------------------------------------------------
# tangent frames


@dataclass(frozen=True)
class TangentFrame:
    """Orthonormal basis of u^perp, deterministic in u.

    ``basis`` has shape (n, n-1) with columns orthonormal and orthogonal to
    u.  Since u^perp = (-u)^perp, the frame built at u is reused verbatim at
    the antipode whenever quantities at u and -u must be compared entrywise.
    """

    u: np.ndarray
    basis: np.ndarray


def tangent_frame(u, rule: str = "householder") -> TangentFrame:
    """Deterministic orthonormal frame of u^perp.

    The default rule reflects e_1 onto u with a Householder map and keeps
    the remaining columns; ``rule="gram"`` QR-completes the coordinate basis
    instead.  Both rules are deterministic; eigenvalues of restricted maps
    do not depend on the rule.
    """
    u = np.asarray(u, dtype=float)
    n = u.size
    nrm = float(np.linalg.norm(u))
    if abs(nrm - 1.0) > 1e-12:
        raise ValueError(f"direction must be unit length, |u| = {nrm!r}")
    if rule == "householder":
        e1 = np.zeros(n)
        e1[0] = 1.0
        v = e1 - u
        vv = float(v @ v)
        if vv < 1e-28:
            basis = np.eye(n)[:, 1:]
        else:
            h = np.eye(n) - 2.0 * np.outer(v, v) / vv
            basis = h[:, 1:]
    elif rule == "gram":
        order = np.argsort(np.abs(u), kind="stable")
        cols = np.eye(n)[:, order[: n - 1]]
        q, r = np.linalg.qr(np.column_stack([u, cols]))
        q = q * np.sign(np.diag(r))[None, :]
        basis = q[:, 1:]
    else:
        raise ValueError(f"unknown frame rule {rule!r}")
    return TangentFrame(u=u, basis=basis)


@dataclass(frozen=True)
class SelfAdjointMap:
    """A self-adjoint map on u^perp expressed in a tangent frame."""

    frame: TangentFrame
    matrix: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues (frame independent)."""
        return np.linalg.eigvalsh(self.matrix)

    def det(self) -> float:
        return float(np.linalg.det(self.matrix))


@dataclass(frozen=True)
class EigenProfile:
    """Ascending eigenvalue profile of a relative Weingarten map."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)

    def spread(self) -> float:
        return float(self.values[-1] - self.values[0])


# ---------------------------------------------------------------------------
# maps


def _restrict(hessian: np.ndarray, frame: TangentFrame) -> np.ndarray:
    m = frame.basis.T @ hessian @ frame.basis
    return 0.5 * (m + m.T)


def reverse_weingarten(body, u, frame: Optional[TangentFrame] = None) -> SelfAdjointMap:
    """Tangential Hessian of the support function at u in a frame of u^perp.

    If ``frame`` is given it must span u^perp (it may have been built at -u,
    the subspaces agree); otherwise the deterministic frame at u is used.
    """
    u = np.asarray(u, dtype=float)
    if frame is None:
        frame = tangent_frame(u)
    return SelfAdjointMap(frame, _restrict(body.jet(u).hessian, frame))


def _psd_inv_sqrt(matrix: np.ndarray, what: str) -> np.ndarray:
    vals, vecs = np.linalg.eigh(matrix)
    floor = 1e-12 * max(1.0, float(np.abs(vals).max()))
    if vals.min() <= floor:
        raise PreconditionError(
            f"{what} is not positive definite: smallest eigenvalue "
            f"{vals.min():.6e}"
        )
    return (vecs / np.sqrt(vals)) @ vecs.T


def relative_map(body, base, u, frame: Optional[TangentFrame] = None) -> SelfAdjointMap:
    """L0^{-1/2} L L0^{-1/2} on u^perp; eigenvalues are relative radii.

    Raises PreconditionError naming the offending eigenvalue when the base
    map is not positive definite at u.
    """
    u = np.asarray(u, dtype=float)
    if frame is None:
        frame = tangent_frame(u)
    l0 = _restrict(base.jet(u).hessian, frame)
    l1 = _restrict(body.jet(u).hessian, frame)
    s = _psd_inv_sqrt(l0, "base reverse Weingarten map")
    m = s @ l1 @ s
    return SelfAdjointMap(frame, 0.5 * (m + m.T))


def _check_symmetric_body(base, u, rng, tol: float = 1e-9) -> None:
    """Verify h0(v) = h0(-v) on the given direction plus a small sample."""
    dirs = [np.asarray(u, dtype=float)]
    dirs.extend(haar_directions(base.dim, 8, rng))
    worst = 0.0
    for v in dirs:
        hv = base.support(v)
        worst = max(worst, abs(hv - base.support(-v)) / max(1.0, abs(hv)))
    if worst > tol:
        raise PreconditionError(
            f"base body is not centrally symmetric: relative support gap {worst:.3e}"
        )


def wedge_identity_defect(body, base, k: int, beta: float, u, seed=0) -> float:
    """Operator-norm defect of wedge^k L(u) + wedge^k L(-u) = 2 beta wedge^k L0(u).

    All three maps are expressed in the deterministic frame built at u (and
    reused at -u).  The base body must be centrally symmetric; this is
    checked on a seeded sample of directions.
    """
    u = np.asarray(u, dtype=float)
    _check_symmetric_body(base, u, as_rng(seed))
    frame = tangent_frame(u)
    lu = reverse_weingarten(body, u, frame).matrix
    lmu = reverse_weingarten(body, -u, frame).matrix
    l0 = reverse_weingarten(base, u, frame).matrix
    lhs = multilinear.wedge_power(lu, k).matrix + multilinear.wedge_power(lmu, k).matrix
    rhs = 2.0 * beta * multilinear.wedge_power(l0, k).matrix
    return float(np.linalg.norm(lhs - rhs, 2))


def relative_wedge_defect(
    body, base, k: int, beta: float, u, seed=0, tol: float = 1e-8
) -> float:
    """Defect of wedge^k M(u) + wedge^k M(-u) = 2 beta Id for relative maps.

    When the defect is below ``tol`` and k <= n-2, the simultaneous
    diagonalizability that the identity forces is verified by delegating to
    ``multilinear.common_eigenbasis`` (an InternalInconsistencyError there
    would signal a genuine contradiction).
    """
    u = np.asarray(u, dtype=float)
    _check_symmetric_body(base, u, as_rng(seed))
    frame = tangent_frame(u)
    mu = relative_map(body, base, u, frame).matrix
    mmu = relative_map(body, base, -u, frame).matrix
    d = len(multilinear.multi_indices(mu.shape[0], k))
    lhs = multilinear.wedge_power(mu, k).matrix + multilinear.wedge_power(mmu, k).matrix
    defect = float(np.linalg.norm(lhs - 2.0 * beta * np.eye(d), 2))
    n = body.dim
    if defect <= tol and k <= n - 2:
        multilinear.common_eigenbasis(mu, mmu, k, 2.0 * beta, tol=max(tol, 2.0 * defect))
    return defect


def eigen_profile(body, base, u) -> EigenProfile:
    """Ascending eigenvalues of the relative Weingarten map at u."""
    return EigenProfile(relative_map(body, base, u).eigenvalues())


# ---------------------------------------------------------------------------
# antipodal umbilic search


@dataclass(frozen=True)
class UmbilicResult:
    """Certificate that both maps at +-u0 are (close to) r0 times identity.

    ``defect`` is max over the two signs of the operator norm of
    M(+-u0) - r0 Id, with r0 the mean of all 2(n-1) eigenvalues;
    ``boundary_points`` are the support gradients at +-u0 (their tangent
    hyperplanes are parallel by construction).
    """

    u0: np.ndarray
    r0: float
    defect: float
    boundary_points: tuple
    is_umbilic: bool


@dataclass(frozen=True)
class AntipodalSearchResult:
    umbilic: UmbilicResult
    r_defect: float
    converged: bool
    evaluations: int
    objective: str


def umbilic_check(body, base, u0, tol: float = 1e-8) -> UmbilicResult:
    """Evaluate how close +-u0 is to an antipodal pair of relative umbilics."""
    u0 = np.asarray(u0, dtype=float)
    frame = tangent_frame(u0)
    m_pos = relative_map(body, base, u0, frame).matrix
    m_neg = relative_map(body, base, -u0, frame).matrix
    nm1 = m_pos.shape[0]
    r0 = float((np.trace(m_pos) + np.trace(m_neg)) / (2 * nm1))
    eye = np.eye(nm1)
    defect = max(
        float(np.linalg.norm(m_pos - r0 * eye, 2)),
        float(np.linalg.norm(m_neg - r0 * eye, 2)),
    )
    points = (body.jet(u0).gradient, body.jet(-u0).gradient)
    return UmbilicResult(u0, r0, defect, points, bool(defect <= tol))


def _profile_pair(body, base, u):
    r_pos = eigen_profile(body, base, u).values
    r_neg = eigen_profile(body, base, -u).values
    return r_pos, r_neg


def _search_objective(body, base, u, objective: str) -> float:
    r_pos, r_neg = _profile_pair(body, base, u)
    f = float(np.sum((r_pos - r_neg) ** 2))
    if objective == "umbilic":
        f += float(np.sum((r_pos - r_pos.mean()) ** 2))
        f += float(np.sum((r_neg - r_neg.mean()) ** 2))
    return f


def antipodal_search(
    body,
    base,
    seed=0,
    budget: int = 4000,
    objective: str = "umbilic",
    tol: float = 1e-6,
) -> AntipodalSearchResult:
    """Locate a direction where the antipodal eigenvalue profiles match.

    The default objective adds the isotropy defect of both profiles, so a
    converged minimum certifies an antipodal pair of relative umbilics
    (M(+-u0) = r0 Id).  ``objective="antipodal"`` minimizes only
    |R(u) - R(-u)|^2, the quantity whose zero is guaranteed for continuous
    odd-symmetric data; use it to study generic body pairs.

    The search runs a seeded low-discrepancy grid on a closed hemisphere
    (ties keep the lowest grid index) followed by a derivative-free compass
    refinement with shrinking tangent steps, stopping when the step falls
    below 1e-7 or the evaluation budget is exhausted.  If the final defect
    exceeds ``tol`` the best candidate is returned flagged unconverged.
    """
    if objective not in ("umbilic", "antipodal"):
        raise ValueError(f"unknown objective {objective!r}")
    if budget < 16:
        raise ValueError("budget too small for a meaningful search")
    n = body.dim
    evals = 0

    def f(u):
        nonlocal evals
        evals += 1
        return _search_objective(body, base, u, objective)

    grid = hemisphere_grid(n, max(8, budget // 4), seed)
    best_u = grid[0]
    best_f = f(grid[0])
    for u in grid[1:]:
        val = f(u)
        if val < best_f - max(1e-18, 1e-12 * best_f):
            best_f, best_u = val, u

    step = 0.5
    min_step = 1e-7
    while step > min_step and evals + 2 * (n - 1) <= budget:
        frame = tangent_frame(best_u)
        improved = False
        for b in frame.basis.T:
            for sign in (1.0, -1.0):
                cand = best_u + sign * step * b
                cand /= np.linalg.norm(cand)
                val = f(cand)
                if val < best_f - max(1e-18, 1e-12 * best_f):
                    best_f, best_u = val, cand
                    improved = True
        if not improved:
            step *= 0.5

    umb = umbilic_check(body, base, best_u, tol)
    r_pos, r_neg = _profile_pair(body, base, best_u)
    r_defect = float(np.linalg.norm(r_pos - r_neg))
    converged = r_defect <= tol if objective == "antipodal" else umb.defect <= tol
    return AntipodalSearchResult(
        umbilic=umb,
        r_defect=r_defect,
        converged=bool(converged),
        evaluations=evals,
        objective=objective,
    )


# ---------------------------------------------------------------------------
# bodies of revolution


@dataclass(frozen=True)
class RevolutionEigenstructure:
    """Eigenstructure of L(h)(u) for a body of revolution at u != +-axis.

    ``axial`` is the simple eigenvalue with eigenvector in span{axis, u}
    orthogonal to u; ``equatorial`` is the (n-2)-fold eigenvalue on the
    orthogonal complement of span{axis, u}.  The residuals measure how far
    the Hessian is from that block structure.
    """

    axial: float
    equatorial: float
    axial_residual: float
    isotropy_residual: float


def _declared_axis(body) -> Optional[np.ndarray]:
    ax = getattr(body, "revolution_axis", None)
    if ax is None:
        return None
    return np.asarray(ax, dtype=float)


def revolution_eigenstructure(body, u) -> RevolutionEigenstructure:
    """Closed-form eigenstructure check for bodies of revolution."""
    axis = _declared_axis(body)
    if axis is None:
        if getattr(body, "isotropic", False):
            u_arr = np.asarray(u, dtype=float)
            cand = np.zeros_like(u_arr)
            cand[int(np.argmin(np.abs(u_arr)))] = 1.0
            axis = cand - (cand @ u_arr) * u_arr
            axis /= np.linalg.norm(axis)
        else:
            raise ValueError("body does not declare a revolution axis")
    u = np.asarray(u, dtype=float)
    t = float(u @ axis)
    if abs(t) > 1 - 1e-10:
        raise ValueError("direction must differ from the axis")
    cos_phi = float(np.sqrt(1.0 - t * t))
    v0 = (u - t * axis) / cos_phi
    w1 = -t * v0 + cos_phi * axis

    hess = body.jet(u).hessian
    axial = float(w1 @ hess @ w1)
    axial_residual = float(np.linalg.norm(hess @ w1 - axial * w1))

    n = u.size
    span = np.column_stack([u, w1])
    q, _ = np.linalg.qr(np.column_stack([span, np.eye(n)]))
    comp = q[:, 2:]
    block = comp.T @ hess @ comp
    equatorial = float(np.trace(block) / (n - 2))
    isotropy_residual = float(np.linalg.norm(block - equatorial * np.eye(n - 2), 2))
    return RevolutionEigenstructure(axial, equatorial, axial_residual, isotropy_residual)


@dataclass(frozen=True)
class RevolutionRelationDefects:
    """Defects of the equatorial eigenvalue relations for co-axial pairs.

    With (x1, x) the axial/equatorial eigenvalues of the body and (y1, y)
    those of the base at an equatorial direction, proportional i-th and
    (n-1)-st projection functions with ratios alpha and beta force

        x1 x^{i-1} = alpha y1 y^{i-1},   x^i = alpha y^i,
        x1 x^{n-2} = beta  y1 y^{n-2},

    and consequently alpha^{n-1} = beta^i.
    """

    mixed_i: float
    pure_i: float
    mixed_top: float
    consequence: float

    def max_defect(self) -> float:
        return max(self.mixed_i, self.pure_i, self.mixed_top)


def revolution_relations_check(
    body, base, i: int, alpha: float, beta: float, u
) -> RevolutionRelationDefects:
    """Evaluate the three equatorial relations and their consequence."""
    ax_body = _declared_axis(body) if not getattr(body, "isotropic", False) else None
    ax_base = _declared_axis(base) if not getattr(base, "isotropic", False) else None
    if ax_body is None and ax_base is None:
        axis = None
        for b in (body, base):
            cand = _declared_axis(b)
            if cand is not None:
                axis = cand
        if axis is None:
            raise ValueError("neither body declares a revolution axis")
    elif ax_body is None:
        axis = ax_base
    elif ax_base is None:
        axis = ax_body
    else:
        if abs(float(ax_body @ ax_base)) < 1 - 1e-10:
            raise ValueError("bodies do not share a revolution axis")
        axis = ax_body
    n = body.dim
    if not (1 <= i <= n - 2):
        raise ValueError(f"grade i={i} must satisfy 1 <= i <= n-2")
    u = np.asarray(u, dtype=float)
    if abs(float(u @ axis)) > 1e-8:
        raise ValueError("direction must be equatorial (orthogonal to the axis)")

    eb = revolution_eigenstructure(body, u)
    e0 = revolution_eigenstructure(base, u)
    x1, x = eb.axial, eb.equatorial
    y1, y = e0.axial, e0.equatorial
    mixed_i = abs(2 * x1 * x ** (i - 1) - 2 * alpha * y1 * y ** (i - 1))
    pure_i = abs(2 * x**i - 2 * alpha * y**i)
    mixed_top = abs(2 * x1 * x ** (n - 2) - 2 * beta * y1 * y ** (n - 2))
    consequence = abs(alpha ** (n - 1) - beta**i)
    return RevolutionRelationDefects(mixed_i, pure_i, mixed_top, consequence)


# ---------------------------------------------------------------------------
# determinant ratios


@dataclass(frozen=True)
class DetRatioReport:
    """Sampled constancy report for det L(h) / det L(h0)."""

    mean: float
    max_rel_deviation: float
    ratios: np.ndarray
    seed: object


def det_ratio_constancy(body, base, samples: int = 64, seed=0) -> DetRatioReport:
    """Sample the curvature-determinant ratio over Haar-random directions.

    The ratio is the density of the top-order area measure of the body with
    respect to the base; for homothets it is constant (scale^{n-1}).
    """
    rng = as_rng(seed)
    dirs = haar_directions(body.dim, samples, rng)
    ratios = np.empty(samples)
    for s, u in enumerate(dirs):
        frame = tangent_frame(u)
        det_body = reverse_weingarten(body, u, frame).det()
        det_base = reverse_weingarten(base, u, frame).det()
        if abs(det_base) < 1e-14:
            raise PreconditionError("base curvature determinant vanishes at a sample")
        ratios[s] = det_body / det_base
    mean = float(ratios.mean())
    max_rel = float(np.abs(ratios / mean - 1.0).max()) if mean != 0 else np.inf
    return DetRatioReport(mean, max_rel, ratios, seed)
