"""Convex bodies described by their support functions.

Each family evaluates the degree-1 homogeneous support function h(x) on
R^n \\ {0} together with its analytic gradient and Hessian (the "jet").
The Hessian of a 1-homogeneous function annihilates the base direction, so
its restriction to the tangent hyperplane u^perp carries the principal radii
of curvature; ``validate`` samples those radii to certify smoothness and
strict convexity.

Families
--------
Ball(dim, radius)                   h(x) = radius * |x|
Ellipsoid(shape)                    h(x) = sqrt(x' A x), A positive definite
Spheroid(axis, equatorial, polar)   ellipsoid of revolution
Revolution(axis, profile)           h(x) = |x| g(<x,e>/|x|), profile supplied
                                    with two derivatives (no silent numeric
                                    differentiation)
HarmonicPerturbation(base, ...)     base plus eps * |x| p(<x,e>/|x|) for an
                                    odd polynomial p of degree <= 7
MinkowskiSum(parts)                 sum of support functions
Homothet(base, scale, shift)        scale * h_base + <shift, x>
Erosion(base, radius)               h_base - radius on unit directions

Bodies are immutable value objects; jets are recomputed on demand, never
cached.  All closed-form families serialize to a {"family", "params"} JSON
document via ``body_to_dict`` / ``body_from_dict``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .sampling import as_rng
from .weingarten import tangent_frame

__all__ = [
    "SupportJet",
    "ValidationReport",
    "ConvexBody",
    "Ball",
    "Ellipsoid",
    "Spheroid",
    "RadialProfile",
    "Revolution",
    "HarmonicPerturbation",
    "MinkowskiSum",
    "Homothet",
    "Erosion",
    "finite_difference_jet",
    "validate",
    "body_to_dict",
    "body_from_dict",
]

UNIT_TOL = 1e-12


def _as_point(x) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError("expected a vector")
    if float(np.sqrt(x @ x)) == 0.0:
        raise ValueError("support functions are undefined at the origin")
    return x


def _as_direction(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim != 1:
        raise ValueError("expected a vector")
    nrm = float(np.linalg.norm(u))
    if abs(nrm - 1.0) > UNIT_TOL:
        raise ValueError(f"direction must be unit length, |u| = {nrm!r}")
    return u


def _unitize(v, name: str) -> tuple[float, ...]:
    v = np.asarray(v, dtype=float)
    nrm = float(np.linalg.norm(v))
    if nrm < 1e-12:
        raise ValueError(f"{name} must be a nonzero vector")
    return tuple(v / nrm)


@dataclass(frozen=True)
class SupportJet:
    """Value, gradient, and Hessian of a support function at a direction.

    The gradient is the boundary point with outer normal u; the Hessian is
    symmetric and satisfies hessian @ u = 0 and <gradient, u> = value.
    """

    value: float
    gradient: np.ndarray
    hessian: np.ndarray


class ConvexBody:
    """Shared behavior for support-function families (duck-typed elsewhere)."""

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def support(self, x) -> float:
        raise NotImplementedError

    def jet(self, u) -> SupportJet:
        raise NotImplementedError

    def width(self, u) -> float:
        """h(u) + h(-u), the distance between the two supporting hyperplanes."""
        u = _as_direction(u)
        return self.support(u) + self.support(-u)

    # revolution metadata used by the weingarten module (duck-typed there)
    @property
    def revolution_axis(self) -> Optional[np.ndarray]:
        return None

    @property
    def isotropic(self) -> bool:
        return False


@dataclass(frozen=True)
class Ball(ConvexBody):
    dimension: int
    radius: float = 1.0

    def __post_init__(self):
        if self.dimension < 2:
            raise ValueError("dimension must be at least 2")
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @property
    def dim(self) -> int:
        return self.dimension

    def support(self, x) -> float:
        x = _as_point(x)
        return self.radius * np.sqrt(x @ x)

    def jet(self, u) -> SupportJet:
        u = _as_direction(u)
        grad = self.radius * u
        hess = self.radius * (np.eye(self.dimension) - np.outer(u, u))
        return SupportJet(self.radius, grad, hess)

    @property
    def isotropic(self) -> bool:
        return True


@dataclass(frozen=True)
class Ellipsoid(ConvexBody):
    """h(x) = sqrt(x' A x) for a positive definite shape matrix A.

    The diagonal case A = diag(a_1^2, ..., a_n^2) is the ellipsoid with
    semiaxes a_i.
    """

    shape: tuple

    def __post_init__(self):
        a = np.asarray(self.shape, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("shape matrix must be square")
        if np.abs(a - a.T).max() > 1e-10 * max(1.0, np.abs(a).max()):
            raise ValueError("shape matrix must be symmetric")
        a = 0.5 * (a + a.T)
        if np.linalg.eigvalsh(a).min() <= 0:
            raise ValueError("shape matrix must be positive definite")
        object.__setattr__(self, "shape", tuple(map(tuple, a)))

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.shape, dtype=float)

    @property
    def dim(self) -> int:
        return len(self.shape)

    def support(self, x) -> float:
        x = _as_point(x)
        return np.sqrt(x @ self.matrix @ x)

    def jet(self, u) -> SupportJet:
        u = _as_direction(u)
        a = self.matrix
        au = a @ u
        h = float(np.sqrt(u @ au))
        grad = au / h
        hess = a / h - np.outer(au, au) / h**3
        return SupportJet(h, grad, 0.5 * (hess + hess.T))


def _revolution_support(x, axis, g):
    rho = np.sqrt(x @ x)
    t = (x @ axis) / rho
    return rho * g(t)


def _revolution_jet(u, axis, g, dg, ddg, n):
    """Jet of |x| g(<x,e>/|x|) at a unit direction."""
    t = float(u @ axis)
    t = min(1.0, max(-1.0, t))
    gv, g1, g2 = float(g(t)), float(dg(t)), float(ddg(t))
    value = gv
    grad = g1 * axis + (gv - t * g1) * u
    w = axis - t * u
    hess = g2 * np.outer(w, w) + (gv - t * g1) * (np.eye(n) - np.outer(u, u))
    return value, grad, 0.5 * (hess + hess.T)


@dataclass(frozen=True)
class Spheroid(ConvexBody):
    """Ellipsoid of revolution: equatorial semiaxis a, polar semiaxis b.

    The support profile is g(t) = sqrt(a^2 + (b^2 - a^2) t^2) in t = <u, e>.
    The principal radii of curvature are a^2/b at the poles and
    (a, ..., a, b^2/a) on the equator.
    """

    axis: tuple
    equatorial: float
    polar: float

    def __post_init__(self):
        if self.equatorial <= 0 or self.polar <= 0:
            raise ValueError("semiaxes must be positive")
        object.__setattr__(self, "axis", _unitize(self.axis, "axis"))
        if len(self.axis) < 2:
            raise ValueError("dimension must be at least 2")

    @property
    def dim(self) -> int:
        return len(self.axis)

    @property
    def axis_vector(self) -> np.ndarray:
        return np.asarray(self.axis, dtype=float)

    def support(self, x) -> float:
        x = _as_point(x)
        e = self.axis_vector
        a2 = self.equatorial**2
        d = self.polar**2 - a2
        return np.sqrt(a2 * (x @ x) + d * (x @ e) ** 2)

    def jet(self, u) -> SupportJet:
        u = _as_direction(u)
        e = self.axis_vector
        a2 = self.equatorial**2
        d = self.polar**2 - a2
        au = a2 * u + d * float(u @ e) * e
        h = float(np.sqrt(u @ au))
        grad = au / h
        hess = (a2 * np.eye(self.dim) + d * np.outer(e, e)) / h
        hess -= np.outer(au, au) / h**3
        return SupportJet(h, grad, 0.5 * (hess + hess.T))

    @property
    def revolution_axis(self) -> np.ndarray:
        return self.axis_vector


@dataclass(frozen=True)
class RadialProfile:
    """Support profile g with its first two derivatives.

    ``Revolution`` refuses profiles missing derivatives unless
    ``numeric_derivatives=True`` is passed explicitly; the numeric fallback
    uses 1-d central differences and is documented as less accurate.
    """

    g: Callable[[float], float]
    dg: Optional[Callable[[float], float]] = None
    ddg: Optional[Callable[[float], float]] = None
    label: str = ""


@dataclass(frozen=True)
class Revolution(ConvexBody):
    """Body of revolution h(x) = |x| g(<x,e>/|x|) about the unit axis e."""

    axis: tuple
    profile: RadialProfile
    numeric_derivatives: bool = False
    fd_step: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "axis", _unitize(self.axis, "axis"))
        if len(self.axis) < 2:
            raise ValueError("dimension must be at least 2")
        missing = self.profile.dg is None or self.profile.ddg is None
        if missing and not self.numeric_derivatives:
            raise ValueError(
                "profile derivatives are required; pass numeric_derivatives="
                "True to opt into finite-difference profile derivatives"
            )

    @property
    def dim(self) -> int:
        return len(self.axis)

    @property
    def axis_vector(self) -> np.ndarray:
        return np.asarray(self.axis, dtype=float)

    def _derivatives(self):
        g = self.profile.g
        dg, ddg = self.profile.dg, self.profile.ddg
        s = self.fd_step
        if dg is None:
            dg = lambda t: (g(t + s) - g(t - s)) / (2 * s)  # noqa: E731
        if ddg is None:
            ddg = lambda t: (g(t + s) - 2 * g(t) + g(t - s)) / s**2  # noqa: E731
        return g, dg, ddg

    def support(self, x) -> float:
        x = _as_point(x)
        return _revolution_support(x, self.axis_vector, self.profile.g)

    def jet(self, u) -> SupportJet:
        u = _as_direction(u)
        g, dg, ddg = self._derivatives()
        value, grad, hess = _revolution_jet(u, self.axis_vector, g, dg, ddg, self.dim)
        return SupportJet(value, grad, hess)

    @property
    def revolution_axis(self) -> np.ndarray:
        return self.axis_vector


def _odd_poly_coeffs(odd_coeffs) -> np.ndarray:
    c = np.asarray(odd_coeffs, dtype=float)
    if c.ndim != 1 or not 1 <= c.size <= 4:
        raise ValueError("odd_coeffs lists the coefficients of t, t^3, t^5, t^7")
    return c


def _odd_poly(c: np.ndarray, t):
    powers = np.arange(c.size) * 2 + 1
    return sum(ci * t**p for ci, p in zip(c, powers))


def _odd_poly_d1(c: np.ndarray, t):
    powers = np.arange(c.size) * 2 + 1
    return sum(ci * p * t ** (p - 1) for ci, p in zip(c, powers))


def _odd_poly_d2(c: np.ndarray, t):
    powers = np.arange(c.size) * 2 + 1
    return sum(ci * p * (p - 1) * t ** (p - 2) for ci, p in zip(c, powers) if p >= 2)


@dataclass(frozen=True)
class HarmonicPerturbation(ConvexBody):
    """Base body plus eps * |x| p(<x,e>/|x|) for an odd polynomial p.

    ``odd_coeffs`` are the coefficients of t, t^3, t^5, t^7 (degree <= 7).
    Oddness makes the perturbation cancel from the width, so perturbing a
    ball keeps the width constant; convexity is not checked here, run
    ``validate`` to certify the perturbed body.
    """

    base: ConvexBody
    axis: tuple
    odd_coeffs: tuple
    epsilon: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "axis", _unitize(self.axis, "axis"))
        c = _odd_poly_coeffs(self.odd_coeffs)
        object.__setattr__(self, "odd_coeffs", tuple(c))
        if len(self.axis) != self.base.dim:
            raise ValueError("axis dimension must match the base body")

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def axis_vector(self) -> np.ndarray:
        return np.asarray(self.axis, dtype=float)

    @property
    def _coeffs(self) -> np.ndarray:
        return np.asarray(self.odd_coeffs, dtype=float)

    def support(self, x) -> float:
        x = _as_point(x)
        c = self._coeffs
        pert = _revolution_support(x, self.axis_vector, lambda t: _odd_poly(c, t))
        return self.base.support(x) + self.epsilon * pert

    def jet(self, u) -> SupportJet:
        u = _as_direction(u)
        c = self._coeffs
        value, grad, hess = _revolution_jet(
            u,
            self.axis_vector,
            lambda t: _odd_poly(c, t),
            lambda t: _odd_poly_d1(c, t),
            lambda t: _odd_poly_d2(c, t),
            self.dim,
        )
        base = self.base.jet(u)
        return SupportJet(
            base.value + self.epsilon * value,
            base.gradient + self.epsilon * grad,
            base.hessian + self.epsilon * hess,
        )

    @property
    def revolution_axis(self) -> Optional[np.ndarray]:
        if self.base.isotropic:
            return self.axis_vector
        base_axis = self.base.revolution_axis
        if base_axis is not None and abs(float(base_axis @ self.axis_vector)) > 1 - 1e-12:
            return self.axis_vector
        return None


@dataclass(frozen=True)
class MinkowskiSum(ConvexBody):
    """Minkowski sum of bodies; support functions and jets add."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("need at least one summand")
        if len({p.dim for p in parts}) != 1:
            raise ValueError("summands must share the ambient dimension")
        object.__setattr__(self, "parts", parts)

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    def support(self, x) -> float:
        x = _as_point(x)
        return sum(p.support(x) for p in self.parts)

    def jet(self, u) -> SupportJet:
        jets = [p.jet(u) for p in self.parts]
        return SupportJet(
            sum(j.value for j in jets),
            sum(j.gradient for j in jets),
            sum(j.hessian for j in jets),
        )

    @property
    def isotropic(self) -> bool:
        return all(p.isotropic for p in self.parts)

    @property
    def revolution_axis(self) -> Optional[np.ndarray]:
        axes = []
        for p in self.parts:
            if p.isotropic:
                continue
            ax = p.revolution_axis
            if ax is None:
                return None
            axes.append(ax)
        if not axes:
            return None
        for ax in axes[1:]:
            if abs(float(axes[0] @ ax)) < 1 - 1e-12:
                return None
        return axes[0]


@dataclass(frozen=True)
class Homothet(ConvexBody):
    """scale * K + shift: support scale * h_K(x) + <shift, x>."""

    base: ConvexBody
    scale: float
    shift: tuple = ()

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        shift = np.asarray(self.shift if len(self.shift) else np.zeros(self.base.dim), float)
        if shift.shape != (self.base.dim,):
            raise ValueError("shift dimension must match the base body")
        object.__setattr__(self, "shift", tuple(shift))

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def shift_vector(self) -> np.ndarray:
        return np.asarray(self.shift, dtype=float)

    def support(self, x) -> float:
        x = _as_point(x)
        return self.scale * self.base.support(x) + x @ self.shift_vector

    def jet(self, u) -> SupportJet:
        base = self.base.jet(u)
        t = self.shift_vector
        return SupportJet(
            self.scale * base.value + float(u @ t),
            self.scale * base.gradient + t,
            self.scale * base.hessian,
        )

    @property
    def isotropic(self) -> bool:
        # translation does not affect the Hessian, so curvature stays isotropic
        return self.base.isotropic

    @property
    def revolution_axis(self) -> Optional[np.ndarray]:
        return self.base.revolution_axis


@dataclass(frozen=True)
class Erosion(ConvexBody):
    """Inner parallel body at distance r: support h_K - r on unit directions.

    Valid as long as every principal radius of curvature of the base exceeds
    r (a ball of radius r then rolls freely inside the base body); otherwise
    ``validate`` reports nonpositive radii.
    """

    base: ConvexBody
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("erosion radius must be nonnegative")

    @property
    def dim(self) -> int:
        return self.base.dim

    def support(self, x) -> float:
        x = _as_point(x)
        return self.base.support(x) - self.radius * np.sqrt(x @ x)

    def jet(self, u) -> SupportJet:
        base = self.base.jet(u)
        n = self.dim
        return SupportJet(
            base.value - self.radius,
            base.gradient - self.radius * u,
            base.hessian - self.radius * (np.eye(n) - np.outer(u, u)),
        )

    @property
    def isotropic(self) -> bool:
        return self.base.isotropic

    @property
    def revolution_axis(self) -> Optional[np.ndarray]:
        return self.base.revolution_axis


# ---------------------------------------------------------------------------
# finite differences and validation


def finite_difference_jet(body, u, step: float = 1e-5, dtype=np.longdouble) -> SupportJet:
    """Central-difference jet of the support function, an analytic-free oracle.

    Differences are taken on the homogeneous extension at the unit direction
    u with the given step.  By default the stencil is evaluated in extended
    precision so the second-difference roundoff stays far below the
    truncation error at step 1e-5; pass ``dtype=np.float64`` to measure the
    plain double-precision stencil.  The Hessian is symmetrized entrywise.
    """
    u = np.asarray(_as_direction(u), dtype=dtype)
    n = u.size
    h = dtype(step)

    def f(x):
        return body.support(x)

    value = f(u)
    grad = np.empty(n, dtype=dtype)
    hess = np.empty((n, n), dtype=dtype)
    eye = np.eye(n, dtype=dtype)
    for i in range(n):
        ei = eye[i]
        grad[i] = (f(u + h * ei) - f(u - h * ei)) / (2 * h)
        hess[i, i] = (f(u + h * ei) - 2 * value + f(u - h * ei)) / h**2
    for i in range(n):
        for j in range(i + 1, n):
            ei, ej = eye[i], eye[j]
            hij = (
                f(u + h * ei + h * ej)
                - f(u + h * ei - h * ej)
                - f(u - h * ei + h * ej)
                + f(u - h * ei - h * ej)
            ) / (4 * h**2)
            hess[i, j] = hij
            hess[j, i] = hij
    hess = 0.5 * (hess + hess.T)
    return SupportJet(
        float(value),
        np.asarray(grad, dtype=float),
        np.asarray(hess, dtype=float),
    )


@dataclass(frozen=True)
class ValidationReport:
    """Sampled curvature certificate; see ``validate``."""

    min_radius: float
    max_radius: float
    argmin_direction: np.ndarray
    is_c2_plus: bool
    samples: int
    seed: object = field(default=None, compare=False)


def validate(body, samples: int = 128, seed=0) -> ValidationReport:
    """Sample principal radii of curvature over Haar-random directions.

    Returns the smallest and largest eigenvalue of the tangential Hessian
    seen over the sample and whether all were strictly positive (a sampled,
    not exhaustive, certificate that the body is smooth and strictly convex).
    """
    from .sampling import haar_directions

    rng = as_rng(seed)
    dirs = haar_directions(body.dim, samples, rng)
    min_radius = np.inf
    max_radius = -np.inf
    argmin = dirs[0]
    for u in dirs:
        frame = tangent_frame(u)
        hess = body.jet(u).hessian
        restricted = frame.basis.T @ hess @ frame.basis
        vals = np.linalg.eigvalsh(0.5 * (restricted + restricted.T))
        if vals[0] < min_radius:
            min_radius = float(vals[0])
            argmin = u
        max_radius = max(max_radius, float(vals[-1]))
    return ValidationReport(
        min_radius=min_radius,
        max_radius=max_radius,
        argmin_direction=argmin,
        is_c2_plus=bool(min_radius > 0.0),
        samples=samples,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# serialization


def body_to_dict(body) -> dict:
    """Serialize a closed-form body to a {"family", "params"} document.

    ``Revolution`` carries arbitrary callables and does not serialize.
    """
    if isinstance(body, Ball):
        return {"family": "ball", "params": {"dim": body.dimension, "radius": body.radius}}
    if isinstance(body, Ellipsoid):
        return {"family": "ellipsoid", "params": {"shape": [list(r) for r in body.shape]}}
    if isinstance(body, Spheroid):
        return {
            "family": "spheroid",
            "params": {
                "axis": list(body.axis),
                "equatorial": body.equatorial,
                "polar": body.polar,
            },
        }
    if isinstance(body, HarmonicPerturbation):
        return {
            "family": "harmonic_perturbation",
            "params": {
                "base": body_to_dict(body.base),
                "axis": list(body.axis),
                "odd_coeffs": list(body.odd_coeffs),
                "epsilon": body.epsilon,
            },
        }
    if isinstance(body, MinkowskiSum):
        return {
            "family": "minkowski_sum",
            "params": {"parts": [body_to_dict(p) for p in body.parts]},
        }
    if isinstance(body, Homothet):
        return {
            "family": "homothet",
            "params": {
                "base": body_to_dict(body.base),
                "scale": body.scale,
                "shift": list(body.shift),
            },
        }
    if isinstance(body, Erosion):
        return {
            "family": "erosion",
            "params": {"base": body_to_dict(body.base), "radius": body.radius},
        }
    raise ValueError(f"body of type {type(body).__name__} does not serialize")


def body_from_dict(doc: dict):
    """Inverse of ``body_to_dict``; raises ValueError on malformed documents."""
    if not isinstance(doc, dict) or "family" not in doc or "params" not in doc:
        raise ValueError('expected {"family": ..., "params": {...}}')
    family = doc["family"]
    p = doc["params"]
    try:
        if family == "ball":
            return Ball(int(p["dim"]), float(p["radius"]))
        if family == "ellipsoid":
            return Ellipsoid(tuple(map(tuple, p["shape"])))
        if family == "spheroid":
            return Spheroid(tuple(p["axis"]), float(p["equatorial"]), float(p["polar"]))
        if family == "harmonic_perturbation":
            return HarmonicPerturbation(
                body_from_dict(p["base"]),
                tuple(p["axis"]),
                tuple(p["odd_coeffs"]),
                float(p.get("epsilon", 1.0)),
            )
        if family == "minkowski_sum":
            return MinkowskiSum(tuple(body_from_dict(q) for q in p["parts"]))
        if family == "homothet":
            return Homothet(
                body_from_dict(p["base"]),
                float(p["scale"]),
                tuple(p.get("shift", ())),
            )
        if family == "erosion":
            return Erosion(body_from_dict(p["base"]), float(p["radius"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed parameters for family {family!r}: {exc}") from exc
    raise ValueError(f"unknown body family {family!r}")
