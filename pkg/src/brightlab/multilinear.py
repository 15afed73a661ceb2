"""Exterior powers of linear maps and symmetric forms on k-vectors.

The k-th exterior power of an m x m matrix A is represented concretely as the
C(m,k) x C(m,k) matrix of k x k minors over the lexicographically ordered
basis e_I = e_{i_1} ^ ... ^ e_{i_k}, i_1 < ... < i_k.  On top of that sit:

* decomposable k-vectors and the Gram-determinant inner product,
* symmetric bilinear forms on k-vectors, their first-Bianchi defect, and a
  polarization check that decides entrywise equality of two Bianchi forms
  from their values on decomposables alone,
* the alternating square form (the coefficient of the top basis vector in
  xi ^ xi), which vanishes on all decomposables yet is a nonzero form when
  the grade is even, and
* simultaneous diagonalization of two self-adjoint maps whose exterior
  powers sum to a multiple of the identity.

Everything is desk scale (m <= 10 or so); clarity beats asymptotics.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import InternalInconsistencyError, PreconditionError
from .sampling import as_rng

__all__ = [
    "MultiIndex",
    "KVector",
    "CompoundMatrix",
    "SymKForm",
    "CommonEigenbasis",
    "PolarizationResult",
    "multi_indices",
    "wedge_power",
    "gram_inner",
    "decompose",
    "bianchi_defect",
    "polarization_check",
    "square_form",
    "square_form_matrix",
    "common_eigenbasis",
]


# ---------------------------------------------------------------------------
# multi-indices


@lru_cache(maxsize=None)
def _index_tuples(m: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All strictly increasing k-tuples over {0, ..., m-1}, lex order."""
    return tuple(combinations(range(m), k))


@lru_cache(maxsize=None)
def _index_array(m: int, k: int) -> np.ndarray:
    arr = np.array(_index_tuples(m, k), dtype=np.intp).reshape(-1, k)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def _rank_lookup(m: int, k: int) -> dict[tuple[int, ...], int]:
    return {t: r for r, t in enumerate(_index_tuples(m, k))}


def _check_grade(m: int, k: int) -> None:
    if not (isinstance(m, (int, np.integer)) and isinstance(k, (int, np.integer))):
        raise ValueError("m and k must be integers")
    if not 1 <= k <= m:
        raise ValueError(f"grade k={k} must satisfy 1 <= k <= m={m}")


@dataclass(frozen=True)
class MultiIndex:
    """A strictly increasing k-subset of {1, ..., m}, 1-based entries."""

    entries: tuple[int, ...]
    m: int

    def __post_init__(self):
        k = len(self.entries)
        _check_grade(self.m, k)
        if any(e < 1 or e > self.m for e in self.entries):
            raise ValueError("entries must lie in {1, ..., m}")
        if any(a >= b for a, b in zip(self.entries, self.entries[1:])):
            raise ValueError("entries must be strictly increasing")

    @property
    def k(self) -> int:
        return len(self.entries)

    def rank(self) -> int:
        """Position in the lexicographic enumeration of k-subsets."""
        zero_based = tuple(e - 1 for e in self.entries)
        return _rank_lookup(self.m, self.k)[zero_based]

    @classmethod
    def unrank(cls, m: int, k: int, rank: int) -> "MultiIndex":
        tuples = _index_tuples(m, k)
        if not 0 <= rank < len(tuples):
            raise ValueError(f"rank {rank} out of range for C({m},{k})={len(tuples)}")
        return cls(tuple(e + 1 for e in tuples[rank]), m)


def multi_indices(m: int, k: int) -> list[MultiIndex]:
    """All k-element multi-indices over {1, ..., m} in lexicographic order."""
    _check_grade(m, k)
    return [MultiIndex(tuple(e + 1 for e in t), m) for t in _index_tuples(m, k)]


# ---------------------------------------------------------------------------
# k-vectors


@dataclass(frozen=True)
class KVector:
    """Coordinates of a k-vector over the lexicographic basis e_I."""

    coords: np.ndarray
    m: int
    k: int

    def __post_init__(self):
        _check_grade(self.m, self.k)
        coords = np.asarray(self.coords, dtype=float)
        expected = len(_index_tuples(self.m, self.k))
        if coords.shape != (expected,):
            raise ValueError(f"expected {expected} coordinates, got {coords.shape}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def basis(cls, m: int, k: int, entries: tuple[int, ...]) -> "KVector":
        """The basis k-vector e_I for the 1-based multi-index ``entries``."""
        mi = MultiIndex(tuple(entries), m)
        coords = np.zeros(len(_index_tuples(m, k)))
        coords[mi.rank()] = 1.0
        return cls(coords, m, k)

    def inner(self, other: "KVector") -> float:
        if (self.m, self.k) != (other.m, other.k):
            raise ValueError("k-vectors live in different spaces")
        return float(self.coords @ other.coords)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))


def _vector_stack(vectors, expected_len: int | None = None) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(vectors, dtype=float))
    if arr.ndim != 2:
        raise ValueError("expected a sequence of vectors")
    if expected_len is not None and arr.shape[0] != expected_len:
        raise ValueError(f"expected {expected_len} vectors, got {arr.shape[0]}")
    return arr


def decompose(vectors) -> KVector:
    """The decomposable k-vector u_1 ^ ... ^ u_k from a (k, m) stack of rows.

    Coordinate I is the k x k minor of the stack taken at columns I; linearly
    dependent input yields the zero k-vector.
    """
    u = _vector_stack(vectors)
    k, m = u.shape
    _check_grade(m, k)
    idx = _index_array(m, k)
    sub = u[:, idx]            # (k, D, k)
    sub = np.swapaxes(sub, 0, 1)  # (D, k, k) row-major minors
    return KVector(np.linalg.det(sub), m, k)


def gram_inner(us, vs) -> float:
    """Inner product <u_1^...^u_k, v_1^...^v_k> = det(<u_i, v_j>)."""
    u = _vector_stack(us)
    v = _vector_stack(vs, expected_len=u.shape[0])
    if u.shape != v.shape:
        raise ValueError("frames must have matching shapes")
    return float(np.linalg.det(u @ v.T))


# ---------------------------------------------------------------------------
# compound matrices


@dataclass(frozen=True)
class CompoundMatrix:
    """The k-th exterior power of an m x m matrix on the lex basis."""

    matrix: np.ndarray
    m: int
    k: int

    def __post_init__(self):
        _check_grade(self.m, self.k)
        mat = np.asarray(self.matrix, dtype=float)
        d = len(_index_tuples(self.m, self.k))
        if mat.shape != (d, d):
            raise ValueError(f"expected shape {(d, d)}, got {mat.shape}")
        object.__setattr__(self, "matrix", mat)

    def apply(self, xi: KVector) -> KVector:
        if (xi.m, xi.k) != (self.m, self.k):
            raise ValueError("k-vector does not match this exterior power")
        return KVector(self.matrix @ xi.coords, self.m, self.k)


def wedge_power(a, k: int) -> CompoundMatrix:
    """Matrix of all k x k minors det(A[I, J]) over lex-ordered row/column sets.

    Exterior powers are multiplicative, wedge_power(AB, k) equals
    wedge_power(A, k) @ wedge_power(B, k), and wedge_power(A, m) is det(A).
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    m = a.shape[0]
    _check_grade(m, k)
    idx = _index_array(m, k)
    # sub[p, q] = A[idx[p], :][:, idx[q]]; batched LU determinants
    sub = a[idx[:, None, :, None], idx[None, :, None, :]]
    return CompoundMatrix(np.linalg.det(sub), m, k)


# ---------------------------------------------------------------------------
# symmetric forms on k-vectors


@dataclass(frozen=True)
class SymKForm:
    """Symmetric bilinear form on k-vectors, stored as a mirrored matrix."""

    matrix: np.ndarray
    m: int
    k: int

    def __post_init__(self):
        _check_grade(self.m, self.k)
        mat = np.asarray(self.matrix, dtype=float)
        d = len(_index_tuples(self.m, self.k))
        if mat.shape != (d, d):
            raise ValueError(f"expected shape {(d, d)}, got {mat.shape}")
        scale = max(1.0, float(np.abs(mat).max()))
        if np.abs(mat - mat.T).max() > 1e-9 * scale:
            raise ValueError("form matrix is not symmetric")
        mat = 0.5 * (mat + mat.T)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_map(cls, a, k: int) -> "SymKForm":
        """The form (xi, zeta) -> <(wedge^k A) xi, zeta> of a self-adjoint A."""
        a = np.asarray(a, dtype=float)
        scale = max(1.0, float(np.abs(a).max()))
        if np.abs(a - a.T).max() > 1e-9 * scale:
            raise ValueError("expected a self-adjoint (symmetric) matrix")
        return cls(wedge_power(a, k).matrix, a.shape[0], k)

    def __add__(self, other: "SymKForm") -> "SymKForm":
        if (self.m, self.k) != (other.m, other.k):
            raise ValueError("forms live on different spaces")
        return SymKForm(self.matrix + other.matrix, self.m, self.k)

    def evaluate(self, xi: KVector, zeta: KVector) -> float:
        for v in (xi, zeta):
            if (v.m, v.k) != (self.m, self.k):
                raise ValueError("k-vector does not match this form")
        return float(xi.coords @ self.matrix @ zeta.coords)

    def quadratic(self, xi: KVector) -> float:
        return self.evaluate(xi, xi)


def bianchi_defect(form: SymKForm, us, vs) -> float:
    """Signed first-Bianchi sum of a form at vectors u_1..u_{k+1}, v_1..v_{k-1}.

    Returns sum_{j=1}^{k+1} (-1)^j w(u_1^..^u_{j-1}^u_{j+1}^..^u_{k+1},
    u_j^v_1^..^v_{k-1}).  Forms induced by self-adjoint maps through
    ``SymKForm.from_map`` satisfy the identity, so the sum is zero up to
    roundoff; the alternating square form does not.
    """
    k = form.k
    if k < 2:
        raise ValueError("the Bianchi sum needs grade k >= 2")
    u = _vector_stack(us, expected_len=k + 1)
    v = _vector_stack(vs, expected_len=k - 1)
    if u.shape[1] != form.m or v.shape[1] != form.m:
        raise ValueError("vectors do not match the ambient dimension")
    total = 0.0
    for j in range(k + 1):
        left = decompose(np.delete(u, j, axis=0))
        right = decompose(np.vstack([u[j][None, :], v]))
        total += (-1.0) ** (j + 1) * form.evaluate(left, right)
    return float(total)


@dataclass(frozen=True)
class PolarizationResult:
    """Outcome of ``polarization_check``.

    ``concluded`` is False when a Bianchi precondition failed (the check
    refuses to decide anything in that case and names the failing form).
    """

    concluded: bool
    equal: bool
    max_entry_diff: float
    worst_decomposable_gap: float
    bianchi_defects: tuple[float, float]
    failed_form: str | None = None


def _sample_bianchi(form: SymKForm, rng, samples: int) -> float:
    worst = 0.0
    for _ in range(samples):
        u = rng.standard_normal((form.k + 1, form.m))
        v = rng.standard_normal((max(form.k - 1, 1), form.m))[: form.k - 1]
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        if len(v):
            v /= np.linalg.norm(v, axis=1, keepdims=True)
        worst = max(worst, abs(bianchi_defect(form, u, v)))
    return worst


def _sample_decomposables(m: int, k: int, rng, trials: int) -> list[KVector]:
    out = [KVector.basis(m, k, mi.entries) for mi in multi_indices(m, k)]
    for _ in range(trials):
        frame = rng.standard_normal((k, m))
        xi = decompose(frame)
        nrm = xi.norm()
        if nrm < 1e-8:
            continue
        out.append(KVector(xi.coords / nrm, m, k))
    return out


def polarization_check(
    a: SymKForm,
    b: SymKForm,
    trials: int = 32,
    tol: float = 1e-10,
    seed=0,
    bianchi_samples: int = 16,
    entry_tol: float | None = None,
) -> PolarizationResult:
    """Decide entrywise equality of two Bianchi forms from decomposables only.

    Both forms must satisfy the first Bianchi identity on sampled argument
    tuples (absolute defect below ``tol``); otherwise the check refuses and
    reports which form failed, since agreement on decomposables then proves
    nothing (the alternating square form is the standard counterexample).
    If the quadratic values agree within ``tol`` on all sampled unit
    decomposables (every basis k-vector plus ``trials`` random frames), the
    forms are asserted equal entrywise within ``entry_tol`` (default
    ``100 * tol``); a violation of that assertion raises
    InternalInconsistencyError.  The maximal entry difference is returned.
    """
    if (a.m, a.k) != (b.m, b.k):
        raise ValueError("forms live on different spaces")
    if a.k < 2:
        raise ValueError("polarization over decomposables needs k >= 2")
    if entry_tol is None:
        entry_tol = 100.0 * tol
    rng = as_rng(seed)
    defect_a = _sample_bianchi(a, rng, bianchi_samples)
    defect_b = _sample_bianchi(b, rng, bianchi_samples)
    entry_diff = float(np.abs(a.matrix - b.matrix).max())
    for name, defect in (("A", defect_a), ("B", defect_b)):
        if defect > tol:
            return PolarizationResult(
                concluded=False,
                equal=False,
                max_entry_diff=entry_diff,
                worst_decomposable_gap=np.nan,
                bianchi_defects=(defect_a, defect_b),
                failed_form=name,
            )
    gap = 0.0
    for xi in _sample_decomposables(a.m, a.k, rng, trials):
        gap = max(gap, abs(a.quadratic(xi) - b.quadratic(xi)))
    equal = gap <= tol
    if equal and entry_diff > entry_tol:
        raise InternalInconsistencyError(
            "forms agree on decomposables and satisfy the Bianchi identity "
            f"yet differ entrywise by {entry_diff:.3e} (> {entry_tol:.3e})"
        )
    return PolarizationResult(
        concluded=True,
        equal=equal,
        max_entry_diff=entry_diff,
        worst_decomposable_gap=gap,
        bianchi_defects=(defect_a, defect_b),
    )


# ---------------------------------------------------------------------------
# the alternating square form


def _complement_sign(entries: tuple[int, ...], m: int) -> int:
    """Sign of the permutation (I, I^c) of {0, ..., m-1}, both ascending."""
    # inversions: each element of I counts the complement entries below it
    # that appear after it; equivalently sign = (-1)^(sum(I) - k(k-1)/2).
    k = len(entries)
    total = sum(entries) - k * (k - 1) // 2
    return -1 if total % 2 else 1


@lru_cache(maxsize=None)
def _square_form_matrix_cached(k: int) -> np.ndarray:
    m = 2 * k
    tuples = _index_tuples(m, k)
    lookup = _rank_lookup(m, k)
    d = len(tuples)
    q = np.zeros((d, d))
    universe = set(range(m))
    for r, t in enumerate(tuples):
        comp = tuple(sorted(universe - set(t)))
        q[r, lookup[comp]] = _complement_sign(t, m)
    return q


def square_form_matrix(k: int) -> SymKForm:
    """The form whose quadratic values are square_form, on wedge^k R^{2k}.

    Symmetric only for even k, which is exactly when the quadratic form is
    nonzero while still vanishing on every decomposable k-vector.
    """
    if k < 2 or k % 2:
        raise ValueError("the alternating square form needs even k >= 2")
    return SymKForm(_square_form_matrix_cached(k), 2 * k, k)


def square_form(xi: KVector) -> float:
    """Coefficient of e_{1...2k} in xi ^ xi for a k-vector in R^{2k}, k even.

    Decomposable arguments give zero (a wedge with a repeated factor); the
    quadratic form itself is nonzero, so vanishing on decomposables does not
    polarize without the Bianchi identity.
    """
    if xi.k % 2:
        raise ValueError("xi ^ xi vanishes identically for odd grades")
    if xi.m != 2 * xi.k:
        raise ValueError("square_form needs ambient dimension m = 2k")
    q = _square_form_matrix_cached(xi.k)
    return float(xi.coords @ q @ xi.coords)


# ---------------------------------------------------------------------------
# simultaneous diagonalization


@dataclass(frozen=True)
class CommonEigenbasis:
    """Orthonormal basis diagonalizing two self-adjoint maps at once."""

    basis: np.ndarray
    eigenvalues_g: np.ndarray
    eigenvalues_h: np.ndarray
    hypothesis_defect: float
    nonsingular: str | None


def _cluster_spans(values: np.ndarray, rel_tol: float) -> list[slice]:
    spans = []
    start = 0
    for i in range(1, len(values)):
        scale = max(1.0, abs(values[i]), abs(values[i - 1]))
        if values[i] - values[i - 1] > rel_tol * scale:
            spans.append(slice(start, i))
            start = i
    spans.append(slice(start, len(values)))
    return spans


def common_eigenbasis(
    g,
    h,
    k: int,
    beta: float,
    tol: float = 1e-10,
    cluster_rel_tol: float = 1e-7,
) -> CommonEigenbasis:
    """Simultaneously diagonalize G and H given wedge^k G + wedge^k H = beta Id.

    The hypothesis is verified first (operator-norm defect below ``tol``,
    else PreconditionError quoting the measured defect).  Under it the two
    maps commute, so diagonalizing G and then diagonalizing H inside each
    eigenvalue cluster of G (relative gap ``cluster_rel_tol``) produces a
    common orthonormal eigenbasis.  For k >= 2 at least one of the maps must
    be nonsingular; the returned flag names one such map, and a pair that
    looks jointly singular raises InternalInconsistencyError.
    """
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    if g.shape != h.shape or g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("expected two square matrices of equal size")
    m = g.shape[0]
    _check_grade(m, k)
    if beta == 0:
        raise ValueError("beta must be nonzero")
    for name, mat in (("G", g), ("H", h)):
        scale = max(1.0, float(np.abs(mat).max()))
        if np.abs(mat - mat.T).max() > 1e-9 * scale:
            raise ValueError(f"{name} is not self-adjoint")
    g = 0.5 * (g + g.T)
    h = 0.5 * (h + h.T)

    d = len(_index_tuples(m, k))
    defect_matrix = wedge_power(g, k).matrix + wedge_power(h, k).matrix
    defect_matrix -= beta * np.eye(d)
    defect = float(np.linalg.norm(defect_matrix, 2))
    if defect > tol:
        raise PreconditionError(
            f"wedge^{k} G + wedge^{k} H differs from beta*Id by {defect:.3e} "
            f"(tolerance {tol:.3e})"
        )

    vals_g, vecs = np.linalg.eigh(g)
    basis = vecs.copy()
    for span in _cluster_spans(vals_g, cluster_rel_tol):
        block = basis[:, span]
        restricted = block.T @ h @ block
        restricted = 0.5 * (restricted + restricted.T)
        _, w = np.linalg.eigh(restricted)
        basis[:, span] = block @ w

    diag_g = basis.T @ g @ basis
    diag_h = basis.T @ h @ basis
    scale = max(1.0, float(np.abs(g).max()), float(np.abs(h).max()))
    resid = max(
        np.abs(diag_g - np.diag(np.diag(diag_g))).max(),
        np.abs(diag_h - np.diag(np.diag(diag_h))).max(),
    )
    resid_tol = max(1e-8, 1e3 * defect) * scale
    if resid > resid_tol:
        raise InternalInconsistencyError(
            f"common eigenbasis off-diagonal residual {resid:.3e} exceeds "
            f"{resid_tol:.3e} despite a verified hypothesis"
        )

    eig_g = np.diag(diag_g).copy()
    eig_h = np.diag(diag_h).copy()
    nonsingular = None
    if k >= 2:
        thresh = 1e-8 * scale
        min_g = float(np.abs(eig_g).min())
        min_h = float(np.abs(eig_h).min())
        if max(min_g, min_h) <= thresh:
            raise InternalInconsistencyError(
                "both maps look singular although the exterior-power "
                f"hypothesis holds (min |eig|: G {min_g:.3e}, H {min_h:.3e})"
            )
        nonsingular = "G" if min_g >= min_h else "H"
    return CommonEigenbasis(basis, eig_g, eig_h, defect, nonsingular)
