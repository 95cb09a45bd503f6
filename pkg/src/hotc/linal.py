"""Numerical affine-subspace arithmetic over R^D.

A proper affine subspace is stored as a base point plus an orthonormal basis
of its direction space.  Annihilators are identified with orthogonal
complements through the standard inner product of the chosen coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RANK_TOL = 1e-9  # residual/original norm below this means linearly dependent
EQ_TOL = 1e-8  # Frobenius distance between projectors for subspace equality
MAX_DIM = 4096


class DimensionError(ValueError):
    pass


def orthonormalize(vectors: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the row span, by Gram-Schmidt with reorthogonalization.

    A row is dropped when its residual norm falls below tol times its
    original norm.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if vectors.size == 0:
        return np.zeros((0, vectors.shape[-1]))
    basis: list[np.ndarray] = []
    for v in vectors:
        orig = np.linalg.norm(v)
        if orig <= tol:
            continue
        w = v.copy()
        for _ in range(2):  # twice is enough
            for b in basis:
                w -= (w @ b) * b
        norm = np.linalg.norm(w)
        if norm > tol * orig:
            basis.append(w / norm)
    if not basis:
        return np.zeros((0, vectors.shape[1]))
    return np.array(basis)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace given by an orthonormal basis (rows); may be zero."""

    dim_ambient: int
    basis: np.ndarray

    @classmethod
    def from_vectors(cls, vectors, dim_ambient: int | None = None, tol: float = RANK_TOL):
        vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
        if dim_ambient is None:
            dim_ambient = vectors.shape[1]
        if dim_ambient > MAX_DIM:
            raise DimensionError(f"ambient dimension {dim_ambient} exceeds {MAX_DIM}")
        return cls(dim_ambient, orthonormalize(vectors, tol))

    @classmethod
    def zero(cls, dim_ambient: int):
        return cls(dim_ambient, np.zeros((0, dim_ambient)))

    @classmethod
    def full(cls, dim_ambient: int):
        return cls(dim_ambient, np.eye(dim_ambient))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def projector(self) -> np.ndarray:
        return self.basis.T @ self.basis

    def project(self, v: np.ndarray) -> np.ndarray:
        if self.dim == 0:
            return np.zeros_like(v)
        return self.basis.T @ (self.basis @ v)

    def contains_vector(self, v: np.ndarray, tol: float = EQ_TOL) -> bool:
        r = v - self.project(v)
        return np.linalg.norm(r) <= tol * (1.0 + np.linalg.norm(v))


def sub_sum(s: Subspace, t: Subspace, tol: float = RANK_TOL) -> Subspace:
    _check_same_ambient(s, t)
    return Subspace(s.dim_ambient, orthonormalize(np.vstack([s.basis, t.basis]), tol))


def sub_complement(s: Subspace, tol: float = RANK_TOL) -> Subspace:
    """Orthogonal complement via the full SVD nullspace."""
    if s.dim == 0:
        return Subspace.full(s.dim_ambient)
    _, sv, vt = np.linalg.svd(s.basis, full_matrices=True)
    rank = int(np.sum(sv > tol * max(1.0, sv[0])))
    return Subspace(s.dim_ambient, vt[rank:])


def sub_intersect(s: Subspace, t: Subspace, tol: float = RANK_TOL) -> Subspace:
    _check_same_ambient(s, t)
    return sub_complement(sub_sum(sub_complement(s, tol), sub_complement(t, tol), tol), tol)


def sub_equal(s: Subspace, t: Subspace, tol: float = EQ_TOL) -> bool:
    _check_same_ambient(s, t)
    return projector_distance(s, t) <= tol


def projector_distance(s: Subspace, t: Subspace) -> float:
    return float(np.linalg.norm(s.projector() - t.projector()))


def sub_tensor(s: Subspace, t: Subspace) -> Subspace:
    if s.dim == 0 or t.dim == 0:
        return Subspace.zero(s.dim_ambient * t.dim_ambient)
    basis = np.einsum("ia,jb->ijab", s.basis, t.basis).reshape(
        s.dim * t.dim, s.dim_ambient * t.dim_ambient
    )
    return Subspace(s.dim_ambient * t.dim_ambient, basis)


def _check_same_ambient(s: Subspace, t: Subspace) -> None:
    if s.dim_ambient != t.dim_ambient:
        raise DimensionError(
            f"ambient dimensions differ: {s.dim_ambient} vs {t.dim_ambient}"
        )


# ---------------------------------------------------------------------------
# proper affine subspaces


@dataclass(frozen=True, eq=False)
class AffSpace:
    """Proper affine subspace A = a + L: base point plus orthonormal directions."""

    base: np.ndarray
    directions: Subspace

    def __post_init__(self) -> None:
        if self.base.shape != (self.directions.dim_ambient,):
            raise DimensionError("base point does not match ambient dimension")

    @classmethod
    def from_data(cls, base, directions, tol: float = RANK_TOL) -> "AffSpace":
        base = np.asarray(base, dtype=float)
        sub = (
            directions
            if isinstance(directions, Subspace)
            else Subspace.from_vectors(directions, base.shape[0], tol)
        )
        aff = cls(base, sub)
        if np.linalg.norm(aff.orthogonal_witness()) <= tol:
            raise ValueError("affine subspace is not proper (contains 0)")
        return aff

    @property
    def dim_ambient(self) -> int:
        return self.directions.dim_ambient

    @property
    def dim(self) -> int:
        return self.directions.dim

    def orthogonal_witness(self) -> np.ndarray:
        """Component of the base point orthogonal to the directions (nonzero)."""
        return self.base - self.directions.project(self.base)

    def span(self, tol: float = RANK_TOL) -> Subspace:
        """Span(A) = L + R{a}."""
        return Subspace.from_vectors(
            np.vstack([self.directions.basis, self.base[None, :]]),
            self.dim_ambient,
            tol,
        )

    def dual_point(self) -> np.ndarray:
        """The canonical element of A*: w/|w|^2 for w the orthogonal witness."""
        w = self.orthogonal_witness()
        return w / (w @ w)


def contains(a: AffSpace, v: np.ndarray, tol: float = EQ_TOL) -> bool:
    """Membership in a + L within a relative tolerance."""
    v = np.asarray(v, dtype=float)
    if v.shape != (a.dim_ambient,):
        raise DimensionError("vector does not match ambient dimension")
    d = v - a.base
    r = d - a.directions.project(d)
    return np.linalg.norm(r) <= tol * (1.0 + np.linalg.norm(v))


def aff_equal(a: AffSpace, b: AffSpace, tol: float = EQ_TOL) -> bool:
    return (
        sub_equal(a.directions, b.directions, tol)
        and contains(a, b.base, tol)
        and contains(b, a.base, tol)
    )


def aff_dual(a: AffSpace, tol: float = RANK_TOL) -> AffSpace:
    """A* = {v : <v, x> = 1 for all x in A}; satisfies aff_dual(aff_dual(A)) = A.

    Directions are Span(A)^perp and the base point is the canonical dual
    point, so dim(A*) = D - dim(A) - 1.
    """
    w = a.orthogonal_witness()
    norm = np.linalg.norm(w)
    if norm <= tol:
        raise ValueError("degenerate affine subspace: orthogonal witness vanished")
    return AffSpace(w / (norm * norm), sub_complement(a.span(tol), tol))


def aff_tensor(a: AffSpace, b: AffSpace, tol: float = RANK_TOL) -> AffSpace:
    """Affine span of {x (x) y}: base a(x)b, directions a(x)L_B + L_A(x)b + L_A(x)L_B."""
    d = a.dim_ambient * b.dim_ambient
    if d > MAX_DIM:
        raise DimensionError(f"tensor ambient dimension {d} exceeds {MAX_DIM}")
    blocks = []
    if b.dim:
        blocks.append(np.kron(a.base[None, :], b.directions.basis))
    if a.dim:
        blocks.append(np.kron(a.directions.basis, b.base[None, :]))
    if a.dim and b.dim:
        blocks.append(sub_tensor(a.directions, b.directions).basis)
    base = np.kron(a.base, b.base)
    if blocks:
        dirs = Subspace.from_vectors(np.vstack(blocks), d, tol)
    else:
        dirs = Subspace.zero(d)
    out = AffSpace(base, dirs)
    expect = a.dim + b.dim + a.dim * b.dim
    if out.dim != expect:
        raise ArithmeticError(
            f"tensor direction rank {out.dim} does not match {expect}"
        )
    return out


def aff_hom(a: AffSpace, b: AffSpace, tol: float = RANK_TOL) -> AffSpace:
    """Internal hom (A (x) B*)* on the A-major tensor coordinates."""
    return aff_dual(aff_tensor(a, aff_dual(b, tol), tol), tol)


def aff_preimage(phi: np.ndarray, target: AffSpace, tol: float = RANK_TOL) -> AffSpace:
    """{w : phi @ w in target}, as a proper affine subspace.

    The base point is the least-squares solution for the target base; the
    directions combine ker(phi) with lifts of the target directions.
    """
    phi = np.asarray(phi, dtype=float)
    base, *_ = np.linalg.lstsq(phi, target.base, rcond=None)
    if np.linalg.norm(phi @ base - target.base) > EQ_TOL * (
        1.0 + np.linalg.norm(target.base)
    ):
        raise ValueError("target base point is not in the range of the map")
    _, sv, vt = np.linalg.svd(phi, full_matrices=True)
    rank = int(np.sum(sv > tol * max(1.0, sv[0] if sv.size else 1.0)))
    kernel = vt[rank:]
    lifts = []
    for v in target.directions.basis:
        x, *_ = np.linalg.lstsq(phi, v, rcond=None)
        lifts.append(x)
    rows = [kernel] + ([np.array(lifts)] if lifts else [])
    dirs = Subspace.from_vectors(np.vstack(rows), phi.shape[1], tol)
    return AffSpace.from_data(base, dirs, tol)


# ---------------------------------------------------------------------------
# morphisms and Choi vectors


def choi(m: np.ndarray) -> np.ndarray:
    """Choi vector sum_i e_i (x) M e_i of a linear map, domain-major coordinates."""
    m = np.asarray(m, dtype=float)
    return m.T.reshape(-1)


def morphism_check(
    m: np.ndarray, a: AffSpace, b: AffSpace, tol: float = EQ_TOL
) -> bool:
    """True iff the map sends A into B; checked directly and via the hom space.

    The direct route tests M a in B and M L_A inside L_B; the Choi route
    tests membership of the Choi vector in the internal hom.  The two must
    agree.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (b.dim_ambient, a.dim_ambient):
        raise DimensionError(
            f"map shape {m.shape} does not match {(b.dim_ambient, a.dim_ambient)}"
        )
    direct = contains(b, m @ a.base, tol)
    for v in a.directions.basis:
        w = m @ v
        if np.linalg.norm(w - b.directions.project(w)) > tol * (1.0 + np.linalg.norm(w)):
            direct = False
            break
    via_choi = contains(aff_hom(a, b), choi(m), tol)
    if direct != via_choi:
        raise ArithmeticError(
            "direct morphism check disagrees with Choi membership"
        )
    return direct
