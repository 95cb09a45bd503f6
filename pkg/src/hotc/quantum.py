"""Quantum and classical first-order objects and their subspace calculus.

Hermitian matrices are coordinatized in a fixed orthonormal real basis under
Tr(AB): for M_n^h the first n entries are the diagonal units E_jj (j = 1..n),
followed for each pair j < k (lexicographic) by (E_jk + E_kj)/sqrt(2) and
i(E_jk - E_kj)/sqrt(2), in that order.  Classical objects live on R^k with
the canonical basis.  Tensor factors are ordered with factor 1 as the major
kron index.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .boolfun import BoolFun, mask_indices
from .linal import (
    EQ_TOL,
    AffSpace,
    Subspace,
    aff_dual,
    aff_preimage,
    aff_tensor,
    contains,
    orthonormalize,
    projector_distance,
    sub_complement,
    sub_intersect,
    sub_sum,
)
from .poset import chain_info
from .typealg import Dual, Leaf, TypeExpr, expr_leaves, io_sets

PSD_TOL = 1e-9


# ---------------------------------------------------------------------------
# hermitian coordinates


@lru_cache(maxsize=32)
def hermitian_basis(n: int) -> np.ndarray:
    """Orthonormal basis of M_n^h under Tr(AB), shape (n^2, n, n)."""
    mats = []
    for j in range(n):
        m = np.zeros((n, n), dtype=complex)
        m[j, j] = 1.0
        mats.append(m)
    for j in range(n):
        for k in range(j + 1, n):
            s = np.zeros((n, n), dtype=complex)
            s[j, k] = s[k, j] = 1.0 / np.sqrt(2.0)
            mats.append(s)
            a = np.zeros((n, n), dtype=complex)
            a[j, k] = 1.0j / np.sqrt(2.0)
            a[k, j] = -1.0j / np.sqrt(2.0)
            mats.append(a)
    return np.array(mats)


def herm_to_coords(h: np.ndarray) -> np.ndarray:
    basis = hermitian_basis(h.shape[0])
    return np.real(np.einsum("aij,ji->a", basis, h))


def coords_to_herm(x: np.ndarray) -> np.ndarray:
    n = int(round(np.sqrt(len(x))))
    basis = hermitian_basis(n)
    return np.einsum("a,aij->ij", x, basis)


@lru_cache(maxsize=32)
def conjugation_signs(n: int) -> np.ndarray:
    """Coordinate action of entrywise conjugation: +1 real, -1 imaginary basis."""
    signs = [1.0] * n
    for _ in range((n * n - n) // 2):
        signs.extend([1.0, -1.0])
    return np.array(signs)


def _helmert_rows(m: int) -> np.ndarray:
    """Orthonormal basis of the sum-zero subspace of R^m."""
    rows = []
    for j in range(1, m):
        v = np.zeros(m)
        v[:j] = 1.0
        v[j] = -j
        rows.append(v / np.linalg.norm(v))
    return np.array(rows) if rows else np.zeros((0, m))


# ---------------------------------------------------------------------------
# first-order objects


@dataclass(frozen=True)
class FirstOrderObj:
    """A quantum (n-level) or classical (k-outcome) first-order object.

    The affine hyperplane is the trace-c (resp. sum-c) slice; the fixed
    base point is c/dim times the identity (resp. the all-ones vector).
    """

    kind: str  # "quantum" | "classical"
    dim: int
    c: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("quantum", "classical"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.dim < 1 or self.c <= 0:
            raise ValueError("need dim >= 1 and c > 0")

    @property
    def coord_dim(self) -> int:
        return self.dim * self.dim if self.kind == "quantum" else self.dim

    def identity_vector(self) -> np.ndarray:
        if self.kind == "quantum":
            e = np.zeros(self.coord_dim)
            e[: self.dim] = 1.0
            return e
        return np.ones(self.dim)

    def base_point(self) -> np.ndarray:
        return (self.c / self.dim) * self.identity_vector()

    def dual_point(self) -> np.ndarray:
        return (1.0 / self.c) * self.identity_vector()

    def conjugate(self) -> "FirstOrderObj":
        return FirstOrderObj(self.kind, self.dim, self.dim / self.c)

    def l0_basis(self) -> np.ndarray:
        e = self.identity_vector()
        return (e / np.linalg.norm(e))[None, :]

    def l1_basis(self) -> np.ndarray:
        if self.kind == "classical":
            return _helmert_rows(self.dim)
        d = self.coord_dim
        rows = np.zeros((d - 1, d))
        diag = _helmert_rows(self.dim)
        rows[: self.dim - 1, : self.dim] = diag
        for j in range(d - self.dim):
            rows[self.dim - 1 + j, self.dim + j] = 1.0
        return rows

    def leaf_space(self) -> AffSpace:
        """The object's affine hyperplane {a : <dual point, a> = 1}."""
        return AffSpace(self.base_point(), Subspace(self.coord_dim, self.l1_basis()))

    def conj_signs(self) -> np.ndarray:
        if self.kind == "quantum":
            return conjugation_signs(self.dim)
        return np.ones(self.dim)


def qubit(c: float = 1.0) -> FirstOrderObj:
    return FirstOrderObj("quantum", 2, c)


def classical_bit(c: float = 1.0) -> FirstOrderObj:
    return FirstOrderObj("classical", 2, c)


def _kron_rows(blocks: list[np.ndarray]) -> np.ndarray:
    acc = np.ones((1, 1))
    for b in blocks:
        acc = np.kron(acc, b)
    return acc


def _kron_vecs(vecs: list[np.ndarray]) -> np.ndarray:
    acc = np.ones(1)
    for v in vecs:
        acc = np.kron(acc, v)
    return acc


# ---------------------------------------------------------------------------
# the subspace S_f and affine space A_f


def build_Sf(f: BoolFun, objs: list[FirstOrderObj]) -> tuple[Subspace, AffSpace]:
    """S_f = sum over minterms of L_s, and A_f = S_f cut by the dual functional.

    L_s tensors the base-point line (bit 0) or the traceless part (bit 1)
    factorwise, so distinct blocks are orthogonal and the construction is
    exact: dim S_f = sum over minterms of prod_{i: s_i=1} (D_i - 1).
    """
    if len(objs) != f.n:
        raise ValueError(f"expected {f.n} objects, got {len(objs)}")
    l0 = [o.l0_basis() for o in objs]
    l1 = [o.l1_basis() for o in objs]
    dim = 1
    for o in objs:
        dim *= o.coord_dim
    s_rows = []
    lin_rows = []
    for s in f.minterms():
        blocks = [l1[i] if (s >> i) & 1 else l0[i] for i in range(f.n)]
        rows = _kron_rows(blocks)
        s_rows.append(rows)
        if s:
            lin_rows.append(rows)
    space = Subspace(dim, np.vstack(s_rows))
    base = _kron_vecs([o.base_point() for o in objs])
    lin = Subspace(dim, np.vstack(lin_rows)) if lin_rows else Subspace.zero(dim)
    return space, AffSpace(base, lin)


def sf_dimension(f: BoolFun, objs: list[FirstOrderObj]) -> int:
    """Closed-form dim S_f = sum_{f(s)=1} prod_{i: s_i=1} (D_i - 1)."""
    total = 0
    for s in f.minterms():
        p = 1
        for i in range(f.n):
            if (s >> i) & 1:
                p *= objs[i].coord_dim - 1
        total += p
    return total


def dual_functional(objs: list[FirstOrderObj]) -> np.ndarray:
    return _kron_vecs([o.dual_point() for o in objs])


# ---------------------------------------------------------------------------
# evaluating type expressions in the category of affine subspaces


def _reorder_axes(mat: np.ndarray, dims: list[int], order: list[int]) -> np.ndarray:
    """Permute kron factors of row vectors: target axis t reads source axis order[t]."""
    shape = mat.shape
    t = mat.reshape((-1, *dims))
    t = np.transpose(t, axes=[0] + [o + 1 for o in order])
    return np.ascontiguousarray(t).reshape(shape)


def object_from_expr(e: TypeExpr, objs: list[FirstOrderObj]) -> AffSpace:
    """Evaluate a type expression with affine duals and tensors of the leaves.

    The result is realigned so that coordinates follow leaf-index order,
    factor 1 major.
    """
    leaves = expr_leaves(e)
    if sorted(leaves) != list(range(1, len(objs) + 1)):
        raise ValueError("expression leaves must be exactly 1..len(objs)")

    def rec(node: TypeExpr) -> tuple[AffSpace, tuple[int, ...]]:
        if isinstance(node, Leaf):
            return objs[node.index - 1].leaf_space(), (node.index,)
        if isinstance(node, Dual):
            aff, lv = rec(node.child)
            return aff_dual(aff), lv
        affl, lvl = rec(node.left)
        affr, lvr = rec(node.right)
        return aff_tensor(affl, affr), lvl + lvr

    aff, tree_order = rec(e)
    dims = [objs[i - 1].coord_dim for i in tree_order]
    order = [tree_order.index(i) for i in sorted(tree_order)]
    base = _reorder_axes(aff.base[None, :], dims, order)[0]
    basis = _reorder_axes(aff.directions.basis, dims, order)
    return AffSpace(base, Subspace(aff.dim_ambient, basis))


# ---------------------------------------------------------------------------
# quantum objects as (dimension, constant, subspace) triples


@dataclass(frozen=True, eq=False)
class QuantumObject:
    """Quantum object determined by n, the subspace S containing E_n, and c."""

    n: int
    c: float
    space: Subspace

    def affine(self) -> AffSpace:
        e = np.zeros(self.n * self.n)
        e[: self.n] = 1.0
        base = (self.c / self.n) * e
        e_dir = (e / np.linalg.norm(e))[None, :]
        lin = orthonormalize(
            self.space.basis - (self.space.basis @ e_dir.T) @ e_dir
        )
        return AffSpace(base, Subspace(self.n * self.n, lin))


def state_object(n: int, c: float = 1.0) -> QuantumObject:
    return QuantumObject(n, c, Subspace.full(n * n))


def hom_q(x: QuantumObject, y: QuantumObject) -> QuantumObject:
    """Internal hom of quantum objects: the stated three-block subspace and
    the constant n c_X^{-1} c_Y, on X-major coordinates."""
    dn, dm = x.n * x.n, y.n * y.n
    ex = np.zeros(dn)
    ex[: x.n] = 1.0
    ey = np.zeros(dm)
    ey[: y.n] = 1.0
    sx_perp = sub_complement(x.space)
    ly = orthonormalize(y.space.basis - np.outer(y.space.basis @ ey, ey) / (ey @ ey))
    blocks = []
    if sx_perp.dim:
        blocks.append(np.kron(sx_perp.basis, np.eye(dm)))
    if len(ly):
        blocks.append(np.kron(x.space.basis, ly))
    blocks.append(_kron_vecs([ex, ey])[None, :] / np.linalg.norm(_kron_vecs([ex, ey])))
    space = Subspace(dn * dm, np.vstack(blocks))
    return QuantumObject(x.n * y.n, x.n * y.c / x.c, space)


# ---------------------------------------------------------------------------
# the comb oracle


def comb_oracle(f: BoolFun, objs: list[FirstOrderObj]) -> AffSpace:
    """Affine space of a chain type built by the recursive comb constraint,
    independently of build_Sf.

    Descending the chain, each step adjoins an input tier X and an output
    tier Y and imposes that contracting the Y block with its dual functional
    lands in (previous comb)* tensored with the X functional.  Free-input
    and free-output tiers contribute a point factor and a full hyperplane.
    """
    info = chain_info(f)
    io = io_sets(f)
    outputs = io.outputs

    def tier_indices(mask: int) -> list[int]:
        return list(mask_indices(mask))

    def tier_functional(mask: int) -> np.ndarray:
        vecs = []
        for i in tier_indices(mask):
            o = objs[i - 1]
            if (outputs >> (i - 1)) & 1:
                vecs.append(o.dual_point())
            else:
                vecs.append(o.base_point())
        return _kron_vecs(vecs)

    def tier_dim(mask: int) -> int:
        d = 1
        for i in tier_indices(mask):
            d *= objs[i - 1].coord_dim
        return d

    tiers = info.tiers
    big_n = len(info.subsets)
    mid = (big_n - 1) // 2
    middle = list(tiers[1:big_n])  # T_1 .. T_{N-1}

    comb: AffSpace | None = None
    block_order: list[int] = []  # tier masks in coordinate order
    if middle:
        x_mask, y_mask = middle[mid], middle[mid - 1]
        dx, dy = tier_dim(x_mask), tier_dim(y_mask)
        phi = np.kron(np.eye(dx), tier_functional(y_mask)[None, :])
        target = AffSpace(tier_functional(x_mask), Subspace.zero(dx))
        comb = aff_preimage(phi, target)
        block_order = [x_mask, y_mask]
        for j in range(1, mid):
            x_mask, y_mask = middle[mid + j], middle[mid - 1 - j]
            dx, dy = tier_dim(x_mask), tier_dim(y_mask)
            dz = comb.dim_ambient
            dual = aff_dual(comb)
            ax = tier_functional(x_mask)
            tbase = np.kron(dual.base, ax)
            tdirs = (
                np.kron(dual.directions.basis, ax[None, :])
                if dual.dim
                else np.zeros((0, dz * dx))
            )
            target = AffSpace.from_data(tbase, tdirs)
            phi = np.kron(np.eye(dz * dx), tier_functional(y_mask)[None, :])
            comb = aff_preimage(phi, target)
            block_order = block_order + [x_mask, y_mask]

    parts: list[tuple[AffSpace, list[int]]] = []
    if tiers[0]:
        idx = tier_indices(tiers[0])
        point = _kron_vecs([objs[i - 1].base_point() for i in idx])
        parts.append((AffSpace(point, Subspace.zero(len(point))), idx))
    if comb is not None:
        leaf_order = [i for mask in block_order for i in tier_indices(mask)]
        parts.append((comb, leaf_order))
    if tiers[-1]:
        idx = tier_indices(tiers[-1])
        base = _kron_vecs([objs[i - 1].base_point() for i in idx])
        func = _kron_vecs([objs[i - 1].dual_point() for i in idx])
        dirs = sub_complement(Subspace.from_vectors(func[None, :]))
        parts.append((AffSpace(base, dirs), idx))

    aff, leaf_order = parts[0]
    for nxt, idx in parts[1:]:
        aff = aff_tensor(aff, nxt)
        leaf_order = leaf_order + idx
    dims = [objs[i - 1].coord_dim for i in leaf_order]
    order = [leaf_order.index(i) for i in sorted(leaf_order)]
    base = _reorder_axes(aff.base[None, :], dims, order)[0]
    basis = _reorder_axes(aff.directions.basis, dims, order)
    return AffSpace(base, Subspace(aff.dim_ambient, basis))


# ---------------------------------------------------------------------------
# lattice identities on subspaces


@dataclass(frozen=True)
class LatticeReport:
    meet_distance: float
    join_distance: float
    star_distance: float
    tol: float

    @property
    def ok(self) -> bool:
        return max(self.meet_distance, self.join_distance, self.star_distance) <= self.tol


def projector_lattice_check(
    f: BoolFun, g: BoolFun, objs: list[FirstOrderObj], tol: float = EQ_TOL
) -> LatticeReport:
    """Verify S_{f^g} = S_f n S_g, S_{f v g} = S_f + S_g, S_{f*} = S_f-perp (+) R{E}."""
    from .boolfun import join as bj, meet as bm, star as bs

    sf, _ = build_Sf(f, objs)
    sg, _ = build_Sf(g, objs)
    s_meet, _ = build_Sf(bm(f, g), objs)
    s_join, _ = build_Sf(bj(f, g), objs)
    s_star, _ = build_Sf(bs(f), objs)
    e_vec = _kron_vecs([o.identity_vector() for o in objs])
    e_sub = Subspace.from_vectors(e_vec[None, :])
    meet_d = projector_distance(s_meet, sub_intersect(sf, sg))
    join_d = projector_distance(s_join, sub_sum(sf, sg))
    star_d = projector_distance(s_star, sub_sum(sub_complement(sf), e_sub))
    return LatticeReport(meet_d, join_d, star_d, tol)


# ---------------------------------------------------------------------------
# channels: sampling and membership


@lru_cache(maxsize=16)
def channel_space(m: int, n: int) -> AffSpace:
    """Affine space of Choi vectors of maps sending trace-1 m-level states
    to trace-1 n-level states, input-major coordinates."""
    x = FirstOrderObj("quantum", m)
    y = FirstOrderObj("quantum", n)
    return aff_hom_spaces(x, y)


def aff_hom_spaces(x: FirstOrderObj, y: FirstOrderObj) -> AffSpace:
    from .linal import aff_hom

    return aff_hom(x.leaf_space(), y.leaf_space())


def random_cptp(m: int, n: int, seed: int) -> np.ndarray:
    """Choi vector of a random CPTP map M_m^h -> M_n^h via an isometric dilation."""
    if m > 8 or n > 8:
        raise ValueError("random_cptp capped at local dimension 8")
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n * m, m)) + 1j * rng.normal(size=(n * m, m))
    q, _ = np.linalg.qr(g)
    kraus = q.reshape(m, n, m)  # env index first, each (n, m)
    choi = np.zeros((m * n, m * n), dtype=complex)
    for k in kraus:
        vec = k.T.reshape(m, n)  # vec[j] = K e_j
        for j in range(m):
            for jp in range(m):
                choi[j * n : (j + 1) * n, jp * n : (jp + 1) * n] += np.outer(
                    vec[j], vec[jp].conj()
                )
    return choi_matrix_to_coords(choi, m, n)


def choi_matrix_to_coords(choi: np.ndarray, m: int, n: int) -> np.ndarray:
    bm_ = hermitian_basis(m)
    bn_ = hermitian_basis(n)
    out = np.zeros(m * m * n * n)
    pos = 0
    for a in range(m * m):
        for b in range(n * n):
            out[pos] = np.real(np.einsum("ij,ji->", np.kron(bm_[a], bn_[b]), choi))
            pos += 1
    return out


def coords_to_choi_matrix(x: np.ndarray, m: int, n: int) -> np.ndarray:
    bm_ = hermitian_basis(m)
    bn_ = hermitian_basis(n)
    choi = np.zeros((m * n, m * n), dtype=complex)
    pos = 0
    for a in range(m * m):
        for b in range(n * n):
            choi += x[pos] * np.kron(bm_[a], bn_[b])
            pos += 1
    return choi


def psd_min_eig(x: np.ndarray, m: int, n: int) -> float:
    return float(np.linalg.eigvalsh(coords_to_choi_matrix(x, m, n))[0])


def is_channel_member(
    x: np.ndarray, m: int = 2, n: int = 2, tol: float = EQ_TOL
) -> bool:
    """Affine membership in the channel space plus positive semidefiniteness."""
    if not contains(channel_space(m, n), x, tol):
        return False
    scale = max(1.0, float(np.linalg.norm(x)))
    return psd_min_eig(x, m, n) >= -PSD_TOL * scale


# ---------------------------------------------------------------------------
# conjugation invariance


def conj_signs_for(objs: list[FirstOrderObj]) -> np.ndarray:
    return _kron_vecs([o.conj_signs() for o in objs])


def commutes_with_conjugation(space: Subspace, objs: list[FirstOrderObj]) -> float:
    """Frobenius distance between the projector and its conjugated image."""
    signs = conj_signs_for(objs)
    p = space.projector()
    return float(np.linalg.norm(p - (signs[:, None] * p * signs[None, :])))
