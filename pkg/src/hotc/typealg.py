"""Type functions: generation, membership, IO sets, causal products, chains,
expression trees over first-order leaves, and structure-theorem normal forms.

The set T_n of type functions is the closure of the constant 1 on one factor
under tensor products, complement (star) and coordinate permutations.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .boolfun import (
    ArityError,
    BoolFun,
    MobiusCoeffs,
    Perm,
    block_permutation,
    bottom,
    compose_perms,
    direct_sum_perm,
    from_mobius,
    gather_perm,
    identity_perm,
    invert_perm,
    join,
    make_p,
    mask_from_indices,
    mask_indices,
    meet,
    mobius,
    ones,
    permute,
    star,
    tensorf,
)

DEFAULT_ENUM_CAP = 5


def enum_cap() -> int:
    return int(os.environ.get("HOTC_ENUM_CAP", DEFAULT_ENUM_CAP))


class NotAType(ValueError):
    """Raised by the decomposition procedure when a step does not apply."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


# ---------------------------------------------------------------------------
# IO sets


@dataclass(frozen=True)
class IOSets:
    """Output/input index sets; together they partition [n]."""

    n: int
    outputs: int
    inputs: int

    def __post_init__(self) -> None:
        full = (1 << self.n) - 1
        if self.outputs & self.inputs:
            raise ValueError("outputs and inputs overlap")
        if self.outputs | self.inputs != full:
            raise ValueError("outputs and inputs must cover [n]")

    def swapped(self) -> "IOSets":
        return IOSets(self.n, self.inputs, self.outputs)

    def output_indices(self) -> tuple[int, ...]:
        return mask_indices(self.outputs)

    def input_indices(self) -> tuple[int, ...]:
        return mask_indices(self.inputs)


def io_sets(f: BoolFun) -> IOSets:
    """O = {j : f(e^j) = 1} (value at the j-th one-hot string), I the rest."""
    out = 0
    for j in range(f.n):
        if f.value(1 << j):
            out |= 1 << j
    full = (1 << f.n) - 1
    return IOSets(f.n, out, full ^ out)


def subtype_bounds(f: BoolFun, io: IOSets) -> bool:
    """p_I <= f <= p_O* pointwise."""
    lower = make_p(io.inputs, f.n)
    upper = star(make_p(io.outputs, f.n))
    return lower <= f and f <= upper


# ---------------------------------------------------------------------------
# causal product and chain types


def causal(f: BoolFun, g: BoolFun) -> BoolFun:
    """f <| g on [n_f] (+) [n_g]: value f(s^1) when s^1 != 0, else g(s^2)."""
    nf, ng = f.n, g.n
    if nf + ng > 16:
        raise ArityError("combined arity exceeds 16")
    base = f.table & ~1  # f-values on s^1 != 0
    table = 0
    for j in range(1 << ng):
        block = base | ((g.table >> j) & 1)
        table |= block << (j << nf)
    return BoolFun(nf + ng, table)


def causal_rev(f: BoolFun, g: BoolFun) -> BoolFun:
    """g <| f with f still on the low block: value g(s^2) when s^2 != 0, else f(s^1)."""
    nf, ng = f.n, g.n
    if nf + ng > 16:
        raise ArityError("combined arity exceeds 16")
    full_block = (1 << (1 << nf)) - 1
    table = f.table  # j = 0 block
    for j in range(1, 1 << ng):
        if (g.table >> j) & 1:
            table |= full_block << (j << nf)
    return BoolFun(nf + ng, table)


def causal_seq(chains: Sequence[BoolFun], order: Sequence[int]) -> BoolFun:
    """k-ary causal product of block functions, connected in the given order.

    ``chains[j]`` acts on the j-th block of the fixed decomposition; ``order``
    lists block positions (0-based) in causal order, i.e. the value at s is
    chains[order[0]] on its block unless that block is all zeros, and so on.
    """
    sizes = [c.n for c in chains]
    offsets = []
    acc = 0
    for sz in sizes:
        offsets.append(acc)
        acc += sz
    n = acc
    if n > 16:
        raise ArityError("combined arity exceeds 16")
    table = 0
    for t in range(1 << n):
        v = 1
        for pos in order:
            blk = (t >> offsets[pos]) & ((1 << sizes[pos]) - 1)
            if blk or pos == order[-1]:
                v = chains[pos].value(blk)
                break
        if v:
            table |= 1 << t
    return BoolFun(n, table)


def gamma(n: int) -> BoolFun:
    """The alternating chain sum over [0] subset [1] subset ... subset [n]."""
    if n < 1:
        raise ArityError("gamma requires n >= 1")
    coeffs: dict[int, int] = {}
    if n % 2 == 0:
        for j in range(0, n + 1):
            coeffs[(1 << j) - 1] = (-1) ** j
    else:
        for j in range(1, n + 1):
            coeffs[(1 << j) - 1] = (-1) ** (j - 1)
    return from_mobius(MobiusCoeffs(n, coeffs))


def chain_fun(n: int, subsets: Sequence[int]) -> BoolFun:
    """sum_i (-1)^(i-1) p_{S_i} for a strictly increasing chain of masks."""
    prev = -1
    coeffs: dict[int, int] = {}
    for i, s in enumerate(subsets):
        if prev >= 0 and (prev & s) != prev or s == prev:
            raise ValueError("subsets must form a strictly increasing chain")
        coeffs[s] = (-1) ** i
        prev = s
    return from_mobius(MobiusCoeffs(n, coeffs))


# ---------------------------------------------------------------------------
# expression trees


@dataclass(frozen=True)
class Leaf:
    index: int


@dataclass(frozen=True)
class Dual:
    child: "TypeExpr"


@dataclass(frozen=True)
class Tensor:
    left: "TypeExpr"
    right: "TypeExpr"


TypeExpr = Leaf | Dual | Tensor


def hom(a: TypeExpr, b: TypeExpr) -> TypeExpr:
    """a -o b := (a (x) b*)*."""
    return Dual(Tensor(a, Dual(b)))


def expr_leaves(e: TypeExpr) -> tuple[int, ...]:
    if isinstance(e, Leaf):
        return (e.index,)
    if isinstance(e, Dual):
        return expr_leaves(e.child)
    return expr_leaves(e.left) + expr_leaves(e.right)


def relabel_expr(e: TypeExpr, mapping: Mapping[int, int]) -> TypeExpr:
    if isinstance(e, Leaf):
        return Leaf(mapping[e.index])
    if isinstance(e, Dual):
        return Dual(relabel_expr(e.child, mapping))
    return Tensor(relabel_expr(e.left, mapping), relabel_expr(e.right, mapping))


def format_expr(e: TypeExpr) -> str:
    if isinstance(e, Leaf):
        return f"(leaf {e.index})"
    if isinstance(e, Dual):
        return f"(dual {format_expr(e.child)})"
    return f"(tensor {format_expr(e.left)} {format_expr(e.right)})"


def parse_expr(text: str) -> TypeExpr:
    """Parse `(leaf 1)`, `(dual E)`, `(tensor E E)`, `(hom E E)`."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()

    def parse(pos: int) -> tuple[TypeExpr, int]:
        if pos >= len(tokens):
            raise ValueError("unexpected end of expression")
        if tokens[pos] != "(":
            raise ValueError(f"expected '(' at token {pos}: {tokens[pos]!r}")
        head = tokens[pos + 1]
        if head == "leaf":
            idx = int(tokens[pos + 2])
            if tokens[pos + 3] != ")":
                raise ValueError("malformed leaf")
            return Leaf(idx), pos + 4
        if head == "dual":
            child, nxt = parse(pos + 2)
            if tokens[nxt] != ")":
                raise ValueError("malformed dual")
            return Dual(child), nxt + 1
        if head in ("tensor", "hom"):
            left, nxt = parse(pos + 2)
            right, nxt = parse(nxt)
            if tokens[nxt] != ")":
                raise ValueError(f"malformed {head}")
            node = Tensor(left, right) if head == "tensor" else hom(left, right)
            return node, nxt + 1
        raise ValueError(f"unknown head {head!r}")

    expr, end = parse(0)
    if end != len(tokens):
        raise ValueError("trailing tokens after expression")
    return expr


def expr_to_type(e: TypeExpr) -> tuple[BoolFun, IOSets]:
    """Evaluate an expression to its type function and IO sets.

    Leaf i gives the constant 1 with output {i}; Dual is star with IO
    swapped; Tensor is the tensor product with factors realigned to
    global leaf-index order.
    """
    leaves = expr_leaves(e)
    n = len(leaves)
    if sorted(leaves) != list(range(1, n + 1)):
        raise ValueError(f"leaf indices must be exactly 1..{n}, got {sorted(leaves)}")

    def rec(node: TypeExpr) -> tuple[BoolFun, tuple[int, ...], frozenset[int]]:
        if isinstance(node, Leaf):
            return ones(1), (node.index,), frozenset({node.index})
        if isinstance(node, Dual):
            f, lv, out = rec(node.child)
            return star(f), lv, frozenset(lv) - out
        fa, la, oa = rec(node.left)
        fb, lb, ob = rec(node.right)
        lv = tuple(sorted(la + lb))
        rank = {x: i + 1 for i, x in enumerate(lv)}
        groups = [[rank[x] for x in sorted(la)], [rank[x] for x in sorted(lb)]]
        f = permute(tensorf(fa, fb), gather_perm(groups, len(lv)))
        return f, lv, oa | ob

    f, _, out = rec(e)
    omask = mask_from_indices(sorted(out), n)
    return f, IOSets(n, omask, ((1 << n) - 1) ^ omask)


# ---------------------------------------------------------------------------
# enumeration of T_n


_enum_lock = threading.Lock()
_enum_cache: dict[int, dict[int, TypeExpr]] = {}


def _perm_generators(n: int) -> list[Perm]:
    if n < 2:
        return []
    swap = list(range(n))
    swap[0], swap[1] = swap[1], swap[0]
    cycle = tuple(list(range(1, n)) + [0])
    return [tuple(swap), cycle]


def _witness_for_permuted(e: TypeExpr, perm: Perm) -> TypeExpr:
    # permute(f, sigma) has slot j fed from variable sigma^{-1}(j)
    inv = invert_perm(perm)
    return relabel_expr(e, {j + 1: inv[j] + 1 for j in range(len(perm))})


def _shift_expr(e: TypeExpr, offset: int) -> TypeExpr:
    return relabel_expr(e, {i: i + offset for i in expr_leaves(e)})


def enumerate_types_with_witness(n: int, cap: int | None = None) -> dict[int, TypeExpr]:
    """Map truth table -> a witness expression, for every f in T_n."""
    limit = enum_cap() if cap is None else cap
    if n > limit:
        raise ArityError(f"type enumeration capped at n={limit} (requested {n})")
    with _enum_lock:
        return _enumerate_locked(n)


def _enumerate_locked(n: int) -> dict[int, TypeExpr]:
    if n in _enum_cache:
        return _enum_cache[n]
    if n == 1:
        out = {ones(1).table: Leaf(1), bottom(1).table: Dual(Leaf(1))}
        _enum_cache[1] = out
        return out
    seeds: dict[int, TypeExpr] = {}
    for a in range(1, n):
        left = _enumerate_locked(a)
        right = _enumerate_locked(n - a)
        for tf, ef in left.items():
            f = BoolFun(a, tf)
            for tg, eg in right.items():
                g = BoolFun(n - a, tg)
                h = tensorf(f, g)
                seeds.setdefault(h.table, Tensor(ef, _shift_expr(eg, a)))
    gens = _perm_generators(n)
    found = dict(seeds)
    frontier = list(seeds.items())
    while frontier:
        table, expr = frontier.pop()
        f = BoolFun(n, table)
        neighbors = [(star(f).table, Dual(expr))]
        for perm in gens:
            neighbors.append((permute(f, perm).table, _witness_for_permuted(expr, perm)))
        for t, e in neighbors:
            if t not in found:
                found[t] = e
                frontier.append((t, e))
    _enum_cache[n] = found
    return found


def enumerate_types(n: int, cap: int | None = None) -> set[BoolFun]:
    """The full set T_n (closure of 1_1 under tensor, star, permutation)."""
    return {BoolFun(n, t) for t in enumerate_types_with_witness(n, cap)}


# ---------------------------------------------------------------------------
# membership


@dataclass(frozen=True)
class TypeVerdict:
    is_type: bool
    tree: "object | None"  # DecompositionTree when is_type
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.is_type


def is_type(f: BoolFun, cap: int | None = None, cross_check: bool = True) -> TypeVerdict:
    """Decide membership in T_n via the decomposition procedure.

    For n within the enumeration cap the verdict is cross-checked against
    the generated set T_n; a disagreement is a hard internal error.
    """
    from . import poset

    limit = enum_cap() if cap is None else cap
    try:
        tree = poset.decompose(f)
        verdict = TypeVerdict(True, tree)
    except NotAType as err:
        verdict = TypeVerdict(False, None, err.reason)
    if cross_check and f.n <= limit:
        in_enum = f.table in enumerate_types_with_witness(f.n, limit)
        if in_enum != verdict.is_type:
            raise RuntimeError(
                f"decomposition procedure disagrees with enumeration on n={f.n}, "
                f"table={f.table:#x}: procedure={verdict.is_type}, enum={in_enum}"
            )
    return verdict


# ---------------------------------------------------------------------------
# structure theorem normal form


@dataclass(frozen=True)
class StructureForm:
    """f ~ join_a meet_b of the block chains connected in order pi[a][b].

    ``blocks`` are the sizes of the decomposition [n] = (+)_j [n_j],
    ``chains[j]`` is a chain type on block j, and ``align`` is the
    permutation with f = permute(evaluation, align).
    """

    blocks: tuple[int, ...]
    chains: tuple[BoolFun, ...]
    a_size: int
    b_size: int
    perms: tuple[tuple[Perm, ...], ...]  # [a][b] -> permutation of the k blocks
    align: Perm

    def to_json(self) -> dict:
        return {
            "blocks": list(self.blocks),
            "chains": [c.to_json() for c in self.chains],
            "A": self.a_size,
            "B": self.b_size,
            "perms": [[list(p) for p in row] for row in self.perms],
            "align": list(self.align),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "StructureForm":
        return cls(
            blocks=tuple(int(x) for x in data["blocks"]),
            chains=tuple(BoolFun.from_json(c) for c in data["chains"]),
            a_size=int(data["A"]),
            b_size=int(data["B"]),
            perms=tuple(
                tuple(tuple(int(x) for x in p) for p in row) for row in data["perms"]
            ),
            align=tuple(int(x) for x in data["align"]),
        )


def structure_form(f: BoolFun) -> StructureForm:
    """Fold the decomposition tree of f into the structure-theorem form."""
    from . import poset

    tree = poset.decompose(f)
    blocks, chains, perms, align = _form_of_tree(tree)
    sf = StructureForm(
        blocks=tuple(blocks),
        chains=tuple(chains),
        a_size=len(perms),
        b_size=len(perms[0]),
        perms=tuple(tuple(row) for row in perms),
        align=align,
    )
    return sf


def _form_of_tree(tree) -> tuple[list[int], list[BoolFun], list[list[Perm]], Perm]:
    from . import poset as _p

    if isinstance(tree, _p.ChainLeaf):
        c = _p.chain_leaf_fun(tree)
        return [c.n], [c], [[(0,)]], identity_perm(c.n)
    if isinstance(tree, _p.StarNode):
        blocks, chains, perms, align = _form_of_tree(tree.child)
        starred = [star(c) for c in chains]
        flipped = [[perms[a][b] for a in range(len(perms))] for b in range(len(perms[0]))]
        return blocks, starred, flipped, align
    if isinstance(tree, _p.TensorNode):
        parts = [_form_of_tree(c) for c in tree.children]
        blocks, chains, perms, align = parts[0]
        for nxt in parts[1:]:
            blocks, chains, perms, align = _combine_tensor(
                (blocks, chains, perms, align), nxt
            )
        return blocks, chains, perms, compose_perms(align, tree.align)
    if isinstance(tree, _p.CausalNode):
        b1, c1, p1, s1 = _form_of_tree(tree.left)
        b2, c2, p2, s2 = _form_of_tree(tree.right)
        blocks = b1 + b2
        chains = c1 + c2
        perms = [
            [direct_sum_perm([pa, pc]) for pa in row1 for pc in row2]
            for row1 in _rows(p1)
            for row2 in _rows(p2)
        ]
        align = compose_perms(direct_sum_perm([s1, s2]), tree.align)
        return blocks, chains, perms, align
    raise TypeError(f"unknown tree node {tree!r}")


def _rows(perms: list[list[Perm]]) -> list[list[Perm]]:
    return perms


def _combine_tensor(part1, part2):
    b1, c1, p1, s1 = part1
    b2, c2, p2, s2 = part2
    k1, k2 = len(c1), len(c2)
    blocks = b1 + b2
    chains = c1 + c2
    swaps = [block_permutation(lam, (k1, k2)) for lam in ((0, 1), (1, 0))]
    perms: list[list[Perm]] = []
    for row1 in p1:
        for row2 in p2:
            row: list[Perm] = []
            for pa in row1:
                for pc in row2:
                    for rho in swaps:
                        row.append(compose_perms(rho, direct_sum_perm([pa, pc])))
            perms.append(row)
    align = direct_sum_perm([s1, s2])
    return blocks, chains, perms, align


def evaluate_structure(sf: StructureForm, check_dual: bool = True) -> BoolFun:
    """Evaluate the join-of-meets form (and check it equals the meet-of-joins)."""
    seqs: list[list[BoolFun]] = []
    for row in sf.perms:
        seqs.append([causal_seq(sf.chains, invert_perm(p)) for p in row])
    join_meet: BoolFun | None = None
    for row in seqs:
        m: BoolFun | None = None
        for s in row:
            m = s if m is None else meet(m, s)
        join_meet = m if join_meet is None else join(join_meet, m)
    if check_dual:
        meet_join: BoolFun | None = None
        for b in range(sf.b_size):
            j: BoolFun | None = None
            for a in range(sf.a_size):
                j = seqs[a][b] if j is None else join(j, seqs[a][b])
            meet_join = j if meet_join is None else meet(meet_join, j)
        if join_meet != meet_join:
            raise ValueError("join-of-meets and meet-of-joins evaluations differ")
    return permute(join_meet, sf.align)
