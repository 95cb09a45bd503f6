"""Labelled posets attached to Boolean functions and the decomposition machinery.

The poset of f collects the subsets with nonzero Moebius coefficient, graded
by longest chains from a minimal element.  A node's label keeps the indices
appearing in no strictly smaller node.  For type functions the poset is
graded with even rank and alternating signs, and the function can be torn
apart into chain types by stripping free indices, splitting independent
label components, and a coloring argument for genuine tensor products.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .boolfun import (
    BoolFun,
    Perm,
    compose_perms,
    direct_sum_perm,
    gather_perm,
    identity_perm,
    mask_from_indices,
    mask_indices,
    mobius,
    permute,
    star,
    tensor_all,
)
from .typealg import NotAType, causal, chain_fun, io_sets, subtype_bounds


# ---------------------------------------------------------------------------
# labelled posets


@dataclass(frozen=True)
class PosetNode:
    subset: int  # mask over [n]
    coeff: int
    rank: int
    label: int  # mask over [n]


@dataclass(frozen=True)
class LabelledPoset:
    n: int
    nodes: tuple[PosetNode, ...]
    graded: bool
    sign_ok: bool

    @property
    def rank(self) -> int:
        return max(nd.rank for nd in self.nodes)

    @property
    def is_chain(self) -> bool:
        subs = [nd.subset for nd in self.nodes]
        for i, s in enumerate(subs):
            for t in subs[i + 1 :]:
                if s & t != s and s & t != t:
                    return False
        return True

    def subsets(self) -> tuple[int, ...]:
        return tuple(nd.subset for nd in self.nodes)

    def node_by_subset(self, subset: int) -> PosetNode:
        for nd in self.nodes:
            if nd.subset == subset:
                return nd
        raise KeyError(f"subset {subset:#x} not in poset")

    def cover_edges(self) -> tuple[tuple[int, int], ...]:
        """Pairs (i, j) of node positions with nodes[i] covered by nodes[j]."""
        subs = self.subsets()
        edges = []
        for i, s in enumerate(subs):
            for j, t in enumerate(subs):
                if s != t and s & t == s:
                    if not any(
                        u != s and u != t and s & u == s and u & t == u for u in subs
                    ):
                        edges.append((i, j))
        return tuple(sorted(edges))

    def minimal_nodes(self) -> tuple[PosetNode, ...]:
        subs = self.subsets()
        return tuple(
            nd
            for nd in self.nodes
            if not any(t != nd.subset and t & nd.subset == t for t in subs)
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "nodes": [
                {
                    "subset": list(mask_indices(nd.subset)),
                    "coeff": nd.coeff,
                    "rank": nd.rank,
                    "label": list(mask_indices(nd.label)),
                }
                for nd in self.nodes
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "LabelledPoset":
        n = int(data["n"])
        nodes = tuple(
            PosetNode(
                subset=mask_from_indices(nd["subset"], n),
                coeff=int(nd["coeff"]),
                rank=int(nd["rank"]),
                label=mask_from_indices(nd["label"], n),
            )
            for nd in data["nodes"]
        )
        return cls(n=n, nodes=nodes, graded=True, sign_ok=True)


def build_poset(f: BoolFun) -> LabelledPoset:
    """Poset of the Moebius support with longest-path ranks and labels.

    Gradedness (all maximal chains of equal length) and the alternating
    coefficient signs are checked and recorded as flags, not enforced.
    """
    mob = mobius(f)
    support = sorted(mob.coeffs, key=lambda m: (bin(m).count("1"), m))
    rank: dict[int, int] = {}
    label: dict[int, int] = {}
    for s in support:
        below = [t for t in rank if t & s == t and t != s]
        rank[s] = max((rank[t] + 1 for t in below), default=0)
        covered = 0
        for t in below:
            covered |= t
        label[s] = s & ~covered
    top_rank = max(rank.values())
    graded = True
    for s in support:
        covers = [
            t
            for t in support
            if t != s
            and t & s == t
            and not any(u != t and u != s and t & u == t and u & s == u for u in support)
        ]
        if any(rank[s] != rank[t] + 1 for t in covers):
            graded = False
        if not any(s & t == s and s != t for t in support) and rank[s] != top_rank:
            graded = False  # maximal node below the top rank
    sign_ok = all(mob[s] == (-1) ** rank[s] for s in support)
    nodes = tuple(
        PosetNode(subset=s, coeff=mob[s], rank=rank[s], label=label[s])
        for s in sorted(support, key=lambda m: (rank[m], m))
    )
    return LabelledPoset(n=f.n, nodes=nodes, graded=graded, sign_ok=sign_ok)


def p0(P: LabelledPoset) -> LabelledPoset:
    """Subposet of nonempty-label nodes, keeping the empty set if present."""
    nodes = tuple(nd for nd in P.nodes if nd.label or nd.subset == 0)
    return LabelledPoset(n=P.n, nodes=nodes, graded=P.graded, sign_ok=P.sign_ok)


def _subposet(P: LabelledPoset, keep: Iterable[PosetNode]) -> LabelledPoset:
    keep = tuple(sorted(keep, key=lambda nd: (nd.rank, nd.subset)))
    return LabelledPoset(n=P.n, nodes=keep, graded=P.graded, sign_ok=P.sign_ok)


def free_indices(f: BoolFun) -> tuple[int, int]:
    """(free input mask, free output mask) of f."""
    P = build_poset(f)
    return _free_in(P), _free_out(P)


def _free_out(P: LabelledPoset) -> int:
    union = 0
    for nd in P.nodes:
        union |= nd.subset
    return ((1 << P.n) - 1) ^ union


def _free_in(P: LabelledPoset) -> int:
    mask = (1 << P.n) - 1
    for nd in P.minimal_nodes():
        mask &= nd.subset
    return mask


def rank_of_index(f: BoolFun, i: int) -> int:
    """Common rank of the nodes whose label contains i; r(f)+1 for free outputs."""
    P = build_poset(f)
    if not 1 <= i <= f.n:
        raise ValueError(f"index {i} outside [{f.n}]")
    bit = 1 << (i - 1)
    ranks = {nd.rank for nd in P.nodes if nd.label & bit}
    if not ranks:
        return P.rank + 1
    if len(ranks) > 1:
        raise NotAType(f"index {i} labels nodes of different ranks {sorted(ranks)}")
    return ranks.pop()


# ---------------------------------------------------------------------------
# chains and combs


@dataclass(frozen=True)
class CombStructure:
    """Chain data: subsets S_1 < ... < S_N and the tier partition of [n].

    tiers[0] = S_1 holds the free inputs, tiers[N] the free outputs; the
    causal order of the comb descends the chain (the top tier acts first).
    """

    n: int
    subsets: tuple[int, ...]
    tiers: tuple[int, ...]
    outputs: int
    inputs: int

    @property
    def comb_order(self) -> int:
        return (len(self.subsets) - 1) // 2


def chain_info(f: BoolFun) -> CombStructure:
    P = build_poset(f)
    if not P.is_chain:
        raise NotAType("poset is not a chain")
    subs = sorted(P.subsets(), key=lambda m: bin(m).count("1"))
    big_n = len(subs)
    tiers = [subs[0]]
    for j in range(big_n - 1):
        tiers.append(subs[j + 1] & ~subs[j])
    tiers.append(((1 << f.n) - 1) ^ subs[-1])
    inputs = 0
    outputs = 0
    for j, t in enumerate(tiers):
        if j % 2 == 0:
            inputs |= t
        else:
            outputs |= t
    outputs |= tiers[-1]  # free outputs (tier N, N odd for chain types)
    return CombStructure(
        n=f.n, subsets=tuple(subs), tiers=tuple(tiers), outputs=outputs, inputs=inputs
    )


# ---------------------------------------------------------------------------
# decomposition trees


@dataclass(frozen=True)
class ChainLeaf:
    n: int
    subsets: tuple[int, ...]


@dataclass(frozen=True)
class StarNode:
    child: "DecompositionTree"


@dataclass(frozen=True)
class TensorNode:
    children: tuple["DecompositionTree", ...]
    sizes: tuple[int, ...]
    align: Perm


@dataclass(frozen=True)
class CausalNode:
    left: "DecompositionTree"
    right: "DecompositionTree"
    sizes: tuple[int, int]
    align: Perm


DecompositionTree = ChainLeaf | StarNode | TensorNode | CausalNode


def chain_leaf_of(f: BoolFun) -> ChainLeaf:
    P = build_poset(f)
    if not (P.is_chain and P.sign_ok):
        raise NotAType("not a chain type")
    subs = sorted(P.subsets(), key=lambda m: bin(m).count("1"))
    if len(subs) % 2 == 0:
        raise NotAType("odd rank")
    return ChainLeaf(f.n, tuple(subs))


def chain_leaf_fun(leaf: ChainLeaf) -> BoolFun:
    return chain_fun(leaf.n, leaf.subsets)


def tree_size(tree: DecompositionTree) -> int:
    if isinstance(tree, ChainLeaf):
        return tree.n
    if isinstance(tree, StarNode):
        return tree_size(tree.child)
    if isinstance(tree, TensorNode):
        return sum(tree.sizes)
    return sum(tree.sizes)


def reconstruct(tree: DecompositionTree) -> BoolFun:
    """Rebuild the Boolean function encoded by a decomposition tree."""
    if isinstance(tree, ChainLeaf):
        return chain_leaf_fun(tree)
    if isinstance(tree, StarNode):
        return star(reconstruct(tree.child))
    if isinstance(tree, TensorNode):
        return permute(tensor_all(reconstruct(c) for c in tree.children), tree.align)
    if isinstance(tree, CausalNode):
        return permute(causal(reconstruct(tree.left), reconstruct(tree.right)), tree.align)
    raise TypeError(f"unknown tree node {tree!r}")


def tree_to_json(tree: DecompositionTree) -> dict:
    if isinstance(tree, ChainLeaf):
        return {
            "kind": "chain",
            "n": tree.n,
            "subsets": [list(mask_indices(s)) for s in tree.subsets],
        }
    if isinstance(tree, StarNode):
        return {"kind": "star", "child": tree_to_json(tree.child)}
    if isinstance(tree, TensorNode):
        return {
            "kind": "tensor",
            "sizes": list(tree.sizes),
            "align": list(tree.align),
            "children": [tree_to_json(c) for c in tree.children],
        }
    return {
        "kind": "causal",
        "sizes": list(tree.sizes),
        "align": list(tree.align),
        "left": tree_to_json(tree.left),
        "right": tree_to_json(tree.right),
    }


# ---------------------------------------------------------------------------
# helpers for stripping and factoring


def _restrict_zero(f: BoolFun, keep: Sequence[int]) -> BoolFun:
    """Restriction of f to the 1-based positions in keep, others pinned to 0."""
    m = len(keep)
    pos = [k - 1 for k in keep]
    table = 0
    for t in range(1 << m):
        idx = 0
        for j in range(m):
            if (t >> j) & 1:
                idx |= 1 << pos[j]
        if f.value(idx):
            table |= 1 << t
    return BoolFun(m, table)


def _validate_candidate(f: BoolFun) -> LabelledPoset:
    mob = mobius(f)
    for _, c in mob.items():
        if c not in (-1, 1):
            raise NotAType(f"coefficient {c}")
    P = build_poset(f)
    if not P.graded:
        raise NotAType("poset not graded")
    if P.rank % 2:
        raise NotAType("odd rank")
    if not P.sign_ok:
        raise NotAType("coefficient sign mismatch")
    if not subtype_bounds(f, io_sets(f)):
        raise NotAType("subtype bounds violated")
    return P


def strip_chain_top(f: BoolFun) -> tuple[BoolFun, BoolFun, Perm]:
    """Peel a chain type off the causal top: f == permute(causal(h, beta), align).

    Applies while h or h* has free outputs; the returned h (unless it became
    a chain) and its star have none.  Raises when nothing can be peeled.
    """
    h = f
    beta: BoolFun | None = None
    align: Perm | None = None
    while True:
        P = build_poset(h)
        if P.is_chain:
            break
        free = _free_out(P)
        if free:
            piece_is_one = True
        else:
            free = _free_out(build_poset(star(h)))
            if not free:
                break
            piece_is_one = False
        keep = [i for i in range(1, h.n + 1) if not (free >> (i - 1)) & 1]
        dropped = list(mask_indices(free))
        k = len(dropped)
        if piece_is_one:
            h_next = _restrict_zero(h, keep)
            piece = BoolFun(k, (1 << (1 << k)) - 1)  # 1_k
        else:
            h_next = star(_restrict_zero(star(h), keep))
            piece = BoolFun(k, 1)  # p_k
        pi = gather_perm([keep, dropped], h.n)
        if beta is None:
            beta, align = piece, pi
        else:
            beta = causal(piece, beta)
            align = compose_perms(
                direct_sum_perm([pi, identity_perm(f.n - h.n)]), align
            )
        h = h_next
    if beta is None:
        raise NotAType("is chain" if build_poset(f).is_chain else "no free outputs")
    assert permute(causal(h, beta), align) == f
    return h, beta, align


def strip_chain_bottom(f: BoolFun) -> tuple[BoolFun, BoolFun, Perm]:
    """Peel a chain type off the causal bottom: f == permute(causal(beta, h), align)."""
    h = f
    beta: BoolFun | None = None
    align: Perm | None = None
    while True:
        P = build_poset(h)
        if P.is_chain:
            break
        free = _free_in(P)
        if free:
            piece_is_p = True
        else:
            free = _free_in(build_poset(star(h)))
            if not free:
                break
            piece_is_p = False
        keep = [i for i in range(1, h.n + 1) if not (free >> (i - 1)) & 1]
        dropped = list(mask_indices(free))
        k = len(dropped)
        if piece_is_p:
            h_next = _restrict_zero(h, keep)
            piece = BoolFun(k, 1)  # p_k
        else:
            h_next = star(_restrict_zero(star(h), keep))
            piece = BoolFun(k, (1 << (1 << k)) - 1)  # 1_k
        pi = gather_perm([dropped, keep], h.n)
        if beta is None:
            beta, align = piece, pi
        else:
            beta = causal(beta, piece)
            align = compose_perms(
                direct_sum_perm([identity_perm(f.n - h.n), pi]), align
            )
        h = h_next
    if beta is None:
        raise NotAType("is chain" if build_poset(f).is_chain else "no free inputs")
    assert permute(causal(beta, h), align) == f
    return beta, h, align


def independent_components(P0: LabelledPoset) -> list[LabelledPoset]:
    """Finest split into direct summands with pairwise disjoint label sets."""
    nodes = P0.nodes
    parent = list(range(len(nodes)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx

    for i, a in enumerate(nodes):
        for j in range(i + 1, len(nodes)):
            b = nodes[j]
            comparable = a.subset & b.subset in (a.subset, b.subset)
            if comparable or (a.label & b.label):
                union(i, j)
    groups: dict[int, list[PosetNode]] = {}
    for i, nd in enumerate(nodes):
        groups.setdefault(find(i), []).append(nd)

    def sort_key(group: list[PosetNode]) -> tuple[int, int]:
        labels = 0
        for nd in group:
            labels |= nd.label
        low = mask_indices(labels)[0] if labels else P0.n + 1
        return (low, min(nd.subset for nd in group))

    return [_subposet(P0, g) for g in sorted(groups.values(), key=sort_key)]


def factor_dual_product(f: BoolFun) -> tuple[list[BoolFun], list[list[int]], Perm]:
    """Split f* into tensor factors along independent components of P_f^0.

    Requires f, f* free-index-less and the empty set absent from P_f;
    returns (factors, index groups, align) with
    star(f) == permute(tensor(factors), align).
    """
    P = build_poset(f)
    comps = independent_components(p0(P))
    if len(comps) < 2:
        raise NotAType("single component")
    groups = []
    for comp in comps:
        labels = 0
        for nd in comp.nodes:
            labels |= nd.label
        groups.append(list(mask_indices(labels)))
    flat = sorted(i for grp in groups for i in grp)
    if flat != list(range(1, f.n + 1)):
        raise NotAType("component labels do not partition [n]")
    g = star(f)
    factors = [_restrict_zero(g, grp) for grp in groups]
    align = gather_perm(groups, f.n)
    if permute(tensor_all(factors), align) != g:
        raise NotAType("dual factor reconstruction mismatch")
    return factors, groups, align


# -- the coloring algorithm for genuine tensor products ---------------------


@dataclass(frozen=True)
class ColoringReport:
    """Artifacts of the minimal-cover coloring used to split a product."""

    class_labels: tuple[int, ...]  # label mask per class, in reported order
    v_sets: tuple[int, ...]
    w_sets: tuple[int, ...]
    colors: tuple[tuple[int, ...], ...]  # class positions per color
    color_index_sets: tuple[int, ...]  # full index mask per color (factor support)


def _covered_minimals(P0: LabelledPoset) -> dict[int, list[int]]:
    """node position -> positions of minimal nodes it covers (in P0)."""
    nodes = P0.nodes
    mins = {i for i, nd in enumerate(nodes) if nd in P0.minimal_nodes()}
    edges = P0.cover_edges()
    out: dict[int, list[int]] = {}
    for i, j in edges:
        if i in mins:
            out.setdefault(j, []).append(i)
    return out


def coloring(f: BoolFun) -> ColoringReport:
    """Color the minimal/minimal-covering labels of P_f^0 by tensor factor.

    Implements the label-set statistics (the intersection and complement of
    minimal labels under each covering label class), the overlap and
    common-upper-bound relation with its transitive closure, and the
    refinement through independent components above each minimal element.
    """
    P0 = p0(build_poset(f))
    nodes = P0.nodes
    min_nodes = P0.minimal_nodes()
    min_pos = [i for i, nd in enumerate(nodes) if nd in min_nodes]
    if any(nodes[i].subset == 0 for i in min_pos):
        raise NotAType("empty set present; coloring not applicable")
    covered = _covered_minimals(P0)
    for j, mins in covered.items():
        if len(mins) > 1:
            raise NotAType("element covers two minimal elements")
    u_all = 0
    for i in min_pos:
        u_all |= nodes[i].label

    class_of: dict[int, list[int]] = {}  # label mask -> covering node positions
    for j in covered:
        class_of.setdefault(nodes[j].label, []).append(j)
    class_labels = sorted(class_of, key=lambda m: mask_indices(m))
    m_classes = len(class_labels)

    v_sets, w_sets = [], []
    for lab in class_labels:
        cov_mins = {m for j in class_of[lab] for m in covered[j]}
        inter = (1 << f.n) - 1
        union = 0
        for m in cov_mins:
            inter &= nodes[m].label
            union |= nodes[m].label
        v_sets.append(inter if cov_mins else 0)
        w_sets.append(u_all & ~union)

    parent = list(range(m_classes))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union_cls(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx

    c_primes = [v_sets[i] | w_sets[i] | class_labels[i] for i in range(m_classes)]
    label_positions: dict[int, list[int]] = {}
    for pos, nd in enumerate(nodes):
        if nd.label:
            label_positions.setdefault(nd.label, []).append(pos)
    for i in range(m_classes):
        for j in range(i + 1, m_classes):
            if c_primes[i] & c_primes[j]:
                union_cls(i, j)
                continue
            if _have_common_upper_bound(
                nodes, label_positions[class_labels[i]], label_positions[class_labels[j]]
            ):
                union_cls(i, j)

    # refinement: classes with empty statistics belong to factors whose poset
    # contains the empty set; they merge when they share an independent
    # component above a minimal element.
    plain = sorted(
        i
        for i in range(m_classes)
        if all(
            v_sets[j] == 0 and w_sets[j] == 0
            for j in range(m_classes)
            if find(j) == find(i)
        )
    )
    if plain:
        for mpos in min_pos:
            base = nodes[mpos].subset
            above = [nd for nd in nodes if nd.subset != base and base & nd.subset == base]
            if not above:
                continue
            for comp in independent_components(_subposet(P0, above)):
                present = [
                    i
                    for i in plain
                    if any(nd.label == class_labels[i] for nd in comp.nodes)
                ]
                for a, b in zip(present, present[1:]):
                    union_cls(a, b)

    color_groups: dict[int, list[int]] = {}
    for i in range(m_classes):
        color_groups.setdefault(find(i), []).append(i)
    colors = sorted(
        color_groups.values(), key=lambda grp: mask_indices(class_labels[grp[0]])
    )

    index_sets = _reconstruct_factor_supports(P0, nodes, min_pos, class_labels, colors, c_primes)
    return ColoringReport(
        class_labels=tuple(class_labels),
        v_sets=tuple(v_sets),
        w_sets=tuple(w_sets),
        colors=tuple(tuple(grp) for grp in colors),
        color_index_sets=tuple(index_sets),
    )


def _have_common_upper_bound(
    nodes: Sequence[PosetNode], pos_a: Sequence[int], pos_b: Sequence[int]
) -> bool:
    for ia in pos_a:
        sa = nodes[ia].subset
        for ib in pos_b:
            sb = nodes[ib].subset
            need = sa | sb
            if any(nd.subset & need == need for nd in nodes):
                return True
    return False


def _reconstruct_factor_supports(
    P0: LabelledPoset,
    nodes: Sequence[PosetNode],
    min_pos: Sequence[int],
    class_labels: Sequence[int],
    colors: Sequence[Sequence[int]],
    c_primes: Sequence[int],
) -> list[int]:
    """Per color, rebuild the factor subposet and return its full index mask.

    Follows the minimal-cover reconstruction: fix one minimal element, keep
    the minimal elements whose labels contain its off-color part, strip them,
    and pick the independent component whose minimal labels carry the color.
    """
    u0 = nodes[min(min_pos, key=lambda i: nodes[i].subset)]
    class_color = {}
    for ci, grp in enumerate(colors):
        for cls in grp:
            class_color[class_labels[cls]] = ci
    supports = []
    for ci, grp in enumerate(colors):
        colored = 0
        for cls in grp:
            colored |= c_primes[cls]
        tilde = u0.label & ~colored
        pl_mins = [nodes[i] for i in min_pos if tilde & nodes[i].label == tilde]
        pl_min_subsets = {nd.subset for nd in pl_mins}
        pl_upper = [
            nd
            for nd in nodes
            if nd.subset not in pl_min_subsets
            and any(m.subset & nd.subset == m.subset for m in pl_mins)
        ]
        support = 0
        for m in pl_mins:
            support |= m.label & ~tilde
        matched = 0
        for comp in independent_components(_subposet(P0, pl_upper)):
            comp_min_labels = {nd.label for nd in comp.minimal_nodes()}
            if all(class_color.get(lab) == ci for lab in comp_min_labels):
                matched += 1
                for nd in comp.nodes:
                    support |= nd.label
        if matched == 0:
            raise NotAType("coloring failed to isolate a factor component")
        supports.append(support)
    return supports


def factor_product(f: BoolFun) -> tuple[list[BoolFun], ColoringReport, Perm]:
    """Split f into tensor factors found by the coloring of P_f^0.

    Requires f, f* free-index-less, the empty set absent and P_f^0 connected;
    returns (factors, coloring report, align) with
    f == permute(tensor(factors), align).
    """
    report = coloring(f)
    groups = [list(mask_indices(m)) for m in report.color_index_sets]
    flat = sorted(i for grp in groups for i in grp)
    if flat != list(range(1, f.n + 1)):
        raise NotAType("factor supports do not partition [n]")
    order = sorted(range(len(groups)), key=lambda i: groups[i][0])
    groups = [groups[i] for i in order]
    factors = [_restrict_zero(f, grp) for grp in groups]
    align = gather_perm(groups, f.n)
    if permute(tensor_all(factors), align) != f:
        raise NotAType("product reconstruction mismatch")
    return factors, report, align


# ---------------------------------------------------------------------------
# the recursive decomposition


def decompose(f: BoolFun) -> DecompositionTree:
    """Certificate tree with chain-type leaves; exact round-trip with reconstruct."""
    tree = _decompose(f)
    if reconstruct(tree) != f:
        raise NotAType("reconstruction mismatch")
    return tree


def _decompose(f: BoolFun) -> DecompositionTree:
    P = _validate_candidate(f)
    if P.is_chain:
        return chain_leaf_of(f)
    Pstar = build_poset(star(f))
    if _free_out(P) or _free_out(Pstar):
        h, beta, align = strip_chain_top(f)
        return CausalNode(
            left=_decompose(h),
            right=chain_leaf_of(beta),
            sizes=(h.n, beta.n),
            align=align,
        )
    if _free_in(P) or _free_in(Pstar):
        beta, h, align = strip_chain_bottom(f)
        return CausalNode(
            left=chain_leaf_of(beta),
            right=_decompose(h),
            sizes=(beta.n, h.n),
            align=align,
        )
    if any(nd.subset == 0 for nd in P.nodes):
        return StarNode(_decompose(star(f)))
    comps = independent_components(p0(P))
    if len(comps) >= 2:
        factors, groups, align = factor_dual_product(f)
        inner = TensorNode(
            children=tuple(_decompose(g) for g in factors),
            sizes=tuple(g.n for g in factors),
            align=align,
        )
        return StarNode(inner)
    factors, _, align = factor_product(f)
    if len(factors) < 2:
        raise NotAType("no product structure found")
    return TensorNode(
        children=tuple(_decompose(g) for g in factors),
        sizes=tuple(g.n for g in factors),
        align=align,
    )


# ---------------------------------------------------------------------------
# ordinal sums of posets under the causal product


@dataclass(frozen=True)
class OrdinalSumReport:
    case: str
    matches: bool
    expected: tuple[tuple[int, int], ...]  # (subset, label) pairs
    actual: tuple[tuple[int, int], ...]


def ordinal_sum_check(f: BoolFun, g: BoolFun) -> OrdinalSumReport:
    """Check P_{f <| g} against the predicted ordinal-sum shape (cases a-d)."""
    Pf = build_poset(f)
    Pg = build_poset(g)
    n1 = f.n
    full1 = (1 << n1) - 1
    has_top = any(nd.subset == full1 for nd in Pf.nodes)
    has_bot = any(nd.subset == 0 for nd in Pg.nodes)
    g_min = {nd.subset for nd in Pg.minimal_nodes()}
    g_nonempty = [nd for nd in Pg.nodes if nd.subset != 0]
    g_nonempty_min = {
        nd.subset
        for nd in _subposet(Pg, g_nonempty).minimal_nodes()
    } if g_nonempty else set()

    expected: list[tuple[int, int]] = []
    if has_top and has_bot:
        case = "a"
        expected += [(nd.subset, nd.label) for nd in Pf.nodes]
        for nd in g_nonempty:
            expected.append((full1 | (nd.subset << n1), nd.label << n1))
    elif has_top and not has_bot:
        case = "b"
        top_label = Pf.node_by_subset(full1).label
        expected += [
            (nd.subset, nd.label) for nd in Pf.nodes if nd.subset != full1
        ]
        for nd in Pg.nodes:
            lab = nd.label << n1
            if nd.subset in g_min:
                lab |= top_label
            expected.append((full1 | (nd.subset << n1), lab))
    elif not has_top and has_bot:
        case = "c"
        free_out = _free_out(Pf)
        expected += [(nd.subset, nd.label) for nd in Pf.nodes]
        for nd in g_nonempty:
            lab = nd.label << n1
            if nd.subset in g_nonempty_min:
                lab |= free_out
            expected.append((full1 | (nd.subset << n1), lab))
    else:
        case = "d"
        free_out = _free_out(Pf)
        expected += [(nd.subset, nd.label) for nd in Pf.nodes]
        expected.append((full1, free_out))
        for nd in Pg.nodes:
            expected.append((full1 | (nd.subset << n1), nd.label << n1))

    actual_poset = build_poset(causal(f, g))
    actual = tuple(sorted((nd.subset, nd.label) for nd in actual_poset.nodes))
    expected_t = tuple(sorted(expected))
    return OrdinalSumReport(
        case=case, matches=actual == expected_t, expected=expected_t, actual=actual
    )


# ---------------------------------------------------------------------------
# DOT export


def _fmt_set(mask: int) -> str:
    if not mask:
        return "∅"
    return "{" + ",".join(str(i) for i in mask_indices(mask)) + "}"


def to_dot(P: LabelledPoset) -> str:
    """Deterministic DOT digraph of the labelled Hasse diagram."""
    lines = ["digraph poset {", "  rankdir=BT;", '  node [shape=box];']
    for i, nd in enumerate(P.nodes):
        lab = _fmt_set(nd.label) if nd.label else "·"
        lines.append(f'  n{i} [label="{_fmt_set(nd.subset)} | L={lab}"];')
    for i, j in P.cover_edges():
        lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
