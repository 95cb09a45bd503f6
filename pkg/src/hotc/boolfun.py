"""Exact algebra of Boolean functions with value 1 at the all-zeros string.

A function f: {0,1}^n -> {0,1} with f(00...0) = 1 is stored as a truth
table packed into a Python int: bit ``idx(s) = sum_i s_i 2^(i-1)`` holds
f(s).  Subsets of [n] = {1,...,n} are packed the same way (bit i-1 set
iff i is in the subset), so the string <-> subset bridge
S(s) = {i : s_i = 0} is a single bitwise complement.

All operations are pure and exact (integer arithmetic only).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

MAX_ARITY = 16
MAX_CANONICAL_ARITY = 8


class ArityError(ValueError):
    pass


# ---------------------------------------------------------------------------
# subset masks


def mask_from_indices(indices: Iterable[int], n: int) -> int:
    """Pack 1-based indices into a bit mask (bit i-1 <-> element i)."""
    mask = 0
    for i in indices:
        if not 1 <= i <= n:
            raise ValueError(f"index {i} outside [{n}]")
        mask |= 1 << (i - 1)
    return mask


def mask_indices(mask: int) -> tuple[int, ...]:
    """Unpack a bit mask into sorted 1-based indices."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def string_subset(string_index: int, n: int) -> int:
    """The subset S(s) = {i : s_i = 0} of a string index, as a mask."""
    return ~string_index & ((1 << n) - 1)


@dataclass(frozen=True)
class SubsetMask:
    """A subset of [n], packed into ``mask`` (bit i-1 set iff i in S)."""

    n: int
    mask: int

    def __post_init__(self) -> None:
        if not 0 <= self.mask < (1 << self.n):
            raise ValueError(f"mask {self.mask:#x} out of range for n={self.n}")

    @classmethod
    def from_indices(cls, indices: Iterable[int], n: int) -> "SubsetMask":
        return cls(n, mask_from_indices(indices, n))

    def indices(self) -> tuple[int, ...]:
        return mask_indices(self.mask)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices())


# ---------------------------------------------------------------------------
# BoolFun


@dataclass(frozen=True)
class BoolFun:
    """Element of F_n: truth table with bit 0 (the all-zeros string) set."""

    n: int
    table: int

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_ARITY:
            raise ArityError(f"arity {self.n} outside [1, {MAX_ARITY}]")
        if not self.table & 1:
            raise ValueError("f(00...0) must be 1 (table bit 0 unset)")
        if self.table >> (1 << self.n):
            raise ValueError("truth table longer than 2^n bits")

    # -- basic queries ------------------------------------------------

    def value(self, string_index: int) -> int:
        """f(s) for the string with index sum_i s_i 2^(i-1)."""
        return (self.table >> string_index) & 1

    def value_at(self, bits: Iterable[int]) -> int:
        idx = 0
        for i, b in enumerate(bits):
            idx |= (b & 1) << i
        return self.value(idx)

    def minterms(self) -> tuple[int, ...]:
        return tuple(i for i in range(1 << self.n) if self.value(i))

    def __le__(self, other: "BoolFun") -> bool:
        _check_same_arity(self, other)
        return self.table | other.table == other.table

    # -- serialization ------------------------------------------------

    def to_json(self) -> dict:
        return {"n": self.n, "minterms": list(self.minterms())}

    @classmethod
    def from_json(cls, data: Mapping) -> "BoolFun":
        n = int(data["n"])
        table = 0
        for m in data["minterms"]:
            m = int(m)
            if not 0 <= m < (1 << n):
                raise ValueError(f"minterm index {m} out of range")
            table |= 1 << m
        return cls(n, table)


def _check_same_arity(f: BoolFun, g: BoolFun) -> None:
    if f.n != g.n:
        raise ArityError(f"arity mismatch: {f.n} vs {g.n}")


def _full(n: int) -> int:
    return (1 << (1 << n)) - 1


def ones(n: int) -> BoolFun:
    """The constant-1 function 1_n."""
    return BoolFun(n, _full(n))


def make_p(subset: int | SubsetMask, n: int | None = None) -> BoolFun:
    """p_S: indicator that the string vanishes on S (1 iff S subset of S(s))."""
    if isinstance(subset, SubsetMask):
        mask, n = subset.mask, subset.n
    else:
        if n is None:
            raise TypeError("n required when subset given as a raw mask")
        mask = subset
    table = 0
    for t in range(1 << n):
        if t & mask == 0:
            table |= 1 << t
    return BoolFun(n, table)


def bottom(n: int) -> BoolFun:
    """p_n = p_[n], the characteristic function of the zero string."""
    return BoolFun(n, 1)


def star(f: BoolFun) -> BoolFun:
    """Complement in F_n: f* = 1_n - f + p_n (flip all bits except bit 0)."""
    return BoolFun(f.n, (~f.table & _full(f.n)) | 1)


def meet(f: BoolFun, g: BoolFun) -> BoolFun:
    _check_same_arity(f, g)
    return BoolFun(f.n, f.table & g.table)


def join(f: BoolFun, g: BoolFun) -> BoolFun:
    _check_same_arity(f, g)
    return BoolFun(f.n, f.table | g.table)


def tensorf(f: BoolFun, g: BoolFun) -> BoolFun:
    """(f (x) g)(s^1 s^2) = f(s^1) g(s^2); f occupies indices 1..n_f."""
    n = f.n + g.n
    if n > MAX_ARITY:
        raise ArityError(f"combined arity {n} exceeds {MAX_ARITY}")
    table = 0
    block = 1 << f.n
    for j in range(1 << g.n):
        if (g.table >> j) & 1:
            table |= f.table << (j * block)
    return BoolFun(n, table)


def tensor_all(fs: Iterable[BoolFun]) -> BoolFun:
    out: BoolFun | None = None
    for f in fs:
        out = f if out is None else tensorf(out, f)
    if out is None:
        raise ValueError("empty tensor product")
    return out


# ---------------------------------------------------------------------------
# permutations

Perm = tuple[int, ...]
"""A permutation of [n], 0-based: perm[i] is the image of position i."""


def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def invert_perm(perm: Perm) -> Perm:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


def compose_perms(a: Perm, b: Perm) -> Perm:
    """a after b: permute(permute(f, a), b) == permute(f, compose_perms(a, b))."""
    return tuple(a[b[i]] for i in range(len(a)))


def _check_perm(perm: Perm, n: int) -> None:
    if len(perm) != n or sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation of [{n}]: {perm}")


@lru_cache(maxsize=4096)
def _perm_index_map(perm: Perm) -> tuple[int, ...]:
    """index map t -> idx(sigma(s_t)) where sigma(s)_i = s_{sigma^{-1}(i)}."""
    n = len(perm)
    inv = invert_perm(perm)
    out = []
    for t in range(1 << n):
        u = 0
        for i in range(n):
            u |= ((t >> inv[i]) & 1) << i
        out.append(u)
    return tuple(out)


def permute(f: BoolFun, perm: Perm) -> BoolFun:
    """f o sigma, where (f o sigma)(s) = f(sigma(s)) and sigma(s)_i = s_{sigma^{-1}(i)}.

    With this convention permute(p_S, sigma) = p_{sigma^{-1}(S)}.
    """
    _check_perm(perm, f.n)
    idx_map = _perm_index_map(perm)
    table = 0
    for t in range(1 << f.n):
        if (f.table >> idx_map[t]) & 1:
            table |= 1 << t
    return BoolFun(f.n, table)


def perm_on_mask(perm: Perm, mask: int) -> int:
    """Image of a subset mask under a permutation (1-based sets, 0-based perm)."""
    out = 0
    for i in range(len(perm)):
        if (mask >> i) & 1:
            out |= 1 << perm[i]
    return out


def direct_sum_perm(perms: Iterable[Perm]) -> Perm:
    """(+)_j sigma_j acting blockwise on the concatenated index set."""
    out: list[int] = []
    offset = 0
    for p in perms:
        out.extend(offset + q for q in p)
        offset += len(p)
    return tuple(out)


def block_permutation(lam: Perm, sizes: tuple[int, ...]) -> Perm:
    """rho_lambda: permutes whole blocks of the given sizes.

    Acts on strings as rho(s^1 ... s^k) = s^{lam(1)} ... s^{lam(k)}, so that
    rho_id = id and rho_lambda o ((+)_j sigma_j) = ((+)_j sigma_{lam(j)}) o rho_lambda.
    """
    k = len(sizes)
    _check_perm(lam, k)
    offsets = [0] * k
    acc = 0
    for j, sz in enumerate(sizes):
        offsets[j] = acc
        acc += sz
    n = acc
    inv = [0] * n
    pos = 0
    for j in range(k):
        src = lam[j]
        for l in range(sizes[src]):
            inv[pos + l] = offsets[src] + l
        pos += sizes[src]
    return invert_perm(tuple(inv))


def gather_perm(groups: Iterable[Iterable[int]], n: int) -> Perm:
    """Permutation pi with f_global = permute(f_blocks, pi).

    ``groups`` lists 1-based global indices per block, in block order;
    together they must partition [n].  Position j of the block-ordered
    function reads global coordinate concat(groups)[j].
    """
    concat = [i - 1 for grp in groups for i in grp]
    if sorted(concat) != list(range(n)):
        raise ValueError("groups do not partition [n]")
    return invert_perm(tuple(concat))


# ---------------------------------------------------------------------------
# Moebius transform


@dataclass(frozen=True)
class MobiusCoeffs:
    """Exact integer coefficients of f = sum_S hat_f(S) p_S (nonzero only)."""

    n: int
    coeffs: Mapping[int, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", dict(self.coeffs))

    def items(self) -> list[tuple[int, int]]:
        return sorted(self.coeffs.items())

    def __getitem__(self, mask: int) -> int:
        return self.coeffs.get(mask, 0)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [
                {"subset": list(mask_indices(m)), "coeff": c} for m, c in self.items()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MobiusCoeffs":
        n = int(data["n"])
        coeffs: dict[int, int] = {}
        for term in data["terms"]:
            m = mask_from_indices(term["subset"], n)
            c = int(term["coeff"])
            if c:
                coeffs[m] = coeffs.get(m, 0) + c
        return cls(n, coeffs)


def mobius(f: BoolFun) -> MobiusCoeffs:
    """hat_f(S) = sum over strings t with t_j = 1 off S of (-1)^{|ones of t in S|} f(t).

    Computed as the subset Moebius inversion of F(S) := f(s(S)).
    """
    n = f.n
    size = 1 << n
    full = size - 1
    vals = [f.value(full ^ smask) for smask in range(size)]
    for i in range(n):
        bit = 1 << i
        for smask in range(size):
            if smask & bit:
                vals[smask] -= vals[smask ^ bit]
    coeffs = {smask: v for smask, v in enumerate(vals) if v}
    return MobiusCoeffs(n, coeffs)


def from_mobius(coeffs: MobiusCoeffs) -> BoolFun:
    """Evaluate sum_S hat_f(S) p_S; reject if not a {0,1} function in F_n."""
    n = coeffs.n
    size = 1 << n
    vals = [coeffs[smask] for smask in range(size)]
    for i in range(n):
        bit = 1 << i
        for smask in range(size):
            if smask & bit:
                vals[smask] += vals[smask ^ bit]
    table = 0
    full = size - 1
    for smask in range(size):
        v = vals[smask]
        t = full ^ smask
        if v not in (0, 1):
            raise ValueError(f"value {v} at string index {t}: not a Boolean function")
        if v:
            table |= 1 << t
    if not table & 1:
        raise ValueError("value 0 at the all-zeros string: not in F_n")
    return BoolFun(n, table)


# ---------------------------------------------------------------------------
# canonical form under permutations


@lru_cache(maxsize=16)
def _all_perms(n: int) -> tuple[Perm, ...]:
    return tuple(itertools.permutations(range(n)))


def canonical(f: BoolFun) -> BoolFun:
    """Minimal truth table over all n! coordinate permutations (n <= 8)."""
    if f.n > MAX_CANONICAL_ARITY:
        raise ArityError(f"canonical form capped at arity {MAX_CANONICAL_ARITY}")
    best = f.table
    for perm in _all_perms(f.n):
        t = permute(f, perm).table
        if t < best:
            best = t
    return BoolFun(f.n, best)


def enumerate_fn(n: int) -> Iterator[BoolFun]:
    """All 2^(2^n - 1) elements of F_n (use only for small n)."""
    if n > 4:
        raise ArityError("exhaustive F_n enumeration capped at n=4")
    for odd in range(1 << ((1 << n) - 1)):
        yield BoolFun(n, (odd << 1) | 1)
