"""Command-line surface: parse, compute, export, and run verification suites.

Every subcommand is deterministic given its inputs and seed.  Exit codes:
0 success, 1 domain error (e.g. not a type), 2 argument/parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import boolfun as bf
from . import linal, poset, quantum, typealg


class DomainError(Exception):
    pass


def _load_boolfun(path: str) -> bf.BoolFun:
    with open(path) as fh:
        return bf.BoolFun.from_json(json.load(fh))


def _emit(data, args) -> None:
    if getattr(args, "json", False):
        print(json.dumps(data, sort_keys=True))
    else:
        _pretty(data)


def _pretty(data, indent: int = 0) -> None:
    pad = "  " * indent
    if isinstance(data, dict):
        for k, v in data.items():
            if isinstance(v, (dict, list)) and v and not _is_flat(v):
                print(f"{pad}{k}:")
                _pretty(v, indent + 1)
            else:
                print(f"{pad}{k}: {v}")
    elif isinstance(data, list):
        for v in data:
            _pretty(v, indent)
    else:
        print(f"{pad}{data}")


def _is_flat(v) -> bool:
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) for x in v)
    return False


def _write_dot(text: str, target: str) -> None:
    if target == "-":
        sys.stdout.write(text)
    else:
        with open(target, "w") as fh:
            fh.write(text)


def _parse_dims(spec: str) -> list[quantum.FirstOrderObj]:
    """Parse --dims entries: '2' or '2:1.5' quantum, 'p2' or 'p2:0.5' classical."""
    objs = []
    for item in spec.split(","):
        item = item.strip()
        c = 1.0
        if ":" in item:
            item, cs = item.split(":")
            c = float(cs)
        if item.startswith("p"):
            objs.append(quantum.FirstOrderObj("classical", int(item[1:]), c))
        else:
            objs.append(quantum.FirstOrderObj("quantum", int(item), c))
    return objs


# ---------------------------------------------------------------------------
# subcommands


def cmd_enumerate(args) -> int:
    types = typealg.enumerate_types(args.n, cap=args.enum_cap)
    data = {
        "n": args.n,
        "count": len(types),
        "minterms": sorted(t.minterms() for t in types),
    }
    if not args.json:
        data = {"n": args.n, "count": len(types)}
    _emit(data, args)
    return 0


def cmd_is_type(args) -> int:
    f = _load_boolfun(args.infile[0])
    verdict = typealg.is_type(f, cap=args.enum_cap)
    data = {"is_type": verdict.is_type}
    if not verdict.is_type:
        data["reason"] = verdict.reason
    _emit(data, args)
    return 0 if verdict.is_type else 1


def cmd_mobius(args) -> int:
    f = _load_boolfun(args.infile[0])
    _emit(bf.mobius(f).to_json(), args)
    return 0


def cmd_from_mobius(args) -> int:
    with open(args.infile[0]) as fh:
        coeffs = bf.MobiusCoeffs.from_json(json.load(fh))
    try:
        f = bf.from_mobius(coeffs)
    except ValueError as err:
        _emit({"error": str(err)}, args)
        return 1
    _emit(f.to_json(), args)
    return 0


def cmd_poset(args, project: bool = False) -> int:
    f = _load_boolfun(args.infile[0])
    p = poset.build_poset(f)
    if project:
        p = poset.p0(p)
    if args.dot:
        _write_dot(poset.to_dot(p), args.dot)
    data = p.to_json()
    data["graded"] = p.graded
    data["rank"] = p.rank
    data["chain"] = p.is_chain
    _emit(data, args)
    return 0


def cmd_decompose(args) -> int:
    f = _load_boolfun(args.infile[0])
    try:
        tree = poset.decompose(f)
    except typealg.NotAType as err:
        _emit({"is_type": False, "reason": err.reason}, args)
        return 1
    if args.dot:
        _write_dot(poset.to_dot(poset.build_poset(f)), args.dot)
    _emit({"is_type": True, "tree": poset.tree_to_json(tree)}, args)
    return 0


def cmd_structure(args) -> int:
    f = _load_boolfun(args.infile[0])
    try:
        sf = typealg.structure_form(f)
    except typealg.NotAType as err:
        _emit({"is_type": False, "reason": err.reason}, args)
        return 1
    check = typealg.evaluate_structure(sf) == f
    data = sf.to_json()
    data["roundtrip"] = check
    _emit(data, args)
    return 0 if check else 1


def cmd_comb_info(args) -> int:
    f = _load_boolfun(args.infile[0])
    try:
        info = poset.chain_info(f)
    except typealg.NotAType as err:
        _emit({"error": err.reason}, args)
        return 1
    _emit(
        {
            "n": info.n,
            "subsets": [list(bf.mask_indices(s)) for s in info.subsets],
            "tiers": [list(bf.mask_indices(t)) for t in info.tiers],
            "inputs": list(bf.mask_indices(info.inputs)),
            "outputs": list(bf.mask_indices(info.outputs)),
            "comb_order": info.comb_order,
        },
        args,
    )
    return 0


def cmd_causal(args) -> int:
    if len(args.infile) != 2:
        print("causal requires two --in files", file=sys.stderr)
        return 2
    f = _load_boolfun(args.infile[0])
    g = _load_boolfun(args.infile[1])
    _emit(typealg.causal(f, g).to_json(), args)
    return 0


def cmd_gamma(args) -> int:
    _emit(typealg.gamma(args.n).to_json(), args)
    return 0


def cmd_expr_type(args) -> int:
    expr = typealg.parse_expr(args.expr)
    f, io = typealg.expr_to_type(expr)
    data = f.to_json()
    data["outputs"] = list(io.output_indices())
    data["inputs"] = list(io.input_indices())
    _emit(data, args)
    return 0


def cmd_quantum_space(args) -> int:
    objs = _parse_dims(args.dims)
    if args.expr:
        expr = typealg.parse_expr(args.expr)
        f, _ = typealg.expr_to_type(expr)
        aff = quantum.object_from_expr(expr, objs)
        space_dim = aff.dim + 1
    else:
        f = _load_boolfun(args.infile[0])
        space, aff = quantum.build_Sf(f, objs)
        space_dim = space.dim
    _emit(
        {
            "n": f.n,
            "ambient_dim": aff.dim_ambient,
            "space_dim": space_dim,
            "space_dim_formula": quantum.sf_dimension(f, objs),
            "affine_dim": aff.dim,
        },
        args,
    )
    return 0


def cmd_channel_check(args) -> int:
    objs = _parse_dims(args.dims)
    if len(objs) != 2 or any(o.kind != "quantum" for o in objs):
        print("channel-check expects --dims m,n with quantum dimensions", file=sys.stderr)
        return 2
    m, n = objs[0].dim, objs[1].dim
    if args.infile:
        with open(args.infile[0]) as fh:
            coords = np.array(json.load(fh)["coords"], dtype=float)
    else:
        coords = quantum.random_cptp(m, n, args.seed)
    member = quantum.is_channel_member(coords, m, n, tol=args.tol)
    _emit(
        {
            "m": m,
            "n": n,
            "member": bool(member),
            "min_eig": quantum.psd_min_eig(coords, m, n),
        },
        args,
    )
    return 0 if member else 1


# ---------------------------------------------------------------------------
# verification suites


def _check(name, fn, results):
    start = time.perf_counter()
    try:
        fn()
        ok = True
        msg = ""
    except Exception as err:  # noqa: BLE001 - report any failure
        ok = False
        msg = f": {err}"
    dt = time.perf_counter() - start
    print(f"{'PASS' if ok else 'FAIL'} {name} ({dt:.2f}s){msg}")
    results.append(ok)


def _suite_boolean(seed: int):
    rng = np.random.default_rng(seed)

    def roundtrip():
        for f in bf.enumerate_fn(2):
            assert bf.from_mobius(bf.mobius(f)) == f
        for _ in range(200):
            n = int(rng.integers(1, 9))
            table = int(rng.integers(0, 1 << ((1 << n) - 1))) << 1 | 1
            f = bf.BoolFun(n, table)
            assert bf.from_mobius(bf.mobius(f)) == f

    def cardinality():
        assert sum(1 for _ in bf.enumerate_fn(2)) == 8

    def star_involution():
        for f in bf.enumerate_fn(3):
            assert bf.star(bf.star(f)) == f

    def p_family():
        for s in range(4):
            for t in range(4):
                ps, pt = bf.make_p(s, 2), bf.make_p(t, 2)
                assert bf.meet(ps, pt) == bf.make_p(s | t, 2)

    return [
        ("mobius roundtrip", roundtrip),
        ("|F_2| = 8", cardinality),
        ("star involution", star_involution),
        ("p_S meet law", p_family),
    ]


def _suite_types(seed: int):
    rng = np.random.default_rng(seed)

    def t2_count():
        assert len(typealg.enumerate_types(2)) == 6

    def rejections():
        gstar = bf.join(bf.make_p(0b01, 2), bf.make_p(0b10, 2))
        g = bf.star(gstar)
        v1 = typealg.is_type(g)
        v2 = typealg.is_type(gstar)
        assert not v1 and v1.reason == "coefficient 2"
        assert not v2 and v2.reason == "odd rank"

    def chain_parity():
        for _ in range(100):
            n = int(rng.integers(2, 9))
            masks = sorted(set(int(rng.integers(0, 1 << n)) for _ in range(4)))
            chain = []
            cur = 0
            for m in masks:
                cur |= m
                if not chain or cur != chain[-1]:
                    chain.append(cur)
            coeffs = {s: (-1) ** i for i, s in enumerate(chain)}
            try:
                f = bf.from_mobius(bf.MobiusCoeffs(n, coeffs))
            except ValueError:
                continue
            assert bool(typealg.is_type(f)) == (len(chain) % 2 == 1)

    def causal_laws():
        for _ in range(100):
            n1 = int(rng.integers(1, 4))
            n2 = int(rng.integers(1, 4))
            f = bf.BoolFun(n1, int(rng.integers(0, 1 << ((1 << n1) - 1))) << 1 | 1)
            g = bf.BoolFun(n2, int(rng.integers(0, 1 << ((1 << n2) - 1))) << 1 | 1)
            assert bf.star(typealg.causal(f, g)) == typealg.causal(bf.star(f), bf.star(g))
            assert bf.tensorf(f, g) == bf.meet(typealg.causal(f, g), typealg.causal_rev(f, g))

    return [
        ("|T_2| = 6", t2_count),
        ("T_2 counterexamples rejected", rejections),
        ("chain parity", chain_parity),
        ("causal laws", causal_laws),
    ]


def _suite_posets(seed: int):
    def graded():
        for n in range(1, 5):
            for f in typealg.enumerate_types(n):
                p = poset.build_poset(f)
                assert p.graded and p.rank % 2 == 0 and p.sign_ok

    def roundtrip():
        for n in range(1, 5):
            for f in typealg.enumerate_types(n):
                assert poset.reconstruct(poset.decompose(f)) == f

    def comb_to_comb():
        g = bf.star(bf.tensorf(typealg.gamma(2), bf.star(typealg.gamma(4))))
        g6 = typealg.gamma(6)
        rho = bf.block_permutation((0, 2, 1, 3), (1, 2, 2, 1))
        assert g == bf.join(g6, bf.permute(g6, rho))
        assert poset.reconstruct(poset.decompose(g)) == g

    return [
        ("theorem graded (n <= 4)", graded),
        ("decomposition roundtrip (n <= 4)", roundtrip),
        ("comb-to-comb example", comb_to_comb),
    ]


def _suite_quantum(seed: int):
    def channel_dims():
        obj = quantum.state_object(2)
        h = quantum.hom_q(obj, obj)
        assert h.space.dim == 13 and abs(h.c - 2.0) < 1e-12
        aff = quantum.channel_space(2, 2)
        assert aff.dim == 12

    def oracle_gamma2():
        objs = [quantum.qubit(), quantum.qubit()]
        f = typealg.gamma(2)
        _, aff = quantum.build_Sf(f, _conjugated(f, objs))
        comb = quantum.comb_oracle(f, objs)
        assert linal.aff_equal(aff, comb, 1e-8)

    def cptp_members():
        for s in range(20):
            x = quantum.random_cptp(2, 2, seed + s)
            assert quantum.is_channel_member(x, 2, 2)
            assert not quantum.is_channel_member(1.5 * x, 2, 2)

    def lattice():
        objs = [quantum.qubit(), quantum.qubit()]
        f = typealg.gamma(2)
        g = bf.permute(f, (1, 0))
        assert quantum.projector_lattice_check(f, g, objs).ok

    return [
        ("qubit channel dims (d=12, c=2)", channel_dims),
        ("comb oracle gamma_2", oracle_gamma2),
        ("random CPTP membership", cptp_members),
        ("projector lattice", lattice),
    ]


def _conjugated(f: bf.BoolFun, objs):
    io = typealg.io_sets(f)
    return [
        objs[i] if (io.outputs >> i) & 1 else objs[i].conjugate()
        for i in range(f.n)
    ]


def cmd_verify(args) -> int:
    suites = {
        "boolean": _suite_boolean,
        "types": _suite_types,
        "posets": _suite_posets,
        "quantum": _suite_quantum,
    }
    if args.suite == "all":
        names = ["boolean", "types", "posets", "quantum"]
    elif args.suite in suites:
        names = [args.suite]
    else:
        print(f"unknown suite {args.suite!r}; choose from boolean, types, posets, quantum, all",
              file=sys.stderr)
        return 2
    results: list[bool] = []
    for name in names:
        for check_name, fn in suites[name](args.seed):
            _check(f"{name}/{check_name}", fn, results)
    print(f"{sum(results)}/{len(results)} checks passed")
    return 0 if all(results) else 1


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hotc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, infiles: bool = True):
        if infiles:
            p.add_argument("--in", dest="infile", action="append", default=[],
                           metavar="FILE", help="input BoolFun JSON file")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--dot", metavar="FILE", help="write DOT here ('-' = stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=linal.EQ_TOL)
        p.add_argument("--enum-cap", dest="enum_cap", type=int, default=None)
        p.add_argument("--n", type=int, default=2)
        p.add_argument("--dims", default="2,2",
                       help="leaf dims, e.g. 2,2 or 2:1.5,p2 (p = classical)")
        p.add_argument("--expr", default=None, help="type expression s-expression")

    for name in (
        "enumerate", "is-type", "mobius", "from-mobius", "poset", "p0",
        "decompose", "structure", "comb-info", "causal", "gamma",
        "expr-type", "quantum-space", "channel-check",
    ):
        common(sub.add_parser(name))
    vp = sub.add_parser("verify")
    vp.add_argument("suite", choices=["boolean", "types", "posets", "quantum", "all"])
    common(vp, infiles=False)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "enumerate": cmd_enumerate,
        "is-type": cmd_is_type,
        "mobius": cmd_mobius,
        "from-mobius": cmd_from_mobius,
        "poset": lambda a: cmd_poset(a, project=False),
        "p0": lambda a: cmd_poset(a, project=True),
        "decompose": cmd_decompose,
        "structure": cmd_structure,
        "comb-info": cmd_comb_info,
        "causal": cmd_causal,
        "gamma": cmd_gamma,
        "expr-type": cmd_expr_type,
        "quantum-space": cmd_quantum_space,
        "channel-check": cmd_channel_check,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (typealg.NotAType, DomainError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
