"""Command-line interface. Every command reads a group document (file or stdin)
and writes one JSON report to stdout.

Exit status: 0 on success, 2 when a verification fails, 1 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .crystal import CrystGroup, group_from_document, is_orientable, is_torsion_free, verify_cryst
from .errors import FlatLeavesError, SchemaError
from .intersection import (
    ComplementaryPair,
    intersection_inclusion_map,
    leaf_intersection_count,
    validate_pair,
)
from .invariant import (
    DEFAULT_BOUND,
    find_proper_invariant,
    invariant_complement,
    is_invariant,
    minimal_decomposition,
)
from .klein import build_klein
from .lattice import Subspace, saturate, subspace_to_json
from .leaves import (
    CosetLeaf,
    coset_stabilizer,
    find_generic_coset,
    is_generic,
    kernel_entries,
    leaf_exact_sequence,
    leaf_space_orbifold,
)
from .linalg import parse_rational, vector_to_json

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class UsageError(FlatLeavesError):
    code = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 by default
        raise UsageError(message)


def _emit(obj: dict, out) -> None:
    out.write(json.dumps(obj, sort_keys=True, indent=2))
    out.write("\n")


def _read_group(path: Optional[str], stdin) -> CrystGroup:
    if path in (None, "-"):
        text = stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"input is not JSON: {exc}") from exc
    if isinstance(doc, dict) and "group" in doc and "dim" not in doc:
        doc = doc["group"]  # output of the klein command
    return group_from_document(doc)


def _parse_vector(text: str, n: int) -> tuple:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if len(parts) != n:
        raise UsageError(f"expected {n} comma-separated rationals, got {len(parts)}")
    return tuple(parse_rational(p) for p in parts)


def _select_subspace(choice: Optional[str], g: CrystGroup, bound: int) -> Subspace:
    """``0`` is the subspace found by ``reduce``, ``1`` its complement; otherwise
    an inline list of columns such as ``"1,0,0;0,1,0"``."""
    choice = "0" if choice is None else choice.strip()
    if choice in ("0", "1"):
        if g.dim < 2:
            raise UsageError("dimension 1 has no proper subspaces")
        found = find_proper_invariant(g, bound)
        if found is None:
            raise UsageError(f"no proper invariant subspace found up to bound {bound}; pass one inline")
        return found.base if choice == "0" else invariant_complement(found, g).base
    cols = [_parse_vector(c, g.dim) for c in choice.split(";") if c.strip()]
    if not cols:
        raise UsageError("empty subspace specification")
    sub = saturate(cols, g.dim)
    if not is_invariant(sub, g):
        from .errors import NotInvariant

        raise NotInvariant("the given subspace is not invariant under the point group")
    return sub


def _leaf(args, g: CrystGroup, sub: Subspace) -> CosetLeaf:
    if args.coset is None:
        return find_generic_coset(sub, g, seed=args.seed)
    return CosetLeaf(sub, _parse_vector(args.coset, g.dim))


def cmd_verify(args, g: CrystGroup) -> tuple[dict, int]:
    rep = verify_cryst(g)
    out = rep.to_json()
    tf, witness = is_torsion_free(g) if rep.passed else (False, None)
    out["torsion_free"] = tf
    if witness is not None:
        out["torsion_witness"] = {"matrix": witness.linear.tolist(), "translation": vector_to_json(witness.translation)}
    out["orientable"] = is_orientable(g) if rep["closure"].passed else None
    out["point_group_order"] = g.order
    out["bieberbach"] = rep.passed and tf
    return out, EXIT_OK if out["bieberbach"] else EXIT_FAILED


def cmd_reduce(args, g: CrystGroup) -> tuple[dict, int]:
    found = find_proper_invariant(g, args.bound)
    if found is None:
        return {"found": False, "bound": args.bound}, EXIT_OK
    comp = invariant_complement(found, g)
    return {
        "found": True,
        "bound": args.bound,
        "subspace": subspace_to_json(found.base),
        "complement": subspace_to_json(comp.base),
    }, EXIT_OK


def cmd_complement(args, g: CrystGroup) -> tuple[dict, int]:
    sub = _select_subspace(args.subspace, g, args.bound)
    comp = invariant_complement(sub, g)
    return {"subspace": subspace_to_json(sub), "complement": subspace_to_json(comp.base)}, EXIT_OK


def cmd_decompose(args, g: CrystGroup) -> tuple[dict, int]:
    dec = minimal_decomposition(g, bound=args.bound)
    return dec.to_json(), EXIT_OK


def cmd_stabilizer(args, g: CrystGroup) -> tuple[dict, int]:
    sub = _select_subspace(args.subspace, g, args.bound)
    leaf = _leaf(args, g, sub)
    stab = coset_stabilizer(leaf, g)
    out = {"leaf": leaf.to_json(), "stabilizer": stab.to_json(g)}
    out["generic"] = stab.entries == kernel_entries(sub, g).entries
    return out, EXIT_OK


def cmd_leaf(args, g: CrystGroup) -> tuple[dict, int]:
    sub = _select_subspace(args.subspace, g, args.bound)
    seq = leaf_exact_sequence(_leaf(args, g, sub), g)
    return seq.to_json(), EXIT_OK


def cmd_generic_coset(args, g: CrystGroup) -> tuple[dict, int]:
    sub = _select_subspace(args.subspace, g, args.bound)
    leaf = find_generic_coset(sub, g, seed=args.seed)
    return {"leaf": leaf.to_json(), "seed": args.seed, "generic": is_generic(leaf, g)}, EXIT_OK


def cmd_intersect(args, g: CrystGroup) -> tuple[dict, int]:
    v1 = _select_subspace(args.subspace, g, args.bound)
    v2 = _select_subspace(args.second, g, args.bound) if args.second else invariant_complement(v1, g).base
    a = find_generic_coset(v1, g, seed=args.seed)
    b = find_generic_coset(v2, g, seed=args.seed + 1)
    pair = ComplementaryPair(v1, v2, a, b)
    val = validate_pair(pair, g)
    out = {"validation": val.to_json(), "leaf_a": a.to_json(), "leaf_b": b.to_json()}
    if not val.passed:
        return out, EXIT_FAILED
    rep = leaf_intersection_count(pair, g)
    inc = intersection_inclusion_map(pair, g)
    out.update(rep.to_json())
    out["inclusion_map"] = inc.to_json()
    ok = rep.consistent and inc.passed
    return out, EXIT_OK if ok else EXIT_FAILED


def cmd_orbifold(args, g: CrystGroup) -> tuple[dict, int]:
    sub = _select_subspace(args.subspace, g, args.bound)
    return leaf_space_orbifold(sub, g).to_json(), EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "reduce": cmd_reduce,
    "complement": cmd_complement,
    "decompose": cmd_decompose,
    "stabilizer": cmd_stabilizer,
    "leaf": cmd_leaf,
    "generic-coset": cmd_generic_coset,
    "intersect": cmd_intersect,
    "orbifold": cmd_orbifold,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flatleaves", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("input", nargs="?", default="-", help="group document (default: stdin)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
        p.add_argument("--subspace", help="0 = reduce result, 1 = its complement, or columns '1,0;0,1'")
        p.add_argument("--second", help="second subspace for intersect (default: complement)")
        p.add_argument("--coset", help="basepoint as 'p/q,...' (default: a generic one from --seed)")
    k = sub.add_parser("klein")
    k.add_argument("--n", type=int, required=True)
    return parser


def run(argv: Optional[Sequence[str]] = None, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        if args.command == "klein":
            fx = build_klein(args.n)
            _emit({"group": fx.group.to_document(), "predictions": fx.expected}, stdout)
            return EXIT_OK
        if args.bound < 0:
            raise UsageError("--bound must be nonnegative")
        g = _read_group(args.input, stdin)
        report, status = COMMANDS[args.command](args, g)
    except FlatLeavesError as exc:
        _emit({"error": {"code": exc.code, "message": str(exc)}}, stdout)
        return EXIT_USAGE
    _emit(report, stdout)
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    raise SystemExit(main())
