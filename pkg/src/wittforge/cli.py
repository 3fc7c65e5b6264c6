"""Command line front end.

Every subcommand prints JSON on stdout. Domain errors are reported as a
JSON object on stderr with exit status 1; usage errors exit with 2. All
randomness comes from ``--seed`` (falling back to ``$WITTFORGE_SEED``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .backforth import ef_game
from .battery import run_all
from .errors import WittforgeError
from .gf2k import FiniteField, least_trace_one
from .isometry import is_isometric, witt_extend
from .quadgeom import QPoint, QuadraticGeometry, extend_scalars_geom
from .quadspace import QuadraticSpace, Vector, extend_scalars_space
from .termlang import equiv_oracle, eval_term, free_vars, normalize_term, parse_term, to_sexpr
from .wittdecomp import arf_defect, defect_oracle, witt_decompose


class InputError(WittforgeError):
    pass


def _load(arg: str):
    """Inline JSON or a path to a JSON file."""
    text = arg.strip()
    try:
        if text.startswith(("{", "[")):
            return json.loads(text)
        return json.loads(Path(arg).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {arg}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {arg}: {exc}") from exc


def _space(arg: str) -> QuadraticSpace:
    return QuadraticSpace.from_json(_load(arg))


def _geometry(arg: str) -> QuadraticGeometry:
    return QuadraticGeometry.from_json(_load(arg))


def _model(arg: str):
    data = _load(arg)
    if "q0diag" in data or "omega0" in data:
        return QuadraticGeometry.from_json(data)
    return QuadraticSpace.from_json(data)


def _vectors(field, arg: str) -> list[Vector]:
    return [Vector.from_json(field, v) for v in _load(arg)]


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("WITTFORGE_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise InputError(f"WITTFORGE_SEED is not an integer: {env!r}") from exc


def _value_json(x):
    return x.to_json()


def _parse_value(model: QuadraticGeometry, sort: str, data):
    F = model.field
    if sort == "K":
        return F(data)
    v = Vector.from_json(F, data)
    return v if sort == "V" else QPoint(v)


# -- subcommands ----------------------------------------------------------------

def cmd_field_info(args):
    modulus = _load(args.modulus) if args.modulus else None
    F = FiniteField(args.k, modulus)
    gen = F.gen
    return {
        "field": F.to_json(),
        "order": F.order,
        "least_trace_one": least_trace_one(F).to_json(),
        "generator_degree": gen.degree(),
        "trace_of_generator": gen.trace(),
    }


def cmd_decompose(args):
    return witt_decompose(_space(args.space)).to_json()


def cmd_defect(args):
    S = _space(args.space)
    out = {"arf_defect": arf_defect(S)}
    if args.oracle:
        out["defect_oracle"] = defect_oracle(S)
    return out


def cmd_isometry(args):
    iso = is_isometric(_space(args.a), _space(args.b))
    return {"isometric": iso is not None, "isometry": None if iso is None else iso.to_json()}


def cmd_witt_extend(args):
    S = _space(args.space)
    T = _space(args.target) if args.target else None
    dom = _vectors(S.field, args.dom)
    img = _vectors(S.field, args.img)
    return witt_extend(S, dom, img, target=T, rng=np.random.default_rng(_seed(args))).to_json()


def cmd_extend_scalars(args):
    modulus = _load(args.modulus) if args.modulus else None
    target = FiniteField(args.k, modulus)
    if args.geometry:
        return extend_scalars_geom(_geometry(args.geometry), target).to_json()
    if not args.space:
        raise InputError("give --space or --geometry")
    return extend_scalars_space(_space(args.space), target).to_json()


def cmd_geometry_build(args):
    S = _space(args.space)
    omega = {"auto": "auto", "none": None, "0": 0, "1": 1}[args.omega]
    return QuadraticGeometry(S, omega0=omega).to_json()


def cmd_realize_form(args):
    G = _geometry(args.geometry)
    U = _vectors(G.field, args.U)
    targets = [G.field(t) for t in _load(args.targets)]
    q = G.realize_form(U, targets)
    return {"qpoint": q.to_json(), "values": [G.eval_Q(q, u).to_json() for u in U]}


def cmd_flip_defect(args):
    G = _geometry(args.geometry)
    q = QPoint(Vector.from_json(G.field, _load(args.q))) if args.q else G.base
    U = _vectors(G.field, args.U) if args.U else []
    p = G.flip_defect(q, U)
    return {"qpoint": p.to_json(), "omega_before": G.omega_eval(q), "omega_after": G.omega_eval(p)}


def cmd_ef_game(args):
    M = _model(args.m)
    N = _model(args.n)
    return ef_game(M, N, args.rounds, _seed(args), adversary=args.adversary).to_json()


def cmd_normalize(args):
    t = parse_term(args.term)
    return {"input": to_sexpr(t), "normal": to_sexpr(normalize_term(t))}


def cmd_eval_term(args):
    G = _geometry(args.geometry)
    t = parse_term(args.term)
    sorts = free_vars(t)
    raw = _load(args.assign) if args.assign else {}
    asg = {name: _parse_value(G, sorts[name], val) for name, val in raw.items() if name in sorts}
    qs = QPoint(Vector.from_json(G.field, _load(args.qstar))) if args.qstar else None
    val = eval_term(t, G, asg, qs)
    return {"sort": t.sort, "value": _value_json(val)}


def cmd_equiv(args):
    v = equiv_oracle(parse_term(args.t1), parse_term(args.t2), args.trials, _seed(args))
    return v.to_json()


def cmd_selftest(args):
    results = run_all(scale=0.2 if args.quick else 1.0, echo=lambda s: print(s, file=sys.stderr))
    lines = [{"criterion": r.number, "name": r.name, "passed": r.passed, "detail": r.detail} for r in results]
    return {"passed": all(r.passed for r in results), "checks": lines}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wittforge", description="Quadratic forms over GF(2^k): decomposition, isometries, geometries, games and terms.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--output", "-o", help="write JSON here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(fn=fn)
        sp.add_argument("--seed", type=int, default=None, help="RNG seed (default $WITTFORGE_SEED or 0)")
        return sp

    sp = add("field-info", cmd_field_info, "describe GF(2^k)")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--modulus", help="little-endian bit list (JSON), default: shipped modulus")

    sp = add("decompose", cmd_decompose, "Witt decomposition of a space")
    sp.add_argument("--space", required=True)

    sp = add("defect", cmd_defect, "Witt defect of a space")
    sp.add_argument("--space", required=True)
    sp.add_argument("--oracle", action="store_true", help="also run the brute-force oracle")

    sp = add("isometry", cmd_isometry, "test two spaces for isometry")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)

    sp = add("witt-extend", cmd_witt_extend, "extend a partial isometry")
    sp.add_argument("--space", required=True)
    sp.add_argument("--target", help="target space (default: the source space)")
    sp.add_argument("--dom", required=True, help="JSON list of domain vectors")
    sp.add_argument("--img", required=True, help="JSON list of image vectors")

    sp = add("extend-scalars", cmd_extend_scalars, "extend a space or geometry to GF(2^k)")
    sp.add_argument("--space")
    sp.add_argument("--geometry")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--modulus")

    sp = add("geometry-build", cmd_geometry_build, "build a geometry from a space")
    sp.add_argument("--space", required=True)
    sp.add_argument("--omega", choices=["auto", "none", "0", "1"], default="auto")

    sp = add("realize-form", cmd_realize_form, "find a form with given values on U")
    sp.add_argument("--geometry", required=True)
    sp.add_argument("--U", required=True)
    sp.add_argument("--targets", required=True)

    sp = add("flip-defect", cmd_flip_defect, "flip omega while keeping values on U")
    sp.add_argument("--geometry", required=True)
    sp.add_argument("--q", help="translate vector of the form (default: base form)")
    sp.add_argument("--U")

    sp = add("ef-game", cmd_ef_game, "play an EF game between two models")
    sp.add_argument("--m", required=True)
    sp.add_argument("--n", required=True)
    sp.add_argument("--rounds", type=int, required=True)
    sp.add_argument("--adversary", choices=["random", "greedy_singular"], default="random")

    sp = add("normalize", cmd_normalize, "rewrite a term into atom normal form")
    sp.add_argument("--term", required=True)

    sp = add("eval-term", cmd_eval_term, "evaluate a term in a geometry")
    sp.add_argument("--term", required=True)
    sp.add_argument("--geometry", required=True)
    sp.add_argument("--assign", help="JSON object: variable -> value")
    sp.add_argument("--qstar", help="translate vector of q* (default: base form)")

    sp = add("equiv", cmd_equiv, "random-model equivalence check of two terms")
    sp.add_argument("--t1", required=True)
    sp.add_argument("--t2", required=True)
    sp.add_argument("--trials", type=int, default=50)

    sp = add("selftest", cmd_selftest, "run the full check battery")
    sp.add_argument("--quick", action="store_true", help="smaller samples")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.fn(args)
    except (WittforgeError, ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, WittforgeError):
            err = exc.to_json()
        else:
            err = {"error": "InvalidInput", "message": str(exc)}
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return 1
    text = json.dumps(result, sort_keys=True)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    if args.command == "selftest" and not result["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
