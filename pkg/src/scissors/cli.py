"""Command-line front end.

Every subcommand prints one JSON document on stdout (batch subcommands print
JSON lines).  Exit codes: 0 success, 1 usage error, 2 domain error with an
error document on stdout.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from . import __version__
from .assembler import DIAGRAMMATIC, FUNCTIONAL, ON_CUT, check_assembler_axioms, parse_spec
from .constructors import (
    conjugator_from_disjoint,
    construct_congruence,
    construct_embedding_ea,
    construct_embedding_squeeze,
)
from .groups import ScissorsEmbedding, compose, element_from_json, invert, verify
from .invariants import check_k1_relations, rec_invariant, saf
from .ktheory import (
    GradedAb,
    kunneth_smash,
    omega_infty_poincare,
    pt_group_1d,
    smash_power,
    two_term_homology,
    wedge_generator_dims,
)
from .polytopes import Box, RectPolytope, volume
from .scalars import CoefficientGroup, parse_scalar, scalar_to_json
from .stability import check_connectivity_bound

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- input parsing --------------------------------------------------------------------


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {path}: {exc}") from exc


def _json_or_file(value: str):
    """Inline JSON, or a path to a JSON file."""
    s = value.strip()
    if s[:1] in "[{":
        try:
            return json.loads(s)
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad inline JSON: {exc}") from exc
    return _read_json(value)


_LOCAL_RE = re.compile(r"^Z\[1/(\d+)\](?::(.*))?$")


def parse_gamma(text: str) -> CoefficientGroup:
    """``Q``, ``1,sqrt2`` (Q-span), ``Z[1/d]`` or ``Z[1/d]:1,sqrt2``, ``Z:1,sqrt2`` (lattice)."""
    s = text.replace(" ", "")
    if s in ("Q", "1", ""):
        return CoefficientGroup.rationals()
    m = _LOCAL_RE.match(s)
    try:
        if m:
            extra = [b for b in (m.group(2) or "").split(",") if b and b != "1"]
            return CoefficientGroup.localization(int(m.group(1)), *extra)
        if s.startswith("Z:"):
            return CoefficientGroup.lattice(*s[2:].split(","))
        return CoefficientGroup.q_span(*s.split(","))
    except ValueError as exc:
        raise UsageError(f"cannot parse coefficient group {text!r}: {exc}") from exc


def _spec(text: str | None, gamma: CoefficientGroup | None = None):
    if text is None:
        return None
    try:
        s = text.strip()
        if s[:1] != "{" and Path(s).is_file():
            return parse_spec(_read_json(s), gamma)
        return parse_spec(s, gamma)
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"cannot parse assembler spec {text!r}: {exc}") from exc


def _element(path: str, spec=None):
    obj = _read_json(path)
    try:
        return element_from_json(obj, spec)
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"malformed element file {path}: {exc}") from exc


def _box_text(s: str) -> RectPolytope:
    boxes = []
    for part in s.split(";"):
        ivs = re.findall(r"\[([^\]]*)\]", part)
        if not ivs:
            raise ValueError(f"no intervals in {part!r}")
        boxes.append(Box.of(*(tuple(parse_scalar(x) for x in iv.split(",")) for iv in ivs)))
    return RectPolytope(boxes[0].dim, tuple(boxes))


def _polytope(value: str) -> RectPolytope:
    """Boxes like ``[0,1]x[0,1/2];[2,3]x[0,1]``, or a JSON polytope (inline or file)."""
    s = value.strip()
    try:
        if s[:1] not in "[{" and Path(s).is_file():
            obj = _read_json(s)
        else:
            try:
                obj = json.loads(s)
            except json.JSONDecodeError:
                return _box_text(s)
        if isinstance(obj, dict):
            return RectPolytope.from_json(obj)
        if obj and all(isinstance(b, list) and b and isinstance(b[0], list) for b in obj):
            boxes = [Box.from_json(b) for b in obj]
            return RectPolytope(boxes[0].dim, tuple(boxes))
        return _box_text(s)
    except UsageError:
        raise
    except (ValueError, TypeError, KeyError, IndexError) as exc:
        raise UsageError(f"cannot parse polytope {value!r}: {exc}") from exc


def _scalar_list(text: str):
    try:
        return [parse_scalar(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _matrix(text: str):
    obj = _json_or_file(text)
    if not (isinstance(obj, list) and all(isinstance(r, list) for r in obj)):
        raise UsageError("multiplier must be a square integer matrix")
    if any(len(r) != len(obj) or not all(isinstance(v, int) for v in r) for r in obj):
        raise UsageError("multiplier must be a square integer matrix")
    return obj


def _graded(text: str) -> GradedAb:
    try:
        return GradedAb.from_json(_json_or_file(text))
    except (ValueError, TypeError, KeyError, AttributeError) as exc:
        raise UsageError(f"cannot parse graded group: {exc}") from exc


# -- output ---------------------------------------------------------------------------


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _certificate(f, source: RectPolytope, target: RectPolytope) -> dict:
    cert = {
        "pieces": f.piece_table(),
        "volume_source": str(volume(source)),
        "volume_target": str(volume(target)),
    }
    if isinstance(f, ScissorsEmbedding):
        comp = f.complement
        cert["volume_complement"] = str(volume(comp))
        cert["complement"] = str(comp)
    return cert


def _write_outputs(args, f, cert) -> None:
    if args.out:
        Path(args.out).write_text(_dump(f.to_json()) + "\n")
    if args.certificate:
        lines = [f"{k}: {v}" for k, v in cert.items() if k != "pieces"]
        lines += ["pieces:"] + [f"  {row}" for row in cert["pieces"]]
        Path(args.certificate).write_text("\n".join(lines) + "\n")


# -- subcommands ----------------------------------------------------------------------


def cmd_verify(args):
    f = _element(args.element, _spec(args.spec))
    errors = verify(f)
    if errors:
        return EXIT_DOMAIN, {"ok": False, "error": errors[0]["error"], "errors": errors}
    return EXIT_OK, {"ok": True, "errors": []}


def _order(args):
    return FUNCTIONAL if args.order == "functional" else DIAGRAMMATIC


def cmd_compose(args):
    spec = _spec(args.spec)
    elements = [_element(p, spec) for p in args.elements]
    acc = elements[0]
    for g in elements[1:]:
        acc = compose(acc, g, _order(args))
    if args.out:
        Path(args.out).write_text(_dump(acc.to_json()) + "\n")
    return EXIT_OK, acc.to_json()


def cmd_invert(args):
    f = invert(_element(args.element, _spec(args.spec)))
    if args.out:
        Path(args.out).write_text(_dump(f.to_json()) + "\n")
    return EXIT_OK, f.to_json()


def cmd_apply(args):
    f = _element(args.element, _spec(args.spec))
    y = f.apply(_scalar_list(args.point))
    if y is ON_CUT:
        return EXIT_OK, {"on_cut": True, "image": None}
    return EXIT_OK, {"on_cut": False, "image": [str(v) for v in y],
                     "exact": [scalar_to_json(v) for v in y]}


def cmd_embed(args):
    spec = _spec(args.spec)
    P, Q = _polytope(args.source), _polytope(args.target)
    build = construct_embedding_squeeze if args.method == "squeeze" else construct_embedding_ea
    e = build(P, Q, spec)
    cert = _certificate(e, P, Q)
    _write_outputs(args, e, cert)
    return EXIT_OK, {"element": e.to_json(), "certificate": cert}


def cmd_congruence(args):
    spec = _spec(args.spec)
    P, Q = _polytope(args.source), _polytope(args.target)
    c = construct_congruence(P, Q, spec)
    cert = _certificate(c, P, Q)
    _write_outputs(args, c, cert)
    return EXIT_OK, {"element": c.to_json(), "certificate": cert}


def cmd_conjugator(args):
    spec = _spec(args.spec)
    h = conjugator_from_disjoint(_element(args.first, spec), _element(args.second, spec))
    if args.out:
        Path(args.out).write_text(_dump(h.to_json()) + "\n")
    return EXIT_OK, h.to_json()


def _gamma_for(args, f):
    if args.gamma:
        return parse_gamma(args.gamma)
    return f.spec.translations[0]


def cmd_saf(args):
    gamma = parse_gamma(args.gamma) if args.gamma else None
    f = _element(args.element, _spec(args.spec, gamma))
    return EXIT_OK, saf(f, _gamma_for(args, f)).to_json()


def cmd_rec_invariant(args):
    gamma = parse_gamma(args.gamma) if args.gamma else None
    f = _element(args.element, _spec(args.spec, gamma))
    gammas = [gamma] * f.dim if gamma else list(f.spec.translations)
    return EXIT_OK, rec_invariant(f, gammas).to_json()


def cmd_k1_relations(args):
    report = check_k1_relations(parse_gamma(args.gamma), seed=args.seed, count=args.count,
                                complexity=args.complexity, counterexample_path=args.counterexample)
    return (EXIT_OK if report["ok"] else EXIT_DOMAIN), report


def cmd_ktheory_1d(args):
    M = _matrix(args.multiplier)
    if args.report:
        H, report = two_term_homology(M, localize=args.localize, with_report=True)
        return EXIT_OK, {"homology": H.to_json(), "report": report}
    return EXIT_OK, two_term_homology(M, localize=args.localize).to_json()


def cmd_kunneth(args):
    X = _graded(args.left)
    if args.power is not None:
        if args.right:
            raise UsageError("--power takes a single graded group")
        return EXIT_OK, smash_power(X, args.power).to_json()
    if not args.right:
        raise UsageError("need --right or --power")
    return EXIT_OK, kunneth_smash(X, _graded(args.right)).to_json()


def _dims(text: str) -> dict[int, int]:
    out = {}
    try:
        for part in text.split(","):
            q, m = part.split(":")
            out[int(q)] = int(m)
    except ValueError as exc:
        raise UsageError("dims look like '1:2,2:1' (degree:multiplicity)") from exc
    return out


def cmd_poincare(args):
    if (args.dims is None) == (args.rank is None):
        raise UsageError("give exactly one of --dims and --rank")
    gens = _dims(args.dims) if args.dims else wedge_generator_dims(args.rank)
    series = omega_infty_poincare(gens, args.degree)
    return EXIT_OK, {"generators": {str(k): v for k, v in sorted(gens.items())}, "dims": series}


def cmd_pt1d(args):
    group, iso = pt_group_1d(_scalar_list(args.cuts))
    return EXIT_OK, {"group": group.to_json(), "iso_check": iso}


def cmd_complex(args):
    try:
        X, B = (int(v) for v in args.params.split(","))
    except ValueError as exc:
        raise UsageError("params look like 'X,B'") from exc
    return EXIT_OK, check_connectivity_bound(X, B, args.model, args.vertex_cap)


def cmd_axioms(args):
    return EXIT_OK, check_assembler_axioms(_spec(args.spec), samples=args.samples, seed=args.seed)


def cmd_selftest(args):
    from .acceptance import CHECKS

    wanted = set(args.only or [])
    ok = True
    for number, check in enumerate(CHECKS, start=1):
        if wanted and number not in wanted:
            continue
        r = check()
        ok &= r.ok
        line = {"criterion": r.number, "title": r.title, "ok": r.ok, "detail": r.detail}
        print(_dump(line), file=args.stream, flush=True)
    return (EXIT_OK if ok else EXIT_DOMAIN), None


COMMANDS = {
    "verify": cmd_verify,
    "compose": cmd_compose,
    "invert": cmd_invert,
    "apply": cmd_apply,
    "embed": cmd_embed,
    "congruence": cmd_congruence,
    "conjugator": cmd_conjugator,
    "saf": cmd_saf,
    "rec-invariant": cmd_rec_invariant,
    "k1-relations": cmd_k1_relations,
    "ktheory-1d": cmd_ktheory_1d,
    "kunneth": cmd_kunneth,
    "poincare": cmd_poincare,
    "pt1d": cmd_pt1d,
    "complex": cmd_complex,
    "axioms": cmd_axioms,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="scissors", description="Exact scissors-congruence computations.")
    p.add_argument("--version", action="version", version=f"scissors {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def spec_opt(sp, required=False):
        sp.add_argument("--spec", required=required,
                        help="preset such as iet(1,sqrt2), rec(2), higman(3), v-tau, or JSON / file")

    s = sub.add_parser("verify", help="check an element file")
    s.add_argument("element")
    spec_opt(s)

    s = sub.add_parser("compose", help="compose element files")
    s.add_argument("elements", nargs="+")
    s.add_argument("--order", choices=("diagrammatic", "functional"), default="diagrammatic",
                   help="diagrammatic: first file acts first")
    s.add_argument("--out")
    spec_opt(s)

    s = sub.add_parser("invert", help="inverse of an element")
    s.add_argument("element")
    s.add_argument("--out")
    spec_opt(s)

    s = sub.add_parser("apply", help="evaluate an element at a point")
    s.add_argument("element")
    s.add_argument("--point", required=True, help="comma separated coordinates")
    spec_opt(s)

    for name, helptext in (("embed", "construct a scissors embedding"),
                           ("congruence", "construct a scissors congruence")):
        s = sub.add_parser(name, help=helptext)
        spec_opt(s, required=True)
        s.add_argument("--source", required=True, help="polytope: [0,1]x[0,1];[2,3]x[0,1] or JSON")
        s.add_argument("--target", required=True)
        s.add_argument("--out", help="write the element file here")
        s.add_argument("--certificate", help="write a human-readable certificate here")
        if name == "embed":
            s.add_argument("--method", choices=("ea", "squeeze"), default="ea")

    s = sub.add_parser("conjugator", help="swap conjugator of two disjoint embeddings")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--out")
    spec_opt(s)

    for name in ("saf", "rec-invariant"):
        s = sub.add_parser(name, help="abelianization invariant of an exchange map")
        spec_opt(s)
        s.add_argument("--gamma", help="coefficient group, e.g. 1,sqrt2 or Z[1/2]")
        s.add_argument("--element", required=True)

    s = sub.add_parser("k1-relations", help="sample presentation relations under saf")
    s.add_argument("--gamma", default="1,sqrt2")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=100)
    s.add_argument("--complexity", type=int, default=3)
    s.add_argument("--counterexample", help="write violations here")

    s = sub.add_parser("ktheory-1d", help="homology of a coefficient lattice with multiplier")
    s.add_argument("--multiplier", required=True, help='integer matrix as JSON, e.g. "[[5]]"')
    s.add_argument("--localize", action="store_true", help="invert the primes of det")
    s.add_argument("--report", action="store_true", help="include kernel/cokernel pieces")

    s = sub.add_parser("kunneth", help="homology of a smash product")
    s.add_argument("--left", required=True, help='graded group JSON, e.g. \'{"1":{"torsion":[2]}}\'')
    s.add_argument("--right")
    s.add_argument("--power", type=int, help="smash power of --left")

    s = sub.add_parser("poincare", help="dimensions of the free graded-commutative algebra")
    s.add_argument("--dims", help="generator dims as degree:count, e.g. 1:2,2:1")
    s.add_argument("--rank", type=int, help="use the exterior-power generators of Q^rank")
    s.add_argument("--degree", type=int, default=10)

    s = sub.add_parser("pt1d", help="one-dimensional polytope group versus a wedge of circles")
    s.add_argument("--cuts", required=True, help="comma separated cut points")

    s = sub.add_parser("complex", help="destabilisation complex connectivity check")
    s.add_argument("--model", choices=("finite-set", "grid-interval"), default="finite-set")
    s.add_argument("--params", required=True, help="X,B (sizes in points or grid cells)")
    s.add_argument("--vertex-cap", type=int, default=5000)

    s = sub.add_parser("axioms", help="check assembler axioms on samples")
    spec_opt(s, required=True)
    s.add_argument("--samples", type=int, default=5)
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("selftest", help="run the acceptance checks (JSON lines)")
    s.add_argument("--only", type=int, action="append", help="criterion number (repeatable)")
    return p


def _error_doc(exc: BaseException) -> dict:
    doc = {"error": type(exc).__name__, "message": str(exc)}
    witness = getattr(exc, "witness", None)
    if witness is not None:
        doc["witness"] = str(witness)
    errors = getattr(exc, "errors", None)
    if isinstance(errors, list):
        doc["errors"] = errors
    return doc


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.stream = out
        code, result = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError, AssertionError, KeyError) as exc:
        print(_dump(_error_doc(exc)), file=out)
        return EXIT_DOMAIN
    if result is not None:
        print(_dump(result), file=out)
    return code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
