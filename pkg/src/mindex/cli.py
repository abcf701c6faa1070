"""Command-line front end with deterministic, machine-readable output."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import checks
from .enumerator import (
    CapTooLarge,
    PopulationClass,
    counterterm_set,
    enumerate_below,
    filter_symmetric,
    sorted_canonically,
)
from .eqspec import SchemaError, UnknownSpec, ValidationError, builtin_spec, parse_spec, render_spec
from .homog import Homogeneity
from .multiindex import bracket, homogeneity, noise_homogeneity, to_json
from .model_eqs import equation_text, model_equations, model_rhs, renormalized_equation
from .derivations import apply_dpartial
from .trees import graft, parse_tree, psi, up


def _load_spec(args):
    if args.builtin:
        return builtin_spec(args.builtin)
    if args.spec:
        with open(args.spec) as fh:
            return parse_spec(json.load(fh))
    raise SystemExit("one of --builtin NAME or --spec FILE is required")


def _parse_cap(text: str) -> Homogeneity:
    if "," in text:
        base, kappa = text.split(",", 1)
        return Homogeneity(Fraction(base), Fraction(kappa))
    return Homogeneity(Fraction(text))


def _beta_record(beta, spec) -> dict:
    return {
        "multiindex": to_json(beta),
        "pretty": str(beta),
        "homogeneity": homogeneity(beta, spec).to_json(),
        "bracket": bracket(beta),
        "noise_hom": noise_homogeneity(beta),
    }


def _emit(obj, args) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=False)
    sys.stdout.write("\n")


def cmd_validate(args) -> int:
    try:
        spec = _load_spec(args)
    except (SchemaError, ValidationError, UnknownSpec) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    _emit(render_spec(spec), args)
    return 0


def cmd_enumerate(args) -> int:
    spec = _load_spec(args)
    cls = PopulationClass(args.cls)
    betas = enumerate_below(spec, _parse_cap(args.cap), cls, node_budget=args.node_budget)
    _emit([_beta_record(b, spec) for b in sorted_canonically(betas, spec)], args)
    return 0


def cmd_counterterms(args) -> int:
    spec = _load_spec(args)
    spec = spec.with_symmetry(
        noise_parity_even=args.noise_even,
        reflect_axes=spec.spatial_axes() if args.spatial else (),
    )
    betas = filter_symmetric(counterterm_set(spec, node_budget=args.node_budget), spec)
    _emit([_beta_record(b, spec) for b in sorted_canonically(betas, spec)], args)
    return 0


def cmd_model_eqs(args) -> int:
    spec = _load_spec(args)
    doc = renormalized_equation(spec, spatial=args.spatial, noise_even=args.noise_even, merge=args.merge)
    if args.with_constants:
        eqs = model_equations(spec, doc["constants"])
    else:
        eqs = [(b, model_rhs(b, spec, None)) for b in doc["constants"]]
    out = []
    for beta, rhs in eqs:
        rec = {
            "component": _beta_record(beta, spec),
            "rhs": rhs.to_json(),
            "text": f"{spec.render.operator} Pi[{beta}] = {rhs.render('text')}",
        }
        if args.format == "latex":
            rec["latex"] = rhs.render("latex")
        out.append(rec)
    if args.format in ("text", "latex"):
        for rec in out:
            print(rec["text"] if args.format == "text" else rec.get("latex", rec["text"]))
        print("(model components are defined mod polynomials of matching degree)")
    else:
        _emit(out, args)
    return 0


def cmd_renormalized(args) -> int:
    spec = _load_spec(args)
    doc = renormalized_equation(spec, spatial=args.spatial, noise_even=args.noise_even, merge=args.merge)
    if args.format == "json":
        out = {
            "equation": equation_text(doc),
            "constants": [
                {
                    "constant": _beta_record(t["constant"], spec),
                    "functional": t["functional"].to_json(),
                    "merged": [{"ratio": str(q), "index": str(b)} for q, b in t["merged"]],
                }
                for t in doc["terms"]
            ],
        }
        _emit(out, args)
    else:
        style = "latex" if args.format == "latex" else "text"
        print(equation_text(doc, style))
        for t in doc["terms"]:
            print(f"  c[{t['constant']}] * ({t['functional'].render(style)})")
    return 0


def cmd_tree(args) -> int:
    spec = _load_spec(args) if (args.builtin or args.spec) else None
    labels = {}
    if spec is not None:
        labels = {ns.label.name: ns.label for ns in spec.noises}
    else:
        from .multiindex import NoiseLabel

        labels = {"xi": NoiseLabel("xi"), "0": NoiseLabel("0", True)}
    tree = parse_tree(args.tree, labels)
    if args.op == "psi":
        coeff, beta = psi(tree)
        _emit({"coefficient": str(coeff), "monomial": to_json(beta), "pretty": f"{coeff} * z^[{beta}]"}, args)
        return 0
    if args.op == "up":
        if spec is None:
            raise SystemExit("up needs --builtin/--spec")
        combo = up(args.axis, tree, spec)
    else:
        other = parse_tree(args.graft, labels)
        combo = graft(other, tuple(args.edge), tree, spec)
    _emit([{"coeff": str(c), "tree": str(t)} for t, c in sorted(combo.items(), key=lambda e: e[0].sort_key())], args)
    return 0


def cmd_op_matrix(args) -> int:
    spec = _load_spec(args)
    members, nbar, polys = checks.truncation_members(spec, _parse_cap(args.cap))
    cols = sorted(set(members) | set(nbar), key=lambda b: b.sort_key()) + polys
    if args.generator.startswith("b"):
        i = int(args.generator[1:])
        entries = [(b, g, c) for g in cols for b, c in apply_dpartial(i, g, spec).items()]
    else:
        raise SystemExit("generator must be b<axis> (pair generators via the library API)")
    for b, g, c in entries:
        print(f"({b} | {g}) = {c}")
    return 0


def cmd_check(args) -> int:
    spec = _load_spec(args)
    results = checks.run_all(spec, cap=_parse_cap(args.cap), seed=args.seed)
    ok = True
    for name, passed, detail in results:
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        ok = ok and passed
    return 0 if ok else 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mindex", description="multi-index renormalization structure engine")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, cap_default="0"):
        p.add_argument("--builtin", help="built-in spec name (gkpz, she_mult_1d, phi4_3)")
        p.add_argument("--spec", help="spec JSON file")
        p.add_argument("--cap", default=cap_default, help="homogeneity cap 'BASE[,KAPPA]'")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--node-budget", type=int, default=2_000_000)
        p.add_argument("--format", choices=("json", "text", "latex"), default="json")

    p = sub.add_parser("validate", help="parse and validate a spec")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("enumerate", help="population sets below a cap")
    common(p)
    p.add_argument("--class", dest="cls", choices=("N", "Nbar", "P"), default="N")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("counterterms", help="admissible counterterm index set")
    common(p)
    p.add_argument("--spatial", action="store_true")
    p.add_argument("--noise-even", action="store_true")
    p.set_defaults(func=cmd_counterterms)

    p = sub.add_parser("model-eqs", help="model equations with counterterms")
    common(p)
    p.add_argument("--spatial", action="store_true")
    p.add_argument("--noise-even", action="store_true")
    p.add_argument("--merge-redundant", dest="merge", action="store_true")
    p.add_argument("--with-constants", action="store_true", default=True)
    p.add_argument("--no-constants", dest="with_constants", action="store_false")
    p.set_defaults(func=cmd_model_eqs)

    p = sub.add_parser("renormalized", help="renormalized equation")
    common(p)
    p.add_argument("--spatial", action="store_true")
    p.add_argument("--noise-even", action="store_true")
    p.add_argument("--merge-redundant", dest="merge", action="store_true")
    p.set_defaults(func=cmd_renormalized)

    p = sub.add_parser("tree", help="tree operations (psi, graft, up)")
    common(p)
    p.add_argument("op", choices=("psi", "graft", "up"))
    p.add_argument("--tree", required=True, help="Xi(l; I[m](...), ...) or X[n]")
    p.add_argument("--graft", help="tree to graft (for op=graft)")
    p.add_argument("--edge", type=int, nargs="+", default=[0, 0], help="edge decoration")
    p.add_argument("--axis", type=int, default=2)
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("op-matrix", help="nonzero entries of a generator on a truncation")
    common(p)
    p.add_argument("--generator", required=True, help="b<axis>")
    p.set_defaults(func=cmd_op_matrix)

    p = sub.add_parser("check", help="run the property suites")
    common(p)
    p.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, ValidationError, UnknownSpec) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CapTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
