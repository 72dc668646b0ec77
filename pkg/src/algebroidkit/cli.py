"""Command-line verification workflows.

Every subcommand loads a model file, runs exact checks and prints one line
per check; the process exits 0 when everything passes, 1 when any residual
is found and 2 on input errors.  Reports are deterministic: exact
coefficients, canonical ordering, and the (non-deterministic) timings are
excluded from the canonical JSON written by --json.

The ALGEBROIDKIT_WORKERS environment variable sets the worker-thread count
used to fan out independent checks; report assembly order is fixed no matter
how the workers finish.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Tuple

from .algebra import validate_base_algebra
from .algebroid import (
    AlgebroidStructure,
    algebroid_jacobi_residual,
    anchor_morphism_residual,
    ce_differential,
    extract_structure,
    leibniz_residual,
)
from .errors import KitError, ParseError
from .fixtures import Rng, random_unipotent
from .geometry import (
    GeometricModel,
    build_frakD,
    build_kapranov,
    commutator_lemma_residual,
    duality_residual,
    frakD_square_report,
    retraction_residual,
    structure_from_geometry,
    transport_lemma_residual,
    validate_geometric_model,
)
from .modelio import parse_model
from .modules import validate_module
from .reports import (
    CheckResult,
    Report,
    ResidualEntry,
    residuals_from_algebra,
    residuals_from_module,
    residuals_from_sym,
    timed_check,
)
from .symtensor import conjugate, d0_derivation, mc_residual, square_components

EXIT_INPUT_ERROR = 2


def worker_count() -> int:
    raw = os.environ.get("ALGEBROIDKIT_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_checks(thunks: List[Callable[[], CheckResult]]) -> List[CheckResult]:
    """Evaluate independent checks, possibly on worker threads, in a fixed order."""
    n = worker_count()
    if n <= 1 or len(thunks) <= 1:
        return [t() for t in thunks]
    with ThreadPoolExecutor(max_workers=n) as pool:
        futures = [pool.submit(t) for t in thunks]
        return [f.result() for f in futures]


def _structure_of(model, caps) -> AlgebroidStructure:
    if isinstance(model, AlgebroidStructure):
        return model
    return structure_from_geometry(model)


def _require_geometric(model) -> GeometricModel:
    if not isinstance(model, GeometricModel):
        raise KitError("this command needs a geometric model file")
    return model


def _derivation_entries(D) -> List[ResidualEntry]:
    out: List[ResidualEntry] = []
    base = D.algebra.base
    for i in sorted(D.on_algebra):
        out.extend(residuals_from_sym(f"D({base.names[i]})", D.on_algebra[i]))
    for i in sorted(D.on_letters):
        out.extend(
            residuals_from_sym(f"D({D.algebra.letter_names[i]})", D.on_letters[i])
        )
    return out


def _structures_equal(S1: AlgebroidStructure, S2: AlgebroidStructure) -> bool:
    if set(S1.brackets) != set(S2.brackets) or set(S1.anchors) != set(S2.anchors):
        return False
    for n in S1.brackets:
        if S1.brackets[n].keys() != S2.brackets[n].keys():
            return False
        for key in S1.brackets[n]:
            if S1.brackets[n][key].items() != S2.brackets[n][key].items():
                return False
    for n in S1.anchors:
        if S1.anchors[n].keys() != S2.anchors[n].keys():
            return False
        for key in S1.anchors[n]:
            if S1.anchors[n][key].items() != S2.anchors[n][key].items():
                return False
    return True


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------


def cmd_validate(model, caps, args) -> Report:
    report = Report("validate", caps)

    def base_check():
        with timed_check("base-algebra") as t:
            problems = validate_base_algebra(model.base)
            return t.finish(not problems, detail="; ".join(problems[:5]))

    thunks = [base_check]
    if isinstance(model, AlgebroidStructure):
        def carrier_check():
            with timed_check("carrier-module") as t:
                problems = validate_module(model.carrier)
                return t.finish(not problems, detail="; ".join(problems[:5]))

        def structure_check():
            with timed_check("structure-tables") as t:
                problems = model.validate()
                return t.finish(not problems, detail="; ".join(problems[:5]))

        thunks += [carrier_check, structure_check]
    else:
        def modules_check():
            with timed_check("tangent-and-normal-modules") as t:
                problems = validate_module(model.tangent) + validate_module(model.normal)
                return t.finish(not problems, detail="; ".join(problems[:5]))

        def geometry_check():
            with timed_check("geometric-tensors") as t:
                problems = validate_geometric_model(model)
                return t.finish(not problems, detail="; ".join(problems[:5]))

        thunks += [modules_check, geometry_check]
    for result in run_checks(thunks):
        report.add(result)
    return report


def _arities(args, cap) -> List[int]:
    if args.arity is not None:
        return [args.arity]
    return list(range(1, cap + 1))


def cmd_jacobi(model, caps, args) -> Report:
    report = Report("jacobi", caps)
    S = _structure_of(model, caps)

    def check(n):
        def thunk():
            with timed_check(f"jacobi[n={n}]") as t:
                res = algebroid_jacobi_residual(S, n)
                entries = []
                for key in sorted(res):
                    label = "(" + ",".join(S.carrier.gen_names[i] for i in key) + ")"
                    entries.extend(residuals_from_module(label, res[key]))
                return t.finish(not res, entries)

        return thunk

    for result in run_checks([check(n) for n in _arities(args, S.bracket_cap)]):
        report.add(result)
    return report


def cmd_leibniz(model, caps, args) -> Report:
    report = Report("leibniz", caps)
    S = _structure_of(model, caps)

    def check(n):
        def thunk():
            with timed_check(f"leibniz[n={n}]") as t:
                res = leibniz_residual(S, n)
                entries = []
                for (key, b) in sorted(res):
                    label = (
                        "(" + ",".join(S.carrier.gen_names[i] for i in key) + ")|"
                        + S.base.names[b]
                    )
                    entries.extend(residuals_from_module(label, res[(key, b)]))
                return t.finish(not res, entries)

        return thunk

    for result in run_checks([check(n) for n in _arities(args, S.bracket_cap)]):
        report.add(result)
    return report


def cmd_anchor(model, caps, args) -> Report:
    report = Report("anchor", caps)
    S = _structure_of(model, caps)
    top = min(S.bracket_cap - 1, S.anchor_cap - 1)
    arities = [args.arity] if args.arity is not None else list(range(1, max(top, 1) + 1))

    def check(n):
        def thunk():
            with timed_check(f"anchor-morphism[n={n}]") as t:
                res = anchor_morphism_residual(S, n)
                entries = []
                for key in sorted(res):
                    label = "(" + ",".join(S.carrier.gen_names[i] for i in key) + ")"
                    der = res[key]
                    for b, val in enumerate(der.values):
                        if not val.is_zero():
                            entries.extend(
                                residuals_from_algebra(
                                    f"{label} on {S.base.names[b]}", val
                                )
                            )
                return t.finish(not res, entries)

        return thunk

    for result in run_checks([check(n) for n in arities]):
        report.add(result)
    return report


def cmd_ce_build(model, caps, args) -> Report:
    report = Report("ce-build", caps)
    S = _structure_of(model, caps)
    with timed_check("ce-differential") as t:
        D = ce_differential(S, weight_cap=caps["weight"])
        report.add(
            t.finish(True, _derivation_entries(D), detail="derivation table listed below")
        )
    return report


def cmd_ce_extract(model, caps, args) -> Report:
    report = Report("ce-extract", caps)
    if isinstance(model, GeometricModel):
        D = build_frakD(model)
        carrier = model.normal
    else:
        D = ce_differential(model, weight_cap=caps["weight"])
        carrier = model.carrier
    with timed_check("extract-structure") as t:
        S = extract_structure(D, carrier, bracket_cap=caps["arity"], anchor_cap=caps["arity"] + 1)
        entries: List[ResidualEntry] = []
        for n in sorted(S.brackets):
            for key in sorted(S.brackets[n]):
                label = f"bracket[{n}](" + ",".join(carrier.gen_names[i] for i in key) + ")"
                entries.extend(residuals_from_module(label, S.brackets[n][key]))
        for n in sorted(S.anchors):
            for key, b in sorted(S.anchors[n]):
                label = (
                    f"anchor[{n}](" + ",".join(carrier.gen_names[i] for i in key) + ")|"
                    + S.base.names[b]
                )
                entries.extend(residuals_from_algebra(label, S.anchors[n][(key, b)]))
        report.add(t.finish(True, entries, detail="extracted tables listed below"))
    return report


def cmd_roundtrip(model, caps, args) -> Report:
    report = Report("roundtrip", caps)
    if isinstance(model, AlgebroidStructure):
        with timed_check("extract(ce(S)) == S") as t:
            D = ce_differential(model, weight_cap=caps["weight"])
            S2 = extract_structure(
                D, model.carrier, bracket_cap=model.bracket_cap, anchor_cap=model.anchor_cap
            )
            report.add(t.finish(_structures_equal(model, S2)))
        with timed_check("degree-shift dictionary round trip on the bracket tables") as t:
            from .linfty import LInftyOneAlgebra, decalage, decalage_inverse

            view = LInftyOneAlgebra(model.carrier, arity_cap=model.bracket_cap)
            for n, table in model.brackets.items():
                for key, val in table.items():
                    view.set_bracket(n, key, val)
            back = decalage(decalage_inverse(view))
            same = set(back.tables) == set(view.tables)
            if same:
                for n in view.tables:
                    if view.tables[n].values.keys() != back.tables[n].values.keys():
                        same = False
                        break
                    for key in view.tables[n].values:
                        if (
                            view.tables[n].values[key].items()
                            != back.tables[n].values[key].items()
                        ):
                            same = False
                            break
            report.add(t.finish(same))
    else:
        with timed_check("recursion == extraction") as t:
            S1 = structure_from_geometry(model)
            S2 = extract_structure(
                build_frakD(model), model.normal, bracket_cap=model.cap, anchor_cap=model.cap + 1
            )
            report.add(t.finish(_structures_equal(S1, S2)))
    return report


def cmd_frakd_build(model, caps, args) -> Report:
    g = _require_geometric(model)
    report = Report("frakd-build", caps)
    with timed_check("assemble") as t:
        D = build_frakD(g)
        report.add(t.finish(True, _derivation_entries(D), detail="derivation table listed below"))
    with timed_check("weight-graded part equals d0") as t:
        report.add(t.finish(D.weight_component(0) == g.normal_d0()))
    return report


def cmd_frakd_square(model, caps, args) -> Report:
    g = _require_geometric(model)
    report = Report("frakd-square", caps)
    with timed_check("square-components") as t:
        sq = frakD_square_report(g)
        entries = []
        for n in sorted(sq):
            for label in sorted(sq[n]):
                entries.extend(residuals_from_sym(f"shift {n} @ {label}", sq[n][label]))
        detail = "" if not sq else f"lowest violating weight shift: {min(sq)}"
        report.add(t.finish(not sq, entries, detail=detail))
    return report


def cmd_kapranov(model, caps, args) -> Report:
    g = _require_geometric(model)
    report = Report("kapranov", caps)
    with timed_check("diagonal-regime derivation") as t:
        D = build_kapranov(g.curv_perp, g.base, g.normal, cap=g.cap)
        report.add(t.finish(True, _derivation_entries(D), detail="derivation table listed below"))
    with timed_check("square (curvature-compatibility residuals)") as t:
        sq = square_components(D)
        entries = []
        for n in sorted(sq):
            for label in sorted(sq[n]):
                entries.extend(residuals_from_sym(f"shift {n} @ {label}", sq[n][label]))
        report.add(t.finish(not sq, entries))
    return report


def cmd_lemmas(model, caps, args) -> Report:
    g = _require_geometric(model)
    report = Report("lemmas", caps)

    def retraction():
        with timed_check("retraction: normal projection of the expansion is the identity") as t:
            res = retraction_residual(g)
            entries = []
            for label, el in res:
                entries.extend(residuals_from_sym(label, el))
            return t.finish(not res, entries)

    def commutator():
        with timed_check("projection commutator equals the Kodaira-Spencer substitution") as t:
            res = commutator_lemma_residual(g)
            entries = []
            for label, el in res:
                entries.extend(residuals_from_sym(label, el))
            return t.finish(not res, entries)

    def transport():
        with timed_check("single-tangent transport identity and its iterate") as t:
            res = transport_lemma_residual(g)
            entries = []
            for label, el in res:
                entries.extend(residuals_from_sym(label, el))
            return t.finish(not res, entries)

    for result in run_checks([retraction, commutator, transport]):
        report.add(result)
    return report


def cmd_mc(model, caps, args) -> Report:
    report = Report("mc", caps)
    if isinstance(model, AlgebroidStructure):
        carrier = model.carrier
    else:
        carrier = model.normal
    from .symtensor import SymAlgebra

    alg = SymAlgebra.over_module(carrier, cap=caps["weight"])
    D0 = d0_derivation(alg, carrier)
    rng = Rng(args.seed)
    Phi = random_unipotent(rng, alg)
    with timed_check(f"maurer-cartan residual (seed={args.seed})") as t:
        res = mc_residual(D0, Phi)
        entries = []
        for label in sorted(res):
            entries.extend(residuals_from_sym(label, res[label]))
        report.add(t.finish(not res, entries))
    with timed_check("conjugated differential squares to zero") as t:
        sq = square_components(conjugate(Phi, D0))
        entries = []
        for n in sorted(sq):
            for label in sorted(sq[n]):
                entries.extend(residuals_from_sym(f"shift {n} @ {label}", sq[n][label]))
        report.add(t.finish(not sq, entries))
    return report


def cmd_duality(model, caps, args) -> Report:
    g = _require_geometric(model)
    report = Report("duality", caps)
    with timed_check("ce(structure) == assembled differential") as t:
        res = duality_residual(g)
        entries = []
        for label in sorted(res):
            entries.extend(residuals_from_sym(label, res[label]))
        report.add(t.finish(not res, entries))
    return report


COMMANDS = {
    "validate": cmd_validate,
    "jacobi": cmd_jacobi,
    "leibniz": cmd_leibniz,
    "anchor": cmd_anchor,
    "ce-build": cmd_ce_build,
    "ce-extract": cmd_ce_extract,
    "roundtrip": cmd_roundtrip,
    "frakd-build": cmd_frakd_build,
    "frakd-square": cmd_frakd_square,
    "kapranov": cmd_kapranov,
    "lemmas": cmd_lemmas,
    "mc": cmd_mc,
    "duality": cmd_duality,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="algebroidkit",
        description="Exact verification of homotopy Lie algebroid structures and their dual differentials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("model", help="path to a model file (JSON)")
        p.add_argument("--weight", type=int, default=None, help="override the weight cap")
        p.add_argument("--arity", type=int, default=None, help="override the arity cap / select one arity")
        p.add_argument("--json", dest="json_out", default=None, help="write the canonical report here")
        if name == "mc":
            p.add_argument("--seed", type=int, default=0, help="seed for the random filtered automorphism")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with open(args.model, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.model}: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    arity_override = args.arity if args.command not in ("jacobi", "leibniz", "anchor") else None
    try:
        model = parse_model(text, weight_override=args.weight, arity_override=arity_override)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if isinstance(model, GeometricModel):
        caps = {"weight": model.cap, "arity": model.cap}
    else:
        caps = {"weight": args.weight if args.weight is not None else model.bracket_cap,
                "arity": model.bracket_cap}
    try:
        report = COMMANDS[args.command](model, caps, args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except KitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    for line in report.human_lines():
        print(line)
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(report.canonical_json())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
