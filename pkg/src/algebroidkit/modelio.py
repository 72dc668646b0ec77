"""Model-file ingestion and canonical serialization.

The interchange format is JSON with a fixed schema tag; every number is an
exact integer quadruple {num, den, inum, iden} encoding num/den + (inum/iden)i,
so no floating point can enter a model file.  Parsing is strict: unknown
fields are rejected and every error carries the JSON path of the offending
field.  Serialization is canonical (sorted keys, fixed separators, stable
entry order), and parse -> serialize is byte-identical on canonical files.
"""

from __future__ import annotations

import json
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .algebra import AlgebraElement, BaseAlgebra
from .algebroid import AlgebroidStructure
from .errors import ParseError
from .geometry import GeometricModel, Splitting
from .modules import FreeModule, ModuleElement
from .scalars import Scalar
from .symtensor import SymAlgebra, SymElement

SCHEMA = "algebroidkit/1"


# ---------------------------------------------------------------------------
# strict traversal helpers
# ---------------------------------------------------------------------------


def _expect_dict(value, path: str, allowed: Sequence[str], required: Sequence[str]) -> dict:
    if not isinstance(value, dict):
        raise ParseError("expected an object", path)
    for key in value:
        if key not in allowed:
            raise ParseError(f"unknown field {key!r}", path)
    for key in required:
        if key not in value:
            raise ParseError(f"missing field {key!r}", path)
    return value


def _expect_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise ParseError("expected a list", path)
    return value


def _expect_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise ParseError("expected a string", path)
    return value


def _expect_int(value, path: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ParseError("expected an integer", path)
    return value


def _parse_scalar(value, path: str) -> Scalar:
    d = _expect_dict(value, path, ["num", "den", "inum", "iden"], ["num", "den", "inum", "iden"])
    for k in ("num", "den", "inum", "iden"):
        _expect_int(d[k], f"{path}.{k}")
    if d["den"] == 0 or d["iden"] == 0:
        raise ParseError("zero denominator", path)
    return Scalar.from_quadruple(d)


def _scalar_dict(s: Scalar) -> dict:
    return s.as_quadruple()


# ---------------------------------------------------------------------------
# algebra / module sections
# ---------------------------------------------------------------------------


def _parse_terms(value, path: str, base: BaseAlgebra) -> AlgebraElement:
    out: Dict[int, Scalar] = {}
    for k, item in enumerate(_expect_list(value, path)):
        d = _expect_dict(item, f"{path}[{k}]", ["basis", "coeff"], ["basis", "coeff"])
        name = _expect_str(d["basis"], f"{path}[{k}].basis")
        try:
            idx = base.index_of(name)
        except Exception:
            raise ParseError(f"unknown basis element {name!r}", f"{path}[{k}].basis") from None
        coeff = _parse_scalar(d["coeff"], f"{path}[{k}].coeff")
        out[idx] = out.get(idx, Scalar.zero()) + coeff
    return AlgebraElement(base, out)


def _terms_list(a: AlgebraElement) -> list:
    names = a.algebra.names
    return [
        {"basis": names[i], "coeff": _scalar_dict(c)} for i, c in a.items()
    ]


def _parse_base(value, path: str) -> BaseAlgebra:
    d = _expect_dict(
        value, path, ["basis", "unit", "products", "differential"], ["basis", "unit", "products"]
    )
    basis = []
    for k, item in enumerate(_expect_list(d["basis"], f"{path}.basis")):
        e = _expect_dict(item, f"{path}.basis[{k}]", ["name", "degree"], ["name", "degree"])
        basis.append((_expect_str(e["name"], f"{path}.basis[{k}].name"),
                      _expect_int(e["degree"], f"{path}.basis[{k}].degree")))
    names = [n for n, _ in basis]
    unit_name = _expect_str(d["unit"], f"{path}.unit")
    if unit_name not in names:
        raise ParseError(f"unit {unit_name!r} is not a basis element", f"{path}.unit")
    probe = BaseAlgebra(basis, unit=names.index(unit_name), products={})
    products: Dict[Tuple[int, int], Dict[int, Scalar]] = {}
    for k, item in enumerate(_expect_list(d["products"], f"{path}.products")):
        e = _expect_dict(item, f"{path}.products[{k}]", ["left", "right", "terms"], ["left", "right", "terms"])
        left = _expect_str(e["left"], f"{path}.products[{k}].left")
        right = _expect_str(e["right"], f"{path}.products[{k}].right")
        for nm in (left, right):
            if nm not in names:
                raise ParseError(f"unknown basis element {nm!r}", f"{path}.products[{k}]")
        val = _parse_terms(e["terms"], f"{path}.products[{k}].terms", probe)
        products[(names.index(left), names.index(right))] = dict(val.items())
    differential: Dict[int, Dict[int, Scalar]] = {}
    for k, item in enumerate(_expect_list(d.get("differential", []), f"{path}.differential")):
        e = _expect_dict(item, f"{path}.differential[{k}]", ["basis", "terms"], ["basis", "terms"])
        nm = _expect_str(e["basis"], f"{path}.differential[{k}].basis")
        if nm not in names:
            raise ParseError(f"unknown basis element {nm!r}", f"{path}.differential[{k}].basis")
        val = _parse_terms(e["terms"], f"{path}.differential[{k}].terms", probe)
        differential[names.index(nm)] = dict(val.items())
    return BaseAlgebra(basis, unit=names.index(unit_name), products=products, differential=differential)


def _base_dict(base: BaseAlgebra) -> dict:
    products = []
    for i in range(base.dim):
        for j in range(base.dim):
            val = base.product_basis(i, j)
            default_unit = (
                (i == base.unit and val == base.basis_element(j))
                or (j == base.unit and val == base.basis_element(i))
            )
            if default_unit or val.is_zero():
                continue
            products.append(
                {"left": base.names[i], "right": base.names[j], "terms": _terms_list(val)}
            )
    differential = []
    for i in range(base.dim):
        di = base.differential_basis(i)
        if not di.is_zero():
            differential.append({"basis": base.names[i], "terms": _terms_list(di)})
    out = {
        "basis": [
            {"name": n, "degree": d} for n, d in zip(base.names, base.degrees)
        ],
        "unit": base.names[base.unit],
        "products": products,
    }
    if differential:
        out["differential"] = differential
    return out


def _parse_module_value(value, path: str, module: FreeModule) -> ModuleElement:
    out: Dict[int, AlgebraElement] = {}
    for k, item in enumerate(_expect_list(value, path)):
        d = _expect_dict(item, f"{path}[{k}]", ["generator", "terms"], ["generator", "terms"])
        name = _expect_str(d["generator"], f"{path}[{k}].generator")
        try:
            idx = module.index_of(name)
        except Exception:
            raise ParseError(f"unknown generator {name!r}", f"{path}[{k}].generator") from None
        coeff = _parse_terms(d["terms"], f"{path}[{k}].terms", module.base)
        out[idx] = out.get(idx, module.base.zero()) + coeff
    return ModuleElement(module, out)


def _module_value_list(v: ModuleElement) -> list:
    names = v.module.gen_names
    return [
        {"generator": names[i], "terms": _terms_list(a)} for i, a in v.items()
    ]


def _parse_module(value, path: str, base: BaseAlgebra, name: str) -> FreeModule:
    d = _expect_dict(value, path, ["generators", "differential"], ["generators"])
    gens = []
    for k, item in enumerate(_expect_list(d["generators"], f"{path}.generators")):
        e = _expect_dict(item, f"{path}.generators[{k}]", ["name", "degree"], ["name", "degree"])
        gens.append((_expect_str(e["name"], f"{path}.generators[{k}].name"),
                     _expect_int(e["degree"], f"{path}.generators[{k}].degree")))
    module = FreeModule(base, gens, name=name)
    differential = {}
    for k, item in enumerate(_expect_list(d.get("differential", []), f"{path}.differential")):
        e = _expect_dict(item, f"{path}.differential[{k}]", ["generator", "value"], ["generator", "value"])
        nm = _expect_str(e["generator"], f"{path}.differential[{k}].generator")
        idx = module.index_of(nm)
        differential[idx] = _parse_module_value(e["value"], f"{path}.differential[{k}].value", module)
    module.set_differential(differential)
    return module


def _module_dict(module: FreeModule) -> dict:
    out: Dict[str, Any] = {
        "generators": [
            {"name": n, "degree": d} for n, d in zip(module.gen_names, module.degrees)
        ]
    }
    differential = []
    for i in range(module.rank):
        dv = module.differential_basis(i)
        if not dv.is_zero():
            differential.append(
                {"generator": module.gen_names[i], "value": _module_value_list(dv)}
            )
    if differential:
        out["differential"] = differential
    return out


# ---------------------------------------------------------------------------
# sym elements
# ---------------------------------------------------------------------------


def _parse_sym(value, path: str, alg: SymAlgebra) -> SymElement:
    data: Dict[Tuple[int, ...], AlgebraElement] = {}
    letter_index = {n: i for i, n in enumerate(alg.letter_names)}
    for k, item in enumerate(_expect_list(value, path)):
        d = _expect_dict(item, f"{path}[{k}]", ["word", "terms"], ["word", "terms"])
        word = []
        for m, letter in enumerate(_expect_list(d["word"], f"{path}[{k}].word")):
            nm = _expect_str(letter, f"{path}[{k}].word[{m}]")
            if nm not in letter_index:
                raise ParseError(f"unknown letter {nm!r}", f"{path}[{k}].word[{m}]")
            word.append(letter_index[nm])
        if len(word) > alg.cap:
            raise ParseError(
                f"word of weight {len(word)} overflows the weight cap {alg.cap}",
                f"{path}[{k}].word",
            )
        coeff = _parse_terms(d["terms"], f"{path}[{k}].terms", alg.base)
        element = alg.word(tuple(word), coeff)
        for w, a in element.items():
            data[w] = data.get(w, alg.base.zero()) + a
    return SymElement(alg, data)


def _sym_list(el: SymElement) -> list:
    names = el.algebra.letter_names
    return [
        {"word": [names[i] for i in w], "terms": _terms_list(a)}
        for w, a in sorted(el.items())
    ]


def _parse_matrix(value, path: str, base: BaseAlgebra, n_cols: int) -> list:
    cols = [dict() for _ in range(n_cols)]
    for k, item in enumerate(_expect_list(value, path)):
        e = _expect_dict(item, f"{path}[{k}]", ["col", "row", "coeff"], ["col", "row", "coeff"])
        col = _expect_int(e["col"], f"{path}[{k}].col")
        row = _expect_int(e["row"], f"{path}[{k}].row")
        if not (0 <= col < n_cols) or row < 0:
            raise ParseError("matrix index out of range", f"{path}[{k}]")
        coeff = _parse_scalar(e["coeff"], f"{path}[{k}].coeff")
        cols[col][row] = AlgebraElement(base, {base.unit: coeff})
    return cols


def _matrix_list(cols) -> list:
    out = []
    for col_idx, col in enumerate(cols):
        for row in sorted(col):
            coeff = col[row]
            items = coeff.items()
            if not items:
                continue
            if len(items) != 1 or items[0][0] != coeff.algebra.unit:
                raise ParseError("splitting entries must be scalar multiples of the unit", "splitting")
            out.append({"col": col_idx, "row": row, "coeff": _scalar_dict(items[0][1])})
    return out


# ---------------------------------------------------------------------------
# top level
# ---------------------------------------------------------------------------

_TENSOR_FIELDS = [
    "dhat",
    "gamma",
    "beta",
    "shape",
    "conn_tan",
    "second_form",
    "curv_perp",
    "curv_tan",
]


def parse_model(
    text: str,
    weight_override: Optional[int] = None,
    arity_override: Optional[int] = None,
) -> Union[GeometricModel, AlgebroidStructure]:
    """Parse a model file; returns the validated object or raises ParseError.

    Cap overrides win over the caps recorded in the file.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from None
    top_allowed = [
        "schema",
        "kind",
        "caps",
        "base",
        "carrier",
        "brackets",
        "anchors",
        "tangent",
        "normal",
        "splitting",
        "tensors",
        "closed_beta",
    ]
    d = _expect_dict(raw, "$", top_allowed, ["schema", "kind", "caps", "base"])
    schema = _expect_str(d["schema"], "$.schema")
    if schema != SCHEMA:
        raise ParseError(f"unsupported schema {schema!r}", "$.schema")
    kind = _expect_str(d["kind"], "$.kind")
    caps = _expect_dict(d["caps"], "$.caps", ["weight", "arity"], ["weight", "arity"])
    weight_cap = _expect_int(caps["weight"], "$.caps.weight")
    arity_cap = _expect_int(caps["arity"], "$.caps.arity")
    if weight_override is not None:
        weight_cap = weight_override
    if arity_override is not None:
        arity_cap = arity_override
    if weight_cap < 0 or arity_cap < 1:
        raise ParseError("caps out of range", "$.caps")
    base = _parse_base(d["base"], "$.base")

    if kind == "algebroid":
        for forbidden in ("tangent", "normal", "splitting", "tensors", "closed_beta"):
            if forbidden in d:
                raise ParseError(f"field {forbidden!r} not allowed for kind=algebroid", "$")
        if "carrier" not in d:
            raise ParseError("missing field 'carrier'", "$")
        carrier = _parse_module(d["carrier"], "$.carrier", base, "L")
        S = AlgebroidStructure(base, carrier, bracket_cap=arity_cap, anchor_cap=arity_cap + 1)
        for k, item in enumerate(_expect_list(d.get("brackets", []), "$.brackets")):
            e = _expect_dict(item, f"$.brackets[{k}]", ["arity", "args", "value"], ["arity", "args", "value"])
            n = _expect_int(e["arity"], f"$.brackets[{k}].arity")
            args = [
                carrier.index_of(_expect_str(x, f"$.brackets[{k}].args[{m}]"))
                for m, x in enumerate(_expect_list(e["args"], f"$.brackets[{k}].args"))
            ]
            if len(args) != n:
                raise ParseError("args length does not match arity", f"$.brackets[{k}]")
            value = _parse_module_value(e["value"], f"$.brackets[{k}].value", carrier)
            try:
                S.set_bracket(n, tuple(args), value)
            except Exception as exc:
                raise ParseError(str(exc), f"$.brackets[{k}]") from None
        for k, item in enumerate(_expect_list(d.get("anchors", []), "$.anchors")):
            e = _expect_dict(item, f"$.anchors[{k}]", ["arity", "args", "on", "terms"], ["arity", "args", "on", "terms"])
            n = _expect_int(e["arity"], f"$.anchors[{k}].arity")
            args = [
                carrier.index_of(_expect_str(x, f"$.anchors[{k}].args[{m}]"))
                for m, x in enumerate(_expect_list(e["args"], f"$.anchors[{k}].args"))
            ]
            if len(args) != n - 1:
                raise ParseError("anchor args must have arity-1 entries", f"$.anchors[{k}]")
            on = _expect_str(e["on"], f"$.anchors[{k}].on")
            bidx = base.index_of(on)
            value = _parse_terms(e["terms"], f"$.anchors[{k}].terms", base)
            try:
                S.set_anchor(n, tuple(args), bidx, value)
            except Exception as exc:
                raise ParseError(str(exc), f"$.anchors[{k}]") from None
        degree_problems = S.degree_problems()
        if degree_problems:
            raise ParseError("; ".join(degree_problems[:3]), "$")
        return S

    if kind == "geometric":
        for forbidden in ("carrier", "brackets", "anchors"):
            if forbidden in d:
                raise ParseError(f"field {forbidden!r} not allowed for kind=geometric", "$")
        for required in ("tangent", "normal"):
            if required not in d:
                raise ParseError(f"missing field {required!r}", "$")
        tangent = _parse_module(d["tangent"], "$.tangent", base, "Tm")
        normal = _parse_module(d["normal"], "$.normal", base, "Nm")
        closed = d.get("closed_beta", False)
        if not isinstance(closed, bool):
            raise ParseError("closed_beta must be a boolean", "$.closed_beta")
        probe = GeometricModel(base, tangent, normal, cap=weight_cap)
        tensors = _expect_dict(d.get("tensors", {}), "$.tensors", _TENSOR_FIELDS, [])

        def parse_letter_table(field, alg, letters, path):
            out = {}
            for k, item in enumerate(_expect_list(tensors.get(field, []), path)):
                e = _expect_dict(item, f"{path}[{k}]", ["letter", "value"], ["letter", "value"])
                nm = _expect_str(e["letter"], f"{path}[{k}].letter")
                if nm not in letters:
                    raise ParseError(f"unknown letter {nm!r}", f"{path}[{k}].letter")
                out[letters.index(nm)] = _parse_sym(e["value"], f"{path}[{k}].value", alg)
            return out

        amb_letters = list(probe.amb.letter_names)
        nor_letters = list(probe.nor.letter_names)
        tan_letters = amb_letters[: probe.a]

        dhat = {}
        for k, item in enumerate(_expect_list(tensors.get("dhat", []), "$.tensors.dhat")):
            e = _expect_dict(item, f"$.tensors.dhat[{k}]", ["basis", "value"], ["basis", "value"])
            nm = _expect_str(e["basis"], f"$.tensors.dhat[{k}].basis")
            dhat[base.index_of(nm)] = _parse_sym(e["value"], f"$.tensors.dhat[{k}].value", probe.amb)
        gamma_raw = parse_letter_table("gamma", probe.amb, amb_letters, "$.tensors.gamma")
        gamma = {}
        for idx, v in gamma_raw.items():
            if idx < probe.a:
                raise ParseError("gamma is indexed by normal letters", "$.tensors.gamma")
            gamma[idx - probe.a] = v
        beta = parse_letter_table("beta", probe.nor, tan_letters, "$.tensors.beta")
        shape = parse_letter_table("shape", probe.amb, tan_letters, "$.tensors.shape")
        conn_tan = parse_letter_table("conn_tan", probe.amb, tan_letters, "$.tensors.conn_tan")
        second_raw = parse_letter_table("second_form", probe.amb, amb_letters, "$.tensors.second_form")
        second_form = {}
        for idx, v in second_raw.items():
            if idx < probe.a:
                raise ParseError("second_form is indexed by normal letters", "$.tensors.second_form")
            second_form[idx - probe.a] = v

        def parse_weighted(field, alg, letters, path):
            out: Dict[int, Dict[int, SymElement]] = {}
            for k, item in enumerate(_expect_list(tensors.get(field, []), path)):
                e = _expect_dict(item, f"{path}[{k}]", ["weight", "letter", "value"], ["weight", "letter", "value"])
                w = _expect_int(e["weight"], f"{path}[{k}].weight")
                nm = _expect_str(e["letter"], f"{path}[{k}].letter")
                if nm not in letters:
                    raise ParseError(f"unknown letter {nm!r}", f"{path}[{k}].letter")
                out.setdefault(w, {})[letters.index(nm)] = _parse_sym(
                    e["value"], f"{path}[{k}].value", alg
                )
            return out

        curv_perp = parse_weighted("curv_perp", probe.nor, nor_letters, "$.tensors.curv_perp")
        curv_tan = parse_weighted("curv_tan", probe.nor, tan_letters, "$.tensors.curv_tan")
        for family, tables in (("curv_perp", curv_perp), ("curv_tan", curv_tan)):
            for w in tables:
                if w > weight_cap:
                    raise ParseError(
                        f"curvature weight {w} overflows the weight cap {weight_cap}",
                        f"$.tensors.{family}",
                    )
        splitting = None
        if "splitting" in d:
            sp = _expect_dict(d["splitting"], "$.splitting", ["iota", "p", "tau", "rho"], ["iota", "p", "tau", "rho"])
            splitting = Splitting(
                base,
                probe.a,
                probe.b,
                iota=_parse_matrix(sp["iota"], "$.splitting.iota", base, probe.a),
                p=_parse_matrix(sp["p"], "$.splitting.p", base, probe.a + probe.b),
                tau=_parse_matrix(sp["tau"], "$.splitting.tau", base, probe.a + probe.b),
                rho=_parse_matrix(sp["rho"], "$.splitting.rho", base, probe.b),
            )
        try:
            model = GeometricModel(
                base,
                tangent,
                normal,
                cap=weight_cap,
                dhat=dhat,
                gamma=gamma,
                beta=beta,
                shape=shape,
                conn_tan=conn_tan,
                second_form=second_form,
                curv_perp=curv_perp,
                curv_tan=curv_tan,
                splitting=splitting,
                closed_beta=closed,
            )
        except Exception as exc:
            raise ParseError(str(exc), "$") from None
        from .geometry import geometric_degree_problems

        degree_problems = geometric_degree_problems(model)
        if degree_problems:
            raise ParseError("; ".join(degree_problems[:3]), "$.tensors")
        return model

    raise ParseError(f"unknown kind {kind!r}", "$.kind")


def serialize_model(obj: Union[GeometricModel, AlgebroidStructure], arity_cap: Optional[int] = None) -> str:
    """Canonical JSON text for a model object."""
    if isinstance(obj, AlgebroidStructure):
        doc = {
            "schema": SCHEMA,
            "kind": "algebroid",
            "caps": {"weight": obj.bracket_cap, "arity": obj.bracket_cap},
            "base": _base_dict(obj.base),
            "carrier": _module_dict(obj.carrier),
        }
        brackets = []
        for n in sorted(obj.brackets):
            for key in sorted(obj.brackets[n]):
                brackets.append(
                    {
                        "arity": n,
                        "args": [obj.carrier.gen_names[i] for i in key],
                        "value": _module_value_list(obj.brackets[n][key]),
                    }
                )
        if brackets:
            doc["brackets"] = brackets
        anchors = []
        for n in sorted(obj.anchors):
            for key, bidx in sorted(obj.anchors[n]):
                anchors.append(
                    {
                        "arity": n,
                        "args": [obj.carrier.gen_names[i] for i in key],
                        "on": obj.base.names[bidx],
                        "terms": _terms_list(obj.anchors[n][(key, bidx)]),
                    }
                )
        if anchors:
            doc["anchors"] = anchors
        return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"

    g = obj
    doc = {
        "schema": SCHEMA,
        "kind": "geometric",
        "caps": {"weight": g.cap, "arity": g.cap},
        "base": _base_dict(g.base),
        "tangent": _module_dict(g.tangent),
        "normal": _module_dict(g.normal),
    }
    if g.closed_beta:
        doc["closed_beta"] = True
    default_split = Splitting(g.base, g.a, g.b)

    def matrices_equal(m1, m2):
        if len(m1) != len(m2):
            return False
        for c1, c2 in zip(m1, m2):
            d1 = {r: v for r, v in c1.items() if not v.is_zero()}
            d2 = {r: v for r, v in c2.items() if not v.is_zero()}
            if d1 != d2:
                return False
        return True

    is_default = (
        matrices_equal(g.splitting.iota, default_split.iota)
        and matrices_equal(g.splitting.p, default_split.p)
        and matrices_equal(g.splitting.tau, default_split.tau)
        and matrices_equal(g.splitting.rho, default_split.rho)
    )
    if not is_default:
        doc["splitting"] = {
            "iota": _matrix_list(g.splitting.iota),
            "p": _matrix_list(g.splitting.p),
            "tau": _matrix_list(g.splitting.tau),
            "rho": _matrix_list(g.splitting.rho),
        }
    tensors: Dict[str, Any] = {}

    def letter_table(table, letters, offset=0):
        out = []
        for idx in sorted(table):
            el = table[idx]
            if el.is_zero():
                continue
            out.append({"letter": letters[idx + offset], "value": _sym_list(el)})
        return out

    dhat_entries = []
    for i in sorted(g.dhat):
        if not g.dhat[i].is_zero():
            dhat_entries.append({"basis": g.base.names[i], "value": _sym_list(g.dhat[i])})
    if dhat_entries:
        tensors["dhat"] = dhat_entries
    amb_letters = list(g.amb.letter_names)
    tan_letters = amb_letters[: g.a]
    entries = letter_table(g.gamma, amb_letters, offset=g.a)
    if entries:
        tensors["gamma"] = entries
    entries = letter_table(g.beta, tan_letters)
    if entries:
        tensors["beta"] = entries
    entries = letter_table(g.shape, tan_letters)
    if entries:
        tensors["shape"] = entries
    entries = letter_table(g.conn_tan, tan_letters)
    if entries:
        tensors["conn_tan"] = entries
    entries = letter_table(g.second_form, amb_letters, offset=g.a)
    if entries:
        tensors["second_form"] = entries

    def weighted_table(tables, letters):
        out = []
        for w in sorted(tables):
            for idx in sorted(tables[w]):
                el = tables[w][idx]
                if el.is_zero():
                    continue
                out.append({"weight": w, "letter": letters[idx], "value": _sym_list(el)})
        return out

    entries = weighted_table(g.curv_perp, list(g.nor.letter_names))
    if entries:
        tensors["curv_perp"] = entries
    entries = weighted_table(g.curv_tan, tan_letters)
    if entries:
        tensors["curv_tan"] = entries
    if tensors:
        doc["tensors"] = tensors
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def load_model(path: str) -> Union[GeometricModel, AlgebroidStructure]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())
