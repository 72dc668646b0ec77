"""Homotopy Lie algebroids over a fixed dga and their Chevalley-Eilenberg duals.

An AlgebroidStructure stores, over a fixed base dga A and free carrier L:

* graded symmetric brackets  {v_1..v_n}_n  (n >= 2) of degree +1, stored on
  sorted generator tuples and extended through the anchor Leibniz rule

      {v_1..v_{n-1}, a.v_n} = {v_1..v_{n-1}|a}.v_n
                              + (-1)^{|a|(|v_1|+..+|v_{n-1}|+1)} a.{v_1..v_n};

* multi-anchors  {v_1..v_{n-1}|-}_n  (n >= 2) of degree +1, A-multilinear in
  the module slots and a derivation in the algebra slot, stored on
  (sorted generator tuple, basis element) pairs.

The unary operations are fixed by the dga: {|-}_1 = d_A, {.}_1 = d_L.

``ce_differential`` packages a structure as a degree-1 derivation of the
truncated symmetric algebra over the dual generators:

    (D_n a)(v_1..v_n)   = (-1)^{|a|(|v_1|+..+|v_n|)} {v_1..v_n|a}_{n+1}
    (D_n eta)(v_1..v_{n+1}) = sum_i (-1)^theta {v_1.. ^v_i ..|eta(v_i)}_{n+1}
                              - (-1)^{|eta|} eta({v_1..v_{n+1}}_{n+1}),
    theta = |eta|(|v_1|+..+ ^|v_i| ..) + |v_i|(|v_{i+1}|+..+|v_{n+1}|)

and ``extract_structure`` inverts it weight by weight through dual-basis
evaluation; the two are exact mutual inverses on canonical tables.
"""

from __future__ import annotations

from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .algebra import AlgebraElement, BaseAlgebra
from .errors import CapError, DegreeError, KitError
from .linfty import (
    AlgebraDerivation,
    LInftyMorphism,
    LInftyOneAlgebra,
    ShiftedDerDGLA,
    build_shifted_der_dgla,
    canonicalize_key,
    morphism_residual,
    multilinear_extend,
    sorted_tuples,
)
from .modules import FreeModule, ModuleElement, pair_dual
from .scalars import Scalar, sign_scalar
from .symtensor import (
    DerivationD,
    SymAlgebra,
    evaluate,
    from_values,
)

GenKey = Tuple[int, ...]


class AlgebroidStructure:
    """Brackets plus multi-anchors over a fixed dga; one side of the duality."""

    def __init__(
        self,
        base: BaseAlgebra,
        carrier: FreeModule,
        bracket_cap: int = 4,
        anchor_cap: int = 5,
    ):
        if carrier.base is not base:
            raise KitError("carrier must be a module over the given base")
        self.base = base
        self.carrier = carrier
        self.bracket_cap = bracket_cap
        self.anchor_cap = anchor_cap
        self.brackets: Dict[int, Dict[GenKey, ModuleElement]] = {}
        self.anchors: Dict[int, Dict[Tuple[GenKey, int], AlgebraElement]] = {}

    # -- table management -----------------------------------------------------

    def set_bracket(self, n: int, key: Sequence[int], value: ModuleElement):
        if n < 2 or n > self.bracket_cap:
            raise CapError(f"bracket arity {n} outside 2..{self.bracket_cap}")
        ckey, sign, vanishes = canonicalize_key(key, self.carrier.degrees, True)
        if vanishes:
            if not value.is_zero():
                raise KitError(f"bracket value on vanishing tuple {tuple(key)}")
            return
        stored = value.scale(sign_scalar(0 if sign == 1 else 1))
        table = self.brackets.setdefault(n, {})
        if stored.is_zero():
            table.pop(ckey, None)
        else:
            table[ckey] = stored

    def set_anchor(self, n: int, key: Sequence[int], basis_idx: int, value: AlgebraElement):
        if n < 2 or n > self.anchor_cap:
            raise CapError(f"anchor arity {n} outside 2..{self.anchor_cap}")
        if len(key) != n - 1:
            raise KitError("anchor key must have n-1 generators")
        ckey, sign, vanishes = canonicalize_key(key, self.carrier.degrees, True)
        if vanishes:
            if not value.is_zero():
                raise KitError(f"anchor value on vanishing tuple {tuple(key)}")
            return
        stored = value.scale(sign_scalar(0 if sign == 1 else 1))
        table = self.anchors.setdefault(n, {})
        if stored.is_zero():
            table.pop((ckey, basis_idx), None)
        else:
            table[(ckey, basis_idx)] = stored

    def bracket_table_value(self, n: int, key: GenKey) -> ModuleElement:
        ckey, sign, vanishes = canonicalize_key(key, self.carrier.degrees, True)
        if vanishes:
            return self.carrier.zero()
        got = self.brackets.get(n, {}).get(ckey)
        if got is None:
            return self.carrier.zero()
        return got.scale(sign_scalar(0 if sign == 1 else 1))

    def anchor_table_value(self, n: int, key: GenKey, basis_idx: int) -> AlgebraElement:
        ckey, sign, vanishes = canonicalize_key(key, self.carrier.degrees, True)
        if vanishes:
            return self.base.zero()
        got = self.anchors.get(n, {}).get((ckey, basis_idx))
        if got is None:
            return self.base.zero()
        return got.scale(sign_scalar(0 if sign == 1 else 1))

    # -- evaluation -------------------------------------------------------------

    def anchor(self, n: int, args: Sequence[ModuleElement], a: AlgebraElement) -> AlgebraElement:
        """{args | a}_n, A-multilinear in args and K-linear in a."""
        if len(args) != n - 1:
            raise KitError("anchor expects n-1 module arguments")
        if n == 1:
            return a.d()
        if n > self.anchor_cap:
            raise CapError(f"anchor arity {n} exceeds cap {self.anchor_cap}")
        total = self.base.zero()
        for b, c in a.items():
            val = multilinear_extend(
                lambda gens: self.anchor_table_value(n, gens, b),
                1,
                args,
                self.carrier.degrees,
                self.base.zero(),
            )
            total = total + val.scale(c)
        return total

    def anchor_derivation(self, n: int, key: GenKey) -> AlgebraDerivation:
        """alpha_{n-1}(key) as a concrete derivation of the base algebra."""
        return AlgebraDerivation(
            self.base,
            {b: self.anchor_table_value(n, key, b) for b in range(self.base.dim)},
        )

    def bracket(self, n: int, args: Sequence[ModuleElement]) -> ModuleElement:
        """K-multilinear evaluation via the anchor Leibniz rule.

        Coefficients are peeled left to right: the leftmost non-unit slot is
        rotated to the last position with its alpha sign and the Leibniz rule
        applied there.
        """
        if len(args) != n:
            raise KitError("bracket arity does not match argument count")
        if n == 1:
            return args[0].d()
        if n > self.bracket_cap:
            raise CapError(f"bracket arity {n} exceeds cap {self.bracket_cap}")
        terms_per_arg = []
        for v in args:
            terms = []
            for i, a in v.items():
                for d, ha in a.homogeneous_parts().items():
                    for b, c in ha.items():
                        terms.append((c, b, i))
            terms_per_arg.append(terms)
        total = self.carrier.zero()

        def rec(k: int, chosen: List[Tuple[int, int]], scal: Scalar):
            nonlocal total
            if k == n:
                total = total + self._bracket_slots(n, chosen).scale(scal)
                return
            for c, b, i in terms_per_arg[k]:
                rec(k + 1, chosen + [(b, i)], scal * c)

        rec(0, [], Scalar.one())
        return total

    def _bracket_slots(self, n: int, slots: List[Tuple[int, int]]) -> ModuleElement:
        """slots = [(coefficient basis index, generator index)] with scalars out."""
        base = self.base
        carrier = self.carrier
        unit = base.unit

        def slot_degree(slot):
            b, i = slot
            return base.degrees[b] + carrier.degrees[i]

        composite = [k for k, (b, _) in enumerate(slots) if b != unit]
        if not composite:
            return self.bracket_table_value(n, tuple(i for _, i in slots))
        k = composite[0]
        # rotate slot k past the tail
        tail = slots[k + 1 :]
        tail_degree = sum(slot_degree(s) for s in tail)
        exponent = slot_degree(slots[k]) * tail_degree
        reordered = slots[:k] + tail + [slots[k]]
        b, g = reordered[-1]
        head = reordered[:-1]
        # Leibniz in the last slot: {.., e_b . g} =
        #   {..|e_b}.g + (-1)^{|e_b|(sum head degrees + 1)} e_b . {.., g}
        head_degree = sum(slot_degree(s) for s in head)
        anchor_part = self._anchor_slots(n, head, base.basis_element(b))
        term1 = ModuleElement(carrier, {g: anchor_part}) if not anchor_part.is_zero() else carrier.zero()
        bracket_rest = self._bracket_slots(n, head + [(unit, g)])
        term2 = bracket_rest.a_mul(base.basis_element(b)).scale(
            sign_scalar(base.degrees[b] * (head_degree + 1))
        )
        return (term1 + term2).scale(sign_scalar(exponent))

    def _anchor_slots(self, n: int, slots: List[Tuple[int, int]], a: AlgebraElement) -> AlgebraElement:
        """{slots | a}_n with slots as (coefficient basis, generator) pairs."""
        base = self.base
        carrier = self.carrier
        unit = base.unit
        total = base.zero()

        def rec(k: int, exponent: int, coeff: Optional[AlgebraElement], gens: GenKey, prefix: int):
            nonlocal total
            if k == len(slots):
                val = base.zero()
                for bb, cc in a.items():
                    val = val + self.anchor_table_value(n, gens, bb).scale(cc)
                if coeff is not None:
                    val = coeff * val
                total = total + val.scale(sign_scalar(exponent))
                return
            b, g = slots[k]
            gd = carrier.degrees[g]
            if b == unit:
                rec(k + 1, exponent, coeff, gens + (g,), prefix + gd)
            else:
                bd = base.degrees[b]
                new_exp = exponent + bd * (1 + prefix)
                new_coeff = (
                    base.basis_element(b)
                    if coeff is None
                    else coeff * base.basis_element(b)
                )
                rec(k + 1, new_exp, new_coeff, gens + (g,), prefix + gd + bd)

        rec(0, 0, None, (), 0)
        return total

    def max_bracket_arity(self) -> int:
        return max(self.brackets, default=1)

    def max_anchor_arity(self) -> int:
        return max(self.anchors, default=1)

    # -- validation -------------------------------------------------------------------

    def degree_problems(self) -> List[str]:
        """Degree bookkeeping of the stored tables (structural validity)."""
        problems: List[str] = []
        base = self.base
        carrier = self.carrier
        for n, table in self.brackets.items():
            for key, val in table.items():
                want = sum(carrier.degrees[i] for i in key) + 1
                try:
                    got = val.degree()
                except DegreeError:
                    problems.append(f"bracket {n} at {key} inhomogeneous")
                    continue
                if got is not None and got != want:
                    problems.append(f"bracket {n} at {key} degree {got}, expected {want}")
        for n, table in self.anchors.items():
            for (key, b), val in table.items():
                want = sum(carrier.degrees[i] for i in key) + base.degrees[b] + 1
                try:
                    got = val.degree()
                except DegreeError:
                    problems.append(f"anchor {n} at {key}|{base.names[b]} inhomogeneous")
                    continue
                if got is not None and got != want:
                    problems.append(
                        f"anchor {n} at {key}|{base.names[b]} degree {got}, expected {want}"
                    )
        return problems

    def validate(self) -> List[str]:
        problems: List[str] = list(self.degree_problems())
        base = self.base
        for n, table in self.anchors.items():
            seen_keys = {key for key, _ in table}
            for key in seen_keys:
                der = self.anchor_derivation(n, key)
                if not der.value_on(base.unit).is_zero():
                    problems.append(f"anchor {n} at {key} does not kill the unit")
                defects = der.leibniz_defects()
                if defects:
                    problems.append(
                        f"anchor {n} at {key} is not a derivation: {defects[0]}"
                    )
        return problems


# ---------------------------------------------------------------------------
# Chevalley-Eilenberg: structure -> derivation
# ---------------------------------------------------------------------------


def ce_differential(S: AlgebroidStructure, weight_cap: int = 4, algebra: Optional[SymAlgebra] = None) -> DerivationD:
    """The degree-1 derivation encoding all brackets and anchors of S."""
    carrier = S.carrier
    base = S.base
    if S.max_bracket_arity() > weight_cap or S.max_anchor_arity() > weight_cap + 1:
        raise CapError(
            f"weight cap {weight_cap} too small for bracket arity "
            f"{S.max_bracket_arity()} / anchor arity {S.max_anchor_arity()}"
        )
    if algebra is None:
        algebra = SymAlgebra.over_module(carrier, cap=weight_cap)
    elif algebra.cap != weight_cap:
        raise CapError("algebra cap does not match requested weight cap")
    W = weight_cap

    on_algebra: Dict[int, object] = {}
    for b in range(base.dim):
        val = algebra.scalar(base.differential_basis(b))
        deg_b = base.degrees[b]
        for n in range(1, W + 1):
            if n + 1 > S.anchor_cap:
                break

            def value_fn(word, gens, b=b, n=n, deg_b=deg_b):
                total_deg = sum(carrier.degrees[i] for i in word)
                return S.anchor(n + 1, gens, base.basis_element(b)).scale(
                    sign_scalar(deg_b * total_deg)
                )

            val = val + from_values(algebra, carrier, n, value_fn)
        if not val.is_zero():
            on_algebra[b] = val

    on_letters: Dict[int, object] = {}
    for i in range(algebra.n_letters):
        eta_degree = -carrier.degrees[i]
        val = algebra.zero()
        for n in range(0, W):
            if n >= 1 and (n + 1 > S.bracket_cap or n + 1 > S.anchor_cap):
                break

            def value_fn(word, gens, i=i, n=n, eta_degree=eta_degree):
                degs = [carrier.degrees[g] for g in word]
                total = S.base.zero()
                for k in range(len(gens)):
                    eta_vk = pair_dual(carrier, i, gens[k])
                    if eta_vk.is_zero():
                        continue
                    theta = eta_degree * (sum(degs) - degs[k]) + degs[k] * sum(
                        degs[k + 1 :]
                    )
                    rest = gens[:k] + gens[k + 1 :]
                    total = total + S.anchor(n + 1, rest, eta_vk).scale(
                        sign_scalar(theta)
                    )
                bracket_val = S.bracket(n + 1, gens)
                total = total + pair_dual(carrier, i, bracket_val).scale(
                    sign_scalar(eta_degree + 1)
                )
                return total

            val = val + from_values(algebra, carrier, n + 1, value_fn)
        if not val.is_zero():
            on_letters[i] = val

    return DerivationD(algebra, on_algebra, on_letters)


# ---------------------------------------------------------------------------
# Chevalley-Eilenberg: derivation -> structure
# ---------------------------------------------------------------------------


def extract_structure(
    D: DerivationD,
    carrier: FreeModule,
    bracket_cap: int = 4,
    anchor_cap: int = 5,
) -> AlgebroidStructure:
    """Recover brackets and anchors from a degree-1 derivation, weight by weight.

    Requires D_0 to restrict to d_A on the base; the carrier must be the free
    module whose dual generators are the algebra letters.
    """
    algebra = D.algebra
    base = algebra.base
    for b in range(base.dim):
        got = D.component_on_algebra(0, b)
        want = algebra.scalar(base.differential_basis(b))
        if got != want:
            raise KitError(
                f"weight-0 action on {base.names[b]} is not d_A; extraction undefined"
            )
    S = AlgebroidStructure(base, carrier, bracket_cap=bracket_cap, anchor_cap=anchor_cap)

    for n in range(2, anchor_cap + 1):
        weight = n - 1
        if weight > algebra.cap:
            break
        for key in sorted_tuples(carrier.rank, weight):
            _, _, vanishes = canonicalize_key(key, carrier.degrees, True)
            if vanishes:
                continue
            gens = [carrier.generator(i) for i in key]
            total_deg = sum(carrier.degrees[i] for i in key)
            for b in range(base.dim):
                comp = D.component_on_algebra(weight, b)
                if comp.is_zero():
                    continue
                value = evaluate(comp, gens, carrier).scale(
                    sign_scalar(base.degrees[b] * total_deg)
                )
                if not value.is_zero():
                    S.set_anchor(n, key, b, value)

    for n in range(2, bracket_cap + 1):
        weight = n
        if weight > algebra.cap:
            break
        for key in sorted_tuples(carrier.rank, n):
            _, _, vanishes = canonicalize_key(key, carrier.degrees, True)
            if vanishes:
                continue
            gens = [carrier.generator(i) for i in key]
            degs = [carrier.degrees[i] for i in key]
            coeffs: Dict[int, AlgebraElement] = {}
            for i in range(carrier.rank):
                eta_degree = -carrier.degrees[i]
                # first sum of the recovery formula: D_{n-1}(eta(v_k)) terms
                first = base.zero()
                for k in range(n):
                    eta_vk = pair_dual(carrier, i, gens[k])
                    if eta_vk.is_zero():
                        continue
                    inner = base.zero()
                    for b, c in eta_vk.items():
                        comp = D.component_on_algebra(n - 1, b)
                        if comp.is_zero():
                            continue
                        inner = inner + evaluate(
                            comp, gens[:k] + gens[k + 1 :], carrier
                        ).scale(c)
                    first = first + inner.scale(
                        sign_scalar(degs[k] * sum(degs[:k]))
                    )
                comp = D.component_on_letter(n - 1, i)
                second = evaluate(comp, gens, carrier) if not comp.is_zero() else base.zero()
                paired = (first - second).scale(sign_scalar(eta_degree))
                if paired.is_zero():
                    continue
                # invert eta(c.g) = (-1)^{|c||eta|} c per homogeneous part
                c_val = base.zero()
                for d, hp in paired.homogeneous_parts().items():
                    c_val = c_val + hp.scale(sign_scalar(d * eta_degree))
                coeffs[i] = c_val
            value = ModuleElement(carrier, coeffs)
            if not value.is_zero():
                S.set_bracket(n, key, value)
    return S


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------


def algebroid_jacobi_residual(S: AlgebroidStructure, n: int) -> Dict[GenKey, ModuleElement]:
    """Symmetric higher Jacobi residual using the algebroid extension policy."""
    from .linfty import jacobi_residual as _generic

    class _Provider:
        carrier = S.carrier
        arity_cap = S.bracket_cap

        @staticmethod
        def bracket(m, args):
            return S.bracket(m, args)

    return _generic(_Provider, n)


def leibniz_residual(S: AlgebroidStructure, n: int) -> Dict[Tuple[GenKey, int], ModuleElement]:
    """Defect of the anchor Leibniz rule on generator tuples x basis elements."""
    carrier = S.carrier
    base = S.base
    out: Dict[Tuple[GenKey, int], ModuleElement] = {}
    for key in sorted_tuples(carrier.rank, n):
        degs = [carrier.degrees[i] for i in key]
        gens = [carrier.generator(i) for i in key]
        for b in range(base.dim):
            a = base.basis_element(b)
            scaled = gens[-1].a_mul(a)
            lhs = S.bracket(n, gens[:-1] + [scaled])
            anchor_coeff = S.anchor(n, gens[:-1], a)
            mid = ModuleElement(carrier, {key[-1]: anchor_coeff})
            rhs = S.bracket(n, gens).a_mul(a).scale(
                sign_scalar(base.degrees[b] * (sum(degs[:-1]) + 1))
            )
            residual = lhs - mid - rhs
            if not residual.is_zero():
                out[(key, b)] = residual
    return out


def anchor_morphism(S: AlgebroidStructure) -> Tuple[LInftyMorphism, ShiftedDerDGLA]:
    """The anchor components as a morphism into the shifted derivation DGLA."""
    target = build_shifted_der_dgla(S.base)
    outer = S

    class _SourceView(LInftyOneAlgebra):
        def bracket(self, m, args):
            return outer.bracket(m, args)

    view = _SourceView(S.carrier, arity_cap=S.bracket_cap)
    f = LInftyMorphism(view, target, target.zero())
    for m in range(1, S.anchor_cap):
        for key in sorted_tuples(S.carrier.rank, m):
            _, _, vanishes = canonicalize_key(key, S.carrier.degrees, True)
            if vanishes:
                continue
            der = S.anchor_derivation(m + 1, key)
            if not der.is_zero():
                f.set_component(m, key, der)
    return f, target


def anchor_morphism_residual(S: AlgebroidStructure, n: int):
    """Defect of the anchors forming a structure morphism into Der(A)[1]."""
    f, target = anchor_morphism(S)
    return morphism_residual(f, f.source, target, n)
