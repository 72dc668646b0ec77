"""Homotopy Lie structures on free modules and the shifted derivation DGLA.

Two bracket flavors are supported on a free graded module:

* ``LInftyAlgebra``: graded skew brackets l_n of degree 2-n (chi signs);
* ``LInftyOneAlgebra``: graded symmetric brackets ell_n of degree +1
  (alpha signs), the shifted picture used everywhere downstream.

Brackets are stored by values on sorted generator tuples and extended
A-multilinearly with Koszul signs; the unary bracket is always the carrier
differential (a Leibniz derivation, not A-linear).  The degree-shift
dictionary (decalage) converts between the two flavors with the sign

    {v_1..v_n} = (-1)^{(n-1)|v_1| + (n-2)|v_2| + ... + |v_{n-1}|} [v_1..v_n]

where degrees are taken in the unshifted module.
"""

from __future__ import annotations

from itertools import combinations_with_replacement
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .algebra import AlgebraElement, BaseAlgebra
from .errors import CapError, DegreeError, KitError
from .linalg import nullspace
from .modules import FreeModule, ModuleElement
from .scalars import Scalar, sign_scalar
from .signs import (
    Permutation,
    canonical_partitions,
    partition_permutation,
    skew_sign,
    sym_sign,
    unshuffles_with_tail,
)

GenKey = Tuple[int, ...]


# ---------------------------------------------------------------------------
# canonical bracket tables
# ---------------------------------------------------------------------------


def canonicalize_key(
    key: Sequence[int], degrees: Sequence[int], symmetric: bool
) -> Tuple[GenKey, int, bool]:
    """Sort a generator tuple, returning (key, sign, vanishes).

    sign is the Koszul factor relating the value on the input order to the
    value on the sorted order; vanishes marks tuples killed by the symmetry
    (repeated odd entries for symmetric brackets, repeated even for skew).
    """
    items = list(key)
    exponent = 0
    swaps = 0
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            exponent += degrees[items[j - 1]] * degrees[items[j]]
            swaps += 1
            items[j - 1], items[j] = items[j], items[j - 1]
            j -= 1
    sign = (-1) ** exponent
    if not symmetric:
        sign *= (-1) ** swaps
    for a, b in zip(items, items[1:]):
        if a == b:
            parity = degrees[a] % 2
            if symmetric and parity == 1:
                return tuple(items), sign, True
            if not symmetric and parity == 0:
                return tuple(items), sign, True
    return tuple(items), sign, False


class BracketTable:
    """Sparse canonical storage for one arity of a (skew or sym) bracket."""

    def __init__(self, module: FreeModule, arity: int, symmetric: bool):
        self.module = module
        self.arity = arity
        self.symmetric = symmetric
        self.values: Dict[GenKey, ModuleElement] = {}

    def set(self, key: Sequence[int], value: ModuleElement):
        ckey, sign, vanishes = canonicalize_key(key, self.module.degrees, self.symmetric)
        if vanishes:
            if not value.is_zero():
                raise KitError(f"value prescribed on a vanishing tuple {tuple(key)}")
            return
        stored = value.scale(sign_scalar(0 if sign == 1 else 1))
        if stored.is_zero():
            self.values.pop(ckey, None)
        else:
            self.values[ckey] = stored

    def get(self, key: Sequence[int]) -> ModuleElement:
        ckey, sign, vanishes = canonicalize_key(key, self.module.degrees, self.symmetric)
        if vanishes:
            return self.module.zero()
        got = self.values.get(ckey)
        if got is None:
            return self.module.zero()
        return got.scale(sign_scalar(0 if sign == 1 else 1))

    def is_zero(self) -> bool:
        return not self.values

    def copy_into(self, module: FreeModule, transform) -> "BracketTable":
        out = BracketTable(module, self.arity, self.symmetric)
        for key, val in self.values.items():
            out.values[key] = transform(key, val)
        return out


def sorted_tuples(rank: int, n: int) -> List[GenKey]:
    return list(combinations_with_replacement(range(rank), n))


# ---------------------------------------------------------------------------
# generic multilinear extension
# ---------------------------------------------------------------------------


def multilinear_extend(
    table_fn: Callable[[GenKey], object],
    op_degree: int,
    args: Sequence[ModuleElement],
    gen_degrees: Sequence[int],
    zero,
):
    """A-multilinear Koszul extension of a map stored on generator tuples.

    Coefficients are peeled slot by slot from the left:
    f(a_1 g_1, ..., a_n g_n) = (-1)^{sum_k |a_k| (op_degree + |g_1|+..+|g_{k-1}|)}
                               (a_1 ... a_n) . f(g_1, ..., g_n).
    Values must support .a_mul and .scale and addition; zero is the zero value.
    """
    result = zero
    terms_per_arg = []
    for v in args:
        terms = []
        for i, a in v.items():
            for d, ha in a.homogeneous_parts().items():
                terms.append((ha, d, i))
        terms_per_arg.append(terms)

    def rec(k: int, exponent: int, coeff: Optional[AlgebraElement], gens: Tuple[int, ...], prefix_deg: int):
        nonlocal result
        if k == len(args):
            val = table_fn(gens)
            if val is None:
                return
            if coeff is not None:
                val = val.a_mul(coeff)
            result = result + val.scale(sign_scalar(exponent))
            return
        for ha, d, i in terms_per_arg[k]:
            new_exp = exponent + d * (op_degree + prefix_deg)
            new_coeff = ha if coeff is None else coeff * ha
            rec(k + 1, new_exp, new_coeff, gens + (i,), prefix_deg + gen_degrees[i])

    rec(0, 0, None, (), 0)
    return result


# ---------------------------------------------------------------------------
# the two structure flavors
# ---------------------------------------------------------------------------


class LInftyOneAlgebra:
    """Graded symmetric brackets of degree +1 on a free module; ell_1 = d_L."""

    symmetric = True

    def __init__(self, carrier: FreeModule, arity_cap: int = 4):
        self.carrier = carrier
        self.arity_cap = arity_cap
        self.tables: Dict[int, BracketTable] = {}

    def set_bracket(self, n: int, key: Sequence[int], value: ModuleElement):
        if n < 2 or n > self.arity_cap:
            raise CapError(f"bracket arity {n} outside 2..{self.arity_cap}")
        self.tables.setdefault(n, BracketTable(self.carrier, n, True)).set(key, value)

    def bracket(self, n: int, args: Sequence[ModuleElement]) -> ModuleElement:
        if len(args) != n:
            raise KitError("bracket arity does not match argument count")
        if n == 1:
            return args[0].d()
        if n > self.arity_cap:
            raise CapError(f"arity {n} exceeds cap {self.arity_cap}")
        table = self.tables.get(n)
        if table is None:
            return self.carrier.zero()
        return multilinear_extend(
            lambda gens: table.get(gens),
            1,
            args,
            self.carrier.degrees,
            self.carrier.zero(),
        )

    def validate(self) -> List[str]:
        problems = []
        for n, table in self.tables.items():
            for key, val in table.values.items():
                want = sum(self.carrier.degrees[i] for i in key) + 1
                try:
                    got = val.degree()
                except DegreeError:
                    problems.append(f"bracket {n} value at {key} inhomogeneous")
                    continue
                if got is not None and got != want:
                    problems.append(
                        f"bracket {n} at {key} has degree {got}, expected {want}"
                    )
        return problems


class LInftyAlgebra:
    """Graded skew brackets of degree 2-n on a free module; l_1 = d_L."""

    symmetric = False

    def __init__(self, carrier: FreeModule, arity_cap: int = 4):
        self.carrier = carrier
        self.arity_cap = arity_cap
        self.tables: Dict[int, BracketTable] = {}

    def set_bracket(self, n: int, key: Sequence[int], value: ModuleElement):
        if n < 2 or n > self.arity_cap:
            raise CapError(f"bracket arity {n} outside 2..{self.arity_cap}")
        self.tables.setdefault(n, BracketTable(self.carrier, n, False)).set(key, value)

    def bracket(self, n: int, args: Sequence[ModuleElement]) -> ModuleElement:
        if len(args) != n:
            raise KitError("bracket arity does not match argument count")
        if n == 1:
            return args[0].d()
        if n > self.arity_cap:
            raise CapError(f"arity {n} exceeds cap {self.arity_cap}")
        table = self.tables.get(n)
        if table is None:
            return self.carrier.zero()
        return multilinear_extend(
            lambda gens: table.get(gens),
            (2 - n) % 2,
            args,
            self.carrier.degrees,
            self.carrier.zero(),
        )

    def validate(self) -> List[str]:
        problems = []
        for n, table in self.tables.items():
            for key, val in table.values.items():
                want = sum(self.carrier.degrees[i] for i in key) + 2 - n
                try:
                    got = val.degree()
                except DegreeError:
                    problems.append(f"bracket {n} value at {key} inhomogeneous")
                    continue
                if got is not None and got != want:
                    problems.append(
                        f"bracket {n} at {key} has degree {got}, expected {want}"
                    )
        return problems


# ---------------------------------------------------------------------------
# Jacobi residuals
# ---------------------------------------------------------------------------


def jacobi_residual(L, n: int) -> Dict[GenKey, ModuleElement]:
    """Symmetric higher Jacobi residual at total arity n on generator tuples.

    sum_{i+j=n} sum_{Sh(i,j)} alpha(sigma, v)
        { {v_s(1)..v_s(i)}, v_s(i+1), ..., v_s(n) } = 0 for genuine structures.
    """
    if n > getattr(L, "arity_cap", n):
        raise CapError(f"arity {n} exceeds cap")
    carrier = L.carrier
    out: Dict[GenKey, ModuleElement] = {}
    for key in sorted_tuples(carrier.rank, n):
        degs = [carrier.degrees[i] for i in key]
        gens = [carrier.generator(i) for i in key]
        total = carrier.zero()
        for i in range(1, n + 1):
            for sigma in unshuffles_with_tail(n, i):
                perm = sigma.permute(list(range(n)))
                sign = sym_sign(sigma, degs)
                inner = L.bracket(i, [gens[p] for p in perm[:i]])
                outer_args = [inner] + [gens[p] for p in perm[i:]]
                term = L.bracket(n - i + 1, outer_args)
                total = total + term.scale(sign_scalar(0 if sign == 1 else 1))
        if not total.is_zero():
            out[key] = total
    return out


def jacobi_residual_skew(L, n: int) -> Dict[GenKey, ModuleElement]:
    """Skew higher Jacobi residual with chi signs and the (-1)^{i j} factor."""
    if n > getattr(L, "arity_cap", n):
        raise CapError(f"arity {n} exceeds cap")
    carrier = L.carrier
    out: Dict[GenKey, ModuleElement] = {}
    for key in sorted_tuples(carrier.rank, n):
        degs = [carrier.degrees[i] for i in key]
        gens = [carrier.generator(i) for i in key]
        total = carrier.zero()
        for i in range(1, n + 1):
            j = n - i
            for sigma in unshuffles_with_tail(n, i):
                perm = sigma.permute(list(range(n)))
                sign = skew_sign(sigma, degs)
                inner = L.bracket(i, [gens[p] for p in perm[:i]])
                outer_args = [inner] + [gens[p] for p in perm[i:]]
                term = L.bracket(j + 1, outer_args)
                total = total + term.scale(sign_scalar((i * j) + (0 if sign == 1 else 1)))
        if not total.is_zero():
            out[key] = total
    return out


# ---------------------------------------------------------------------------
# decalage
# ---------------------------------------------------------------------------


def _shift_module(module: FreeModule, shift: int, name_suffix: str) -> FreeModule:
    shifted = FreeModule(
        module.base,
        [(name, deg - shift) for name, deg in zip(module.gen_names, module.degrees)],
        name=module.name + name_suffix,
    )
    shifted.set_differential(
        {
            i: ModuleElement(shifted, dict(module.differential_basis(i).items()))
            for i in range(module.rank)
            if not module.differential_basis(i).is_zero()
        }
    )
    return shifted


def _decalage_exponent(key: GenKey, degrees: Sequence[int]) -> int:
    n = len(key)
    return sum((n - pos) * degrees[i] for pos, i in enumerate(key, start=1))


def decalage(L: LInftyAlgebra) -> LInftyOneAlgebra:
    """Shift a skew structure to the symmetric picture on the shifted module."""
    shifted = _shift_module(L.carrier, 1, "[1]")
    out = LInftyOneAlgebra(shifted, arity_cap=L.arity_cap)
    for n, table in L.tables.items():
        for key, val in table.values.items():
            exponent = _decalage_exponent(key, L.carrier.degrees)
            new_val = ModuleElement(shifted, dict(val.items())).scale(sign_scalar(exponent))
            out.set_bracket(n, key, new_val)
    return out


def decalage_inverse(L1: LInftyOneAlgebra) -> LInftyAlgebra:
    """Inverse dictionary: unshifted degrees are the shifted ones plus one."""
    unshifted = _shift_module(L1.carrier, -1, "[-1]")
    out = LInftyAlgebra(unshifted, arity_cap=L1.arity_cap)
    for n, table in L1.tables.items():
        for key, val in table.values.items():
            exponent = _decalage_exponent(key, unshifted.degrees)
            new_val = ModuleElement(unshifted, dict(val.items())).scale(sign_scalar(exponent))
            out.set_bracket(n, key, new_val)
    return out


# ---------------------------------------------------------------------------
# derivations of the base algebra and the shifted DGLA
# ---------------------------------------------------------------------------


class AlgebraDerivation:
    """A graded K-linear map A -> A given by its values on the basis.

    Whether it actually satisfies Leibniz is a property (``leibniz_defects``);
    the constructors used by the kit only produce genuine derivations.
    """

    __slots__ = ("base", "values")

    def __init__(self, base: BaseAlgebra, values: Mapping[int, AlgebraElement]):
        object.__setattr__(self, "base", base)
        object.__setattr__(
            self, "values", tuple(values.get(i, base.zero()) for i in range(base.dim))
        )

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraDerivation is immutable")

    def value_on(self, i: int) -> AlgebraElement:
        return self.values[i]

    def apply(self, a: AlgebraElement) -> AlgebraElement:
        acc = self.base.zero()
        for i, c in a.items():
            acc = acc + self.values[i].scale(c)
        return acc

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values)

    def degree_parts(self) -> Dict[int, "AlgebraDerivation"]:
        parts: Dict[int, Dict[int, AlgebraElement]] = {}
        for i, v in enumerate(self.values):
            for d, hv in v.homogeneous_parts().items():
                k = d - self.base.degrees[i]
                slot = parts.setdefault(k, {})
                slot[i] = slot.get(i, self.base.zero()) + hv
        return {k: AlgebraDerivation(self.base, vals) for k, vals in sorted(parts.items())}

    def degree(self) -> Optional[int]:
        parts = self.degree_parts()
        if not parts:
            return None
        if len(parts) > 1:
            raise DegreeError("derivation is not homogeneous")
        return next(iter(parts))

    def __add__(self, other: "AlgebraDerivation") -> "AlgebraDerivation":
        return AlgebraDerivation(
            self.base, {i: self.values[i] + other.values[i] for i in range(self.base.dim)}
        )

    def __sub__(self, other: "AlgebraDerivation") -> "AlgebraDerivation":
        return self + other.scale(Scalar(-1))

    def __neg__(self) -> "AlgebraDerivation":
        return self.scale(Scalar(-1))

    def scale(self, s: Scalar) -> "AlgebraDerivation":
        return AlgebraDerivation(self.base, {i: self.values[i].scale(s) for i in range(self.base.dim)})

    def a_mul(self, a: AlgebraElement) -> "AlgebraDerivation":
        """a.P, again a derivation (left module structure on Der(A))."""
        return AlgebraDerivation(self.base, {i: a * self.values[i] for i in range(self.base.dim)})

    def compose(self, other: "AlgebraDerivation") -> "AlgebraDerivation":
        return AlgebraDerivation(
            self.base, {i: self.apply(other.values[i]) for i in range(self.base.dim)}
        )

    def commutator(self, other: "AlgebraDerivation") -> "AlgebraDerivation":
        """[P, Q] = P Q - (-1)^{|P||Q|} Q P, computed per homogeneous part."""
        out = AlgebraDerivation(self.base, {})
        for dp, P in self.degree_parts().items():
            for dq, Q in other.degree_parts().items():
                out = out + P.compose(Q) + Q.compose(P).scale(sign_scalar(dp * dq + 1))
        return out

    def leibniz_defects(self) -> List[str]:
        problems = []
        base = self.base
        for part_deg, P in self.degree_parts().items():
            for i in range(base.dim):
                for j in range(base.dim):
                    lhs = P.apply(base.product_basis(i, j))
                    rhs = P.values[i] * base.basis_element(j) + (
                        base.basis_element(i).scale(sign_scalar(part_deg * base.degrees[i]))
                        * P.values[j]
                    )
                    if lhs != rhs:
                        problems.append(
                            f"Leibniz fails on ({base.names[i]}, {base.names[j]}) in degree {part_deg}"
                        )
        return problems

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AlgebraDerivation)
            and self.base is other.base
            and self.values == other.values
        )

    def __hash__(self):
        return hash((id(self.base), self.values))

    def __repr__(self) -> str:
        bits = [
            f"{self.base.names[i]} -> {v}" for i, v in enumerate(self.values) if not v.is_zero()
        ]
        return "AlgebraDerivation(" + "; ".join(bits) + ")"


def d_A_derivation(base: BaseAlgebra) -> AlgebraDerivation:
    return AlgebraDerivation(
        base, {i: base.differential_basis(i) for i in range(base.dim)}
    )


def algebra_derivation_basis(base: BaseAlgebra, degree: int) -> List[AlgebraDerivation]:
    """Exact basis of the degree-k derivations of the base algebra."""
    vars_: List[Tuple[int, int]] = []
    for i in range(base.dim):
        for j in range(base.dim):
            if base.degrees[j] == base.degrees[i] + degree:
                vars_.append((i, j))
    if not vars_:
        return []
    var_index = {v: k for k, v in enumerate(vars_)}
    rows: List[List[Scalar]] = []
    for i1 in range(base.dim):
        for i2 in range(base.dim):
            # P(e_i1 e_i2) - P(e_i1) e_i2 - (-1)^{k |e_i1|} e_i1 P(e_i2) = 0,
            # one linear equation per output basis component t
            out_rows: Dict[int, Dict[Tuple[int, int], Scalar]] = {}

            def acc(t, var, scal):
                if var in var_index:
                    slot = out_rows.setdefault(t, {})
                    slot[var] = slot.get(var, Scalar.zero()) + scal

            for m, c in base.product_basis(i1, i2).items():
                for j in range(base.dim):
                    if (m, j) in var_index:
                        acc(j, (m, j), c)
            for j in range(base.dim):
                if (i1, j) in var_index:
                    for t, q in base.product_basis(j, i2).items():
                        acc(t, (i1, j), -q)
            sign = sign_scalar(degree * base.degrees[i1])
            for j in range(base.dim):
                if (i2, j) in var_index:
                    for t, q in base.product_basis(i1, j).items():
                        acc(t, (i2, j), -(q * sign))
            for t, coeff_map in out_rows.items():
                row = [Scalar.zero()] * len(vars_)
                for var, scal in coeff_map.items():
                    row[var_index[var]] = scal
                rows.append(row)
    basis_vectors = nullspace(rows, len(vars_))
    out = []
    for vec in basis_vectors:
        values: Dict[int, Dict[int, Scalar]] = {}
        for (i, j), k in var_index.items():
            if not vec[k].is_zero():
                values.setdefault(i, {})[j] = vec[k]
        out.append(
            AlgebraDerivation(
                base, {i: AlgebraElement(base, m) for i, m in values.items()}
            )
        )
    return out


class ShiftedDerDGLA:
    """Der(A)[1] as a symmetric-bracket structure on concrete derivations.

    ell_1(P) = [d_A, P];  ell_2(P, Q) = (-1)^{|P|} [P, Q]  (degrees in Der(A),
    i.e. unshifted); all higher brackets vanish.  Elements carry their shifted
    degree |P| - 1 in all alpha-sign bookkeeping.
    """

    def __init__(self, base: BaseAlgebra, degrees: Sequence[int], basis: Sequence[AlgebraDerivation]):
        self.base = base
        self.der_degrees = tuple(degrees)
        self.basis = tuple(basis)
        self.dA = d_A_derivation(base)

    def shifted_degrees(self) -> Tuple[int, ...]:
        return tuple(d - 1 for d in self.der_degrees)

    def zero(self) -> AlgebraDerivation:
        return AlgebraDerivation(self.base, {})

    def bracket(self, n: int, args: Sequence[AlgebraDerivation]) -> AlgebraDerivation:
        if n == 1:
            return self.dA.commutator(args[0])
        if n == 2:
            P, Q = args
            out = self.zero()
            for dp, Ppart in P.degree_parts().items():
                out = out + Ppart.commutator(Q).scale(sign_scalar(dp))
            return out
        return self.zero()

    def jacobi_residual(self, n: int) -> Dict[GenKey, AlgebraDerivation]:
        out: Dict[GenKey, AlgebraDerivation] = {}
        shifted = self.shifted_degrees()
        for key in sorted_tuples(len(self.basis), n):
            degs = [shifted[i] for i in key]
            elems = [self.basis[i] for i in key]
            total = self.zero()
            for i in range(1, n + 1):
                for sigma in unshuffles_with_tail(n, i):
                    perm = sigma.permute(list(range(n)))
                    sign = sym_sign(sigma, degs)
                    inner = self.bracket(i, [elems[p] for p in perm[:i]])
                    term = self.bracket(n - i + 1, [inner] + [elems[p] for p in perm[i:]])
                    total = total + term.scale(sign_scalar(0 if sign == 1 else 1))
            if not total.is_zero():
                out[key] = total
        return out


def build_shifted_der_dgla(base: BaseAlgebra) -> ShiftedDerDGLA:
    """Compute Der(A) exactly and package it as the shifted DGLA."""
    lo, hi = base.degree_range()
    degrees: List[int] = []
    basis: List[AlgebraDerivation] = []
    for k in range(lo - hi, hi - lo + 1):
        for der in algebra_derivation_basis(base, k):
            degrees.append(k)
            basis.append(der)
    return ShiftedDerDGLA(base, degrees, basis)


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------


class LInftyMorphism:
    """Degree-0 graded symmetric components f_n from a symmetric structure.

    Component values live in the target structure's element type: module
    elements for a module-carried target, concrete algebra derivations for
    the shifted derivation DGLA.
    """

    def __init__(self, source: LInftyOneAlgebra, target, zero_value):
        self.source = source
        self.target = target
        self.zero_value = zero_value
        self.tables: Dict[int, Dict[GenKey, object]] = {}

    def set_component(self, n: int, key: Sequence[int], value):
        ckey, sign, vanishes = canonicalize_key(
            key, self.source.carrier.degrees, symmetric=True
        )
        if vanishes:
            return
        self.tables.setdefault(n, {})[ckey] = value.scale(sign_scalar(0 if sign == 1 else 1))

    def max_arity(self) -> int:
        return max(self.tables, default=0)

    def component(self, n: int, args: Sequence[ModuleElement]):
        table = self.tables.get(n)
        if table is None:
            return self.zero_value

        def lookup(gens: GenKey):
            ckey, sign, vanishes = canonicalize_key(
                gens, self.source.carrier.degrees, symmetric=True
            )
            if vanishes:
                return None
            got = table.get(ckey)
            if got is None:
                return None
            return got.scale(sign_scalar(0 if sign == 1 else 1))

        return multilinear_extend(
            lookup, 0, args, self.source.carrier.degrees, self.zero_value
        )


def identity_morphism(L: LInftyOneAlgebra) -> LInftyMorphism:
    f = LInftyMorphism(L, L, L.carrier.zero())
    for i in range(L.carrier.rank):
        f.set_component(1, (i,), L.carrier.generator(i))
    return f


def morphism_residual(
    f: LInftyMorphism, L: LInftyOneAlgebra, target, n: int
) -> Dict[GenKey, object]:
    """Defect of the structure-morphism identity at total arity n.

    Left side: unshuffle sum feeding source brackets into components.
    Right side: canonical-partition sum feeding component blocks into the
    target brackets.
    """
    carrier = L.carrier
    out: Dict[GenKey, object] = {}
    for key in sorted_tuples(carrier.rank, n):
        degs = [carrier.degrees[i] for i in key]
        gens = [carrier.generator(i) for i in key]
        lhs = f.zero_value
        for i in range(1, n + 1):
            for sigma in unshuffles_with_tail(n, i):
                perm = sigma.permute(list(range(n)))
                sign = sym_sign(sigma, degs)
                inner = L.bracket(i, [gens[p] for p in perm[:i]])
                term = f.component(n - i + 1, [inner] + [gens[p] for p in perm[i:]])
                lhs = lhs + term.scale(sign_scalar(0 if sign == 1 else 1))
        rhs = f.zero_value
        for blocks in canonical_partitions(n):
            sigma = partition_permutation(blocks)
            sign = sym_sign(sigma, degs)
            values = [
                f.component(len(b), [gens[x - 1] for x in b]) for b in blocks
            ]
            term = target.bracket(len(blocks), values)
            rhs = rhs + term.scale(sign_scalar(0 if sign == 1 else 1))
        residual = lhs + rhs.scale(Scalar(-1))
        if not residual.is_zero():
            out[key] = residual
    return out
