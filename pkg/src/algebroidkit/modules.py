"""Finitely generated free graded modules over a BaseAlgebra.

Elements are written with coefficients on the left: v = sum_i a_i . g_i.
The differential d_L is stored on generators and extended by the Leibniz
rule  d(a.g) = d_A(a).g + (-1)^{|a|} a.d_L(g).

Dual generators g_i^vee (of degree -|g_i|) pair against elements with the
Koszul rule  g^vee(a.g') = (-1)^{|a||g^vee|} a delta_{g,g'}.
"""

from __future__ import annotations

from typing import Dict, Mapping, Optional, Sequence, Tuple

from .algebra import AlgebraElement, BaseAlgebra
from .errors import BaseMismatch, DegreeError, KitError
from .scalars import ONE, Scalar, sign_scalar


class ModuleElement:
    """Sparse element of a FreeModule: generator index -> left coefficient."""

    __slots__ = ("module", "coeffs")

    def __init__(self, module: "FreeModule", coeffs: Mapping[int, AlgebraElement]):
        cleaned = tuple(sorted((i, a) for i, a in coeffs.items() if not a.is_zero()))
        object.__setattr__(self, "module", module)
        object.__setattr__(self, "coeffs", cleaned)

    def __setattr__(self, name, value):
        raise AttributeError("ModuleElement is immutable")

    def is_zero(self) -> bool:
        return not self.coeffs

    def items(self) -> Tuple[Tuple[int, AlgebraElement], ...]:
        return self.coeffs

    def coefficient(self, idx: int) -> AlgebraElement:
        for i, a in self.coeffs:
            if i == idx:
                return a
        return self.module.base.zero()

    def degree(self) -> Optional[int]:
        degs = set()
        for i, a in self.coeffs:
            for d in a.homogeneous_parts():
                degs.add(d + self.module.degrees[i])
        if not degs:
            return None
        if len(degs) > 1:
            raise DegreeError(f"module element not homogeneous: degrees {sorted(degs)}")
        return degs.pop()

    def homogeneous_parts(self) -> Dict[int, "ModuleElement"]:
        parts: Dict[int, Dict[int, AlgebraElement]] = {}
        for i, a in self.coeffs:
            for d, ha in a.homogeneous_parts().items():
                tot = d + self.module.degrees[i]
                slot = parts.setdefault(tot, {})
                slot[i] = slot.get(i, self.module.base.zero()) + ha
        return {d: ModuleElement(self.module, m) for d, m in sorted(parts.items())}

    def _check(self, other: "ModuleElement"):
        if self.module is not other.module:
            raise BaseMismatch("elements of different modules")

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        self._check(other)
        acc = {i: a for i, a in self.coeffs}
        for i, a in other.coeffs:
            acc[i] = acc.get(i, self.module.base.zero()) + a
        return ModuleElement(self.module, acc)

    def __sub__(self, other: "ModuleElement") -> "ModuleElement":
        return self + (-other)

    def __neg__(self) -> "ModuleElement":
        return ModuleElement(self.module, {i: -a for i, a in self.coeffs})

    def scale(self, s: Scalar) -> "ModuleElement":
        return ModuleElement(self.module, {i: a.scale(s) for i, a in self.coeffs})

    def a_mul(self, a: AlgebraElement) -> "ModuleElement":
        """Left action a.v (no sign: coefficients already sit on the left)."""
        return ModuleElement(self.module, {i: a * c for i, c in self.coeffs})

    def d(self) -> "ModuleElement":
        """Leibniz extension of d_L over d_A."""
        mod = self.module
        acc: Dict[int, AlgebraElement] = {}

        def add(idx, val):
            acc[idx] = acc.get(idx, mod.base.zero()) + val

        for i, a in self.coeffs:
            add(i, a.d())
            for deg, ha in a.homogeneous_parts().items():
                signed = ha.scale(sign_scalar(deg))
                for j, b in mod.differential_basis(i).coeffs:
                    add(j, signed * b)
        return ModuleElement(mod, acc)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ModuleElement)
            and self.module is other.module
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((id(self.module), self.coeffs))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        names = self.module.gen_names
        return " + ".join(f"[{a}]*{names[i]}" for i, a in self.coeffs)


class FreeModule:
    """Free graded module over a BaseAlgebra with a degree-1 differential."""

    def __init__(
        self,
        base: BaseAlgebra,
        generators: Sequence[Tuple[str, int]],
        differential: Optional[Mapping[int, Mapping[int, AlgebraElement]]] = None,
        name: str = "L",
    ):
        self.base = base
        self.name = name
        self.gen_names = tuple(n for n, _ in generators)
        self.degrees = tuple(int(d) for _, d in generators)
        if len(set(self.gen_names)) != len(self.gen_names):
            raise KitError("duplicate generator names")
        self._differential: Dict[int, ModuleElement] = {}
        for i, val in (differential or {}).items():
            self._differential[i] = ModuleElement(self, dict(val))

    @property
    def rank(self) -> int:
        return len(self.gen_names)

    def index_of(self, name: str) -> int:
        try:
            return self.gen_names.index(name)
        except ValueError:
            raise KitError(f"no generator named {name!r}") from None

    def zero(self) -> ModuleElement:
        return ModuleElement(self, {})

    def generator(self, i: int) -> ModuleElement:
        return ModuleElement(self, {i: self.base.one()})

    def element(self, mapping: Mapping[int, AlgebraElement]) -> ModuleElement:
        return ModuleElement(self, dict(mapping))

    def differential_basis(self, i: int) -> ModuleElement:
        return self._differential.get(i, self.zero())

    def set_differential(self, differential: Mapping[int, ModuleElement]):
        """Used when a module and its differential must be built in two steps."""
        self._differential = {i: v for i, v in differential.items() if not v.is_zero()}

    def dual_letter_degrees(self) -> Tuple[int, ...]:
        return tuple(-d for d in self.degrees)

    def __repr__(self) -> str:
        return f"FreeModule({self.name}, rank={self.rank})"


def pair_dual(module: FreeModule, letter: int, v: ModuleElement) -> AlgebraElement:
    """Evaluate the dual generator g_letter^vee on v."""
    if v.module is not module:
        raise BaseMismatch("pairing across different modules")
    a = v.coefficient(letter)
    if a.is_zero():
        return module.base.zero()
    letter_degree = -module.degrees[letter]
    acc = module.base.zero()
    for deg, ha in a.homogeneous_parts().items():
        acc = acc + ha.scale(sign_scalar(deg * letter_degree))
    return acc


def validate_module(module: FreeModule) -> list[str]:
    """Check d_L degree bookkeeping and d_L^2 = 0 on all generators."""
    problems: list[str] = []
    for i in range(module.rank):
        dv = module.differential_basis(i)
        if not dv.is_zero():
            try:
                dd = dv.degree()
            except DegreeError:
                problems.append(f"d({module.gen_names[i]}) is not homogeneous")
                dd = None
            if dd is not None and dd != module.degrees[i] + 1:
                problems.append(
                    f"d({module.gen_names[i]}) has degree {dd}, expected {module.degrees[i] + 1}"
                )
        if not dv.d().is_zero():
            problems.append(f"d^2 != 0 on generator {module.gen_names[i]}")
    return problems
