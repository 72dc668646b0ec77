"""Finite-dimensional graded commutative unital dgas over the Gaussian rationals.

A BaseAlgebra is given by a named, graded basis, a sparse multiplication
table, a distinguished unit basis element and a degree-1 differential d_A.
Elements are immutable sparse coefficient vectors.  All invariants
(commutativity, associativity, unit law, Leibniz, d^2 = 0) are checked by
``validate_base_algebra`` which reports violations with witnesses instead of
raising.
"""

from __future__ import annotations

from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from .errors import BaseMismatch, DegreeError, KitError
from .scalars import ONE, Scalar, sign_scalar


class AlgebraElement:
    """Sparse element of a BaseAlgebra; immutable, structurally comparable."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: "BaseAlgebra", coeffs: Mapping[int, Scalar]):
        cleaned = tuple(sorted((i, c) for i, c in coeffs.items() if not c.is_zero()))
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "coeffs", cleaned)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    # -- basics ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def items(self) -> Tuple[Tuple[int, Scalar], ...]:
        return self.coeffs

    def coefficient(self, idx: int) -> Scalar:
        for i, c in self.coeffs:
            if i == idx:
                return c
        return Scalar.zero()

    def degree(self) -> Optional[int]:
        """Degree if homogeneous (zero element has no degree), else raises."""
        degs = {self.algebra.degrees[i] for i, _ in self.coeffs}
        if not degs:
            return None
        if len(degs) > 1:
            raise DegreeError(f"element is not homogeneous: degrees {sorted(degs)}")
        return degs.pop()

    def homogeneous_parts(self) -> Dict[int, "AlgebraElement"]:
        parts: Dict[int, Dict[int, Scalar]] = {}
        for i, c in self.coeffs:
            parts.setdefault(self.algebra.degrees[i], {})[i] = c
        return {d: AlgebraElement(self.algebra, m) for d, m in sorted(parts.items())}

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "AlgebraElement"):
        if self.algebra is not other.algebra:
            raise BaseMismatch("elements of different base algebras")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        acc = dict(self.coeffs)
        for i, c in other.coeffs:
            acc[i] = acc.get(i, Scalar.zero()) + c
        return AlgebraElement(self.algebra, acc)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, {i: -c for i, c in self.coeffs})

    def scale(self, s: Scalar) -> "AlgebraElement":
        return AlgebraElement(self.algebra, {i: c * s for i, c in self.coeffs})

    def a_mul(self, a: "AlgebraElement") -> "AlgebraElement":
        """Left multiplication, mirroring the module-element interface."""
        return a * self

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        acc: Dict[int, Scalar] = {}
        alg = self.algebra
        for i, ci in self.coeffs:
            for j, cj in other.coeffs:
                prod = alg.product_basis(i, j)
                s = ci * cj
                for k, ck in prod.coeffs:
                    acc[k] = acc.get(k, Scalar.zero()) + s * ck
        return AlgebraElement(alg, acc)

    def d(self) -> "AlgebraElement":
        """Apply the differential d_A (extended linearly from the basis)."""
        alg = self.algebra
        acc: Dict[int, Scalar] = {}
        for i, c in self.coeffs:
            for k, ck in alg.differential_basis(i).coeffs:
                acc[k] = acc.get(k, Scalar.zero()) + c * ck
        return AlgebraElement(alg, acc)

    # -- comparison ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AlgebraElement)
            and self.algebra is other.algebra
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((id(self.algebra), self.coeffs))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        names = self.algebra.names
        return " + ".join(f"({c})*{names[i]}" for i, c in self.coeffs)


class BaseAlgebra:
    """Graded commutative unital dga with a finite named basis.

    products maps ordered basis pairs (i, j) to sparse coefficient maps; only
    nonzero products need to be supplied, and both orders may be given (the
    validator checks graded commutativity).  Missing pairs multiply to zero,
    except pairs involving the unit which default to the unit law.
    """

    def __init__(
        self,
        basis: Sequence[Tuple[str, int]],
        unit: int,
        products: Mapping[Tuple[int, int], Mapping[int, Scalar]],
        differential: Optional[Mapping[int, Mapping[int, Scalar]]] = None,
    ):
        self.names = tuple(name for name, _ in basis)
        self.degrees = tuple(int(deg) for _, deg in basis)
        if len(set(self.names)) != len(self.names):
            raise KitError("duplicate basis names")
        if not (0 <= unit < len(self.names)):
            raise KitError("unit index out of range")
        if self.degrees[unit] != 0:
            raise DegreeError("unit must have degree 0")
        self.unit = unit
        self._products: Dict[Tuple[int, int], AlgebraElement] = {}
        for (i, j), val in products.items():
            self._products[(i, j)] = AlgebraElement(self, dict(val))
        self._differential: Dict[int, AlgebraElement] = {}
        for i, val in (differential or {}).items():
            self._differential[i] = AlgebraElement(self, dict(val))

    # -- structural access ---------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.names)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KitError(f"no basis element named {name!r}") from None

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, {})

    def one(self) -> AlgebraElement:
        return AlgebraElement(self, {self.unit: ONE})

    def basis_element(self, i: int) -> AlgebraElement:
        return AlgebraElement(self, {i: ONE})

    def element(self, mapping: Mapping[int, Scalar]) -> AlgebraElement:
        return AlgebraElement(self, dict(mapping))

    def from_names(self, mapping: Mapping[str, Scalar]) -> AlgebraElement:
        return AlgebraElement(self, {self.index_of(n): c for n, c in mapping.items()})

    def product_basis(self, i: int, j: int) -> AlgebraElement:
        got = self._products.get((i, j))
        if got is not None:
            return got
        if i == self.unit:
            return self.basis_element(j)
        if j == self.unit:
            return self.basis_element(i)
        # fall back to graded commutativity if only the mirror pair is stored
        mirror = self._products.get((j, i))
        if mirror is not None:
            return mirror.scale(sign_scalar(self.degrees[i] * self.degrees[j]))
        return self.zero()

    def differential_basis(self, i: int) -> AlgebraElement:
        return self._differential.get(i, self.zero())

    def degree_range(self) -> Tuple[int, int]:
        return min(self.degrees), max(self.degrees)

    def __repr__(self) -> str:
        return f"BaseAlgebra(dim={self.dim}, basis={self.names})"


def validate_base_algebra(algebra: BaseAlgebra) -> list[str]:
    """Check every BaseAlgebra invariant; returns a list of violation strings."""
    problems: list[str] = []
    n = algebra.dim
    names = algebra.names
    degs = algebra.degrees

    for i in range(n):
        for j in range(n):
            prod = algebra.product_basis(i, j)
            try:
                pd = prod.degree()
            except DegreeError:
                problems.append(f"product {names[i]}*{names[j]} is not homogeneous")
                continue
            if pd is not None and pd != degs[i] + degs[j]:
                problems.append(
                    f"product {names[i]}*{names[j]} has degree {pd}, expected {degs[i] + degs[j]}"
                )
            flipped = algebra.product_basis(j, i).scale(sign_scalar(degs[i] * degs[j]))
            if prod != flipped:
                problems.append(f"graded commutativity fails on ({names[i]}, {names[j]})")

    for i in range(n):
        if algebra.product_basis(algebra.unit, i) != algebra.basis_element(i):
            problems.append(f"unit law fails on {names[i]}")

    for i in range(n):
        for j in range(n):
            for k in range(n):
                left = algebra.product_basis(i, j) * algebra.basis_element(k)
                right = algebra.basis_element(i) * algebra.product_basis(j, k)
                if left != right:
                    problems.append(
                        f"associativity fails on ({names[i]}, {names[j]}, {names[k]})"
                    )

    for i in range(n):
        di = algebra.differential_basis(i)
        if not di.is_zero():
            try:
                dd = di.degree()
            except DegreeError:
                problems.append(f"d({names[i]}) is not homogeneous")
                dd = None
            if dd is not None and dd != degs[i] + 1:
                problems.append(f"d({names[i]}) has degree {dd}, expected {degs[i] + 1}")
        if not di.d().is_zero():
            problems.append(f"d^2 != 0 on {names[i]}")

    for i in range(n):
        for j in range(n):
            lhs = algebra.product_basis(i, j).d()
            rhs = algebra.differential_basis(i) * algebra.basis_element(j)
            rhs = rhs + algebra.basis_element(i).scale(sign_scalar(degs[i])) * algebra.differential_basis(j)
            if lhs != rhs:
                problems.append(f"Leibniz fails on ({names[i]}, {names[j]})")

    return problems
