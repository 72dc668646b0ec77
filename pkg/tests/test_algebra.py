"""Base algebra and module layer."""

from __future__ import annotations

from fractions import Fraction

import pytest

from algebroidkit.algebra import AlgebraElement, BaseAlgebra, validate_base_algebra
from algebroidkit.errors import DegreeError
from algebroidkit.fixtures import (
    Rng,
    eps_poly_base,
    eps_square_base,
    exterior_base,
    lambda_eps,
    nontrivial_dga,
    tensor_base,
    trivial_base,
    truncated_poly,
)
from algebroidkit.modules import FreeModule, ModuleElement, pair_dual, validate_module
from algebroidkit.scalars import ONE, Scalar, sign_scalar


def test_scalar_arithmetic():
    a = Scalar(Fraction(1, 2), Fraction(1, 3))
    b = Scalar(2, -1)
    assert (a + b) - b == a
    assert a * b == Scalar(Fraction(4, 3), Fraction(1, 6))
    assert (a / b) * b == a
    assert Scalar.i() * Scalar.i() == Scalar(-1)
    assert Scalar(3).div_int(2) == Scalar(Fraction(3, 2))
    q = a.as_quadruple()
    assert Scalar.from_quadruple(q) == a


def test_standard_bases_validate():
    for base in [trivial_base(), lambda_eps(), eps_square_base(), truncated_poly(), eps_poly_base(), nontrivial_dga()]:
        assert validate_base_algebra(base) == []


def test_exterior_square_zero():
    base = lambda_eps()
    e = base.from_names({"e": ONE})
    assert (e * e).is_zero()
    assert e * base.one() == e


def test_fabricated_square_reported():
    # exterior generator with e*e = 1 violates graded commutativity/nilpotence
    basis = [("1", 0), ("e", 1)]
    bad = BaseAlgebra(basis, unit=0, products={(1, 1): {0: ONE}})
    problems = validate_base_algebra(bad)
    assert any("commutativity" in p for p in problems)


def test_twisted_differential_passes():
    base = nontrivial_dga()
    assert validate_base_algebra(base) == []
    x = base.from_names({"x": ONE})
    xe = base.from_names({"x*e": ONE})
    assert x.d() == xe
    assert (x * x).is_zero()
    assert x.d().d().is_zero()


def test_broken_leibniz_reported():
    # d(e) = 1 has wrong degree and breaks Leibniz on (e, e)
    basis = [("1", 0), ("e", 1)]
    bad = BaseAlgebra(basis, unit=0, products={(1, 1): {}}, differential={1: {0: ONE}})
    problems = validate_base_algebra(bad)
    assert problems


def test_element_degree_decomposition():
    base = eps_poly_base()
    rng = Rng(5)
    el = rng.algebra_element(base)
    parts = el.homogeneous_parts()
    total = base.zero()
    for d, p in parts.items():
        assert p.degree() == d
        total = total + p
    assert total == el


def test_inhomogeneous_degree_raises():
    base = lambda_eps()
    mixed = base.one() + base.from_names({"e": ONE})
    with pytest.raises(DegreeError):
        mixed.degree()


def test_graded_commutativity_random():
    base = eps_poly_base()
    rng = Rng(11)
    for _ in range(30):
        a = rng.algebra_element(base)
        b = rng.algebra_element(base)
        lhs = a * b
        rhs = base.zero()
        for da, ha in a.homogeneous_parts().items():
            for db, hb in b.homogeneous_parts().items():
                rhs = rhs + (hb * ha).scale(sign_scalar(da * db))
        assert lhs == rhs


# -- modules -----------------------------------------------------------------


def test_module_zero_differential_passes():
    base = lambda_eps()
    mod = FreeModule(base, [("g", 0), ("h", 1)])
    assert validate_module(mod) == []


def test_module_eps_differential():
    base = lambda_eps()
    mod = FreeModule(base, [("g", 0)])
    e = base.from_names({"e": ONE})
    mod.set_differential({0: ModuleElement(mod, {0: e})})
    assert validate_module(mod) == []
    g = mod.generator(0)
    assert g.d() == ModuleElement(mod, {0: e})
    assert g.d().d().is_zero()


def test_module_bad_differential_reported():
    base = truncated_poly("u", 2, 3)  # u^2 != 0
    mod = FreeModule(base, [("g", 0)])
    u = base.from_names({"u": ONE})
    mod.set_differential({0: ModuleElement(mod, {0: u})})
    problems = validate_module(mod)
    assert any("d^2" in p for p in problems)
    assert any("degree" in p for p in problems)  # |u| = 2 != |g| + 1


def test_module_leibniz_of_d():
    base = nontrivial_dga()
    mod = FreeModule(base, [("g", 1)])
    e = base.from_names({"e": ONE})
    mod.set_differential({0: ModuleElement(mod, {0: e})})
    rng = Rng(21)
    for _ in range(20):
        a = rng.algebra_element(base)
        v = rng.module_element(mod)
        lhs = v.a_mul(a).d()
        rhs = v.a_mul(a.d())
        for d, ha in a.homogeneous_parts().items():
            rhs = rhs + v.d().a_mul(ha).scale(sign_scalar(d))
        assert lhs == rhs


def test_dual_pairing_signs():
    base = lambda_eps()
    mod = FreeModule(base, [("g", 1)])
    e = base.from_names({"e": ONE})
    v = ModuleElement(mod, {0: e})
    # letter degree is -1 (odd); coefficient e is odd: sign -1
    assert pair_dual(mod, 0, v) == -e
    assert pair_dual(mod, 0, mod.generator(0)) == base.one()
