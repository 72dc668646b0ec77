"""Chevalley-Eilenberg duality: round trips, residuals, square-zero equivalence."""

from __future__ import annotations

import pytest

from algebroidkit.algebroid import (
    AlgebroidStructure,
    algebroid_jacobi_residual,
    anchor_morphism_residual,
    ce_differential,
    extract_structure,
    leibniz_residual,
)
from algebroidkit.errors import KitError
from algebroidkit.fixtures import (
    Rng,
    conjugation_oracle_structure,
    lambda_eps,
    mixed_module,
    nontrivial_dga,
    random_algebroid,
    sample_bases,
    standard_module,
)
from algebroidkit.modules import FreeModule, ModuleElement
from algebroidkit.scalars import ONE, Scalar
from algebroidkit.signs import Permutation, enumerate_unshuffles, sym_sign
from algebroidkit.symtensor import (
    SymAlgebra,
    d0_derivation,
    evaluate,
    square_components,
)


def structures_equal(S1, S2) -> bool:
    if set(S1.brackets) != set(S2.brackets):
        return False
    for n in S1.brackets:
        if S1.brackets[n].keys() != S2.brackets[n].keys():
            return False
        for key in S1.brackets[n]:
            if S1.brackets[n][key].items() != S2.brackets[n][key].items():
                return False
    if set(S1.anchors) != set(S2.anchors):
        return False
    for n in S1.anchors:
        if S1.anchors[n].keys() != S2.anchors[n].keys():
            return False
        for key in S1.anchors[n]:
            if S1.anchors[n][key].items() != S2.anchors[n][key].items():
                return False
    return True


def test_trivial_structure_gives_d0():
    base = nontrivial_dga()
    carrier = standard_module(base, rank=2, seed=1)
    S = AlgebroidStructure(base, carrier)
    D = ce_differential(S, weight_cap=4)
    alg = D.algebra
    D0 = d0_derivation(alg, carrier)
    assert D == D0


def test_D0_on_base_is_dA():
    base = nontrivial_dga()
    carrier = standard_module(base, rank=2, seed=2)
    rng = Rng(31)
    S = random_algebroid(rng, base, carrier)
    D = ce_differential(S, weight_cap=4)
    for b in range(base.dim):
        got = D.component_on_algebra(0, b)
        assert got == D.algebra.scalar(base.differential_basis(b))


def test_round_trip_structure_to_derivation():
    rng = Rng(33)
    for base in sample_bases():
        for trial in range(8):
            carrier = standard_module(base, rank=rng.randint(1, 2), seed=100 + trial)
            S = random_algebroid(rng, base, carrier, derivation_anchors=False)
            D = ce_differential(S, weight_cap=4)
            S2 = extract_structure(D, carrier, bracket_cap=4, anchor_cap=5)
            assert structures_equal(S, S2)


def test_round_trip_derivation_to_structure():
    rng = Rng(34)
    for base in sample_bases():
        carrier = standard_module(base, rank=2, seed=55)
        S, D, Phi = conjugation_oracle_structure(rng, base, carrier, cap=4)
        D2 = ce_differential(S, weight_cap=4, algebra=D.algebra)
        assert D2 == D


def test_extraction_requires_dA():
    base = nontrivial_dga()
    carrier = standard_module(base, rank=1, seed=9)
    alg = SymAlgebra.over_module(carrier, cap=3)
    from algebroidkit.symtensor import DerivationD

    bad = DerivationD(alg, {base.unit: alg.scalar(base.one())}, {}, check=False)
    with pytest.raises(KitError):
        extract_structure(bad, carrier)


def test_extract_of_d0_is_abelian():
    base = lambda_eps()
    carrier = standard_module(base, rank=2, seed=4)
    alg = SymAlgebra.over_module(carrier, cap=4)
    D0 = d0_derivation(alg, carrier)
    S = extract_structure(D0, carrier)
    assert S.brackets == {}
    assert S.anchors == {}


def test_conjugation_oracle_passes_all_residuals():
    rng = Rng(35)
    for base in sample_bases():
        carrier = standard_module(base, rank=2, seed=66)
        S, D, Phi = conjugation_oracle_structure(rng, base, carrier, cap=4)
        assert square_components(D) == {}
        for n in range(1, 5):
            assert algebroid_jacobi_residual(S, n) == {}
            assert leibniz_residual(S, n) == {}
        for n in range(1, 4):
            assert anchor_morphism_residual(S, n) == {}


def single_entry_perturbations(S, limit=40):
    """Nonzero one-entry bracket bumps with valid degrees, deterministic order."""
    carrier = S.carrier
    base = S.base
    from algebroidkit.linfty import canonicalize_key, sorted_tuples

    out = []
    for n in range(2, S.bracket_cap + 1):
        for key in sorted_tuples(carrier.rank, n):
            _, _, vanishes = canonicalize_key(key, carrier.degrees, True)
            if vanishes:
                continue
            want = sum(carrier.degrees[i] for i in key) + 1
            for g in range(carrier.rank):
                for b in range(base.dim):
                    if base.degrees[b] + carrier.degrees[g] != want:
                        continue
                    bump = ModuleElement(carrier, {g: base.basis_element(b)})
                    out.append((n, key, bump))
                    if len(out) >= limit:
                        return out
    return out


def all_residuals_empty(S):
    jac = all(algebroid_jacobi_residual(S, m) == {} for m in range(1, 5))
    lei = all(leibniz_residual(S, m) == {} for m in range(1, 5))
    anc = all(anchor_morphism_residual(S, m) == {} for m in range(1, 4))
    return jac and lei and anc


def test_equivalence_square_iff_residuals():
    """square empty <=> all residual families vanish, incl. one-entry bumps."""
    rng = Rng(36)
    base = nontrivial_dga()
    carrier = mixed_module(base, [0, 1], seed=5)
    S, D, Phi = conjugation_oracle_structure(rng, base, carrier, cap=4)
    assert square_components(ce_differential(S, weight_cap=4)) == {}
    assert all_residuals_empty(S)

    broke_some = False
    for n, key, bump in single_entry_perturbations(S, limit=12):
        old = S.bracket_table_value(n, key)
        S.set_bracket(n, key, old + bump)
        sq_empty = square_components(ce_differential(S, weight_cap=4)) == {}
        res_empty = all_residuals_empty(S)
        assert sq_empty == res_empty
        if not sq_empty:
            broke_some = True
        S.set_bracket(n, key, old)
    assert broke_some


def test_ce_action_matches_unshuffle_expansion():
    """The Leibniz extension evaluates exactly as the two-sum expansion
    (anchor terms over Sh(n, r), bracket terms over Sh(n+1, r-1))."""
    rng = Rng(37)
    base = nontrivial_dga()
    carrier = standard_module(base, rank=2, seed=88)
    S = random_algebroid(rng, base, carrier, derivation_anchors=True)
    D = ce_differential(S, weight_cap=4)
    alg = D.algebra

    r = 2
    for word in alg.words_of_weight(r):
        eta = alg.word(word)
        eta_degree = alg.word_degree(word)
        for n in [0, 1, 2]:
            total_args = n + r
            image = D.apply(eta).weight_part(n + r)
            for key_tuple in [
                tuple(rng.randint(0, carrier.rank - 1) for _ in range(total_args))
                for _ in range(4)
            ]:
                gens = [carrier.generator(i) for i in key_tuple]
                degs = [carrier.degrees[i] for i in key_tuple]
                lhs = evaluate(image, gens, carrier)
                rhs = base.zero()
                for sigma in enumerate_unshuffles(n, r) if n else [Permutation.identity(r)]:
                    perm = sigma.permute(list(range(total_args)))
                    sign = sym_sign(sigma, degs)
                    first_deg = sum(degs[p] for p in perm[:n])
                    eta_args = [gens[p] for p in perm[n:]]
                    eta_val = evaluate(eta, eta_args, carrier)
                    term = S.anchor(n + 1, [gens[p] for p in perm[:n]], eta_val)
                    rhs = rhs + term.scale(
                        Scalar(-1 if (eta_degree * first_deg) % 2 else 1)
                        * Scalar(sign)
                    )
                if r >= 1:
                    for tau in enumerate_unshuffles(n + 1, r - 1) if r > 1 else [
                        Permutation.identity(n + 1)
                    ]:
                        perm = tau.permute(list(range(total_args)))
                        sign = sym_sign(tau, degs)
                        bracket_val = S.bracket(n + 1, [gens[p] for p in perm[: n + 1]])
                        rest = [gens[p] for p in perm[n + 1 :]]
                        term = evaluate(eta, [bracket_val] + rest, carrier)
                        rhs = rhs - term.scale(
                            Scalar(-1 if eta_degree % 2 else 1) * Scalar(sign)
                        )
                assert lhs == rhs


def test_leibniz_residual_unit_is_zero():
    rng = Rng(38)
    base = nontrivial_dga()
    carrier = standard_module(base, rank=2, seed=99)
    S = random_algebroid(rng, base, carrier)
    for n in range(1, 4):
        res = leibniz_residual(S, n)
        for (key, b), val in res.items():
            assert b != base.unit
