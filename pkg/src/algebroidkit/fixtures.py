"""Programmatic fixtures: small exact dgas, modules and random data.

These builders back both the test suite and the shipped fixture files.  All
randomness flows through a seeded random.Random so every run is reproducible.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import AlgebraElement, BaseAlgebra
from .linfty import LInftyAlgebra, algebra_derivation_basis
from .modules import FreeModule, ModuleElement
from .scalars import ONE, Scalar, sign_scalar
from .symtensor import DerivationD, FilteredAutomorphism, SymAlgebra, SymElement


# ---------------------------------------------------------------------------
# deterministic base algebras
# ---------------------------------------------------------------------------


def trivial_base() -> BaseAlgebra:
    """The ground field as a one-dimensional dga."""
    return BaseAlgebra([("1", 0)], unit=0, products={})


def exterior_base(generators: Sequence[Tuple[str, int]]) -> BaseAlgebra:
    """Exterior-type algebra on odd generators (squares vanish), d = 0.

    Basis: all strictly increasing monomials in the generators.
    """
    for name, deg in generators:
        if deg % 2 == 0:
            raise ValueError(f"exterior generator {name} must have odd degree")
    n = len(generators)
    subsets: List[Tuple[int, ...]] = []
    for mask in range(1 << n):
        subsets.append(tuple(i for i in range(n) if mask >> i & 1))
    subsets.sort(key=lambda s: (len(s), s))
    index = {s: k for k, s in enumerate(subsets)}

    def label(s):
        return "*".join(generators[i][0] for i in s) if s else "1"

    basis = [(label(s), sum(generators[i][1] for i in s)) for s in subsets]
    products = {}
    for s1 in subsets:
        for s2 in subsets:
            if set(s1) & set(s2):
                continue
            merged = tuple(sorted(s1 + s2))
            # sign: sort the concatenation, generators all odd
            perm = list(s1 + s2)
            exponent = 0
            for i in range(len(perm)):
                for j in range(i + 1, len(perm)):
                    if perm[i] > perm[j]:
                        exponent += generators[perm[i]][1] * generators[perm[j]][1]
            products[(index[s1], index[s2])] = {index[merged]: sign_scalar(exponent)}
    return BaseAlgebra(basis, unit=index[()], products=products)


def lambda_eps() -> BaseAlgebra:
    """The two-dimensional exterior algebra on one odd generator."""
    return exterior_base([("e", 1)])


def truncated_poly(name: str = "u", degree: int = 2, power: int = 2) -> BaseAlgebra:
    """K[u]/(u^power) with |u| = degree (even), d = 0."""
    if degree % 2:
        raise ValueError("truncated polynomial generator must have even degree")
    basis = [("1", 0)] + [
        (name if k == 1 else f"{name}^{k}", degree * k) for k in range(1, power)
    ]
    products = {}
    for i in range(power):
        for j in range(power):
            if 0 < i + j < power:
                products[(i, j)] = {i + j: ONE}
            elif i + j >= power:
                products[(i, j)] = {}
    return BaseAlgebra(basis, unit=0, products=products)


def tensor_base(a: BaseAlgebra, b: BaseAlgebra, sep: str = "|") -> BaseAlgebra:
    """Graded tensor product a (x) b with the Koszul product sign."""
    basis = []
    for i, (na, da) in enumerate(zip(a.names, a.degrees)):
        for j, (nb, db) in enumerate(zip(b.names, b.degrees)):
            basis.append((f"{na}{sep}{nb}", da + db))

    def idx(i, j):
        return i * b.dim + j

    products = {}
    for i1 in range(a.dim):
        for j1 in range(b.dim):
            for i2 in range(a.dim):
                for j2 in range(b.dim):
                    pa = a.product_basis(i1, i2)
                    pb = b.product_basis(j1, j2)
                    if pa.is_zero() or pb.is_zero():
                        continue
                    sign = sign_scalar(b.degrees[j1] * a.degrees[i2])
                    out: Dict[int, Scalar] = {}
                    for ka, ca in pa.items():
                        for kb, cb in pb.items():
                            out[idx(ka, kb)] = ca * cb * sign
                    products[(idx(i1, j1), idx(i2, j2))] = out
    differential: Dict[int, Dict[int, Scalar]] = {}
    for i in range(a.dim):
        for j in range(b.dim):
            out: Dict[int, Scalar] = {}
            for k, c in a.differential_basis(i).items():
                out[idx(k, j)] = out.get(idx(k, j), Scalar.zero()) + c
            for k, c in b.differential_basis(j).items():
                key = idx(i, k)
                out[key] = out.get(key, Scalar.zero()) + c * sign_scalar(a.degrees[i])
            if out:
                differential[idx(i, j)] = out
    return BaseAlgebra(basis, unit=idx(a.unit, b.unit), products=products, differential=differential)


def eps_poly_base() -> BaseAlgebra:
    """Lambda[e] (x) K[u]/(u^2): dimension 4, one odd and one even generator."""
    return tensor_base(lambda_eps(), truncated_poly("u", 2, 2))


def kodaira_base() -> BaseAlgebra:
    """Lambda[e] (x) K[u]/(u^2) twisted by d(e) = u (|e| = 1, |u| = 2).

    d^2 = 0 because d(u) = 0, and Leibniz survives the truncation since
    u^2 = 0; the unique four-dimensional sample base whose differential
    hits an even element.
    """
    plain = eps_poly_base()
    return BaseAlgebra(
        list(zip(plain.names, plain.degrees)),
        unit=plain.unit,
        products={
            (i, j): dict(plain.product_basis(i, j).items())
            for i in range(plain.dim)
            for j in range(plain.dim)
        },
        differential={plain.index_of("e|1"): {plain.index_of("1|u"): ONE}},
    )


def eps_square_base() -> BaseAlgebra:
    """Lambda[e, f] on two odd degree-1 generators, d = 0."""
    return exterior_base([("e", 1), ("f", 1)])


def nontrivial_dga() -> BaseAlgebra:
    """Lambda[e] (x) K[x]/(x^2) with d(x) = x*e, d(e) = 0; |x| = 0, |e| = 1.

    The smallest base in the suite with a genuinely nonzero differential;
    Leibniz holds because x^2 = 0 kills both sides of d(x*x).
    """
    basis = [("1", 0), ("e", 1), ("x", 0), ("x*e", 1)]
    products = {
        (1, 1): {},
        (1, 2): {3: ONE},
        (2, 1): {3: ONE},
        (2, 2): {},
        (2, 3): {},
        (3, 2): {},
        (1, 3): {},
        (3, 1): {},
        (3, 3): {},
    }
    differential = {2: {3: ONE}}
    return BaseAlgebra(basis, unit=0, products=products, differential=differential)


# ---------------------------------------------------------------------------
# seeded random data
# ---------------------------------------------------------------------------


class Rng:
    """Thin deterministic wrapper used by all randomized fixtures."""

    def __init__(self, seed: int):
        self.r = random.Random(seed)

    def scalar(self, zero_chance: float = 0.0, gaussian: bool = True) -> Scalar:
        if zero_chance and self.r.random() < zero_chance:
            return Scalar.zero()
        num = self.r.randint(-3, 3)
        den = self.r.randint(1, 3)
        re = Fraction(num, den)
        im = Fraction(0)
        if gaussian and self.r.random() < 0.3:
            im = Fraction(self.r.randint(-2, 2), self.r.randint(1, 2))
        if re == 0 and im == 0:
            re = Fraction(1)
        return Scalar(re, im)

    def algebra_element(
        self, base: BaseAlgebra, degree: Optional[int] = None, zero_chance: float = 0.3
    ) -> AlgebraElement:
        coeffs = {}
        for i in range(base.dim):
            if degree is not None and base.degrees[i] != degree:
                continue
            if self.r.random() < zero_chance:
                continue
            coeffs[i] = self.scalar()
        return AlgebraElement(base, coeffs)

    def module_element(
        self, module: FreeModule, degree: Optional[int] = None, zero_chance: float = 0.3
    ) -> ModuleElement:
        coeffs = {}
        for i in range(module.rank):
            if degree is None:
                a = self.algebra_element(module.base, None, zero_chance)
            else:
                a = self.algebra_element(module.base, degree - module.degrees[i], zero_chance)
            if not a.is_zero():
                coeffs[i] = a
        return ModuleElement(module, coeffs)

    def degrees(self, n: int, lo: int = -2, hi: int = 4) -> List[int]:
        return [self.r.randint(lo, hi) for _ in range(n)]

    def choice(self, seq):
        return self.r.choice(seq)

    def randint(self, a, b):
        return self.r.randint(a, b)

    def random(self):
        return self.r.random()


def sample_bases() -> List[BaseAlgebra]:
    """The standard trio of base dgas used across acceptance fixtures."""
    return [lambda_eps(), nontrivial_dga(), kodaira_base()]


def random_weight_raising_derivation(rng: Rng, alg: SymAlgebra, density: float = 0.7) -> DerivationD:
    """A genuine degree-0 derivation raising weight by at least one.

    Letter values are free; base values are built as sums u . delta(a) with
    u a degree (-|delta|) element of positive weight and delta an honest
    derivation of the base algebra, which keeps the table Leibniz-compatible.
    """
    base = alg.base
    on_algebra: Dict[int, SymElement] = {i: alg.zero() for i in range(base.dim)}
    lo, hi = base.degree_range()
    for k in range(lo - hi, hi - lo + 1):
        ders = algebra_derivation_basis(base, k)
        if not ders:
            continue
        for r in range(1, alg.cap + 1):
            for w in alg.words_of_weight(r):
                coeff_degree = -k - alg.word_degree(w)
                cands = [
                    b for b in range(base.dim) if base.degrees[b] == coeff_degree
                ]
                if not cands or rng.random() > density:
                    continue
                for delta in ders:
                    if rng.random() > density:
                        continue
                    u = alg.word(
                        w, base.basis_element(rng.choice(cands)).scale(rng.scalar())
                    )
                    for i in range(base.dim):
                        val = delta.value_on(i)
                        if val.is_zero():
                            continue
                        on_algebra[i] = on_algebra[i] + u * alg.scalar(val)
    on_letters: Dict[int, SymElement] = {}
    for i in range(alg.n_letters):
        parts: Dict[Tuple[int, ...], AlgebraElement] = {}
        for r in range(2, alg.cap + 1):
            for w in alg.words_of_weight(r):
                if rng.random() > density:
                    continue
                need = alg.letter_degrees[i] - alg.word_degree(w)
                cands = [k for k in range(base.dim) if base.degrees[k] == need]
                if cands:
                    parts[w] = base.basis_element(rng.choice(cands)).scale(rng.scalar())
        on_letters[i] = SymElement(alg, parts)
    return DerivationD(alg, on_algebra, on_letters, degree=0, check=False)


def random_unipotent(rng: Rng, alg: SymAlgebra, density: float = 0.25) -> FilteredAutomorphism:
    """exp of a random weight-raising degree-0 derivation."""
    return FilteredAutomorphism.from_exponential(
        random_weight_raising_derivation(rng, alg, density)
    )


# ---------------------------------------------------------------------------
# algebroid fixtures
# ---------------------------------------------------------------------------


def random_algebroid(
    rng: Rng,
    base: BaseAlgebra,
    carrier: FreeModule,
    bracket_cap: int = 4,
    anchor_cap: int = 5,
    derivation_anchors: bool = True,
    density: float = 0.5,
):
    """Random degree-consistent tables (not required to satisfy Jacobi).

    With derivation_anchors the anchor slices {key|-} are honest derivations
    of the base (coefficient times a Der(A) basis element), which is what
    ``validate`` demands; without it the raw tables are filled freely.
    """
    from .algebroid import AlgebroidStructure
    from .linfty import canonicalize_key, sorted_tuples

    S = AlgebroidStructure(base, carrier, bracket_cap=bracket_cap, anchor_cap=anchor_cap)
    for n in range(2, bracket_cap + 1):
        for key in sorted_tuples(carrier.rank, n):
            _, _, vanishes = canonicalize_key(key, carrier.degrees, True)
            if vanishes:
                continue
            if rng.random() > density:
                continue
            want = sum(carrier.degrees[i] for i in key) + 1
            val = rng.module_element(carrier, degree=want, zero_chance=0.4)
            if not val.is_zero():
                S.set_bracket(n, key, val)
    lo, hi = base.degree_range()
    der_cache = {}
    for n in range(2, anchor_cap + 1):
        for key in sorted_tuples(carrier.rank, n - 1):
            _, _, vanishes = canonicalize_key(key, carrier.degrees, True)
            if vanishes:
                continue
            if rng.random() > density:
                continue
            op_degree = sum(carrier.degrees[i] for i in key) + 1
            if derivation_anchors:
                for k in range(lo - hi, hi - lo + 1):
                    if k not in der_cache:
                        der_cache[k] = algebra_derivation_basis(base, k)
                    ders = der_cache[k]
                    if not ders or rng.random() < 0.5:
                        continue
                    delta = rng.choice(ders)
                    coeff = rng.algebra_element(base, degree=op_degree - k, zero_chance=0.2)
                    if coeff.is_zero():
                        continue
                    for b in range(base.dim):
                        val = coeff * delta.value_on(b)
                        if not val.is_zero():
                            val = val + S.anchor_table_value(n, key, b)
                            S.set_anchor(n, key, b, val)
            else:
                for b in range(base.dim):
                    if b == base.unit:
                        continue
                    want = op_degree + base.degrees[b]
                    val = rng.algebra_element(base, degree=want, zero_chance=0.5)
                    if not val.is_zero():
                        S.set_anchor(n, key, b, val)
    return S


def random_ce_derivation(rng: Rng, base: BaseAlgebra, carrier: FreeModule, cap: int = 4, density: float = 0.5):
    """Random degree-1 word data whose weight-0 part is the bare differential.

    The unit value stays zero, matching what any honest derivation satisfies;
    everything else is free, so the result generally does not square to zero.
    """
    from .symtensor import DerivationD, SymElement, d0_derivation

    alg = SymAlgebra.over_module(carrier, cap=cap)
    D0 = d0_derivation(alg, carrier)
    on_algebra = dict(D0.on_algebra)
    on_letters = dict(D0.on_letters)

    def random_words(target_degree, min_weight):
        parts = {}
        for r in range(min_weight, cap + 1):
            for w in alg.words_of_weight(r):
                if rng.random() > density:
                    continue
                need = target_degree - alg.word_degree(w)
                cands = [b for b in range(base.dim) if base.degrees[b] == need]
                if cands:
                    parts[w] = base.basis_element(rng.choice(cands)).scale(rng.scalar())
        return SymElement(alg, parts)

    for b in range(base.dim):
        if b == base.unit:
            continue
        extra = random_words(base.degrees[b] + 1, 1)
        if not extra.is_zero():
            on_algebra[b] = on_algebra.get(b, alg.zero()) + extra
    for i in range(alg.n_letters):
        extra = random_words(alg.letter_degrees[i] + 1, 2)
        if not extra.is_zero():
            on_letters[i] = on_letters.get(i, alg.zero()) + extra
    return DerivationD(alg, on_algebra, on_letters)


def conjugation_oracle_structure(rng: Rng, base: BaseAlgebra, carrier: FreeModule, cap: int = 4):
    """A genuinely valid algebroid: extract(Phi D0 Phi^-1) for random unipotent Phi."""
    from .algebroid import extract_structure
    from .symtensor import conjugate, d0_derivation

    alg = SymAlgebra.over_module(carrier, cap=cap)
    D0 = d0_derivation(alg, carrier)
    Phi = random_unipotent(rng, alg)
    D = conjugate(Phi, D0)
    return extract_structure(D, carrier, bracket_cap=cap, anchor_cap=cap + 1), D, Phi


# ---------------------------------------------------------------------------
# geometric model fixtures
# ---------------------------------------------------------------------------


def _random_dhat(rng: Rng, base: BaseAlgebra, amb: SymAlgebra, a: int, density: float = 0.6):
    """dhat = sum_i lambda_i . delta_i with delta_i in Der(A) of degree
    -|lambda_i|: a genuine degree-0 Leibniz map valued in tangent letters."""
    from .symtensor import SymElement

    out = {i: amb.zero() for i in range(base.dim)}
    for letter in range(a):
        k = -amb.letter_degrees[letter]
        ders = algebra_derivation_basis(base, k)
        for delta in ders:
            if rng.random() > density:
                continue
            s = rng.scalar()
            for i in range(base.dim):
                val = delta.value_on(i)
                if val.is_zero():
                    continue
                out[i] = out[i] + amb.letter(letter, val.scale(s))
    return {i: v for i, v in out.items() if not v.is_zero()}


def _random_letter_map(
    rng: Rng,
    alg: SymAlgebra,
    source_letters: Sequence[int],
    words: Sequence[Tuple[int, ...]],
    degree_shift: int,
    density: float = 0.5,
):
    """Random A-linear letter map: source letter -> span of the given words."""
    from .symtensor import SymElement

    out = {}
    for letter in source_letters:
        parts = {}
        want = alg.letter_degrees[letter] + degree_shift
        for w in words:
            if rng.random() > density:
                continue
            need = want - alg.word_degree(w)
            cands = [b for b in range(alg.base.dim) if alg.base.degrees[b] == need]
            if cands:
                parts[w] = alg.base.basis_element(rng.choice(cands)).scale(rng.scalar())
        el = SymElement(alg, parts)
        if not el.is_zero():
            out[letter] = el
    return out


def random_geometric_model(
    rng: Rng,
    base: BaseAlgebra,
    tangent_degrees: Sequence[int],
    normal_degrees: Sequence[int],
    cap: int = 4,
    density: float = 0.5,
    families: Sequence[str] = (
        "dhat",
        "gamma",
        "beta",
        "shape",
        "conn_tan",
        "second_form",
        "curv_perp",
        "curv_tan",
    ),
    seed_modules: int = 3,
):
    """A generic model: random degree-valid tensors, usually non-integrable."""
    from .geometry import GeometricModel

    tangent = mixed_module(base, tangent_degrees, name="Tm", seed=seed_modules, prefix="t")
    normal = mixed_module(base, normal_degrees, name="Nm", seed=seed_modules + 1, prefix="n")
    probe = GeometricModel(base, tangent, normal, cap=cap)
    amb, nor = probe.amb, probe.nor
    a, b = probe.a, probe.b
    tan_letters = list(range(a))
    nor_letters = list(range(a, a + b))
    words_11 = [
        w for w in amb.words_of_weight(2) if probe.bidegree(w) == (1, 1)
    ]
    words_20 = [
        w for w in amb.words_of_weight(2) if probe.bidegree(w) == (2, 0)
    ]
    dhat = _random_dhat(rng, base, amb, a, density) if "dhat" in families else {}
    gamma = (
        _random_letter_map(rng, amb, nor_letters, words_11, 0, density)
        if "gamma" in families
        else {}
    )
    gamma = {j - a: v for j, v in gamma.items()}

    def random_normal_valued(letter_degree_plus, words):
        parts = {}
        for w in words:
            if rng.random() > density:
                continue
            need = letter_degree_plus - nor.word_degree(w)
            cands = [bb for bb in range(base.dim) if base.degrees[bb] == need]
            if cands:
                parts[w] = base.basis_element(rng.choice(cands)).scale(rng.scalar())
        from .symtensor import SymElement

        return SymElement(nor, parts)

    beta = {}
    if "beta" in families:
        for i in range(a):
            el = random_normal_valued(
                amb.letter_degrees[i] + 1, nor.words_of_weight(1)
            )
            if not el.is_zero():
                beta[i] = el
    shape = (
        _random_letter_map(rng, amb, tan_letters, words_11, 0, density)
        if "shape" in families
        else {}
    )
    conn_tan = (
        _random_letter_map(rng, amb, tan_letters, words_20, 0, density)
        if "conn_tan" in families
        else {}
    )
    second_form = (
        _random_letter_map(rng, amb, nor_letters, words_20, 0, density)
        if "second_form" in families
        else {}
    )
    second_form = {j - a: v for j, v in second_form.items()}
    curv_perp = {}
    if "curv_perp" in families:
        for k in range(2, cap + 1):
            table = _random_letter_map(
                rng, nor, list(range(b)), nor.words_of_weight(k), 1, density
            )
            if table:
                curv_perp[k] = table
    curv_tan = {}
    if "curv_tan" in families:
        for p in range(2, cap + 1):
            table = {}
            for i in range(a):
                el = random_normal_valued(
                    amb.letter_degrees[i] + 1, nor.words_of_weight(p)
                )
                if not el.is_zero():
                    table[i] = el
            if table:
                curv_tan[p] = table
    return GeometricModel(
        base,
        tangent,
        normal,
        cap=cap,
        dhat=dhat,
        gamma=gamma,
        beta=beta,
        shape=shape,
        conn_tan=conn_tan,
        second_form=second_form,
        curv_perp=curv_perp,
        curv_tan=curv_tan,
    )


def trivial_model(cap: int = 4):
    """All tensors zero over Lambda[e]: the differential collapses to d0."""
    from .geometry import GeometricModel

    base = lambda_eps()
    tangent = FreeModule(base, [("t0", 0)], name="Tm")
    normal = FreeModule(base, [("n0", 0)], name="Nm")
    return GeometricModel(base, tangent, normal, cap=cap)


def eps_nilpotent_model(cap: int = 4):
    """Rank-1 curved model over Lambda[e] whose square vanishes by e^2 = 0."""
    from .geometry import GeometricModel
    from .symtensor import SymElement

    base = lambda_eps()
    tangent = FreeModule(base, [("t0", 0)], name="Tm")
    normal = FreeModule(base, [("n0", 0)], name="Nm")
    probe = GeometricModel(base, tangent, normal, cap=cap)
    e = base.from_names({"e": ONE})
    r2 = SymElement(probe.nor, {(0, 0): e})
    return GeometricModel(
        base, tangent, normal, cap=cap, curv_perp={2: {0: r2}}
    )


def diagonal_model(rng: Rng, base: BaseAlgebra, degrees: Sequence[int], cap: int = 4):
    """Diagonal regime: normal = tangent copy, beta = shape = 0, only
    normal curvature; anchors vanish and the differential matches the
    tangent-algebra construction."""
    g = random_geometric_model(
        rng,
        base,
        list(degrees),
        list(degrees),
        cap=cap,
        families=("curv_perp",),
    )
    return g


# ---------------------------------------------------------------------------
# shipped fixture corpus
# ---------------------------------------------------------------------------


def fixture_corpus():
    """The deterministic model set shipped under fixtures/ (name -> object)."""
    from .algebroid import AlgebroidStructure

    corpus = {}
    corpus["trivial.geometric"] = trivial_model()
    corpus["rank1_curved.geometric"] = eps_nilpotent_model()
    corpus["rank2.geometric"] = random_geometric_model(
        Rng(71), kodaira_base(), [0, 1], [0, -1], cap=4, seed_modules=5
    )
    corpus["diagonal.geometric"] = diagonal_model(Rng(72), nontrivial_dga(), [0, 1], cap=4)
    corpus["generic.geometric"] = random_geometric_model(
        Rng(73), nontrivial_dga(), [0, 1], [0, -1], cap=4, seed_modules=6
    )

    base = nontrivial_dga()
    carrier = mixed_module(base, [0, 1], seed=5)
    abelian = AlgebroidStructure(base, carrier, bracket_cap=4, anchor_cap=5)
    corpus["abelian.algebroid"] = abelian

    S, _, _ = conjugation_oracle_structure(Rng(36), base, mixed_module(base, [0, 1], seed=5), cap=4)
    corpus["conjugated.algebroid"] = S

    # a one-entry bump chosen so that the higher Jacobi identity fails
    carrier2 = mixed_module(base, [0, -1], seed=11)
    S2, _, _ = conjugation_oracle_structure(Rng(35), base, carrier2, cap=4)
    bump = ModuleElement(carrier2, {0: base.basis_element(0)})
    S2.set_bracket(3, (0, 0, 1), S2.bracket_table_value(3, (0, 0, 1)) + bump)
    corpus["perturbed.algebroid"] = S2
    return corpus


def write_fixture_corpus(directory: str) -> List[str]:
    import os

    from .modelio import serialize_model

    os.makedirs(directory, exist_ok=True)
    written = []
    for name, obj in fixture_corpus().items():
        path = os.path.join(directory, name + ".json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(serialize_model(obj))
        written.append(path)
    return written


# ---------------------------------------------------------------------------
# matrix DGLA fixtures
# ---------------------------------------------------------------------------


def _gl2_structure() -> List[Tuple[int, int, Dict[int, int]]]:
    """Commutators of the 2x2 matrix units E11, E12, E21, E22."""

    def unit(a, b):
        return {(a, b): 1}

    def mul(x, y):
        out: Dict[Tuple[int, int], int] = {}
        for (a, b), c in x.items():
            for (p, q), d in y.items():
                if b == p:
                    out[(a, q)] = out.get((a, q), 0) + c * d
        return {k: v for k, v in out.items() if v}

    units = [unit(0, 0), unit(0, 1), unit(1, 0), unit(1, 1)]
    index = {(0, 0): 0, (0, 1): 1, (1, 0): 2, (1, 1): 3}
    out = []
    for i in range(4):
        for j in range(4):
            bracket = mul(units[i], units[j])
            for k, v in mul(units[j], units[i]).items():
                bracket[k] = bracket.get(k, 0) - v
            bracket = {index[k]: v for k, v in bracket.items() if v}
            if bracket:
                out.append((i, j, bracket))
    return out


def matrix_dgla() -> LInftyAlgebra:
    """gl_2 in degree 0 over the ground field: l_1 = 0, l_2 = commutator."""
    base = trivial_base()
    names = ["E11", "E12", "E21", "E22"]
    carrier = FreeModule(base, [(n, 0) for n in names], name="gl2")
    L = LInftyAlgebra(carrier, arity_cap=4)
    for i, j, bracket in _gl2_structure():
        if i < j:
            value = ModuleElement(
                carrier, {k: base.one().scale(Scalar(v)) for k, v in bracket.items()}
            )
            L.set_bracket(2, (i, j), value)
    return L


def cone_dgla() -> LInftyAlgebra:
    """The cone of gl_2: x_i in degree 0, y_i in degree -1, d(y_i) = x_i.

    Brackets: [x_i, x_j] and [x_i, y_j] follow the gl_2 structure constants,
    [y, y] = 0.  A genuine DGLA with nonzero differential.
    """
    base = trivial_base()
    names = ["x11", "x12", "x21", "x22"]
    gens = [(n, 0) for n in names] + [(n.replace("x", "y"), -1) for n in names]
    carrier = FreeModule(base, gens, name="cone(gl2)")
    carrier.set_differential(
        {4 + i: ModuleElement(carrier, {i: base.one()}) for i in range(4)}
    )
    L = LInftyAlgebra(carrier, arity_cap=4)
    for i, j, bracket in _gl2_structure():
        value_x = ModuleElement(
            carrier, {k: base.one().scale(Scalar(v)) for k, v in bracket.items()}
        )
        value_y = ModuleElement(
            carrier, {4 + k: base.one().scale(Scalar(v)) for k, v in bracket.items()}
        )
        if i < j:
            L.set_bracket(2, (i, j), value_x)
        L.set_bracket(2, (i, 4 + j), value_y)
    return L


def _null_odd_closed(base: BaseAlgebra) -> List[int]:
    """Degree-1 closed basis elements with all pairwise (and self) products zero."""
    odd = [
        i
        for i in range(base.dim)
        if base.degrees[i] == 1 and base.differential_basis(i).is_zero()
    ]
    out: List[int] = []
    for i in odd:
        if all(base.product_basis(i, j).is_zero() for j in out + [i]):
            out.append(i)
    return out


def _random_square_zero_differential(rng: Rng, base: BaseAlgebra, module: FreeModule):
    """d(g_i) = c_i . g_i with c_i odd, closed and null-square: d^2 = 0 exactly."""
    pool = _null_odd_closed(base)
    if not pool:
        return
    diff = {}
    for i in range(module.rank):
        if rng.random() < 0.4:
            continue
        coeff = base.zero()
        for e in pool:
            if rng.random() < 0.6:
                coeff = coeff + base.basis_element(e).scale(rng.scalar())
        if not coeff.is_zero():
            diff[i] = ModuleElement(module, {i: coeff})
    module.set_differential(diff)


def mixed_module(
    base: BaseAlgebra,
    degrees: Sequence[int],
    name: str = "L",
    with_differential: bool = True,
    seed: int = 3,
    prefix: str = "g",
) -> FreeModule:
    """Free module with prescribed generator degrees and a valid differential."""
    rng = Rng(seed)
    module = FreeModule(base, [(f"{prefix}{i}", d) for i, d in enumerate(degrees)], name=name)
    if with_differential:
        _random_square_zero_differential(rng, base, module)
    return module


def standard_module(base: BaseAlgebra, rank: int = 2, seed: int = 7) -> FreeModule:
    """A free module with random degrees and a valid differential."""
    rng = Rng(seed)
    degrees = [rng.randint(-1, 2) for _ in range(rank)]
    module = FreeModule(base, [(f"g{i}", degrees[i]) for i in range(rank)])
    _random_square_zero_differential(rng, base, module)
    return module
