"""The weight-truncated completed symmetric algebra and its degree-1 derivations.

Elements live in S^0 + S^1 + ... + S^W over a BaseAlgebra, where the weight-r
piece is spanned by words of r "letters" (dual generators of a free module).
A word is stored as a sorted tuple of letter indices with a left coefficient
from the base algebra; words with a repeated odd letter vanish.

Every word denotes a graded symmetric multilinear map: a single letter pairs
against module elements, and longer words evaluate through the unshuffle
product formula

    (eta.eta')(v_1..v_{r+r'}) = sum_{Sh(r,r')} (-1)^{|eta'|(|v_s1|+..+|v_sr|)}
                                alpha(s, v) eta(v_s1..v_sr) eta'(v_s(r+1)..)

so the stored-word view and the multilinear-map view convert exactly into
each other (``evaluate`` / ``from_values``).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .algebra import AlgebraElement, BaseAlgebra
from .errors import BaseMismatch, CapError, DegreeError, KitError
from .modules import FreeModule, ModuleElement, pair_dual
from .scalars import Scalar, sign_scalar

Word = Tuple[int, ...]


class SymAlgebra:
    """Carrier of the truncated symmetric algebra: base, letters, weight cap."""

    def __init__(
        self,
        base: BaseAlgebra,
        letters: Sequence[Tuple[str, int]],
        cap: int = 4,
    ):
        if cap < 0:
            raise CapError("weight cap must be nonnegative")
        self.base = base
        self.letter_names = tuple(n for n, _ in letters)
        self.letter_degrees = tuple(int(d) for _, d in letters)
        self.cap = cap

    @staticmethod
    def over_module(module: FreeModule, cap: int = 4) -> "SymAlgebra":
        letters = [
            (name + "^", -deg) for name, deg in zip(module.gen_names, module.degrees)
        ]
        return SymAlgebra(module.base, letters, cap)

    @property
    def n_letters(self) -> int:
        return len(self.letter_names)

    def word_degree(self, word: Word) -> int:
        return sum(self.letter_degrees[i] for i in word)

    def words_of_weight(self, r: int) -> List[Word]:
        """All nonzero sorted words of weight r (repeated odd letters dropped)."""
        out = []
        for word in combinations_with_replacement(range(self.n_letters), r):
            if self._word_vanishes(word):
                continue
            out.append(word)
        return out

    def _word_vanishes(self, word: Word) -> bool:
        for a, b in zip(word, word[1:]):
            if a == b and self.letter_degrees[a] % 2:
                return True
        return False

    def zero(self) -> "SymElement":
        return SymElement(self, {})

    def one(self) -> "SymElement":
        return SymElement(self, {(): self.base.one()})

    def scalar(self, a: AlgebraElement) -> "SymElement":
        return SymElement(self, {(): a})

    def letter(self, i: int, coeff: Optional[AlgebraElement] = None) -> "SymElement":
        return SymElement(self, {(i,): coeff if coeff is not None else self.base.one()})

    def word(self, word: Iterable[int], coeff: Optional[AlgebraElement] = None) -> "SymElement":
        """Build c * (sorted word), normalizing the letter order with Koszul signs."""
        letters = list(word)
        c = coeff if coeff is not None else self.base.one()
        exponent = 0
        # insertion sort, tracking letter crossings
        for i in range(1, len(letters)):
            j = i
            while j > 0 and letters[j - 1] > letters[j]:
                exponent += self.letter_degrees[letters[j - 1]] * self.letter_degrees[letters[j]]
                letters[j - 1], letters[j] = letters[j], letters[j - 1]
                j -= 1
        w = tuple(letters)
        if self._word_vanishes(w) or len(w) > self.cap:
            return self.zero()
        return SymElement(self, {w: c.scale(sign_scalar(exponent))})

    def compatible(self, other: "SymAlgebra") -> bool:
        return (
            self.base is other.base
            and self.letter_names == other.letter_names
            and self.cap == other.cap
        )


class SymElement:
    """Element of a SymAlgebra: sorted word -> left coefficient."""

    __slots__ = ("algebra", "data")

    def __init__(self, algebra: SymAlgebra, data: Mapping[Word, AlgebraElement]):
        cleaned: Dict[Word, AlgebraElement] = {}
        for w, a in data.items():
            if a.is_zero() or len(w) > algebra.cap or algebra._word_vanishes(w):
                continue
            cleaned[tuple(w)] = a
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "data", dict(sorted(cleaned.items())))

    def __setattr__(self, name, value):
        raise AttributeError("SymElement is immutable")

    # -- structure -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.data

    def items(self):
        return self.data.items()

    def weights(self) -> List[int]:
        return sorted({len(w) for w in self.data})

    def weight_part(self, r: int) -> "SymElement":
        return SymElement(self.algebra, {w: a for w, a in self.data.items() if len(w) == r})

    def max_weight(self) -> int:
        return max((len(w) for w in self.data), default=0)

    def degree(self) -> Optional[int]:
        degs = set()
        for w, a in self.data.items():
            wd = self.algebra.word_degree(w)
            for d in a.homogeneous_parts():
                degs.add(d + wd)
        if not degs:
            return None
        if len(degs) > 1:
            raise DegreeError(f"SymElement not homogeneous: degrees {sorted(degs)}")
        return degs.pop()

    def homog_terms(self) -> List[Tuple[Word, int, AlgebraElement]]:
        """Flatten into (word, total degree, homogeneous coefficient) triples."""
        out = []
        for w, a in self.data.items():
            wd = self.algebra.word_degree(w)
            for d, ha in a.homogeneous_parts().items():
                out.append((w, d + wd, ha))
        return out

    # -- arithmetic ------------------------------------------------------------

    def _check(self, other: "SymElement"):
        if not self.algebra.compatible(other.algebra):
            raise BaseMismatch("SymElements over incompatible algebras")

    def __add__(self, other: "SymElement") -> "SymElement":
        self._check(other)
        acc = dict(self.data)
        for w, a in other.data.items():
            acc[w] = acc.get(w, self.algebra.base.zero()) + a
        return SymElement(self.algebra, acc)

    def __sub__(self, other: "SymElement") -> "SymElement":
        return self + (-other)

    def __neg__(self) -> "SymElement":
        return SymElement(self.algebra, {w: -a for w, a in self.data.items()})

    def scale(self, s: Scalar) -> "SymElement":
        return SymElement(self.algebra, {w: a.scale(s) for w, a in self.data.items()})

    def a_mul(self, a: AlgebraElement) -> "SymElement":
        """Left multiplication by a weight-0 coefficient."""
        return SymElement(self.algebra, {w: a * c for w, c in self.data.items()})

    def __mul__(self, other: "SymElement") -> "SymElement":
        """Graded commutative product; weights above the cap are discarded."""
        self._check(other)
        alg = self.algebra
        acc: Dict[Word, AlgebraElement] = {}
        for w1, d1, a1 in self.homog_terms():
            deg_w1 = alg.word_degree(w1)
            for w2, d2, a2 in other.homog_terms():
                if len(w1) + len(w2) > alg.cap:
                    continue
                # move the右 coefficient a2 (degree d2 - word2) past word1
                coeff_deg2 = d2 - alg.word_degree(w2)
                sign = coeff_deg2 * deg_w1
                merged, merge_sign, vanished = _merge_words(alg, w1, w2)
                if vanished:
                    continue
                total = a1 * a2
                total = total.scale(sign_scalar(sign + merge_sign))
                if total.is_zero():
                    continue
                acc[merged] = acc.get(merged, alg.base.zero()) + total
        return SymElement(alg, acc)

    def truncate(self, cap: int) -> "SymElement":
        return SymElement(self.algebra, {w: a for w, a in self.data.items() if len(w) <= cap})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SymElement)
            and self.algebra.compatible(other.algebra)
            and self.data == other.data
        )

    def __hash__(self) -> int:
        return hash((id(self.algebra), tuple(sorted(self.data.items(), key=lambda kv: kv[0]))))

    def __repr__(self) -> str:
        if not self.data:
            return "0"
        names = self.algebra.letter_names
        bits = []
        for w, a in self.data.items():
            word_str = "*".join(names[i] for i in w) if w else "1"
            bits.append(f"[{a}]{word_str}")
        return " + ".join(bits)


def _merge_words(alg: SymAlgebra, w1: Word, w2: Word) -> Tuple[Word, int, bool]:
    """Merge two sorted words, returning (word, sign exponent, vanished)."""
    out: List[int] = []
    exponent = 0
    i = j = 0
    deg = alg.letter_degrees
    # degree of the not-yet-consumed tail of w1
    tail = sum(deg[x] for x in w1)
    while i < len(w1) and j < len(w2):
        if w1[i] <= w2[j]:
            tail -= deg[w1[i]]
            out.append(w1[i])
            i += 1
        else:
            exponent += deg[w2[j]] * tail
            out.append(w2[j])
            j += 1
    out.extend(w1[i:])
    out.extend(w2[j:])
    word = tuple(out)
    if alg._word_vanishes(word):
        return word, 0, True
    return word, exponent, False


# ---------------------------------------------------------------------------
# evaluation <-> representation
# ---------------------------------------------------------------------------


def evaluate(element: SymElement, args: Sequence[ModuleElement], module: FreeModule) -> AlgebraElement:
    """Evaluate the weight-len(args) part of element on module elements.

    The letters of element.algebra must be the dual generators of module
    (in order).  Evaluation is graded symmetric and A-multilinear in the
    Koszul sense fixed by the product formula.
    """
    alg = element.algebra
    base = alg.base
    r = len(args)
    if r > alg.cap:
        raise CapError(f"cannot evaluate {r} arguments at weight cap {alg.cap}")
    if module.rank != alg.n_letters:
        raise BaseMismatch("module generators do not match algebra letters")
    total = base.zero()
    part = element.weight_part(r)
    if part.is_zero():
        return total
    # decompose arguments into homogeneous pieces (multilinearity over K)
    pieces = [list(v.homogeneous_parts().items()) for v in args]

    def rec_args(k: int, chosen: List[Tuple[int, ModuleElement]]):
        nonlocal total
        if k == r:
            degs = [d for d, _ in chosen]
            vals = [v for _, v in chosen]
            for w, a in part.data.items():
                total = total + a * _eval_word(alg, module, w, vals, degs)
            return
        for d, hv in pieces[k]:
            rec_args(k + 1, chosen + [(d, hv)])

    rec_args(0, [])
    return total


def _eval_word(
    alg: SymAlgebra,
    module: FreeModule,
    word: Word,
    args: List[ModuleElement],
    degs: List[int],
) -> AlgebraElement:
    """(unit coefficient word)(args) via the recursive product formula."""
    base = alg.base
    if not word:
        return base.one()
    head = word[0]
    rest = word[1:]
    rest_degree = alg.word_degree(rest)
    acc = base.zero()
    prefix = 0
    for k in range(len(args)):
        # sign: alpha moving args[k] to the front, then |rest|*|v_{sigma(1)}|
        exponent = degs[k] * prefix + rest_degree * degs[k]
        paired = pair_dual(module, head, args[k])
        prefix += degs[k]
        if paired.is_zero():
            continue
        rest_val = _eval_word(alg, module, rest, args[:k] + args[k + 1 :], degs[:k] + degs[k + 1 :])
        if rest_val.is_zero():
            continue
        acc = acc + (paired * rest_val).scale(sign_scalar(exponent))
    return acc


def from_values(
    alg: SymAlgebra,
    module: FreeModule,
    weight: int,
    value_fn: Callable[[Tuple[int, ...], List[ModuleElement]], AlgebraElement],
) -> SymElement:
    """Reconstruct the unique weight-r word sum with prescribed values.

    value_fn receives (generator index tuple, generator elements) for every
    sorted multiset of generators without odd repeats and must return the
    value of the desired symmetric A-multilinear map there.  Requires the
    module to be free with the letters as its dual basis.
    """
    if weight > alg.cap:
        raise CapError("weight above cap")
    if weight == 0:
        return alg.scalar(value_fn((), []))
    acc: Dict[Word, AlgebraElement] = {}
    for word in alg.words_of_weight(weight):
        gens = [module.generator(i) for i in word]
        degs = [module.degrees[i] for i in word]
        kappa = _eval_word(alg, module, word, gens, degs)
        scal = _extract_scalar(kappa, alg.base)
        if scal.is_zero():
            raise KitError(f"degenerate pairing for word {word}")
        value = value_fn(word, gens)
        if value.is_zero():
            continue
        acc[word] = value.scale(scal.inverse())
    return SymElement(alg, acc)


def _extract_scalar(a: AlgebraElement, base: BaseAlgebra) -> Scalar:
    if a.is_zero():
        return Scalar.zero()
    items = a.items()
    if len(items) != 1 or items[0][0] != base.unit:
        raise KitError("expected a scalar multiple of the unit")
    return items[0][1]


# ---------------------------------------------------------------------------
# derivations
# ---------------------------------------------------------------------------


class DerivationD:
    """Degree-1 derivation of a SymAlgebra, stored on generators.

    on_algebra maps base-basis indices to SymElements (all weights mixed);
    on_letters maps letter indices likewise.  The weight-n component D_n acts
    on the base with weight-n values and on letters with weight-(n+1) values.
    """

    def __init__(
        self,
        algebra: SymAlgebra,
        on_algebra: Mapping[int, SymElement],
        on_letters: Mapping[int, SymElement],
        degree: int = 1,
        check: bool = True,
    ):
        self.algebra = algebra
        self.degree = degree
        self.on_algebra = {
            i: v for i, v in on_algebra.items() if not v.is_zero()
        }
        self.on_letters = {
            i: v for i, v in on_letters.items() if not v.is_zero()
        }
        if check:
            self._check_degrees()

    def _check_degrees(self):
        base = self.algebra.base
        for i, v in self.on_algebra.items():
            want = base.degrees[i] + self.degree
            got = v.degree()
            if got is not None and got != want:
                raise DegreeError(
                    f"derivation value on {base.names[i]} has degree {got}, expected {want}"
                )
        for i, v in self.on_letters.items():
            want = self.algebra.letter_degrees[i] + self.degree
            got = v.degree()
            if got is not None and got != want:
                raise DegreeError(
                    f"derivation value on letter {self.algebra.letter_names[i]} "
                    f"has degree {got}, expected {want}"
                )

    # -- component access ----------------------------------------------------

    def component_on_algebra(self, n: int, i: int) -> SymElement:
        got = self.on_algebra.get(i)
        return got.weight_part(n) if got is not None else self.algebra.zero()

    def component_on_letter(self, n: int, i: int) -> SymElement:
        got = self.on_letters.get(i)
        return got.weight_part(n + 1) if got is not None else self.algebra.zero()

    def max_component(self) -> int:
        n = 0
        for v in self.on_algebra.values():
            n = max(n, v.max_weight())
        for v in self.on_letters.values():
            n = max(n, max((w - 1 for w in v.weights()), default=0))
        return n

    def weight_component(self, n: int) -> "DerivationD":
        return DerivationD(
            self.algebra,
            {i: v.weight_part(n) for i, v in self.on_algebra.items()},
            {i: v.weight_part(n + 1) for i, v in self.on_letters.items()},
            degree=self.degree,
            check=False,
        )

    # -- application -----------------------------------------------------------

    def apply_coefficient(self, a: AlgebraElement) -> SymElement:
        alg = self.algebra
        acc = alg.zero()
        for i, c in a.items():
            val = self.on_algebra.get(i)
            if val is not None:
                acc = acc + val.scale(c)
        return acc

    def apply(self, element: SymElement) -> SymElement:
        """Graded Leibniz extension, truncated at the weight cap."""
        alg = self.algebra
        if not alg.compatible(element.algebra):
            raise BaseMismatch("derivation and element over incompatible algebras")
        acc = alg.zero()
        for w, a in element.items():
            acc = acc + self.apply_coefficient(a) * alg.word(w)
            # letter-by-letter substitution with the prefix sign
            for pos in range(len(w)):
                val = self.on_letters.get(w[pos])
                if val is None:
                    continue
                prefix_word = w[:pos]
                rest_word = w[pos + 1 :]
                for d, ha in a.homogeneous_parts().items():
                    exponent = self.degree * (d + alg.word_degree(prefix_word))
                    term = alg.word(prefix_word, ha.scale(sign_scalar(exponent)))
                    term = term * val * alg.word(rest_word)
                    acc = acc + term
        return acc

    # -- algebra of derivations --------------------------------------------------

    def __add__(self, other: "DerivationD") -> "DerivationD":
        if self.degree != other.degree:
            raise DegreeError("adding derivations of different degree")
        on_a = dict(self.on_algebra)
        for i, v in other.on_algebra.items():
            on_a[i] = on_a.get(i, self.algebra.zero()) + v
        on_l = dict(self.on_letters)
        for i, v in other.on_letters.items():
            on_l[i] = on_l.get(i, self.algebra.zero()) + v
        return DerivationD(self.algebra, on_a, on_l, degree=self.degree, check=False)

    def __sub__(self, other: "DerivationD") -> "DerivationD":
        return self + other.scale(Scalar(-1))

    def scale(self, s: Scalar) -> "DerivationD":
        return DerivationD(
            self.algebra,
            {i: v.scale(s) for i, v in self.on_algebra.items()},
            {i: v.scale(s) for i, v in self.on_letters.items()},
            degree=self.degree,
            check=False,
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DerivationD)
            and self.algebra.compatible(other.algebra)
            and self.degree == other.degree
            and self.on_algebra == other.on_algebra
            and self.on_letters == other.on_letters
        )

    def __hash__(self):
        raise TypeError("DerivationD is not hashable")

    def is_zero(self) -> bool:
        return not self.on_algebra and not self.on_letters


def extend_derivation(
    algebra: SymAlgebra,
    on_algebra: Mapping[int, SymElement],
    on_letters: Mapping[int, SymElement],
    degree: int = 1,
) -> DerivationD:
    """The unique derivation with the given generator values (degree checked)."""
    return DerivationD(algebra, on_algebra, on_letters, degree=degree, check=True)


def zero_derivation(algebra: SymAlgebra, degree: int = 1) -> DerivationD:
    return DerivationD(algebra, {}, {}, degree=degree, check=False)


def d0_derivation(algebra: SymAlgebra, module: FreeModule) -> DerivationD:
    """The differential induced by (d_A, d_L): d_A on coefficients, d_{L^vee}
    on letters."""
    base = algebra.base
    on_algebra = {
        i: algebra.scalar(base.differential_basis(i))
        for i in range(base.dim)
        if not base.differential_basis(i).is_zero()
    }
    on_letters = {}
    for i in range(algebra.n_letters):
        val = dual_differential_letter(algebra, module, i)
        if not val.is_zero():
            on_letters[i] = val
    return DerivationD(algebra, on_algebra, on_letters)


def dual_differential_letter(algebra: SymAlgebra, module: FreeModule, letter: int) -> SymElement:
    """d_{L^vee} g^vee = the weight-1 element with (d eta)(v) = d_A(eta(v))
    - (-1)^{|eta|} eta(d_L v)."""
    eta_degree = -module.degrees[letter]
    acc = algebra.zero()
    for j in range(module.rank):
        val = -(pair_dual(module, letter, module.differential_basis(j))).scale(
            sign_scalar(eta_degree)
        )
        # d_A(eta(g_j)) = d_A(delta) = 0 on basis duals
        if val.is_zero():
            continue
        acc = acc + _weight_one_from_values(algebra, module, {j: val})
    return acc


def _weight_one_from_values(
    algebra: SymAlgebra, module: FreeModule, values: Mapping[int, AlgebraElement]
) -> SymElement:
    """Weight-1 element f with f(g_j) = values[j] (coefficients solved exactly)."""
    acc: Dict[Word, AlgebraElement] = {}
    for j, val in values.items():
        if val.is_zero():
            continue
        kappa = _eval_word(algebra, module, (j,), [module.generator(j)], [module.degrees[j]])
        scal = _extract_scalar(kappa, algebra.base)
        acc[(j,)] = val.scale(scal.inverse())
    return SymElement(algebra, acc)


# ---------------------------------------------------------------------------
# squares, automorphisms, conjugation, Maurer-Cartan
# ---------------------------------------------------------------------------


def square_components(D: DerivationD) -> Dict[int, Dict[str, SymElement]]:
    """Per-weight-shift residuals of D*D on all generators.

    Returns {n: {generator label: nonzero weight component}}; empty dict
    means D^2 = 0 up to the cap.  For a base element the shift-n part has
    weight n, for a letter weight n+1.
    """
    alg = D.algebra
    base = alg.base
    residuals: Dict[int, Dict[str, SymElement]] = {}

    def record(label: str, value: SymElement, base_weight: int):
        for r in value.weights():
            part = value.weight_part(r)
            if not part.is_zero():
                residuals.setdefault(r - base_weight, {})[label] = part

    for i in range(base.dim):
        dd = D.apply(D.apply(alg.scalar(base.basis_element(i))))
        if not dd.is_zero():
            record(base.names[i], dd, 0)
    for i in range(alg.n_letters):
        dd = D.apply(D.apply(alg.letter(i)))
        if not dd.is_zero():
            record(alg.letter_names[i], dd, 1)
    return dict(sorted(residuals.items()))


class FilteredAutomorphism:
    """Algebra automorphism of the truncated symmetric algebra which is the
    identity on the associated weight-graded algebra.

    Stored by images of base basis elements and letters; each image is the
    element itself plus terms of strictly higher weight.  The inverse is
    computed order by order in weight (Neumann series of Phi - id).
    """

    def __init__(
        self,
        algebra: SymAlgebra,
        on_algebra: Mapping[int, SymElement],
        on_letters: Mapping[int, SymElement],
        check: bool = True,
    ):
        self.algebra = algebra
        self.on_algebra = dict(on_algebra)
        self.on_letters = dict(on_letters)
        if check:
            self._check_unipotent()

    def _check_unipotent(self):
        alg = self.algebra
        base = alg.base
        for i, v in self.on_algebra.items():
            if v.weight_part(0) != alg.scalar(base.basis_element(i)):
                raise KitError(
                    f"automorphism is not the identity on gr at base element {base.names[i]}"
                )
            got = v.degree()
            if got is not None and got != base.degrees[i]:
                raise DegreeError("automorphism must preserve degree")
        for i, v in self.on_letters.items():
            if v.weight_part(1) != alg.letter(i):
                raise KitError(
                    f"automorphism is not the identity on gr at letter {alg.letter_names[i]}"
                )
            got = v.degree()
            if got is not None and got != alg.letter_degrees[i]:
                raise DegreeError("automorphism must preserve degree")

    @staticmethod
    def identity(algebra: SymAlgebra) -> "FilteredAutomorphism":
        return FilteredAutomorphism(algebra, {}, {}, check=False)

    @staticmethod
    def from_exponential(phi: DerivationD) -> "FilteredAutomorphism":
        """exp(phi) for a degree-0, weight-raising derivation phi."""
        if phi.degree != 0:
            raise DegreeError("exponential needs a degree-0 derivation")
        alg = phi.algebra
        base = alg.base
        on_algebra = {}
        for i in range(base.dim):
            on_algebra[i] = _exp_apply(phi, alg.scalar(base.basis_element(i)))
        on_letters = {}
        for i in range(alg.n_letters):
            on_letters[i] = _exp_apply(phi, alg.letter(i))
        return FilteredAutomorphism(alg, on_algebra, on_letters)

    def image_of_coefficient(self, a: AlgebraElement) -> SymElement:
        alg = self.algebra
        acc = alg.zero()
        for i, c in a.items():
            img = self.on_algebra.get(i)
            if img is None:
                img = alg.scalar(alg.base.basis_element(i))
            acc = acc + img.scale(c)
        return acc

    def apply(self, element: SymElement) -> SymElement:
        """Multiplicative extension, truncated at the cap."""
        alg = self.algebra
        acc = alg.zero()
        for w, a in element.items():
            term = self.image_of_coefficient(a)
            for letter in w:
                img = self.on_letters.get(letter)
                if img is None:
                    img = alg.letter(letter)
                term = term * img
            acc = acc + term
        return acc

    def apply_inverse(self, element: SymElement) -> SymElement:
        """Neumann series: Phi^{-1} = sum_k (id - Phi)^k, finite under the cap."""
        alg = self.algebra
        acc = element
        current = element
        for _ in range(alg.cap + 1):
            current = current - self.apply(current)
            if current.is_zero():
                break
            acc = acc + current
        return acc

    def validate(self) -> list[str]:
        """Spot-check multiplicativity on base basis pairs and invertibility."""
        problems = []
        alg = self.algebra
        base = alg.base
        for i in range(base.dim):
            for j in range(base.dim):
                lhs = self.apply(alg.scalar(base.product_basis(i, j)))
                rhs = self.apply(alg.scalar(base.basis_element(i))) * self.apply(
                    alg.scalar(base.basis_element(j))
                )
                if lhs != rhs:
                    problems.append(
                        f"multiplicativity fails on ({base.names[i]}, {base.names[j]})"
                    )
        for i in range(alg.n_letters):
            x = alg.letter(i)
            if self.apply(self.apply_inverse(x)) != x:
                problems.append(f"inverse fails on letter {alg.letter_names[i]}")
        return problems


def _exp_apply(phi: DerivationD, element: SymElement) -> SymElement:
    acc = element
    term = element
    k = 1
    while k <= phi.algebra.cap + 1:
        term = phi.apply(term)
        if term.is_zero():
            break
        acc = acc + term.scale(Scalar(Fraction(1, factorial(k))))
        k += 1
    return acc


def conjugate(Phi: FilteredAutomorphism, D: DerivationD) -> DerivationD:
    """Phi o D o Phi^{-1}, assembled from values on generators."""
    alg = D.algebra
    if not alg.compatible(Phi.algebra):
        raise BaseMismatch("automorphism and derivation over incompatible algebras")
    base = alg.base
    on_algebra = {}
    for i in range(base.dim):
        x = alg.scalar(base.basis_element(i))
        val = Phi.apply(D.apply(Phi.apply_inverse(x)))
        if not val.is_zero():
            on_algebra[i] = val
    on_letters = {}
    for i in range(alg.n_letters):
        val = Phi.apply(D.apply(Phi.apply_inverse(alg.letter(i))))
        if not val.is_zero():
            on_letters[i] = val
    return DerivationD(alg, on_algebra, on_letters, degree=D.degree, check=False)


def mc_residual(D0: DerivationD, Phi: FilteredAutomorphism) -> Dict[str, SymElement]:
    """Residual of the Maurer-Cartan identity for the deficiency of Phi.

    omega := Phi o D0 o Phi^{-1} - D0 measures how far Phi is from
    intertwining D0 with itself; when D0^2 = 0 the combination
    [D0, omega] + omega o omega vanishes identically.  Returns the nonzero
    values of that combination on generators (empty dict == residual zero).
    """
    alg = D0.algebra
    base = alg.base
    omega = conjugate(Phi, D0) - D0

    def residual_on(x: SymElement) -> SymElement:
        return (
            D0.apply(omega.apply(x))
            + omega.apply(D0.apply(x))
            + omega.apply(omega.apply(x))
        )

    out: Dict[str, SymElement] = {}
    for i in range(base.dim):
        val = residual_on(alg.scalar(base.basis_element(i)))
        if not val.is_zero():
            out[base.names[i]] = val
    for i in range(alg.n_letters):
        val = residual_on(alg.letter(i))
        if not val.is_zero():
            out[alg.letter_names[i]] = val
    return out


def deficiency_derivation(D0: DerivationD, Phi: FilteredAutomorphism) -> DerivationD:
    """omega = (Phi o D0 - D0 o Phi) o Phi^{-1} as a degree-1 derivation."""
    return conjugate(Phi, D0) - D0
