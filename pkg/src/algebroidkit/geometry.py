"""Formal-neighborhood differential from finite curvature/splitting data.

A GeometricModel is a desk-scale stand-in for the Dolbeault data of a
submanifold sitting inside an ambient manifold: a base dga A (functions/forms
on the submanifold), free modules Tm and Nm (tangent and normal directions),
a splitting of the ambient frame, a (1,0)-differential dhat on A valued in
tangent letters, connection blocks, the dual Kodaira-Spencer tensor beta, a
shape tensor, and two curvature families

    curv_perp[k] : Nm-dual -> S^k(Nm-dual)   (k >= 2, degree +1)
    curv_tan[p]  : Tm-dual -> S^p(Nm-dual)   (p >= 2, degree +1; p = 1 is beta).

Everything operates on two truncated symmetric algebras: the ambient one over
the split frame (tangent letters first, then normal letters) and the normal
one over the normal letters alone.  Words carry a bidegree (p, q) = (number
of tangent letters, number of normal letters); P0 keeps (0, *) words, P1
keeps (1, *) words.

The main constructions:

* ``nabla_bar``: symmetrized covariant derivative; the unnormalized
  substitution operator is a genuine degree-0 derivation and the 1/m
  weighting is a per-word rescale by the tangent-letter count of the
  output.
* ``pi_tilde``: sum of iterated nabla_bar, a right inverse to the normal
  projection (``retraction_residual`` checks this exactly).
* ``build_frakD``: the degree-1 derivation

      D = d0 + sum_{k>=2} Rperp_k + sum_{p>=1, q>=0} Rtan_p o Shape^q o nabla_perp

  on the normal algebra; its square is reported, never assumed.
* ``structure_from_geometry``: the recursive anchors/brackets

      alpha_1 = beta,   alpha_n = Rtan_n + sum_{Sh(n-1,1)} Shape o (alpha_{n-1} x 1) o sigma
      ell_n   = Rperp_n + sum_{Sh(n-1,1)} nabla_perp o (alpha_{n-1} x 1) o sigma

  emitted as an AlgebroidStructure whose Chevalley-Eilenberg derivation
  coincides with ``build_frakD`` identically (the central duality check,
  valid whether or not D squares to zero).

Splitting matrices are restricted to degree-0 entries, so dualizing them is
the plain transpose.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .algebra import AlgebraElement, BaseAlgebra
from .algebroid import AlgebroidStructure, ce_differential
from .errors import BaseMismatch, CapError, DegreeError, KitError
from .linfty import canonicalize_key, sorted_tuples
from .modules import FreeModule, ModuleElement, pair_dual
from .scalars import Scalar, sign_scalar
from .signs import enumerate_unshuffles, sym_sign
from .symtensor import (
    DerivationD,
    SymAlgebra,
    SymElement,
    d0_derivation,
    dual_differential_letter,
    evaluate,
    square_components,
)

Word = Tuple[int, ...]
Matrix = List[Dict[int, AlgebraElement]]  # column index -> {row: coeff}


# ---------------------------------------------------------------------------
# splitting data
# ---------------------------------------------------------------------------


class Splitting:
    """A-linear splitting maps between the abstract ambient frame and the
    tangent/normal pair, stored column-wise with degree-0 entries.

    iota: Tm -> Ym, p: Ym -> Nm, tau: Ym -> Tm, rho: Nm -> Ym with
    tau iota = 1, p rho = 1, iota tau + rho p = 1.
    """

    def __init__(self, base: BaseAlgebra, a: int, b: int,
                 iota: Optional[Matrix] = None, p: Optional[Matrix] = None,
                 tau: Optional[Matrix] = None, rho: Optional[Matrix] = None):
        self.base = base
        self.a = a
        self.b = b
        n = a + b
        one = base.one()
        self.iota = iota if iota is not None else [
            {i: one} for i in range(a)
        ]
        self.p = p if p is not None else [
            ({j - a: one} if j >= a else {}) for j in range(n)
        ]
        self.tau = tau if tau is not None else [
            ({j: one} if j < a else {}) for j in range(n)
        ]
        self.rho = rho if rho is not None else [
            {a + j: one} for j in range(b)
        ]

    @staticmethod
    def _compose(left: Matrix, right: Matrix) -> Matrix:
        out: Matrix = []
        for col in right:
            acc: Dict[int, AlgebraElement] = {}
            for mid, c in col.items():
                for row, d in left[mid].items():
                    prod = d * c
                    if row in acc:
                        acc[row] = acc[row] + prod
                    else:
                        acc[row] = prod
            out.append({r: v for r, v in acc.items() if not v.is_zero()})
        return out

    def _is_identity(self, m: Matrix) -> bool:
        one = self.base.one()
        for j, col in enumerate(m):
            cleaned = {r: v for r, v in col.items() if not v.is_zero()}
            if cleaned != {j: one}:
                return False
        return True

    def validate(self) -> List[str]:
        problems = []
        for name, m, cols in [
            ("iota", self.iota, self.a),
            ("p", self.p, self.a + self.b),
            ("tau", self.tau, self.a + self.b),
            ("rho", self.rho, self.b),
        ]:
            if len(m) != cols:
                problems.append(f"splitting map {name} has wrong shape")
                continue
            for col in m:
                for _, v in col.items():
                    for d in v.homogeneous_parts():
                        if d != 0:
                            problems.append(f"splitting map {name} has degree-{d} entry")
        if problems:
            return problems
        if not self._is_identity(self._compose(self.tau, self.iota)):
            problems.append("tau o iota != id")
        if not self._is_identity(self._compose(self.p, self.rho)):
            problems.append("p o rho != id")
        it = self._compose(self.iota, self.tau)
        rp = self._compose(self.rho, self.p)
        n = self.a + self.b
        combined = [
            {
                r: it[j].get(r, self.base.zero()) + rp[j].get(r, self.base.zero())
                for r in set(it[j]) | set(rp[j])
            }
            for j in range(n)
        ]
        if not self._is_identity([{r: v for r, v in col.items() if not v.is_zero()} for col in combined]):
            problems.append("iota o tau + rho o p != id")
        return problems


# ---------------------------------------------------------------------------
# the model
# ---------------------------------------------------------------------------


class GeometricModel:
    """Finite input tensors for the formal-neighborhood differential."""

    def __init__(
        self,
        base: BaseAlgebra,
        tangent: FreeModule,
        normal: FreeModule,
        cap: int = 4,
        dhat: Optional[Mapping[int, SymElement]] = None,
        gamma: Optional[Mapping[int, SymElement]] = None,
        beta: Optional[Mapping[int, SymElement]] = None,
        shape: Optional[Mapping[int, SymElement]] = None,
        conn_tan: Optional[Mapping[int, SymElement]] = None,
        second_form: Optional[Mapping[int, SymElement]] = None,
        curv_perp: Optional[Mapping[int, Mapping[int, SymElement]]] = None,
        curv_tan: Optional[Mapping[int, Mapping[int, SymElement]]] = None,
        splitting: Optional[Splitting] = None,
        closed_beta: bool = False,
    ):
        if tangent.base is not base or normal.base is not base:
            raise BaseMismatch("tangent and normal modules must live over the base")
        self.base = base
        self.tangent = tangent
        self.normal = normal
        self.cap = cap
        self.a = tangent.rank
        self.b = normal.rank
        amb_letters = [
            (name + "^", -deg)
            for name, deg in zip(tangent.gen_names, tangent.degrees)
        ] + [
            (name + "^", -deg)
            for name, deg in zip(normal.gen_names, normal.degrees)
        ]
        self.amb = SymAlgebra(base, amb_letters, cap=cap)
        self.nor = SymAlgebra(
            base,
            [(name + "^", -deg) for name, deg in zip(normal.gen_names, normal.degrees)],
            cap=cap,
        )
        # evaluation scaffold for the split ambient frame (differential unused)
        self.ambient_module = FreeModule(
            base,
            list(zip(tangent.gen_names, tangent.degrees))
            + list(zip(normal.gen_names, normal.degrees)),
            name="Ym",
        )
        self.splitting = splitting if splitting is not None else Splitting(base, self.a, self.b)
        self.closed_beta = closed_beta

        def amb_of(el: SymElement) -> SymElement:
            if el.algebra.letter_names != self.amb.letter_names or el.algebra.base is not base:
                raise BaseMismatch("tensor not expressed over the ambient letters")
            return SymElement(self.amb, el.data)

        def nor_of(el: SymElement) -> SymElement:
            if el.algebra.letter_names != self.nor.letter_names or el.algebra.base is not base:
                raise BaseMismatch("tensor not expressed over the normal letters")
            return SymElement(self.nor, el.data)

        zero_amb = self.amb.zero()
        zero_nor = self.nor.zero()
        self.dhat = {
            i: amb_of(dhat[i]) if dhat and i in dhat else zero_amb
            for i in range(base.dim)
        }
        self.gamma = {
            j: amb_of(gamma[j]) if gamma and j in gamma else zero_amb
            for j in range(self.b)
        }
        self.beta = {
            i: nor_of(beta[i]) if beta and i in beta else zero_nor
            for i in range(self.a)
        }
        self.shape = {
            i: amb_of(shape[i]) if shape and i in shape else zero_amb
            for i in range(self.a)
        }
        self.conn_tan = {
            i: amb_of(conn_tan[i]) if conn_tan and i in conn_tan else zero_amb
            for i in range(self.a)
        }
        self.second_form = {
            j: amb_of(second_form[j]) if second_form and j in second_form else zero_amb
            for j in range(self.b)
        }
        self.curv_perp = {
            k: {j: nor_of(v) for j, v in table.items()}
            for k, table in (curv_perp or {}).items()
        }
        self.curv_tan = {
            p: {i: nor_of(v) for i, v in table.items()}
            for p, table in (curv_tan or {}).items()
        }
        if 1 in self.curv_tan:
            raise KitError("curv_tan[1] is reserved: it is the beta tensor")

    # -- bidegree helpers ----------------------------------------------------

    def tangent_count(self, word: Word) -> int:
        return sum(1 for i in word if i < self.a)

    def bidegree(self, word: Word) -> Tuple[int, int]:
        p = self.tangent_count(word)
        return p, len(word) - p

    def project_bidegree(self, el: SymElement, p: int) -> SymElement:
        return SymElement(
            self.amb,
            {w: c for w, c in el.items() if self.tangent_count(w) == p},
        )

    def p0(self, el: SymElement) -> SymElement:
        """Projection onto pure normal words (kept inside the ambient algebra)."""
        return self.project_bidegree(el, 0)

    def p1(self, el: SymElement) -> SymElement:
        """Projection onto words with exactly one tangent letter."""
        return self.project_bidegree(el, 1)

    def to_amb(self, el: SymElement) -> SymElement:
        if el.algebra.letter_names == self.amb.letter_names:
            return SymElement(self.amb, el.data)
        if el.algebra.letter_names != self.nor.letter_names:
            raise BaseMismatch("element is over neither the ambient nor the normal letters")
        return SymElement(
            self.amb, {tuple(self.a + i for i in w): c for w, c in el.items()}
        )

    def to_nor(self, el: SymElement) -> SymElement:
        """Relabel a pure-normal ambient element into the normal algebra."""
        data = {}
        for w, c in el.items():
            if self.tangent_count(w) != 0:
                raise KitError("element has tangent letters; cannot move to the normal algebra")
            data[tuple(i - self.a for i in w)] = c
        return SymElement(self.nor, data)

    def rho_dual(self, el: SymElement) -> SymElement:
        """The algebra-map extension of the normal projection: kills every
        word containing a tangent letter."""
        return self.to_nor(self.p0(el))

    # -- cached operators ---------------------------------------------------------

    def _beta_amb(self, i: int) -> SymElement:
        return self.to_amb(self.beta[i])

    def nabla_hat(self) -> DerivationD:
        """Unnormalized symmetrized connection: a degree-0 derivation."""
        if not hasattr(self, "_nabla_hat"):
            on_algebra = {i: self.dhat[i] for i in range(self.base.dim)}
            on_letters = {}
            for i in range(self.a):
                on_letters[i] = self.conn_tan[i] + self.shape[i]
            for j in range(self.b):
                on_letters[self.a + j] = self.second_form[j] + self.gamma[j]
            self._nabla_hat = DerivationD(
                self.amb, on_algebra, on_letters, degree=0, check=False
            )
        return self._nabla_hat

    def nabla_bar(self, el: SymElement) -> SymElement:
        """Symmetrized covariant derivative with the 1/m output weighting."""
        raw = self.nabla_hat().apply(el)
        out: Dict[Word, AlgebraElement] = {}
        for w, c in raw.items():
            m = self.tangent_count(w)
            if m == 0:
                raise KitError("nabla_bar produced a word without tangent letters")
            out[w] = c.scale(Scalar(Fraction(1, m)))
        return SymElement(self.amb, out)

    def nabla_perp_bar(self, el: SymElement) -> SymElement:
        """Normal-connection derivative: Gamma plus dhat only, no rescale."""
        if el.algebra.letter_names == self.nor.letter_names:
            el = self.to_amb(el)
        if not hasattr(self, "_nabla_perp"):
            on_letters = {self.a + j: self.gamma[j] for j in range(self.b)}
            self._nabla_perp = DerivationD(
                self.amb,
                {i: self.dhat[i] for i in range(self.base.dim)},
                on_letters,
                degree=0,
                check=False,
            )
        return self._nabla_perp.apply(el)

    def shape_tilde(self, el: SymElement) -> SymElement:
        """Shape-operator substitution on the single tangent letter."""
        if not hasattr(self, "_shape_der"):
            self._shape_der = DerivationD(
                self.amb,
                {},
                {i: self.shape[i] for i in range(self.a)},
                degree=0,
                check=False,
            )
        return self._shape_der.apply(el)

    def beta_tilde(self, el: SymElement) -> SymElement:
        if not hasattr(self, "_beta_der"):
            self._beta_der = DerivationD(
                self.amb,
                {},
                {i: self._beta_amb(i) for i in range(self.a)},
                degree=1,
                check=False,
            )
        return self._beta_der.apply(el)

    def rtan_tilde(self, p: int, el: SymElement) -> SymElement:
        """Curvature substitution of the tangent letter by p normal letters."""
        if p == 1:
            return self.beta_tilde(el)
        table = self.curv_tan.get(p)
        if not table:
            return self.amb.zero()
        der = DerivationD(
            self.amb,
            {},
            {i: self.to_amb(v) for i, v in table.items()},
            degree=1,
            check=False,
        )
        return der.apply(el)

    def rperp_tilde(self, k: int, el: SymElement) -> SymElement:
        """Normal-curvature derivation on the normal algebra."""
        table = self.curv_perp.get(k)
        if not table:
            return self.nor.zero()
        der = DerivationD(
            self.nor,
            {},
            {j: v for j, v in table.items()},
            degree=1,
            check=False,
        )
        return der.apply(el)

    def ambient_d0(self, beta_override: Optional[Mapping[int, SymElement]] = None) -> DerivationD:
        """The ambient differential: d_A on coefficients, block-triangular on
        letters with the Kodaira-Spencer tensor as the off-diagonal block."""
        beta = beta_override if beta_override is not None else self.beta
        tan_alg = SymAlgebra.over_module(self.tangent, cap=self.cap)
        nor_alg = self.nor
        on_letters: Dict[int, SymElement] = {}
        for i in range(self.a):
            dt = dual_differential_letter(tan_alg, self.tangent, i)
            val = SymElement(self.amb, {w: c for w, c in dt.items()})
            val = val + self.to_amb(beta.get(i, self.nor.zero()))
            if not val.is_zero():
                on_letters[i] = val
        for j in range(self.b):
            dn = dual_differential_letter(nor_alg, self.normal, j)
            val = self.to_amb(dn)
            if not val.is_zero():
                on_letters[self.a + j] = val
        on_algebra = {
            i: self.amb.scalar(self.base.differential_basis(i))
            for i in range(self.base.dim)
            if not self.base.differential_basis(i).is_zero()
        }
        return DerivationD(self.amb, on_algebra, on_letters, degree=1, check=False)

    def normal_d0(self) -> DerivationD:
        return d0_derivation(self.nor, self.normal)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def geometric_degree_problems(g: GeometricModel) -> List[str]:
    """Degree and bidegree bookkeeping of every stored tensor."""
    problems: List[str] = []
    base = g.base

    def check_degree(name, el, want, bidegrees=None):
        if el.is_zero():
            return
        try:
            got = el.degree()
        except DegreeError:
            problems.append(f"{name} is not degree-homogeneous")
            return
        if got != want:
            problems.append(f"{name} has degree {got}, expected {want}")
        if bidegrees is not None:
            for w, _ in el.items():
                if g.bidegree(w) not in bidegrees:
                    problems.append(f"{name} has a word of bidegree {g.bidegree(w)}")

    for i in range(base.dim):
        check_degree(f"dhat[{base.names[i]}]", g.dhat[i], base.degrees[i], {(1, 0)})
    for j in range(g.b):
        nu_deg = g.amb.letter_degrees[g.a + j]
        check_degree(f"gamma[{j}]", g.gamma[j], nu_deg, {(1, 1)})
        check_degree(f"second_form[{j}]", g.second_form[j], nu_deg, {(2, 0)})
    for i in range(g.a):
        xi_deg = g.amb.letter_degrees[i]
        check_degree(f"beta[{i}]", g.to_amb(g.beta[i]), xi_deg + 1, {(0, 1)})
        check_degree(f"shape[{i}]", g.shape[i], xi_deg, {(1, 1)})
        check_degree(f"conn_tan[{i}]", g.conn_tan[i], xi_deg, {(2, 0)})
    for k, table in g.curv_perp.items():
        if k < 2:
            problems.append(f"curv_perp arity {k} < 2")
            continue
        for j, el in table.items():
            want = g.nor.letter_degrees[j] + 1
            if not el.is_zero() and el.weights() != [k]:
                problems.append(f"curv_perp[{k}][{j}] has weights {el.weights()}")
            check_degree(f"curv_perp[{k}][{j}]", g.to_amb(el), want, None)
    for p, table in g.curv_tan.items():
        if p < 2:
            problems.append(f"curv_tan arity {p} < 2")
            continue
        for i, el in table.items():
            want = g.amb.letter_degrees[i] + 1
            if not el.is_zero() and el.weights() != [p]:
                problems.append(f"curv_tan[{p}][{i}] has weights {el.weights()}")
            check_degree(f"curv_tan[{p}][{i}]", g.to_amb(el), want, None)
    for i in range(g.a):
        if not g.beta[i].is_zero() and g.beta[i].weights() != [1]:
            problems.append(f"beta[{i}] must have weight 1")
    return problems


def validate_geometric_model(g: GeometricModel) -> List[str]:
    problems: List[str] = []
    problems.extend(g.splitting.validate())
    problems.extend(geometric_degree_problems(g))
    base = g.base

    # dhat Leibniz on all basis pairs
    def dhat_of(a: AlgebraElement) -> SymElement:
        acc = g.amb.zero()
        for idx, c in a.items():
            acc = acc + g.dhat[idx].scale(c)
        return acc

    for i in range(base.dim):
        for j in range(base.dim):
            prod = base.product_basis(i, j)
            lhs = dhat_of(prod)
            rhs = g.dhat[i] * g.amb.scalar(base.basis_element(j)) + g.amb.scalar(
                base.basis_element(i)
            ) * g.dhat[j]
            if lhs != rhs:
                problems.append(
                    f"dhat violates Leibniz on ({base.names[i]}, {base.names[j]})"
                )

    # optional: beta anticommutes with the differentials
    if g.closed_beta:
        D0n = g.normal_d0()
        tan_alg = SymAlgebra.over_module(g.tangent, cap=g.cap)
        for i in range(g.a):
            dt = dual_differential_letter(tan_alg, g.tangent, i)
            dt_amb = SymElement(g.amb, {w: c for w, c in dt.items()})
            residual = D0n.apply(g.beta[i]) + g.rho_dual(g.beta_tilde(dt_amb))
            if not residual.is_zero():
                problems.append(f"closed flag set but d(beta) != 0 at tangent letter {i}")
    return problems


# ---------------------------------------------------------------------------
# curvature splitting and the symmetrization helper
# ---------------------------------------------------------------------------


def split_curvature(
    g: GeometricModel, n: int, full: Mapping[int, SymElement]
) -> Tuple[Dict[int, SymElement], Dict[int, SymElement]]:
    """Split an ambient-frame curvature tensor into its two effective blocks.

    full maps each ambient-frame letter to a weight-n element of the frame
    symmetric algebra; the result is (curv_perp_n, curv_tan_n) over the model
    letters, computed as rho-dual o R_n o p-dual and rho-dual o R_n o tau-dual.
    """
    frame_alg = SymAlgebra(g.base, list(zip(
        [f"y{j}^" for j in range(g.a + g.b)],
        g.amb.letter_degrees,
    )), cap=g.cap)

    def rn_of(el: SymElement) -> SymElement:
        # A-linear, degree 1: coefficients pick up their parity sign
        acc = frame_alg.zero()
        for (j,), c in el.items():
            val = full.get(j)
            if val is None or val.is_zero():
                continue
            for d, hc in c.homogeneous_parts().items():
                acc = acc + val.a_mul(hc).scale(sign_scalar(d))
        return acc

    def rho_dual_letterwise(el: SymElement) -> SymElement:
        acc = g.nor.zero()
        for w, c in el.items():
            term = g.nor.scalar(c)
            for j in w:
                letter_image = g.nor.zero()
                for beta_idx in range(g.b):
                    entry = g.splitting.rho[beta_idx].get(j)
                    if entry is not None and not entry.is_zero():
                        letter_image = letter_image + g.nor.letter(beta_idx, entry)
                term = term * letter_image
                if term.is_zero():
                    break
            acc = acc + term
        return acc

    curv_perp_n: Dict[int, SymElement] = {}
    for beta_idx in range(g.b):
        # p-dual(nu_beta) = sum_j p[beta][j] . y_j
        arg = frame_alg.zero()
        for j in range(g.a + g.b):
            entry = g.splitting.p[j].get(beta_idx)
            if entry is not None and not entry.is_zero():
                arg = arg + frame_alg.letter(j, entry)
        val = rho_dual_letterwise(rn_of(arg))
        if not val.is_zero():
            curv_perp_n[beta_idx] = val
    curv_tan_n: Dict[int, SymElement] = {}
    for i in range(g.a):
        arg = frame_alg.zero()
        for j in range(g.a + g.b):
            entry = g.splitting.tau[j].get(i)
            if entry is not None and not entry.is_zero():
                arg = arg + frame_alg.letter(j, entry)
        val = rho_dual_letterwise(rn_of(arg))
        if not val.is_zero():
            curv_tan_n[i] = val
    return curv_perp_n, curv_tan_n


def sym_bar(g: GeometricModel, m: int, n: int, direction: int, word: Word,
            coeff: Optional[AlgebraElement] = None) -> SymElement:
    """Merge a tangent direction slot into a word with the 1/m weighting.

    The input word must have exactly m-1 tangent letters among its n letters
    and `direction` must be a tangent letter; the output is
    (1/m) . lambda_direction . word.
    """
    if direction >= g.a:
        raise KitError("direction slot must be a tangent letter")
    if len(word) != n:
        raise CapError(f"word has {len(word)} letters, expected n = {n}")
    if g.tangent_count(word) != m - 1:
        raise KitError(
            f"word has {g.tangent_count(word)} tangent letters, expected m-1 = {m - 1}"
        )
    el = g.amb.word((direction,) + tuple(word), coeff)
    return el.scale(Scalar(Fraction(1, m)))


# ---------------------------------------------------------------------------
# pi-tilde, retraction and the two operator lemmas
# ---------------------------------------------------------------------------


def pi_tilde(g: GeometricModel, mu: SymElement) -> SymElement:
    """Sum of iterated symmetrized derivatives, truncated at the weight cap."""
    current = g.to_amb(mu) if mu.algebra is g.nor else mu
    acc = current
    for _ in range(g.cap):
        current = g.nabla_bar(current).truncate(g.cap)
        if current.is_zero():
            break
        acc = acc + current
    return acc


def _nor_spanning(g: GeometricModel):
    for r in range(g.cap + 1):
        for w in g.nor.words_of_weight(r):
            for b in range(g.base.dim):
                yield SymElement(g.nor, {w: g.base.basis_element(b)})


def _amb_spanning(g: GeometricModel):
    for r in range(g.cap + 1):
        for w in g.amb.words_of_weight(r):
            for b in range(g.base.dim):
                yield SymElement(g.amb, {w: g.base.basis_element(b)})


def retraction_residual(g: GeometricModel) -> List[Tuple[str, SymElement]]:
    """rho-dual o pi-tilde - id on a spanning set of the normal algebra."""
    out = []
    for el in _nor_spanning(g):
        residual = g.rho_dual(pi_tilde(g, el)) - el
        if not residual.is_zero():
            out.append((repr(el), residual))
    return out


def commutator_lemma_residual(
    g: GeometricModel, ambient_beta: Optional[Mapping[int, SymElement]] = None
) -> List[Tuple[str, SymElement]]:
    """[rho-dual, d] - beta-tilde o P1 on an ambient spanning set.

    The left side commutes the normal projection with the ambient and normal
    differentials; the right side substitutes the stored Kodaira-Spencer
    tensor into the single-tangent-letter component.  Passing ambient_beta
    rebuilds the ambient differential from a different tensor, which makes
    the residual a stored-vs-derived consistency diagnostic.
    """
    D0a = g.ambient_d0(ambient_beta)
    D0n = g.normal_d0()
    out = []
    for el in _amb_spanning(g):
        lhs = g.rho_dual(D0a.apply(el)) - D0n.apply(g.rho_dual(el))
        rhs = g.rho_dual(g.beta_tilde(g.p1(el)))
        residual = lhs - rhs
        if not residual.is_zero():
            out.append((repr(el), residual))
    return out


def transport_lemma_residual(
    g: GeometricModel, shape_override: Optional[Mapping[int, SymElement]] = None
) -> List[Tuple[str, SymElement]]:
    """P1 o nabla_bar = nabla_perp o P0 + shape o P1, plus its iterate.

    With shape_override the substitution side uses different shape values,
    exposing mismatched shape data as a nonzero residual.
    """
    if shape_override is None:
        shape_der = g.shape_tilde
    else:
        der = DerivationD(
            g.amb, {}, {i: v for i, v in shape_override.items()}, degree=0, check=False
        )
        shape_der = der.apply
    out = []
    for el in _amb_spanning(g):
        lhs = g.p1(g.nabla_bar(el))
        rhs = g.nabla_perp_bar(g.rho_dual(el)) + shape_der(g.p1(el))
        residual = lhs - rhs
        if not residual.is_zero():
            out.append((f"operator @ {el!r}", residual))
    for el in _nor_spanning(g):
        amb_el = g.to_amb(el)
        for s in range(1, g.cap + 1):
            power = amb_el
            for _ in range(s):
                power = g.nabla_bar(power).truncate(g.cap)
            lhs = g.p1(power)
            iterated = g.nabla_perp_bar(el)
            for _ in range(s - 1):
                iterated = shape_der(iterated).truncate(g.cap)
            residual = lhs - iterated
            if not residual.is_zero():
                out.append((f"iterate s={s} @ {el!r}", residual))
    return out


# ---------------------------------------------------------------------------
# the main differential and its Kapranov specialization
# ---------------------------------------------------------------------------


def build_frakD(g: GeometricModel) -> DerivationD:
    """Assemble the normal-direction differential from the three families."""
    cap = g.cap
    base = g.base
    on_algebra: Dict[int, SymElement] = {}
    for bidx in range(base.dim):
        val = g.nor.scalar(base.differential_basis(bidx))
        start = g.dhat[bidx]
        if not start.is_zero():
            current = start  # Shape^q applied cumulatively
            for q in range(0, cap):
                for p in range(1, cap - q + 1):
                    term = g.rtan_tilde(p, current)
                    if not term.is_zero():
                        val = val + g.rho_dual(term)
                current = g.shape_tilde(current).truncate(cap)
                if current.is_zero():
                    break
        if not val.is_zero():
            on_algebra[bidx] = val

    on_letters: Dict[int, SymElement] = {}
    D0n = g.normal_d0()
    for j in range(g.b):
        val = D0n.on_letters.get(j, g.nor.zero())
        for k in sorted(g.curv_perp):
            if k > cap:
                continue
            entry = g.curv_perp[k].get(j)
            if entry is not None:
                val = val + entry
        start = g.gamma[j]
        if not start.is_zero():
            current = start
            for q in range(0, cap):
                for p in range(1, cap - q):
                    term = g.rtan_tilde(p, current)
                    if not term.is_zero():
                        val = val + g.rho_dual(term)
                current = g.shape_tilde(current).truncate(cap)
                if current.is_zero():
                    break
        if not val.is_zero():
            on_letters[j] = val
    return DerivationD(g.nor, on_algebra, on_letters, degree=1, check=True)


def frakD_square_report(g: GeometricModel) -> Dict[int, Dict[str, SymElement]]:
    """Square residuals of the assembled differential, localized by weight.

    Nonzero entries are the model's integrability defect; the lowest key is
    the first violating weight shift.
    """
    return square_components(build_frakD(g))


def build_kapranov(
    rlist: Mapping[int, Mapping[int, SymElement]],
    base: BaseAlgebra,
    tangent: FreeModule,
    cap: int = 4,
) -> DerivationD:
    """The diagonal-regime differential d0 + sum_n R_n on the tangent algebra."""
    alg = SymAlgebra.over_module(tangent, cap=cap)
    D0 = d0_derivation(alg, tangent)
    on_letters = dict(D0.on_letters)
    for n, table in rlist.items():
        if n < 2:
            raise KitError("curvature components start at weight 2")
        if n > cap:
            continue
        for i, el in table.items():
            val = SymElement(alg, dict(el.items()))
            on_letters[i] = on_letters.get(i, alg.zero()) + val
    return DerivationD(alg, dict(D0.on_algebra), on_letters, degree=1, check=True)


# ---------------------------------------------------------------------------
# module-side transposes and the recursive structure
# ---------------------------------------------------------------------------


def _tm_from_dual_values(g: GeometricModel, values: Mapping[int, AlgebraElement]) -> ModuleElement:
    """The tangent element T with xi_i(T) = values[i]."""
    coeffs: Dict[int, AlgebraElement] = {}
    for i, val in values.items():
        if val.is_zero():
            continue
        letter_degree = g.amb.letter_degrees[i]
        acc = g.base.zero()
        for d, hp in val.homogeneous_parts().items():
            acc = acc + hp.scale(sign_scalar(d * letter_degree))
        coeffs[i] = acc
    return ModuleElement(g.tangent, coeffs)


def _nm_from_dual_values(g: GeometricModel, values: Mapping[int, AlgebraElement]) -> ModuleElement:
    coeffs: Dict[int, AlgebraElement] = {}
    for j, val in values.items():
        if val.is_zero():
            continue
        letter_degree = g.nor.letter_degrees[j]
        acc = g.base.zero()
        for d, hp in val.homogeneous_parts().items():
            acc = acc + hp.scale(sign_scalar(d * letter_degree))
        coeffs[j] = acc
    return ModuleElement(g.normal, coeffs)


def _embed_tangent(g: GeometricModel, v: ModuleElement) -> ModuleElement:
    return ModuleElement(g.ambient_module, dict(v.items()))


def _embed_normal(g: GeometricModel, v: ModuleElement) -> ModuleElement:
    return ModuleElement(g.ambient_module, {g.a + i: c for i, c in v.items()})


def beta_transpose(g: GeometricModel, v: ModuleElement) -> ModuleElement:
    """The module-side Kodaira-Spencer map Nm -> Tm."""
    values = {}
    for i in range(g.a):
        pairing = evaluate(g.to_amb(g.beta[i]), [_embed_normal(g, v)], g.ambient_module)
        values[i] = pairing.scale(sign_scalar(g.amb.letter_degrees[i]))
    return _tm_from_dual_values(g, values)


def rtan_transpose(g: GeometricModel, p: int, args: Sequence[ModuleElement]) -> ModuleElement:
    """Module-side p-th tangential curvature: Nm^{x p} -> Tm."""
    if p == 1:
        return beta_transpose(g, args[0])
    table = g.curv_tan.get(p, {})
    values = {}
    emb = [_embed_normal(g, v) for v in args]
    for i in range(g.a):
        el = table.get(i)
        if el is None or el.is_zero():
            continue
        pairing = evaluate(g.to_amb(el), emb, g.ambient_module)
        values[i] = pairing.scale(sign_scalar(g.amb.letter_degrees[i]))
    return _tm_from_dual_values(g, values)


def rperp_transpose(g: GeometricModel, k: int, args: Sequence[ModuleElement]) -> ModuleElement:
    """Module-side k-th normal curvature: Nm^{x k} -> Nm.

    Carries the -(-1)^{|eta|} twist that relates letter substitution to the
    bracket recovery formula.
    """
    table = g.curv_perp.get(k, {})
    values = {}
    emb = [_embed_normal(g, v) for v in args]
    for j in range(g.b):
        el = table.get(j)
        if el is None or el.is_zero():
            continue
        pairing = evaluate(g.to_amb(el), emb, g.ambient_module)
        values[j] = pairing.scale(sign_scalar(g.nor.letter_degrees[j] + 1))
    return _nm_from_dual_values(g, values)


def shape_action(g: GeometricModel, V: ModuleElement, nu: ModuleElement) -> ModuleElement:
    """S_N contraction: (tangent direction, normal argument) -> tangent.

    Signless: the anchor-recursion bookkeeping cancels every Koszul factor
    here (the analogous curvature transposes carry (-1)^{|xi|}).
    """
    values = {}
    for i in range(g.a):
        el = g.shape[i]
        if el.is_zero():
            continue
        values[i] = evaluate(
            el, [_embed_tangent(g, V), _embed_normal(g, nu)], g.ambient_module
        )
    return _tm_from_dual_values(g, values)


def gamma_action(g: GeometricModel, V: ModuleElement, nu: ModuleElement) -> ModuleElement:
    """Normal-connection contraction nabla^perp_V nu on generators.

    Shares the -(-1)^{|eta|} bracket-recovery twist with rperp_transpose.
    """
    values = {}
    for j in range(g.b):
        el = g.gamma[j]
        if el.is_zero():
            continue
        pairing = evaluate(
            el, [_embed_tangent(g, V), _embed_normal(g, nu)], g.ambient_module
        )
        values[j] = pairing.scale(Scalar(-1))
    return _nm_from_dual_values(g, values)


def vector_action(g: GeometricModel, V: ModuleElement, a: AlgebraElement) -> AlgebraElement:
    """A tangent element acting on the base: (-1)^{|V||a|} (dhat a)(V)."""
    acc = g.base.zero()
    dhat_a = g.amb.zero()
    for idx, c in a.items():
        dhat_a = dhat_a + g.dhat[idx].scale(c)
    if dhat_a.is_zero():
        return acc
    for dv, hv in V.homogeneous_parts().items():
        for da, ha in _sym_homog(dhat_a):
            pairing = evaluate(ha, [_embed_tangent(g, hv)], g.ambient_module)
            acc = acc + pairing.scale(sign_scalar(dv * da))
    return acc


def _sym_homog(el: SymElement):
    parts: Dict[int, Dict[Word, AlgebraElement]] = {}
    for w, d, c in el.homog_terms():
        slot = parts.setdefault(d, {})
        slot[w] = slot[w] + c if w in slot else c
    return [(d, SymElement(el.algebra, m)) for d, m in sorted(parts.items())]


def structure_from_geometry(g: GeometricModel) -> AlgebroidStructure:
    """Emit the recursive anchors and brackets of the model.

    alpha_1 = beta-transpose; for n >= 2
        alpha_n = Rtan_n + sum_{Sh(n-1,1)} alpha(sigma) Shape(alpha_{n-1}(first), last)
        ell_n   = Rperp_n + sum_{Sh(n-1,1)} alpha(sigma) Gamma(alpha_{n-1}(first), last)
    and the anchor tables are {v_1..v_n | a} = (-1)^{|a| |alpha_n(v)|}-twisted
    pairings of alpha_n with dhat.
    """
    cap = g.cap
    S = AlgebroidStructure(g.base, g.normal, bracket_cap=cap, anchor_cap=cap + 1)
    degrees = g.normal.degrees

    alpha_tables: Dict[int, Dict[Word, ModuleElement]] = {}

    def alpha_eval(m: int, key: Word) -> ModuleElement:
        ckey, sign, vanishes = canonicalize_key(key, degrees, True)
        if vanishes:
            return g.tangent.zero()
        got = alpha_tables.get(m, {}).get(ckey)
        if got is None:
            return g.tangent.zero()
        return got.scale(sign_scalar(0 if sign == 1 else 1))

    for m in range(1, cap + 1):
        table: Dict[Word, ModuleElement] = {}
        for key in sorted_tuples(g.b, m):
            ckey, _, vanishes = canonicalize_key(key, degrees, True)
            if vanishes or ckey != key:
                continue
            gens = [g.normal.generator(i) for i in key]
            degs = [degrees[i] for i in key]
            if m == 1:
                val = beta_transpose(g, gens[0])
            else:
                val = rtan_transpose(g, m, gens)
                for sigma in enumerate_unshuffles(m - 1, 1):
                    perm = sigma.permute(list(range(m)))
                    sign = sym_sign(sigma, degs)
                    inner = alpha_eval(m - 1, tuple(key[p] for p in perm[: m - 1]))
                    term = shape_action(g, inner, gens[perm[m - 1]])
                    val = val + term.scale(sign_scalar(0 if sign == 1 else 1))
            if not val.is_zero():
                table[key] = val
        alpha_tables[m] = table

    for n in range(2, cap + 1):
        for key in sorted_tuples(g.b, n):
            ckey, _, vanishes = canonicalize_key(key, degrees, True)
            if vanishes or ckey != key:
                continue
            gens = [g.normal.generator(i) for i in key]
            degs = [degrees[i] for i in key]
            val = rperp_transpose(g, n, gens)
            for sigma in enumerate_unshuffles(n - 1, 1):
                perm = sigma.permute(list(range(n)))
                sign = sym_sign(sigma, degs)
                inner = alpha_eval(n - 1, tuple(key[p] for p in perm[: n - 1]))
                term = gamma_action(g, inner, gens[perm[n - 1]])
                val = val + term.scale(sign_scalar(0 if sign == 1 else 1))
            if not val.is_zero():
                S.set_bracket(n, key, val)

    for m in range(1, cap + 1):
        for key, alpha_val in alpha_tables[m].items():
            for bidx in range(g.base.dim):
                a = g.base.basis_element(bidx)
                paired = vector_action(g, alpha_val, a)
                if paired.is_zero():
                    continue
                S.set_anchor(m + 1, key, bidx, paired)
    return S


def duality_residual(g: GeometricModel) -> Dict[str, SymElement]:
    """Difference between the CE derivation of the emitted structure and the
    directly assembled differential; empty means the central duality holds."""
    S = structure_from_geometry(g)
    D_ce = ce_differential(S, weight_cap=g.cap, algebra=g.nor)
    D_geo = build_frakD(g)
    out: Dict[str, SymElement] = {}
    for bidx in range(g.base.dim):
        lhs = D_ce.on_algebra.get(bidx, g.nor.zero())
        rhs = D_geo.on_algebra.get(bidx, g.nor.zero())
        if lhs != rhs:
            out[g.base.names[bidx]] = lhs - rhs
    for j in range(g.b):
        lhs = D_ce.on_letters.get(j, g.nor.zero())
        rhs = D_geo.on_letters.get(j, g.nor.zero())
        if lhs != rhs:
            out[g.nor.letter_names[j]] = lhs - rhs
    return out
