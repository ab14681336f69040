"""Derivations of truncated graded Lie algebras, weight by weight.

The weight-w derivations are the kernel of the coboundary d1 restricted to
weight-w linear maps (see :mod:`gradlie.weights`).  A weight is reported as
*stable* when the dimension computed at truncation N agrees with the one at
N + margin and |w| <= N - margin - (largest generator degree).  Only stable
weights say anything about the untruncated algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .core import (
    AlgebraError,
    BasisElement,
    GradedOperator,
    TruncatedAlgebra,
    Vector,
    clean,
    jacobi_check,
    stable_center,
)
from .exactla import Echelon, Span, SparseMatrix, nullspace_sparse, rank, rank_of_rows
from .weights import C1Slice, d1_matrix


def default_margin(L: TruncatedAlgebra, margin: Optional[int]) -> int:
    m = L.period if margin is None else margin
    if m < 1:
        raise AlgebraError("margin must be a positive integer")
    return m


def stability_cutoff(L: TruncatedAlgebra, margin: int) -> int:
    return L.truncation - margin - L.max_generator_degree


def bigger(L: TruncatedAlgebra, margin: int) -> Optional[TruncatedAlgebra]:
    if L.rebuild is None:
        return None
    return L.rebuild(L.truncation + margin)


def _restrict_or_self(L: TruncatedAlgebra, margin: int) -> tuple[TruncatedAlgebra, TruncatedAlgebra]:
    """The (small, large) pair of models compared by the stability checks."""
    big = bigger(L, margin)
    if big is not None:
        return L, big
    from .core import restrict

    return restrict(L, L.truncation - margin), L


# -- weight slices ----------------------------------------------------------


def derivations_of_weight(L: TruncatedAlgebra, w: int, mode: str = "window") -> list[GradedOperator]:
    """Basis of weight-w derivations, canonical (reduced echelon) form."""
    c1 = C1Slice(L, w)
    if not len(c1):
        return []
    m = d1_matrix(L, w, mode, c1=c1)
    return [c1.operator(v, f"der[w={w}]#{n}") for n, v in enumerate(nullspace_sparse(m))]


def derivation_dim(L: TruncatedAlgebra, w: int, mode: str = "window") -> int:
    c1 = C1Slice(L, w)
    if not len(c1):
        return 0
    return len(c1) - rank(d1_matrix(L, w, mode, c1=c1))


def inner_space(L: TruncatedAlgebra) -> list[GradedOperator]:
    """ad_b for every basis element b, in basis order (zero operators included).

    The kernel of b -> ad_b is the centre, so zero entries are kept to make
    that correspondence visible; use :func:`inner_of_weight` for a basis.
    """
    return [GradedOperator.ad(L, {b.index: Fraction(1)}, f"ad_{b.label}") for b in L.basis]


def inner_of_weight(L: TruncatedAlgebra, w: int) -> list[GradedOperator]:
    """ad_b for the basis elements b of degree w (nonzero ones only)."""
    out = []
    for b in L.indices_of_degree(w):
        op = GradedOperator.ad(L, {b: Fraction(1)}, f"ad_{L.label(b)}")
        if not op.is_zero():
            out.append(op)
    return out


def inner_dim(L: TruncatedAlgebra, w: int) -> int:
    return rank_of_rows(op.flat() for op in inner_of_weight(L, w))


# -- reports ----------------------------------------------------------------


@dataclass
class WeightRecord:
    weight: int
    dim: int
    dim_big: Optional[int]
    stable: bool
    basis: list[GradedOperator] = field(default_factory=list)


@dataclass
class DerivationReport:
    algebra: str
    truncation: int
    margin: int
    cutoff: int
    records: dict[int, WeightRecord] = field(default_factory=dict)

    def stable_weights(self) -> list[int]:
        return [w for w, r in sorted(self.records.items()) if r.stable]

    def dims(self, stable_only: bool = True) -> dict[int, int]:
        return {w: r.dim for w, r in sorted(self.records.items()) if r.stable or not stable_only}


def _weights(L: TruncatedAlgebra, margin: int, weights: Optional[Iterable[int]]) -> list[int]:
    if weights is not None:
        return sorted(set(weights))
    cut = stability_cutoff(L, margin)
    if cut < 0:
        return []
    return list(range(-cut, cut + 1))


def derivation_space(L: TruncatedAlgebra, margin: Optional[int] = None,
                     weights: Optional[Iterable[int]] = None, with_basis: bool = True,
                     mode: str = "window") -> DerivationReport:
    """Per-weight derivation dimensions at N and N + margin, with stability flags."""
    margin = default_margin(L, margin)
    small, big = _restrict_or_self(L, margin)
    cut = stability_cutoff(small, margin)
    rep = DerivationReport(small.name, small.truncation, margin, cut)
    for w in _weights(small, margin, weights):
        basis = derivations_of_weight(small, w, mode)
        d_big = derivation_dim(big, w, mode)
        stable = len(basis) == d_big and abs(w) <= cut
        rep.records[w] = WeightRecord(w, len(basis), d_big, stable, basis if with_basis else [])
    return rep


@dataclass
class H1Record:
    weight: int
    der: int
    inner: int
    h1: int
    h1_big: Optional[int]
    stable: bool
    witnesses: list[GradedOperator] = field(default_factory=list)


@dataclass
class H1Report:
    algebra: str
    truncation: int
    margin: int
    cutoff: int
    records: dict[int, H1Record] = field(default_factory=dict)

    def stable_weights(self) -> list[int]:
        return [w for w, r in sorted(self.records.items()) if r.stable]

    def values(self, stable_only: bool = True) -> dict[int, int]:
        return {w: r.h1 for w, r in sorted(self.records.items()) if r.stable or not stable_only}


def _outer_witnesses(der: Sequence[GradedOperator], inner: Sequence[GradedOperator]) -> list[GradedOperator]:
    """Derivations completing a basis of Inner_w to a basis of Der_w."""
    ech = Echelon()
    for op in inner:
        ech.add(op.flat())
    out = []
    for op in der:
        if ech.add(op.flat()):
            out.append(op)
    return out


def h1(L: TruncatedAlgebra, margin: Optional[int] = None, weights: Optional[Iterable[int]] = None,
       mode: str = "window") -> H1Report:
    """dim Der_w - dim Inner_w per weight, at N and N + margin."""
    margin = default_margin(L, margin)
    small, big = _restrict_or_self(L, margin)
    cut = stability_cutoff(small, margin)
    rep = H1Report(small.name, small.truncation, margin, cut)
    for w in _weights(small, margin, weights):
        der = derivations_of_weight(small, w, mode)
        inner = inner_of_weight(small, w)
        i_dim = rank_of_rows(op.flat() for op in inner)
        value = len(der) - i_dim
        value_big = derivation_dim(big, w, mode) - inner_dim(big, w)
        stable = value == value_big and abs(w) <= cut
        wit = _outer_witnesses(der, inner) if value else []
        rep.records[w] = H1Record(w, len(der), i_dim, value, value_big, stable, wit)
    return rep


# -- operators --------------------------------------------------------------


@dataclass
class NilpotencyResult:
    nilpotent: bool
    steps: int
    eventual_image: list[Vector]

    def __bool__(self) -> bool:
        return self.nilpotent


def is_potentially_nilpotent(T: GradedOperator) -> NilpotencyResult:
    """Iterate images of T until they stop shrinking; nilpotent iff they reach 0."""
    L = T.algebra
    current = [{b.index: Fraction(1)} for b in L.basis]
    steps = 0
    while current:
        img = Span(T(v) for v in current)
        nxt = img.canonical_basis()
        steps += 1
        if len(nxt) == len(current):
            return NilpotencyResult(False, steps, nxt)
        current = nxt
    return NilpotencyResult(True, steps, [])


def in_span(op: GradedOperator, basis: Sequence[GradedOperator]) -> bool:
    s = Span(b.flat() for b in basis)
    return s.contains(op.flat())


def is_derivation(op: GradedOperator, mode: str = "window") -> bool:
    """Exact Leibniz check on every weight component of ``op``."""
    L = op.algebra
    for w, part in op.components().items():
        c1 = C1Slice(L, w)
        m = d1_matrix(L, w, mode, c1=c1)
        vec = [Fraction(0)] * len(c1)
        for k, v in c1.coords(part).items():
            vec[k] = v
        if any(m.dot(vec)):
            return False
    return True


def nil_independent_count(L: TruncatedAlgebra, margin: Optional[int] = None) -> int:
    """Number of potentially nil-independent derivations, via stable weight 0.

    Requires every weight-0 derivation to act diagonally on the basis; the
    count is then the dimension of the space of eigenvalue patterns.
    """
    margin = default_margin(L, margin)
    rep = derivation_space(L, margin, weights=[0])
    rec = rep.records[0]
    if not rec.stable:
        raise AlgebraError(f"{L.name}: weight 0 is not stable at N={L.truncation}, margin={margin}")
    patterns = []
    for op in rec.basis:
        for i, img in op.images.items():
            if set(img) != {i}:
                raise AlgebraError(
                    f"{L.name}: weight-0 derivation {op.label} is not diagonal on {L.label(i)}; "
                    "count undefined under current method")
        patterns.append({i: img[i] for i, img in op.images.items()})
    # a diagonal map is nilpotent iff it is zero, so no nonzero combination is nilpotent
    return rank_of_rows(patterns)


@dataclass
class CompletenessReport:
    algebra: str
    truncation: int
    margin: int
    center: list[Vector]
    h1_values: dict[int, int]
    stable_weights: list[int]
    min_stable: int

    @property
    def center_trivial(self) -> bool:
        return not self.center

    @property
    def h1_trivial(self) -> bool:
        return all(v == 0 for v in self.h1_values.values())

    @property
    def determinate(self) -> bool:
        return len(self.stable_weights) >= self.min_stable

    @property
    def complete(self) -> bool:
        return self.center_trivial and self.h1_trivial and self.determinate

    @property
    def verdict(self) -> str:
        if not self.determinate:
            return "indeterminate"
        return "pass" if self.center_trivial and self.h1_trivial else "fail"


def completeness_check(L: TruncatedAlgebra, margin: Optional[int] = None, min_stable: int = 1) -> CompletenessReport:
    margin = default_margin(L, margin)
    centre = stable_center(L, margin)
    rep = h1(L, margin)
    return CompletenessReport(L.name, L.truncation, margin, centre, rep.values(), rep.stable_weights(), min_stable)


# -- semidirect extensions --------------------------------------------------


def build_extension(base: TruncatedAlgebra, ds: Sequence[GradedOperator],
                    q_bracket: Optional[Mapping[tuple[int, int], Mapping[int, object]]] = None,
                    name: Optional[str] = None, generator_names: Optional[Sequence[str]] = None) -> TruncatedAlgebra:
    """Adjoin degree-0 generators g_s with [e, g_s] = ds[s](e) and [g_s, g_t] given.

    ``q_bracket`` maps (s, t), 0-based with s < t, to a vector over the base
    basis.  Every ds[s] must be a derivation of ``base``; the result must
    satisfy the Jacobi identity, otherwise a witness triple is reported.
    """
    from .catalog import JacobiError

    q_bracket = dict(q_bracket or {})
    for s, d in enumerate(ds):
        if d.algebra is not base and not d.algebra.same_table(base):
            raise AlgebraError(f"operator {s} is defined on a different algebra")
        bad = d.leibniz_defects()
        if bad:
            i, j, _ = bad[0]
            raise AlgebraError(f"operator {s} is not a derivation: Leibniz fails on ({base.label(i)}, {base.label(j)})")
    for (s, t) in q_bracket:
        if not (0 <= s < t < len(ds)):
            raise AlgebraError(f"q_bracket key {(s, t)} must satisfy 0 <= s < t < {len(ds)}")
    g = len(ds)
    names = list(generator_names or (["x", "y", "z"][:g] if g <= 3 else [f"g{s}" for s in range(g)]))
    basis = [BasisElement(s + 1, 0, names[s], generator=True) for s in range(g)]
    basis += [BasisElement(b.index + g, b.degree, b.name, b.generator) for b in base.basis]
    table: dict[tuple[int, int], list] = {}
    for (i, j), terms in base.table.items():
        table[(i + g, j + g)] = [(k + g, c) for k, c in terms]
    for s, d in enumerate(ds):
        for i, img in d.images.items():
            # [e_i, g_s] = d(e_i)  =>  [g_s, e_i] = -d(e_i)
            table[(s + 1, i + g)] = [(k + g, -c) for k, c in sorted(img.items())]
    for (s, t), v in q_bracket.items():
        v = clean(v)
        if v:
            table[(s + 1, t + 1)] = [(k + g, c) for k, c in sorted(v.items())]
    # degree-0 generators keep the table graded only if every action has weight 0
    graded = (base.graded
              and all(set(d.components()) <= {0} for d in ds)
              and all(base.degree(k) == 0 for v in q_bracket.values() for k in clean(v)))
    L = TruncatedAlgebra(name or f"ext({base.name})", basis, table, base.truncation, base.period,
                         graded=graded, max_generator_degree=base.max_generator_degree)
    viol = jacobi_check(L, limit=1)
    if viol:
        v = viol[0]
        names3 = tuple(L.label(i) for i in v.triple)
        raise JacobiError(f"extension violates Jacobi on {names3}", names3, v.residual)
    return L


# -- generator-image oracle -------------------------------------------------


def _generators(L: TruncatedAlgebra) -> tuple[list[int], dict[int, tuple[int, int, Fraction]]]:
    """Greedy generators by degree and, for the rest, a defining bracket.

    Each non-generator b_k gets a pair (i, j) of lower basis elements with
    [b_i, b_j] = c * b_k + (other terms of the same degree handled by order).
    Requires one basis element per degree for the defining brackets to be
    unambiguous; n1 and n2 satisfy this.
    """
    gens: list[int] = []
    defs: dict[int, tuple[int, int, Fraction]] = {}
    for b in L.basis:
        k = b.index
        found = None
        for i in range(1, k):
            for j, v in L._br.get(i, {}).items():
                if j < k and i < j and set(v) == {k}:
                    found = (i, j, v[k])
                    break
            if found:
                break
        if found:
            defs[k] = found
        else:
            gens.append(k)
    return gens, defs


def derivations_by_generators(L: TruncatedAlgebra, w: int) -> list[GradedOperator]:
    """Weight-w derivations computed from the images of generators alone.

    Unknowns are the coefficients of D(g) for each generator g.  The images of
    all other basis elements are propagated as linear forms through their
    defining brackets, and the Leibniz rule is imposed on every in-window pair.
    """
    if not L.is_positive() or not L.graded:
        raise AlgebraError("the generator-image method needs a positively graded algebra")
    gens, defs = _generators(L)
    N = L.truncation
    cap = N - max(w, 0)
    unknowns: list[tuple[int, int]] = []
    for g in gens:
        for t in L.indices_of_degree(L.degree(g) + w):
            unknowns.append((g, t))
    col = {u: n for n, u in enumerate(unknowns)}
    # image[k] : target -> linear form (dict unknown-column -> coeff)
    image: dict[int, dict[int, dict[int, Fraction]]] = {}

    def add_form(dst: dict[int, dict[int, Fraction]], t: int, form: Mapping[int, Fraction], c: Fraction) -> None:
        f = dst.setdefault(t, {})
        for u, x in form.items():
            nv = f.get(u, 0) + c * x
            if nv:
                f[u] = nv
            else:
                f.pop(u, None)
        if not f:
            dst.pop(t)

    def bracket_form(form_img: dict[int, dict[int, Fraction]], other: int, left: bool) -> dict[int, dict[int, Fraction]]:
        out: dict[int, dict[int, Fraction]] = {}
        for s, form in form_img.items():
            v = L.bracket_basis(s, other) if left else L.bracket_basis(other, s)
            for t, c in v.items():
                add_form(out, t, form, c)
        return out

    for b in L.basis:
        k = b.index
        if L.degree(k) + w > N:
            image[k] = {}
            continue
        if k in defs:
            i, j, c = defs[k]
            if L.degree(k) > cap:
                image[k] = None  # type: ignore[assignment]  # beyond the window
                continue
            total: dict[int, dict[int, Fraction]] = {}
            for t, form in bracket_form(image[i], j, left=True).items():
                add_form(total, t, form, 1 / c)
            for t, form in bracket_form(image[j], i, left=False).items():
                add_form(total, t, form, 1 / c)
            image[k] = total
        else:
            image[k] = {t: {col[(k, t)]: Fraction(1)} for t in L.indices_of_degree(L.degree(k) + w)}
    rows: list[dict[int, Fraction]] = []
    n = L.dim
    for a in range(1, n + 1):
        for b2 in range(a + 1, n + 1):
            if L.degree(a) + L.degree(b2) > cap:
                break
            if image.get(a) is None or image.get(b2) is None:
                continue
            lhs: dict[int, dict[int, Fraction]] = {}
            for kk, c in L.bracket_basis(a, b2).items():
                if image.get(kk) is None:
                    continue
                for t, form in image[kk].items():
                    add_form(lhs, t, form, c)
            for t, form in bracket_form(image[a], b2, left=True).items():
                add_form(lhs, t, form, Fraction(-1))
            for t, form in bracket_form(image[b2], a, left=False).items():
                add_form(lhs, t, form, Fraction(-1))
            rows.extend(f for f in lhs.values() if f)
    m = SparseMatrix.from_rows(rows, len(unknowns))
    out = []
    for v in nullspace_sparse(m):
        images: dict[int, Vector] = {}
        for k, img in image.items():
            if img is None:
                continue
            vec: Vector = {}
            for t, form in img.items():
                x = sum((form.get(u, 0) * v.get(u, 0) for u in form), Fraction(0))
                if x:
                    vec[t] = x
            if vec:
                images[k] = vec
        out.append(GradedOperator(L, images, f"gen[w={w}]"))
    return out


def span_equal(a: Sequence[GradedOperator], b: Sequence[GradedOperator]) -> bool:
    sa = Span(op.flat() for op in a)
    sb = Span(op.flat() for op in b)
    return sa.dim == sb.dim and sa.contains_span(sb)


__all__ = [
    "CompletenessReport",
    "DerivationReport",
    "H1Report",
    "build_extension",
    "completeness_check",
    "derivation_space",
    "derivations_by_generators",
    "derivations_of_weight",
    "h1",
    "in_span",
    "inner_of_weight",
    "inner_space",
    "is_derivation",
    "is_potentially_nilpotent",
    "nil_independent_count",
    "span_equal",
]
