"""Graded Lie algebras under degree truncation.

A :class:`TruncatedAlgebra` is the quotient of a (usually infinite
dimensional) graded Lie algebra by the ideal spanned by everything of degree
greater than the truncation ``N``.  Because that span is an ideal, the
quotient is an honest finite dimensional Lie algebra: every identity that
fails in the model fails for real.

Vectors are plain ``dict[int, Fraction]`` maps from basis index to
coefficient with zeros omitted.  Basis indices run from 1 to ``dim`` and are
ordered by non-decreasing degree, so quotienting to a smaller truncation keeps
a prefix of the basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .exactla import Span, SparseMatrix, as_scalar, nullspace_sparse

Vector = dict[int, Fraction]
Table = dict[tuple[int, int], tuple[tuple[int, Fraction], ...]]


class AlgebraError(ValueError):
    """Malformed algebra data, or an operation whose precondition fails."""


class NotPronilpotentError(AlgebraError):
    """The lower central series stabilises at a nonzero term."""


# -- vector helpers ---------------------------------------------------------


def vec_add(a: Mapping[int, Fraction], b: Mapping[int, Fraction], scale: Fraction = Fraction(1)) -> Vector:
    """Return ``a + scale*b``."""
    out = dict(a)
    if not scale:
        return out
    for k, v in b.items():
        nv = out.get(k, 0) + scale * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def vec_scale(a: Mapping[int, Fraction], c) -> Vector:
    c = as_scalar(c)
    if not c:
        return {}
    return {k: c * v for k, v in a.items()}


def clean(v: Mapping[int, object]) -> Vector:
    out = {}
    for k, x in v.items():
        x = as_scalar(x)
        if x:
            out[int(k)] = x
    return out


def _accumulate(acc: Vector, k: int, v: Fraction) -> None:
    nv = acc.get(k, 0) + v
    if nv:
        acc[k] = nv
    else:
        acc.pop(k, None)


# -- data model -------------------------------------------------------------


@dataclass(frozen=True)
class BasisElement:
    index: int
    degree: int
    name: str = ""
    generator: bool = False  # declared degree-0 extension generator

    @property
    def label(self) -> str:
        return self.name or f"b{self.index}"


@dataclass(frozen=True)
class ValidationIssue:
    kind: str
    detail: str


class TruncatedAlgebra:
    """Finite dimensional quotient L / L_{>N} given by a sparse structure table.

    ``table`` maps ``(i, j)`` with ``i < j`` to the nonzero terms of
    ``[b_i, b_j]``.  ``graded`` is False for algebras that are only filtered
    (brackets land in degree >= the sum of the input degrees); weight slicing
    is restricted to graded algebras.  ``rebuild`` regenerates the same family
    at another truncation and is used by the stability checks.
    """

    def __init__(
        self,
        name: str,
        basis: Sequence[BasisElement],
        table: Mapping[tuple[int, int], Iterable[tuple[int, object]]],
        truncation: int,
        period: int = 1,
        *,
        graded: bool = True,
        rebuild: Optional[Callable[[int], "TruncatedAlgebra"]] = None,
        max_generator_degree: Optional[int] = None,
        strict: bool = True,
    ):
        if truncation < 1:
            raise AlgebraError("truncation must be a positive integer")
        if period < 1:
            raise AlgebraError("period must be a positive integer")
        self.name = name
        self.basis: tuple[BasisElement, ...] = tuple(basis)
        self.truncation = truncation
        self.period = period
        self.graded = graded
        self.rebuild = rebuild
        for pos, b in enumerate(self.basis, start=1):
            if b.index != pos:
                raise AlgebraError(f"basis indices must be 1..n in order; position {pos} holds index {b.index}")
            if b.degree < 0:
                raise AlgebraError(f"basis element {b.label} has negative degree {b.degree}")
            if b.degree > truncation:
                raise AlgebraError(f"basis element {b.label} has degree {b.degree} > truncation {truncation}")
            if b.degree == 0 and not b.generator:
                raise AlgebraError(f"basis element {b.label} has degree 0 but is not a declared extension generator")
            if pos > 1 and b.degree < self.basis[pos - 2].degree:
                raise AlgebraError("basis must be ordered by non-decreasing degree")
        self._raw_table = {k: tuple(v) for k, v in table.items()}
        self.table: Table = {}
        self._issues: list[ValidationIssue] = []
        n = len(self.basis)
        for (i, j), terms in self._raw_table.items():
            key_ok = 1 <= i <= n and 1 <= j <= n
            if not key_ok:
                self._issues.append(ValidationIssue("out_of_range", f"entry ({i},{j}) refers to a missing basis element"))
                continue
            if i == j:
                self._issues.append(ValidationIssue("diagonal", f"entry ({i},{i}) is not allowed"))
                continue
            if i > j:
                self._issues.append(ValidationIssue("order", f"entry ({i},{j}) must be stored as i<j"))
                continue
            acc: Vector = {}
            seen: set[int] = set()
            for k, c in terms:
                if not 1 <= k <= n:
                    self._issues.append(ValidationIssue("out_of_range", f"entry ({i},{j}) has target {k} outside the basis"))
                    continue
                if k in seen:
                    self._issues.append(ValidationIssue("duplicate", f"entry ({i},{j}) lists target {k} twice"))
                seen.add(k)
                _accumulate(acc, k, as_scalar(c))
            if acc:
                self.table[(i, j)] = tuple(sorted(acc.items()))
        if strict and any(iss.kind in ("out_of_range", "diagonal", "order") for iss in self._issues):
            raise AlgebraError("; ".join(iss.detail for iss in self._issues))
        self._br: dict[int, dict[int, Vector]] = {}
        for (i, j), terms in self.table.items():
            pos = dict(terms)
            self._br.setdefault(i, {})[j] = pos
            self._br.setdefault(j, {})[i] = {k: -v for k, v in terms}
        if max_generator_degree is None:
            positive = [b.degree for b in self.basis if b.degree > 0]
            max_generator_degree = _min_generator_degree(self) if positive else 0
        self.max_generator_degree = max_generator_degree

    # basic structure ---------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.basis)

    def degree(self, i: int) -> int:
        return self.basis[i - 1].degree

    def label(self, i: int) -> str:
        return self.basis[i - 1].label

    def index_of(self, name: str) -> int:
        for b in self.basis:
            if b.label == name:
                return b.index
        raise KeyError(name)

    def indices_of_degree(self, d: int) -> list[int]:
        return [b.index for b in self.basis if b.degree == d]

    @property
    def degrees(self) -> list[int]:
        return sorted({b.degree for b in self.basis})

    def is_positive(self) -> bool:
        return all(b.degree > 0 for b in self.basis)

    def __repr__(self) -> str:
        return f"TruncatedAlgebra({self.name!r}, dim={self.dim}, N={self.truncation})"

    def same_table(self, other: "TruncatedAlgebra") -> bool:
        return (
            [(b.index, b.degree) for b in self.basis] == [(b.index, b.degree) for b in other.basis]
            and self.table == other.table
        )

    # brackets ----------------------------------------------------------

    def bracket_basis(self, i: int, j: int) -> Vector:
        n = self.dim
        if not (1 <= i <= n and 1 <= j <= n):
            raise AlgebraError(f"basis index outside 1..{n}: ({i}, {j})")
        return self._br.get(i, {}).get(j, {})

    def bracket(self, a: Mapping[int, Fraction], b: Mapping[int, Fraction]) -> Vector:
        """Bilinear extension of the table (degree > N already dropped)."""
        n = self.dim
        for v in (a, b):
            for k in v:
                if not 1 <= k <= n:
                    raise AlgebraError(f"vector refers to basis index {k} outside 1..{n}")
        out: Vector = {}
        br = self._br
        for i, ca in a.items():
            row = br.get(i)
            if not row:
                continue
            for j, cb in b.items():
                terms = row.get(j)
                if not terms:
                    continue
                c = ca * cb
                for k, v in terms.items():
                    _accumulate(out, k, c * v)
        return out

    def ad_basis(self, i: int) -> dict[int, Vector]:
        """Images of ad_{b_i} on the basis (only nonzero ones)."""
        return {j: dict(v) for j, v in self._br.get(i, {}).items()}

    def nonzero_pairs(self) -> Iterable[tuple[int, int]]:
        return self.table.keys()


def _min_generator_degree(L: TruncatedAlgebra) -> int:
    """Largest degree of a minimal generating set of the positive part."""
    positive = [b.index for b in L.basis if b.degree > 0]
    if not positive:
        return 0
    span_sq = Span()
    pos_set = set(positive)
    for i in positive:
        for j, v in L._br.get(i, {}).items():
            if j in pos_set and i < j and v:
                span_sq.add(v)
    worst = 0
    for i in positive:
        if not span_sq.contains({i: Fraction(1)}):
            worst = max(worst, L.degree(i))
    return worst


# -- derived constructions --------------------------------------------------


def restrict(L: TruncatedAlgebra, n_new: int) -> TruncatedAlgebra:
    """Quotient of L by everything of degree > n_new."""
    if n_new > L.truncation:
        raise AlgebraError("restrict can only lower the truncation")
    keep = [b for b in L.basis if b.degree <= n_new]
    kept = {b.index for b in keep}
    table = {}
    for (i, j), terms in L.table.items():
        if i in kept and j in kept:
            t = [(k, c) for k, c in terms if k in kept]
            if t:
                table[(i, j)] = t
    return TruncatedAlgebra(
        L.name,
        keep,
        table,
        n_new,
        L.period,
        graded=L.graded,
        rebuild=L.rebuild,
        max_generator_degree=L.max_generator_degree,
    )


def validate(L: TruncatedAlgebra) -> list[ValidationIssue]:
    """Structural problems: bad keys, duplicates and degree violations."""
    issues = list(L._issues)
    for (i, j), terms in L._raw_table.items():
        if not (1 <= i <= L.dim and 1 <= j <= L.dim) or i >= j:
            continue
        want = L.degree(i) + L.degree(j)
        for k, c in terms:
            if not 1 <= k <= L.dim:
                continue
            dk = L.degree(k)
            if L.graded and dk != want:
                issues.append(ValidationIssue(
                    "degree", f"[{L.label(i)},{L.label(j)}] has target {L.label(k)} of degree {dk}, expected {want}"))
            elif not L.graded and dk < want:
                issues.append(ValidationIssue(
                    "degree", f"[{L.label(i)},{L.label(j)}] has target {L.label(k)} of degree {dk} < {want}"))
            if dk > L.truncation:
                issues.append(ValidationIssue("truncation", f"target {L.label(k)} exceeds the truncation"))
    return issues


@dataclass(frozen=True)
class JacobiViolation:
    triple: tuple[int, int, int]
    residual: Vector


def jacobi_residual(L: TruncatedAlgebra, i: int, j: int, k: int) -> Vector:
    a, b, c = {i: Fraction(1)}, {j: Fraction(1)}, {k: Fraction(1)}
    r = L.bracket(L.bracket(a, b), c)
    r = vec_add(r, L.bracket(L.bracket(b, c), a))
    return vec_add(r, L.bracket(L.bracket(c, a), b))


def jacobi_check(L: TruncatedAlgebra, limit: Optional[int] = None) -> list[JacobiViolation]:
    """All basis triples i<j<k (degree sum <= N) where Jacobi fails.

    Triples of larger degree sum cannot fail because every term is dropped.
    ``limit`` stops the scan after that many violations.
    """
    n, N = L.dim, L.truncation
    deg = [0] + [b.degree for b in L.basis]
    out: list[JacobiViolation] = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if deg[i] + deg[j] > N:
                break
            for k in range(j + 1, n + 1):
                if deg[i] + deg[j] + deg[k] > N:
                    break
                r = jacobi_residual(L, i, j, k)
                if r:
                    out.append(JacobiViolation((i, j, k), r))
                    if limit is not None and len(out) >= limit:
                        return out
    return out


# -- series -----------------------------------------------------------------


@dataclass
class SeriesChain:
    """Terms of a descending series, each an echelonised basis."""

    kind: str
    terms: list[list[Vector]] = field(default_factory=list)
    stabilized_nonzero: bool = False

    @property
    def dims(self) -> list[int]:
        return [len(t) for t in self.terms]

    def min_degrees(self, L: TruncatedAlgebra) -> list[Optional[int]]:
        out = []
        for t in self.terms:
            supp = {k for v in t for k in v}
            out.append(min((L.degree(k) for k in supp), default=None))
        return out


def _bracket_span(L: TruncatedAlgebra, left: Sequence[Vector], right: Sequence[Vector], symmetric: bool) -> Span:
    s = Span()
    for a_pos, a in enumerate(left):
        start = a_pos + 1 if symmetric else 0
        for b in right[start:]:
            v = L.bracket(a, b)
            if v:
                s.add(v)
    return s


def lower_central_series(L: TruncatedAlgebra, max_terms: Optional[int] = None) -> SeriesChain:
    """L^1 = L, L^{k+1} = [L^k, L] until zero or stabilisation."""
    whole = [{b.index: Fraction(1)} for b in L.basis]
    chain = SeriesChain("lower_central", [whole])
    current = whole
    limit = max_terms if max_terms is not None else L.dim + 2
    while current and len(chain.terms) < limit:
        nxt = _bracket_span(L, current, whole, symmetric=False)
        basis = nxt.canonical_basis()
        if len(basis) == len(current):
            chain.stabilized_nonzero = True
            break
        chain.terms.append(basis)
        current = basis
    return chain


def derived_series(L: TruncatedAlgebra, max_terms: Optional[int] = None) -> SeriesChain:
    """L^{[1]} = L, L^{[s+1]} = [L^{[s]}, L^{[s]}] until zero or stabilisation."""
    whole = [{b.index: Fraction(1)} for b in L.basis]
    chain = SeriesChain("derived", [whole])
    current = whole
    limit = max_terms if max_terms is not None else L.dim + 2
    while current and len(chain.terms) < limit:
        nxt = _bracket_span(L, current, current, symmetric=True)
        basis = nxt.canonical_basis()
        if len(basis) == len(current):
            chain.stabilized_nonzero = True
            break
        chain.terms.append(basis)
        current = basis
    return chain


def series_nested(chain: SeriesChain) -> bool:
    """Each term lies inside the previous one (exact membership)."""
    for big, small in zip(chain.terms, chain.terms[1:]):
        s = Span(big)
        if not all(s.contains(v) for v in small):
            return False
    return True


def grading_signature(L: TruncatedAlgebra) -> list[int]:
    """dim(L^i / L^{i+1}) for every i with L^{i+1} still nonzero in the model.

    Positions whose next term is already zero are omitted because the
    truncation cuts them.  Raises NotPronilpotentError when the series
    stabilises at a nonzero term.
    """
    chain = lower_central_series(L)
    if chain.stabilized_nonzero:
        raise NotPronilpotentError(
            f"{L.name}: lower central series stabilises in dimension {chain.dims[-1]}; not pro-nilpotent at this truncation")
    dims = chain.dims + [0]
    out = []
    for i in range(len(chain.terms) - 1):
        if dims[i + 1] == 0:
            break
        out.append(dims[i] - dims[i + 1])
    return out


# -- centre and associated graded -------------------------------------------


def center_within(L: TruncatedAlgebra, max_degree: Optional[int] = None) -> list[Vector]:
    """Central elements of L supported on basis elements of degree <= max_degree."""
    cols = [b.index for b in L.basis if max_degree is None or b.degree <= max_degree]
    col_of = {idx: c for c, idx in enumerate(cols)}
    rows: dict[tuple[int, int], dict[int, Fraction]] = {}
    for idx in cols:
        for j, v in L._br.get(idx, {}).items():
            for k, c in v.items():
                rows.setdefault((j, k), {})[col_of[idx]] = c
    m = SparseMatrix.from_rows([rows[key] for key in sorted(rows)], len(cols))
    return [{cols[c]: x for c, x in sorted(v.items())} for v in nullspace_sparse(m)]


def stable_center(L: TruncatedAlgebra, margin: Optional[int] = None) -> list[Vector]:
    """Central elements of degree <= N - margin that stay central at N + margin."""
    if margin is None:
        margin = L.period
    if margin < 1:
        raise AlgebraError("margin must be positive")
    cut = L.truncation - margin
    if L.rebuild is not None:
        big = L.rebuild(L.truncation + margin)
        return center_within(big, cut)
    # no larger model available: settle for the quotient at N - margin inside L
    return center_within(L, cut)


@dataclass
class AssociatedGraded:
    algebra: TruncatedAlgebra
    levels: dict[int, int]
    identical: bool


def filtration_levels(L: TruncatedAlgebra) -> dict[int, int]:
    """Level of each basis index in the lower central filtration.

    Requires every term L^i to be spanned by a suffix of the basis.
    """
    chain = lower_central_series(L)
    if chain.stabilized_nonzero:
        raise NotPronilpotentError(f"{L.name}: not pro-nilpotent at this truncation")
    levels: dict[int, int] = {}
    starts = []
    for pos, term in enumerate(chain.terms, start=1):
        if not term:
            break
        first = min(k for v in term for k in v)
        suffix = list(range(first, L.dim + 1))
        if len(term) != len(suffix) or not Span(term).contains_span(Span({k: Fraction(1)} for k in suffix)):
            raise AlgebraError(
                f"{L.name}: term {pos} of the lower central series is not spanned by a suffix of the basis; "
                "supply an adapted basis")
        starts.append(first)
    for pos, first in enumerate(starts, start=1):
        for k in range(first, L.dim + 1):
            levels[k] = pos
    return levels


def associated_graded(L: TruncatedAlgebra) -> AssociatedGraded:
    """gr L in the adapted basis, with a flag for equality with L's own table."""
    if not L.is_positive():
        raise AlgebraError(f"{L.name}: associated graded needs a pro-nilpotent algebra without degree-0 part")
    levels = filtration_levels(L)
    table = {}
    for (i, j), terms in L.table.items():
        want = levels[i] + levels[j]
        kept = [(k, c) for k, c in terms if levels[k] == want]
        if kept:
            table[(i, j)] = kept
    basis = [BasisElement(b.index, levels[b.index], b.name) for b in L.basis]
    top = max(levels.values(), default=1)
    gr = TruncatedAlgebra(f"gr {L.name}", basis, table, max(top, 1), L.period)
    return AssociatedGraded(gr, levels, gr.table == L.table)


# -- operators --------------------------------------------------------------


class GradedOperator:
    """Sparse linear endomorphism given by the images of basis elements."""

    def __init__(self, algebra: TruncatedAlgebra, images: Mapping[int, Mapping[int, object]], label: str = ""):
        self.algebra = algebra
        self.label = label
        self.images: dict[int, Vector] = {}
        n = algebra.dim
        for i, v in images.items():
            if not 1 <= i <= n:
                raise AlgebraError(f"operator source {i} outside 1..{n}")
            cv = clean(v)
            for k in cv:
                if not 1 <= k <= n:
                    raise AlgebraError(f"operator target {k} outside 1..{n}")
            if cv:
                self.images[i] = cv

    @classmethod
    def ad(cls, L: TruncatedAlgebra, v: Mapping[int, object], label: str = "") -> "GradedOperator":
        v = clean(v)
        images = {}
        for b in L.basis:
            img = L.bracket(v, {b.index: Fraction(1)})
            if img:
                images[b.index] = img
        return cls(L, images, label or "ad")

    def __call__(self, v: Mapping[int, Fraction]) -> Vector:
        out: Vector = {}
        for i, c in v.items():
            img = self.images.get(i)
            if img:
                for k, x in img.items():
                    _accumulate(out, k, c * x)
        return out

    def is_zero(self) -> bool:
        return not self.images

    def components(self) -> dict[int, "GradedOperator"]:
        """Split into weight-homogeneous pieces keyed by degree shift."""
        L = self.algebra
        parts: dict[int, dict[int, Vector]] = {}
        for i, img in self.images.items():
            for k, c in img.items():
                w = L.degree(k) - L.degree(i)
                parts.setdefault(w, {}).setdefault(i, {})[k] = c
        return {w: GradedOperator(L, imgs, f"{self.label}[w={w}]") for w, imgs in sorted(parts.items())}

    def weight(self) -> Optional[int]:
        comps = self.components()
        if len(comps) == 1:
            return next(iter(comps))
        return 0 if not comps else None

    def flat(self) -> dict[tuple[int, int], Fraction]:
        """Coordinates keyed by (source, target)."""
        return {(i, k): c for i, img in self.images.items() for k, c in img.items()}

    def __add__(self, other: "GradedOperator") -> "GradedOperator":
        images = {i: dict(v) for i, v in self.images.items()}
        for i, v in other.images.items():
            images[i] = vec_add(images.get(i, {}), v)
        return GradedOperator(self.algebra, images)

    def scaled(self, c) -> "GradedOperator":
        return GradedOperator(self.algebra, {i: vec_scale(v, c) for i, v in self.images.items()}, self.label)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedOperator):
            return NotImplemented
        return self.images == other.images

    def __repr__(self) -> str:
        return f"GradedOperator({self.label or 'anon'}, nnz={sum(len(v) for v in self.images.values())})"

    def leibniz_defects(self, max_output_degree: Optional[int] = None) -> list[tuple[int, int, Vector]]:
        """Basis pairs where D[a,b] != [Da,b] + [a,Db].

        Pairs are checked when the degree of every term they can produce stays
        at most ``max_output_degree`` (default: the truncation), measured as
        deg a + deg b + the largest weight of the operator.
        """
        L = self.algebra
        cap = L.truncation if max_output_degree is None else max_output_degree
        weights = list(self.components()) or [0]
        shift = max(max(weights), 0)
        out = []
        for i in range(1, L.dim + 1):
            for j in range(i + 1, L.dim + 1):
                if L.degree(i) + L.degree(j) + shift > cap:
                    continue
                a, b = {i: Fraction(1)}, {j: Fraction(1)}
                lhs = self(L.bracket(a, b))
                rhs = vec_add(L.bracket(self(a), b), L.bracket(a, self(b)))
                r = vec_add(lhs, rhs, Fraction(-1))
                if r:
                    out.append((i, j, r))
        return out
