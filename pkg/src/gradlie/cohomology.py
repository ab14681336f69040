"""Adjoint Chevalley-Eilenberg cohomology in degrees 1 and 2, weight by weight.

For each weight w the 2-cocycles Z^2_w are the kernel of the six-term cocycle
system, the 2-coboundaries B^2_w the image of d1, and
dim H^2_w = dim Z^2_w - dim B^2_w.  As for derivations, a weight counts as
stable when the value at N agrees with the value at N + margin and the weight
sits below the boundary cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .core import AlgebraError, GradedOperator, TruncatedAlgebra, Vector
from .derivations import (
    _restrict_or_self,
    default_margin,
    h1 as h1_by_derivations,
    inner_dim,
    stability_cutoff,
)
from .exactla import Echelon, Span, SparseMatrix, nullspace_sparse, rank, solve
from .weights import (
    C1Slice,
    C2Slice,
    Cochain2,
    apply_d1,
    cocycle_matrix,
    d1_matrix,
    d2_residual,
    input_cap,
)

__all__ = [
    "CohomologyReport",
    "H2Record",
    "SliceDims",
    "d1_matrix",
    "d2_residual",
    "h1_via_complex",
    "h2",
    "h2_slice",
    "unsliced_cocycle_dim",
    "sliced_cocycle_dims",
]


@dataclass
class SliceDims:
    z2: int
    b2: int

    @property
    def h2(self) -> int:
        return self.z2 - self.b2


def _product_is_zero(a: SparseMatrix, b: SparseMatrix) -> bool:
    """a @ b == 0, with a given by rows and b by rows (a.cols == b.rows)."""
    brows = {r: row for r, row in enumerate(b.iter_rows()) if row}
    for row in a.iter_rows():
        if not row:
            continue
        acc: dict[int, Fraction] = {}
        for k, v in row.items():
            for j, x in brows.get(k, {}).items():
                acc[j] = acc.get(j, 0) + v * x
        if any(acc.values()):
            return False
    return True


def h2_slice(L: TruncatedAlgebra, w: int, mode: str = "window", witnesses: bool = False
             ) -> tuple[SliceDims, list[Cochain2]]:
    """Dimensions of Z^2_w, B^2_w and, optionally, cocycles spanning a complement of B^2_w."""
    c1 = C1Slice(L, w)
    c2 = C2Slice(L, w, mode)
    if not len(c2):
        return SliceDims(0, 0), []
    cz = cocycle_matrix(L, w, mode, c2=c2)
    d1 = d1_matrix(L, w, mode, c1=c1, c2=c2)
    if not _product_is_zero(cz, d1):
        raise AlgebraError(f"{L.name}: coboundaries fail the cocycle condition at weight {w}")
    z_basis = None
    if witnesses:
        z_basis = nullspace_sparse(cz)
        z_dim = len(z_basis)
    else:
        z_dim = len(c2) - rank(cz)
    b_dim = rank(d1.transpose())
    dims = SliceDims(z_dim, b_dim)
    if dims.h2 < 0:
        raise AlgebraError(f"{L.name}: dim B^2 exceeds dim Z^2 at weight {w}")
    wit: list[Cochain2] = []
    if witnesses and dims.h2:
        wit = _witnesses(c2, d1, z_basis or [])
    return dims, wit


def _witnesses(c2: C2Slice, d1: SparseMatrix, z_basis: list[dict[int, Fraction]]) -> list[Cochain2]:
    """Echelonized cocycles outside B^2, each checked by an inconsistent solve."""
    ech = Echelon()
    for col in d1.transpose().iter_rows():
        if col:
            ech.add(col)
    complement = Span()
    for z in z_basis:
        if ech.add(z):
            complement.add(z)
    out = []
    for z in complement.canonical_basis():
        dense = [z.get(k, Fraction(0)) for k in range(len(c2))]
        if solve(d1, dense) is not None:
            raise AlgebraError("a reported H^2 witness turned out to be a coboundary")
        out.append(c2.cochain(z))
    return out


@dataclass
class H2Record:
    weight: int
    z2: int
    b2: int
    h2: int
    h2_big: Optional[int]
    stable: bool
    witnesses: list[Cochain2] = field(default_factory=list)


@dataclass
class CohomologyReport:
    algebra: str
    truncation: int
    margin: int
    cutoff: int
    records: dict[int, H2Record] = field(default_factory=dict)

    def stable_weights(self) -> list[int]:
        return [w for w, r in sorted(self.records.items()) if r.stable]

    def values(self, stable_only: bool = True) -> dict[int, int]:
        return {w: r.h2 for w, r in sorted(self.records.items()) if r.stable or not stable_only}


def h2(L: TruncatedAlgebra, margin: Optional[int] = None, weights: Optional[Iterable[int]] = None,
       mode: str = "window", witnesses: bool = True) -> CohomologyReport:
    margin = default_margin(L, margin)
    small, big = _restrict_or_self(L, margin)
    cut = stability_cutoff(small, margin)
    rep = CohomologyReport(small.name, small.truncation, margin, cut)
    ws = sorted(set(weights)) if weights is not None else list(range(-cut, cut + 1)) if cut >= 0 else []
    for w in ws:
        dims, wit = h2_slice(small, w, mode, witnesses)
        big_dims, _ = h2_slice(big, w, mode)
        stable = dims.h2 == big_dims.h2 and abs(w) <= cut
        rep.records[w] = H2Record(w, dims.z2, dims.b2, dims.h2, big_dims.h2, stable, wit)
    return rep


# -- H^1 through the complex ------------------------------------------------


def _pairs_touching(L: TruncatedAlgebra, src: int, cap: int) -> list[tuple[int, int]]:
    """In-window pairs (a<b) on which d1 of a map supported on ``src`` can be nonzero."""
    out = set()
    for b in L.basis:
        j = b.index
        if j != src and L.degree(src) + b.degree <= cap:
            out.add((min(src, j), max(src, j)))
    for a, row in L._br.items():
        for b2, v in row.items():
            if a < b2 and src in v and L.degree(a) + L.degree(b2) <= cap:
                out.add((a, b2))
    return sorted(out)


def _der_dim_matrix_free(L: TruncatedAlgebra, w: int) -> int:
    """dim ker d1 at weight w, with d1 evaluated pointwise from the bracket."""
    c1 = C1Slice(L, w)
    if not len(c1):
        return 0
    cap = input_cap(L, w, "window")
    row_index: dict[tuple[int, int, int], int] = {}
    rows: list[dict[int, Fraction]] = []
    for col, (s, t) in enumerate(c1.cols):
        f = GradedOperator(L, {s: {t: Fraction(1)}})
        psi = apply_d1(L, f, _pairs_touching(L, s, cap))
        for (a, b), vec in psi.items():
            for k, c in vec.items():
                key = (a, b, k)
                r = row_index.get(key)
                if r is None:
                    r = row_index[key] = len(rows)
                    rows.append({})
                rows[r][col] = c
    return len(c1) - rank(SparseMatrix.from_rows(rows, len(c1)))


@dataclass
class H1ComplexRecord:
    weight: int
    cocycles: int
    inner: int
    h1: int
    stable: bool


def h1_via_complex(L: TruncatedAlgebra, margin: Optional[int] = None,
                   weights: Optional[Iterable[int]] = None) -> dict[int, H1ComplexRecord]:
    """dim ker d1 - dim Inner per weight, cross-checked against the derivations module."""
    margin = default_margin(L, margin)
    small, big = _restrict_or_self(L, margin)
    reference = h1_by_derivations(L, margin, weights)
    out: dict[int, H1ComplexRecord] = {}
    for w, ref in reference.records.items():
        z1 = _der_dim_matrix_free(small, w)
        inner = inner_dim(small, w)
        value = z1 - inner
        value_big = _der_dim_matrix_free(big, w) - inner_dim(big, w)
        if value != ref.h1 or value_big != ref.h1_big:
            raise AlgebraError(
                f"{L.name}: H^1 at weight {w} is {value} (N) / {value_big} (N+margin) via the complex "
                f"but {ref.h1} / {ref.h1_big} via derivations")
        out[w] = H1ComplexRecord(w, z1, inner, value, ref.stable)
    return out


# -- unsliced oracle --------------------------------------------------------


def unsliced_cocycle_dim(L: TruncatedAlgebra, max_dim: int = 12) -> int:
    """dim Z^2 of the truncated quotient, from the full (non-sliced) system.

    Every alternating 2-cochain is a column; each triple contributes the
    six-term residual, evaluated directly on unit cochains.  Meant for
    small algebras only.
    """
    if L.dim > max_dim:
        raise AlgebraError(f"unsliced system refused for dim {L.dim} > {max_dim}")
    n = L.dim
    N = L.truncation
    cols = [(a, b, t) for a in range(1, n + 1) for b in range(a + 1, n + 1) for t in range(1, n + 1)]
    triples = [(a, b, c) for a in range(1, n + 1) for b in range(a + 1, n + 1) for c in range(b + 1, n + 1)]
    row_index: dict[tuple[int, int, int, int], int] = {}
    rows: list[dict[int, Fraction]] = []
    for col, (a, b, t) in enumerate(cols):
        phi = {(a, b): {t: Fraction(1)}}
        for tri in triples:
            # phi is supported on the pair {a, b}, and every term of the
            # residual feeds phi at least one argument taken from the triple
            if a not in tri and b not in tri:
                continue
            res: Vector = d2_residual(L, phi, tri)
            for k, c in res.items():
                if L.degree(k) > N:
                    continue
                key = (*tri, k)
                r = row_index.get(key)
                if r is None:
                    r = row_index[key] = len(rows)
                    rows.append({})
                rows[r][col] = c
    return len(cols) - rank(SparseMatrix.from_rows(rows, len(cols)))


def sliced_cocycle_dims(L: TruncatedAlgebra) -> dict[int, int]:
    """dim Z^2_w in quotient mode for every weight that has 2-cochains."""
    top = max(L.degrees)
    out = {}
    for w in range(-2 * top, top + 1):
        c2 = C2Slice(L, w, "quotient")
        if len(c2):
            out[w] = len(c2) - rank(cocycle_matrix(L, w, "quotient", c2=c2))
    return out
