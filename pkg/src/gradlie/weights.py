"""Weight-homogeneous cochain slices of a graded truncated algebra.

A 1-cochain of weight w sends b_s to a combination of basis elements of degree
deg(b_s) + w; a 2-cochain of weight w sends a pair (b_a, b_b) to degree
deg(b_a) + deg(b_b) + w.  The coordinates of such cochains are enumerated
here together with the sparse matrices of the coboundary d1 and of the
cocycle condition, one weight at a time.

Two conventions decide which identities are imposed:

``window``
    An identity is used only when every term it involves is computed without
    truncation: the degrees of the inputs must add up to at most
    ``N - max(w, 0)``.  This is the default and the one the stability checks
    are phrased for.

``quotient``
    Identities are imposed in the truncated quotient algebra itself, where
    brackets above degree ``N`` vanish.  For ``w >= 0`` the two conventions
    coincide; for negative weights the quotient picks up extra, artificial
    constraints near the top degree.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Optional

from .core import AlgebraError, GradedOperator, TruncatedAlgebra, Vector
from .exactla import SparseMatrix

MODES = ("window", "quotient")

Cochain2 = dict[tuple[int, int], Vector]


def _check(L: TruncatedAlgebra, mode: str) -> None:
    if not L.graded:
        raise AlgebraError(f"{L.name} is filtered but not graded; weight slicing needs a graded table")
    if mode not in MODES:
        raise AlgebraError(f"unknown slice mode {mode!r}")


def input_cap(L: TruncatedAlgebra, w: int, mode: str = "window") -> int:
    """Largest admissible degree sum of the inputs of an identity at weight w."""
    if mode == "window":
        return L.truncation - max(w, 0)
    return L.truncation - w  # output degree must stay <= N


def weight_range(L: TruncatedAlgebra) -> range:
    top = max(L.degrees)
    return range(-top, top + 1)


class C1Slice:
    """Coordinates (source, target) of weight-w linear maps."""

    def __init__(self, L: TruncatedAlgebra, w: int):
        self.algebra = L
        self.weight = w
        by_deg: dict[int, list[int]] = {}
        for b in L.basis:
            by_deg.setdefault(b.degree, []).append(b.index)
        self.cols: list[tuple[int, int]] = []
        for b in L.basis:
            for t in by_deg.get(b.degree + w, ()):
                self.cols.append((b.index, t))
        self.index = {c: n for n, c in enumerate(self.cols)}

    def __len__(self) -> int:
        return len(self.cols)

    def targets(self, src: int) -> list[tuple[int, int]]:
        return [(t, self.index[(src, t)]) for t in self._targets_of.get(src, ())]

    @property
    def _targets_of(self) -> dict[int, list[int]]:
        cache = getattr(self, "_tcache", None)
        if cache is None:
            cache = {}
            for s, t in self.cols:
                cache.setdefault(s, []).append(t)
            self._tcache = cache
        return cache

    def operator(self, vec: Mapping[int, Fraction], label: str = "") -> GradedOperator:
        images: dict[int, dict[int, Fraction]] = {}
        for c, v in vec.items():
            s, t = self.cols[c]
            images.setdefault(s, {})[t] = v
        return GradedOperator(self.algebra, images, label)

    def coords(self, op: GradedOperator) -> dict[int, Fraction]:
        """Coordinates of the weight-w component of ``op``; raises if off-slice."""
        out = {}
        L = self.algebra
        for s, img in op.images.items():
            for t, c in img.items():
                if L.degree(t) - L.degree(s) != self.weight:
                    continue
                out[self.index[(s, t)]] = c
        return out


class C2Slice:
    """Coordinates (a, b, target) with a < b of weight-w alternating maps."""

    def __init__(self, L: TruncatedAlgebra, w: int, mode: str = "window"):
        _check(L, mode)
        self.algebra = L
        self.weight = w
        self.mode = mode
        cap = input_cap(L, w, mode)
        by_deg: dict[int, list[int]] = {}
        for b in L.basis:
            by_deg.setdefault(b.degree, []).append(b.index)
        deg = [0] + [b.degree for b in L.basis]
        self.cols: list[tuple[int, int, int]] = []
        n = L.dim
        for a in range(1, n + 1):
            for b in range(a + 1, n + 1):
                s = deg[a] + deg[b]
                if mode == "window" and s > cap:
                    continue
                for t in by_deg.get(s + w, ()):
                    self.cols.append((a, b, t))
        self.index = {c: k for k, c in enumerate(self.cols)}
        self._pair_targets: dict[tuple[int, int], list[tuple[int, int]]] = {}
        for k, (a, b, t) in enumerate(self.cols):
            self._pair_targets.setdefault((a, b), []).append((t, k))

    def __len__(self) -> int:
        return len(self.cols)

    def pair_targets(self, a: int, b: int) -> tuple[int, list[tuple[int, int]]]:
        """(sign, [(target, column)]) for phi(b_a, b_b) in either order."""
        if a == b:
            return 0, []
        if a < b:
            return 1, self._pair_targets.get((a, b), [])
        return -1, self._pair_targets.get((b, a), [])

    def cochain(self, vec: Mapping[int, Fraction]) -> Cochain2:
        out: Cochain2 = {}
        for c, v in vec.items():
            a, b, t = self.cols[c]
            out.setdefault((a, b), {})[t] = v
        return out


def _add(row: dict[int, Fraction], col: int, v: Fraction) -> None:
    nv = row.get(col, 0) + v
    if nv:
        row[col] = nv
    else:
        row.pop(col, None)


def d1_matrix(L: TruncatedAlgebra, w: int, mode: str = "window",
              c1: Optional[C1Slice] = None, c2: Optional[C2Slice] = None) -> SparseMatrix:
    """Matrix of f -> psi, psi(a, b) = [f a, b] + [a, f b] - f [a, b].

    Rows follow the coordinates of ``C2Slice(L, w, mode)``, columns those of
    ``C1Slice(L, w)``.
    """
    _check(L, mode)
    c1 = c1 or C1Slice(L, w)
    c2 = c2 or C2Slice(L, w, mode)
    rows: list[dict[int, Fraction]] = [dict() for _ in range(len(c2))]
    for (a, b), targets in c2._pair_targets.items():
        row_of = dict(targets)  # target -> row
        # [f a, b]
        for s, col in c1.targets(a):
            for t, c in L.bracket_basis(s, b).items():
                r = row_of.get(t)
                if r is not None:
                    _add(rows[r], col, c)
        # [a, f b]
        for s, col in c1.targets(b):
            for t, c in L.bracket_basis(a, s).items():
                r = row_of.get(t)
                if r is not None:
                    _add(rows[r], col, c)
        # - f [a, b]
        for k, c in L.bracket_basis(a, b).items():
            for t, col in c1.targets(k):
                r = row_of.get(t)
                if r is not None:
                    _add(rows[r], col, -c)
    return SparseMatrix.from_rows(rows, len(c1))


def cocycle_triples(L: TruncatedAlgebra, w: int, mode: str = "window"):
    cap = input_cap(L, w, mode)
    deg = [0] + [b.degree for b in L.basis]
    n = L.dim
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            if deg[a] + deg[b] > cap:
                break
            for c in range(b + 1, n + 1):
                if deg[a] + deg[b] + deg[c] > cap:
                    break
                yield a, b, c


def cocycle_matrix(L: TruncatedAlgebra, w: int, mode: str = "window",
                   c2: Optional[C2Slice] = None) -> SparseMatrix:
    """Rows: (triple a<b<c, output basis element); columns: C2Slice coordinates.

    The row for output t collects the coefficient of b_t in
    Z(a,b,c) = [a,phi(b,c)] - [phi(a,b),c] + [phi(a,c),b]
               + phi(a,[b,c]) - phi([a,b],c) + phi([a,c],b).
    """
    _check(L, mode)
    c2 = c2 or C2Slice(L, w, mode)
    rows: list[dict[int, Fraction]] = []
    br = L.bracket_basis
    for a, b, c in cocycle_triples(L, w, mode):
        acc: dict[int, dict[int, Fraction]] = {}

        def put(t: int, col: int, v: Fraction) -> None:
            _add(acc.setdefault(t, {}), col, v)

        # [a, phi(b,c)]
        sg, tg = c2.pair_targets(b, c)
        for s, col in tg:
            for t, v in br(a, s).items():
                put(t, col, sg * v)
        # - [phi(a,b), c]
        sg, tg = c2.pair_targets(a, b)
        for s, col in tg:
            for t, v in br(s, c).items():
                put(t, col, -sg * v)
        # + [phi(a,c), b]
        sg, tg = c2.pair_targets(a, c)
        for s, col in tg:
            for t, v in br(s, b).items():
                put(t, col, sg * v)
        # phi(a,[b,c])
        for k, v in br(b, c).items():
            sg, tg = c2.pair_targets(a, k)
            for t, col in tg:
                put(t, col, sg * v)
        # - phi([a,b],c)
        for k, v in br(a, b).items():
            sg, tg = c2.pair_targets(k, c)
            for t, col in tg:
                put(t, col, -sg * v)
        # + phi([a,c],b)
        for k, v in br(a, c).items():
            sg, tg = c2.pair_targets(k, b)
            for t, col in tg:
                put(t, col, sg * v)
        for t in sorted(acc):
            if acc[t]:
                rows.append(acc[t])
    return SparseMatrix.from_rows(rows, len(c2))


# -- direct (matrix-free) evaluation, used as an independent oracle ----------


def phi_eval(phi: Mapping[tuple[int, int], Mapping[int, Fraction]], u: Mapping[int, Fraction],
             v: Mapping[int, Fraction]) -> Vector:
    """Bilinear alternating extension of a 2-cochain given on pairs a < b."""
    out: Vector = {}
    for a, ca in u.items():
        for b, cb in v.items():
            if a == b:
                continue
            if a < b:
                img, sg = phi.get((a, b)), 1
            else:
                img, sg = phi.get((b, a)), -1
            if not img:
                continue
            c = sg * ca * cb
            for t, x in img.items():
                _add(out, t, c * x)
    return out


def apply_d1(L: TruncatedAlgebra, f: GradedOperator, pairs=None) -> Cochain2:
    """psi = d1 f on basis pairs (a<b), computed from the bracket directly."""
    out: Cochain2 = {}
    n = L.dim
    it = pairs if pairs is not None else ((a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1))
    for a, b in it:
        ea, eb = {a: Fraction(1)}, {b: Fraction(1)}
        r = L.bracket(f(ea), eb)
        for t, c in L.bracket(ea, f(eb)).items():
            _add(r, t, c)
        for t, c in f(L.bracket(ea, eb)).items():
            _add(r, t, -c)
        if r:
            out[(a, b)] = r
    return out


def d2_residual(L: TruncatedAlgebra, phi: Mapping[tuple[int, int], Mapping[int, Fraction]],
                triple: tuple[int, int, int], weight: Optional[int] = None, mode: str = "window") -> Vector:
    """Z(a,b,c) for a 2-cochain ``phi``; the triple must lie in the window."""
    a, b, c = triple
    if weight is not None:
        cap = input_cap(L, weight, mode)
        if L.degree(a) + L.degree(b) + L.degree(c) > cap:
            raise AlgebraError(f"triple {triple} lies outside the window for weight {weight}")
    ea, eb, ec = ({a: Fraction(1)}, {b: Fraction(1)}, {c: Fraction(1)})
    br = L.bracket
    terms = [
        (1, br(ea, phi_eval(phi, eb, ec))),
        (-1, br(phi_eval(phi, ea, eb), ec)),
        (1, br(phi_eval(phi, ea, ec), eb)),
        (1, phi_eval(phi, ea, br(eb, ec))),
        (-1, phi_eval(phi, br(ea, eb), ec)),
        (1, phi_eval(phi, br(ea, ec), eb)),
    ]
    out: Vector = {}
    for sg, vec in terms:
        for t, x in vec.items():
            _add(out, t, sg * x)
    return out
