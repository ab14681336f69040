"""Exact rational linear algebra on sparse matrices.

Rows are eliminated over the integers: an incoming row is cleared of
denominators, its leading entries are cancelled against existing pivot rows by
cross-multiplication, and the result is divided by its content.  No fractions
appear until the final back-substitution, which keeps coefficient growth in
check on the large, very sparse systems produced by the cohomology code.

The reduced row echelon form of a matrix is unique, so rank, nullspace and
solve results do not depend on the order in which rows are processed.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Mapping, Optional, Sequence

Scalar = Fraction
Row = Mapping[int, Fraction]


def as_scalar(value) -> Fraction:
    """Coerce ints, Fractions and strings like ``"-3/4"`` to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def scalar_str(value: Fraction) -> str:
    """Canonical text form: ``"p"`` or ``"p/q"`` with q > 0 in lowest terms."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class SparseMatrix:
    """A rows x cols matrix over Q storing only nonzero entries.

    Entries are kept as a dict of row dicts.  Zero values are dropped on the
    way in, so the "no stored zero" invariant holds by construction.
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, entries: Optional[Mapping[tuple[int, int], object]] = None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        self.rows = rows
        self.cols = cols
        self._data: dict[int, dict[int, Fraction]] = {}
        for (r, c), v in (entries or {}).items():
            self._set(r, c, as_scalar(v))

    def _set(self, r: int, c: int, v: Fraction) -> None:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"entry ({r}, {c}) outside a {self.rows}x{self.cols} matrix")
        if v:
            self._data.setdefault(r, {})[c] = v
        else:
            row = self._data.get(r)
            if row is not None:
                row.pop(c, None)
                if not row:
                    del self._data[r]

    @classmethod
    def from_rows(cls, rows: Sequence[Row], cols: int) -> "SparseMatrix":
        m = cls(len(rows), cols)
        for r, row in enumerate(rows):
            for c, v in row.items():
                m._set(r, c, as_scalar(v))
        return m

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[object]]) -> "SparseMatrix":
        nrows = len(dense)
        ncols = len(dense[0]) if nrows else 0
        m = cls(nrows, ncols)
        for r, line in enumerate(dense):
            if len(line) != ncols:
                raise ValueError("ragged dense matrix")
            for c, v in enumerate(line):
                m._set(r, c, as_scalar(v))
        return m

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @property
    def entries(self) -> dict[tuple[int, int], Fraction]:
        return {(r, c): v for r, row in self._data.items() for c, v in row.items()}

    def row(self, r: int) -> dict[int, Fraction]:
        return dict(self._data.get(r, {}))

    def iter_rows(self) -> Iterator[dict[int, Fraction]]:
        for r in range(self.rows):
            yield self._data.get(r, {})

    def nnz(self) -> int:
        return sum(len(row) for row in self._data.values())

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        r, c = key
        return self._data.get(r, {}).get(c, Fraction(0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.rows, self.cols, self._data) == (other.rows, other.cols, other._data)

    def __repr__(self) -> str:
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"

    def transpose(self) -> "SparseMatrix":
        t = SparseMatrix(self.cols, self.rows)
        for r, row in self._data.items():
            for c, v in row.items():
                t._data.setdefault(c, {})[r] = v
        return t

    def dot(self, vec: Sequence[object]) -> list[Fraction]:
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} for {self.cols} columns")
        x = [as_scalar(v) for v in vec]
        out = [Fraction(0)] * self.rows
        for r, row in self._data.items():
            out[r] = sum((v * x[c] for c, v in row.items()), Fraction(0))
        return out


# -- integer row kernels ----------------------------------------------------


def _integer_row(row: Row) -> dict[int, int]:
    """Scale a rational row to a primitive integer row (same span)."""
    items = [(c, as_scalar(v)) for c, v in row.items() if v]
    if not items:
        return {}
    den = 1
    for _, v in items:
        d = v.denominator
        den = den * d // gcd(den, d)
    out = {c: (v.numerator * (den // v.denominator)) for c, v in items}
    return _primitive(out)


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


class Echelon:
    """Incremental fraction-free row echelon form.

    ``pivots`` maps a leading column to a primitive integer row whose leading
    entry is positive.  Rows are only reduced at their leading positions while
    being inserted; ``rref`` performs the full back-substitution on demand.
    """

    def __init__(self) -> None:
        self.pivots: dict[int, dict[int, int]] = {}

    def __len__(self) -> int:
        return len(self.pivots)

    def _reduce(self, row: dict[int, int]) -> dict[int, int]:
        pivots = self.pivots
        while row:
            c = min(row)
            p = pivots.get(c)
            if p is None:
                return row
            a = row[c]
            b = p[c]
            g = gcd(a, b)
            ma, mb = b // g, a // g
            new = {k: ma * v for k, v in row.items()} if ma != 1 else dict(row)
            for k, v in p.items():
                nv = new.get(k, 0) - mb * v
                if nv:
                    new[k] = nv
                else:
                    new.pop(k, None)
            row = _primitive(new)
        return row

    def reduce(self, row: Row) -> dict[int, int]:
        """Residue of ``row`` after cancelling pivot leads (empty iff in span)."""
        return self._reduce(_integer_row(row))

    def add(self, row: Row) -> bool:
        """Insert a row; return True if it enlarged the span."""
        r = self._reduce(_integer_row(row))
        if not r:
            return False
        c = min(r)
        if r[c] < 0:
            r = {k: -v for k, v in r.items()}
        self.pivots[c] = r
        return True

    def contains(self, row: Row) -> bool:
        return not self.reduce(row)

    def rref(self) -> dict[int, dict[int, int]]:
        """Back-substituted pivot rows: each pivot column appears in one row only."""
        rows = {c: dict(r) for c, r in self.pivots.items()}
        cols = sorted(rows)
        # rows holding a nonzero entry in each pivot column, other than its owner
        holders: dict[int, set[int]] = {c: set() for c in cols}
        for c, r in rows.items():
            for k in r:
                if k != c and k in holders:
                    holders[k].add(c)
        for c in reversed(cols):
            p = rows[c]
            pc = p[c]
            for owner in sorted(holders[c]):
                r = rows[owner]
                a = r.get(c)
                if not a:
                    continue
                g = gcd(a, pc)
                ma, mb = pc // g, a // g
                new = {k: ma * v for k, v in r.items()}
                for k, v in p.items():
                    nv = new.get(k, 0) - mb * v
                    if nv:
                        new[k] = nv
                    else:
                        new.pop(k, None)
                new = _primitive(new)
                if new[owner] < 0:
                    new = {k: -v for k, v in new.items()}
                for k in new:
                    if k != owner and k in holders:
                        holders[k].add(owner)
                rows[owner] = new
            holders[c].clear()
        return rows


def _echelon_of(m: SparseMatrix) -> Echelon:
    e = Echelon()
    for row in m.iter_rows():
        if row:
            e.add(row)
    return e


def rank(m: SparseMatrix) -> int:
    """Rank over Q."""
    return len(_echelon_of(m))


def rank_of_rows(rows: Iterable[Row]) -> int:
    e = Echelon()
    for row in rows:
        if row:
            e.add(row)
    return len(e)


def _normalize_first(vec: dict[int, Fraction]) -> dict[int, Fraction]:
    lead = vec[min(vec)]
    if lead == 1:
        return vec
    return {k: v / lead for k, v in vec.items()}


def nullspace_from_echelon(e: Echelon, cols: int) -> list[dict[int, Fraction]]:
    """Kernel basis as sparse dicts, ordered by free column, first nonzero = 1."""
    rows = e.rref()
    free = [c for c in range(cols) if c not in rows]
    basis: dict[int, dict[int, Fraction]] = {f: {f: Fraction(1)} for f in free}
    for c, r in rows.items():
        pc = r[c]
        for k, v in r.items():
            if k != c:
                basis[k][c] = Fraction(-v, pc)
    return [_normalize_first(basis[f]) for f in free]


def nullspace_sparse(m: SparseMatrix) -> list[dict[int, Fraction]]:
    return nullspace_from_echelon(_echelon_of(m), m.cols)


def nullspace(m: SparseMatrix) -> list[list[Fraction]]:
    """Basis of {v : m v = 0} as dense column vectors."""
    out = []
    for v in nullspace_sparse(m):
        dense = [Fraction(0)] * m.cols
        for k, x in v.items():
            dense[k] = x
        out.append(dense)
    return out


def solve(m: SparseMatrix, b: Sequence[object]) -> Optional[list[Fraction]]:
    """Some exact solution of ``m x = b`` (free variables set to 0), or None.

    The solution is multiplied back and checked before it is returned.
    """
    if len(b) != m.rows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {m.rows}")
    rhs = [as_scalar(v) for v in b]
    aug = m.cols
    e = Echelon()
    for r, row in enumerate(m.iter_rows()):
        full = dict(row)
        if rhs[r]:
            full[aug] = rhs[r]
        if full:
            e.add(full)
    if aug in e.pivots:
        return None
    rows = e.rref()
    x = [Fraction(0)] * m.cols
    for c, r in rows.items():
        x[c] = Fraction(r.get(aug, 0), r[c])
    if m.dot(x) != rhs:
        raise ArithmeticError("solve produced a vector that fails the back-check")
    return x


class Span:
    """Exact span of sparse rational vectors with fast membership tests.

    ``basis`` keeps the accepted (independent) vectors in insertion order.
    """

    def __init__(self, vectors: Iterable[Row] = ()):
        self._ech = Echelon()
        self.basis: list[dict[int, Fraction]] = []
        for v in vectors:
            self.add(v)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self) -> int:
        return len(self.basis)

    def add(self, v: Row) -> bool:
        if self._ech.add(v):
            self.basis.append({k: as_scalar(x) for k, x in v.items() if x})
            return True
        return False

    def contains(self, v: Row) -> bool:
        return self._ech.contains(v)

    def __contains__(self, v: Row) -> bool:
        return self.contains(v)

    def contains_span(self, other: "Span") -> bool:
        return all(self.contains(v) for v in other.basis)

    def canonical_basis(self) -> list[dict[int, Fraction]]:
        """Reduced echelon basis, leading entries 1, ordered by leading column."""
        rows = self._ech.rref()
        out = []
        for c in sorted(rows):
            r = rows[c]
            out.append({k: Fraction(v, r[c]) for k, v in sorted(r.items())})
        return out

    def support(self) -> set[int]:
        return {k for v in self.basis for k in v}
