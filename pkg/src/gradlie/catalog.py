"""Builders for the fixture algebras and their closed-form derivations.

Grading convention: every fixture uses the index grading, deg(e_i) = i and
deg(f_q) = q, with the extension generators (x, y, and e_0 of the
non-negative Witt algebra) in degree 0.  Brackets [b_i, b_j] are multiples of
b_{i+j}, so this grading is additive; the alternative "lower central" degree
assignment is not additive for these tables (see ``README.md``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Callable, Mapping, Optional

from .core import (
    AlgebraError,
    BasisElement,
    GradedOperator,
    TruncatedAlgebra,
    Vector,
    jacobi_check,
)
from .exactla import as_scalar


class JacobiError(AlgebraError):
    """A builder produced a table that violates the Jacobi identity."""

    def __init__(self, message: str, triple: tuple[str, str, str], residual: Vector):
        super().__init__(message)
        self.triple = triple
        self.residual = residual


@dataclass(frozen=True)
class ResidueRule:
    """Coefficient of [b_q, b_l] = table(q mod m, l mod m) * b_{q+l}."""

    modulus: int
    table: Mapping[tuple[int, int], Fraction]

    def coefficient(self, q: int, l: int) -> Fraction:
        return self.table.get((q % self.modulus, l % self.modulus), Fraction(0))

    def antisymmetry_defects(self) -> list[tuple[int, int]]:
        m = self.modulus
        bad = []
        for r in range(m):
            for s in range(m):
                a = self.table.get((r, s), Fraction(0))
                b = self.table.get((s, r), Fraction(0))
                if a != -b or (r == s and a != 0):
                    bad.append((r, s))
        return bad


def _rule_from_rows(rows: list[list[int]]) -> ResidueRule:
    m = len(rows)
    table = {(r, s): Fraction(v) for r, row in enumerate(rows) for s, v in enumerate(row) if v}
    return ResidueRule(m, table)


# n1: c_{i,j} = 1, 0, -1 as i - j = 1, 0, -1 mod 3
N1_RULE = ResidueRule(3, {(r, s): Fraction({1: 1, 2: -1}[(r - s) % 3])
                          for r in range(3) for s in range(3) if (r - s) % 3})

# n2: rows f_{8i+r}, columns f_{8j+s}, residues 0..7 (residue 0 stands for f_{8i})
N2_ROWS = [
    [0, 1, -2, -1, 0, 1, 2, -1],
    [-1, 0, 1, 1, -3, -2, 0, 1],
    [2, -1, 0, 0, 0, 1, -1, 0],
    [1, -1, 0, 0, 3, -1, 1, -2],
    [0, 3, 0, -3, 0, 3, 0, -3],
    [-1, 2, -1, 1, -3, 0, 0, 1],
    [-2, 0, 1, -1, 0, 0, 0, 1],
    [1, -1, 0, 2, 3, -1, -1, 0],
]
N2_RULE = _rule_from_rows(N2_ROWS)


@dataclass
class ExtensionParams:
    """Finitely supported parameter family (alpha for R_n1, beta for R_n2)."""

    values: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for k, v in self.values.items():
            if int(k) < 1:
                raise AlgebraError(f"parameter index must be positive, got {k}")
            v = as_scalar(v)
            if v:
                clean[int(k)] = v
        self.values = clean

    def __getitem__(self, k: int) -> Fraction:
        return self.values.get(k, Fraction(0))

    def is_zero(self) -> bool:
        return not self.values

    def items(self):
        return sorted(self.values.items())


def _params(p) -> ExtensionParams:
    if p is None:
        return ExtensionParams()
    if isinstance(p, ExtensionParams):
        return p
    return ExtensionParams(dict(p))


# -- generic helpers --------------------------------------------------------


def _positive_basis(prefix: str, N: int, offset: int = 0) -> list[BasisElement]:
    return [BasisElement(offset + q, q, f"{prefix}{q}") for q in range(1, N + 1)]


def _check_jacobi(L: TruncatedAlgebra) -> TruncatedAlgebra:
    bad = jacobi_check(L, limit=1)
    if bad:
        v = bad[0]
        names = tuple(L.label(i) for i in v.triple)
        res = " + ".join(f"{c}*{L.label(k)}" for k, c in sorted(v.residual.items()))
        raise JacobiError(f"{L.name}: Jacobi identity fails on ({', '.join(names)}): residual {res}", names, v.residual)
    return L


def _residue_algebra(name: str, prefix: str, rule: ResidueRule, N: int, period: int,
                     rebuild: Callable[[int], TruncatedAlgebra]) -> TruncatedAlgebra:
    table = {}
    for q in range(1, N + 1):
        for l in range(q + 1, N + 1 - q):
            c = rule.coefficient(q, l)
            if c:
                table[(q, l)] = [(q + l, c)]
    return TruncatedAlgebra(name, _positive_basis(prefix, N), table, N, period, rebuild=rebuild)


# -- fixtures ---------------------------------------------------------------


def build_n1(N: int) -> TruncatedAlgebra:
    if N < 3:
        raise AlgebraError("n1 needs N >= 3")
    return _residue_algebra("n1", "e", N1_RULE, N, 3, build_n1)


def build_n2(N: int) -> TruncatedAlgebra:
    if N < 8:
        raise AlgebraError("n2 needs N >= 8")
    return _residue_algebra("n2", "f", N2_RULE, N, 8, build_n2)


def build_m2(N: int) -> TruncatedAlgebra:
    """[e1, e_i] = e_{i+1} for i >= 2 and [e2, e_j] = e_{j+2} for j >= 3."""
    if N < 3:
        raise AlgebraError("m2 needs N >= 3")
    table = {}
    for i in range(2, N):
        table[(1, i)] = [(i + 1, 1)]
    for j in range(3, N - 1):
        table[(2, j)] = [(j + 2, 1)]
    return TruncatedAlgebra("m2", _positive_basis("e", N), table, N, 1, rebuild=build_m2)


def build_witt_positive(N: int) -> TruncatedAlgebra:
    if N < 3:
        raise AlgebraError("witt_pos needs N >= 3")
    table = {(i, j): [(i + j, i - j)] for i in range(1, N + 1) for j in range(i + 1, N + 1 - i)}
    return TruncatedAlgebra("witt_pos", _positive_basis("e", N), table, N, 1, rebuild=build_witt_positive)


def build_witt_nonneg(N: int) -> TruncatedAlgebra:
    """Non-negative Witt algebra; e_0 has index 1 and e_i index i+1."""
    if N < 2:
        raise AlgebraError("witt_nonneg needs N >= 2")
    basis = [BasisElement(1, 0, "e0", generator=True)] + _positive_basis("e", N, offset=1)
    table = {}
    for i in range(0, N + 1):
        for j in range(i + 1, N + 1 - i):
            table[(i + 1, j + 1)] = [(i + j + 1, i - j)]
    return TruncatedAlgebra("witt_nonneg", basis, table, N, 1, rebuild=build_witt_nonneg)


def build_exampleL(N: int) -> TruncatedAlgebra:
    """Solvable example on {x, y, e_1, e_2, ...}; x is index 1, y index 2, e_i index i+2."""
    if N < 3:
        raise AlgebraError("exampleL needs N >= 3")
    X, Y = 1, 2
    e = lambda i: i + 2  # noqa: E731
    table: dict[tuple[int, int], list] = {}
    table[(X, e(1))] = [(e(1), 1)]
    for i in range(2, N + 1):
        table[(X, e(i))] = [(e(i), i - 1)]
        table[(Y, e(i))] = [(e(i), 1)]
        if i + 1 <= N:
            table[(e(1), e(i))] = [(e(i + 1), -1)]  # [e_i, e_1] = e_{i+1}
    return _check_jacobi(TruncatedAlgebra("exampleL", _extension_basis("e", N), table, N, 1, rebuild=build_exampleL))


def _extension_basis(prefix: str, N: int) -> list[BasisElement]:
    return [BasisElement(1, 0, "x", generator=True), BasisElement(2, 0, "y", generator=True)] + _positive_basis(
        prefix, N, offset=2)


def _add_right_action(table: dict, gen: int, src: int, image: Mapping[int, Fraction]) -> None:
    """Record [b_src, g] = image, stored under the key (g, src) with flipped sign."""
    terms = [(k, -c) for k, c in sorted(image.items()) if c]
    if terms:
        table[(gen, src)] = terms


def build_Rn1(params=None, N: int = 30, corrected_xy: bool = False) -> TruncatedAlgebra:
    """R_{n1}(alpha): n1 extended by x, y acting from the right.

    The parameter alpha_k (k >= 2) enters the actions through e_{3k+3i-5},
    e_{3k+3i-4}, e_{3k+3i-3}.  ``[x, y]`` follows the original formula
    sum (1-k) alpha_k e_{3k}; with ``corrected_xy`` the target is e_{3k-3}
    instead.  The result is checked with the Jacobi identity and rejected with
    a witness triple when it fails.
    """
    if N < 3:
        raise AlgebraError("Rn1 needs N >= 3")
    alpha = _params(params)
    if 1 in alpha.values:
        raise AlgebraError("Rn1 parameters start at alpha_2")
    n1 = build_n1(N)
    X, Y = 1, 2
    e = lambda i: i + 2  # noqa: E731
    table: dict[tuple[int, int], list] = {}
    for (i, j), terms in n1.table.items():
        table[(e(i), e(j))] = [(e(k), c) for k, c in terms]

    def put(img: dict[int, Fraction], idx: int, c) -> None:
        if 1 <= idx <= N and c:
            img[e(idx)] = img.get(e(idx), Fraction(0)) + Fraction(c)

    for q in range(1, N + 1):
        i = (q + 2) // 3
        r = q - 3 * (i - 1)  # 1, 2, 3 for e_{3i-2}, e_{3i-1}, e_{3i}
        ix: dict[int, Fraction] = {}
        iy: dict[int, Fraction] = {}
        if r == 1:
            put(ix, q, i)
            put(iy, q, -1)
            for k, a in alpha.items():
                put(ix, 3 * k + 3 * i - 5, (i - 1) * a)
                put(iy, 3 * k + 3 * i - 5, a)
        elif r == 2:
            put(ix, q, i - 1)
            put(iy, q, 1)
            for k, a in alpha.items():
                put(ix, 3 * k + 3 * i - 4, i * a)
                put(iy, 3 * k + 3 * i - 4, -a)
        else:
            put(ix, q, i)
            for k, a in alpha.items():
                put(ix, 3 * k + 3 * i - 3, i * a)
        _add_right_action(table, X, e(q), ix)
        _add_right_action(table, Y, e(q), iy)
    xy: dict[int, Fraction] = {}
    for k, a in alpha.items():
        put(xy, 3 * k - 3 if corrected_xy else 3 * k, (1 - k) * a)
    if xy:
        table[(X, Y)] = sorted(xy.items())
    tag = "Rn1" if alpha.is_zero() else "Rn1(" + ",".join(f"{k}={v}" for k, v in alpha.items()) + ")"
    L = TruncatedAlgebra(
        tag, _extension_basis("e", N), table, N, 3,
        graded=alpha.is_zero(),
        rebuild=partial(_rebuild_Rn1, alpha, corrected_xy),
        max_generator_degree=2,
    )
    return _check_jacobi(L)


def _rebuild_Rn1(alpha: ExtensionParams, corrected_xy: bool, N: int) -> TruncatedAlgebra:
    return build_Rn1(alpha, N, corrected_xy)


# x weights on residues 1..8 of q (residue 8 means q divisible by 8)
RN2_X_WEIGHTS = {1: 1, 2: -2, 3: -1, 4: 0, 5: 1, 6: 2, 7: -1, 8: 0}


def rn2_y_weight(q: int) -> int:
    i, r = divmod(q - 1, 8)
    r += 1
    if r == 1:
        return 2 * i
    if r <= 6:
        return 2 * i + 1
    return 2 * i + 2


def build_Rn2(params=None, N: int = 32) -> TruncatedAlgebra:
    """R_{n2}(beta): n2 extended by a diagonal x and a y with beta tails."""
    if N < 8:
        raise AlgebraError("Rn2 needs N >= 8")
    beta = _params(params)
    n2 = build_n2(N)
    X, Y = 1, 2
    e = lambda q: q + 2  # noqa: E731
    table: dict[tuple[int, int], list] = {}
    for (i, j), terms in n2.table.items():
        table[(e(i), e(j))] = [(e(k), c) for k, c in terms]
    for q in range(1, N + 1):
        wx = RN2_X_WEIGHTS[(q - 1) % 8 + 1]
        _add_right_action(table, X, e(q), {e(q): Fraction(wx)})
        wy = rn2_y_weight(q)
        iy = {e(q): Fraction(wy)}
        for k, b in beta.items():
            t = q + 8 * k
            if t <= N and wy:
                iy[e(t)] = iy.get(e(t), Fraction(0)) + wy * b
        _add_right_action(table, Y, e(q), iy)
    tag = "Rn2" if beta.is_zero() else "Rn2(" + ",".join(f"{k}={v}" for k, v in beta.items()) + ")"
    L = TruncatedAlgebra(
        tag, _extension_basis("f", N), table, N, 8,
        graded=beta.is_zero(),
        rebuild=partial(_rebuild_Rn2, beta),
        max_generator_degree=2,
    )
    return _check_jacobi(L)


def _rebuild_Rn2(beta: ExtensionParams, N: int) -> TruncatedAlgebra:
    return build_Rn2(beta, N)


FIXTURES: dict[str, Callable[..., TruncatedAlgebra]] = {
    "n1": build_n1,
    "n2": build_n2,
    "m2": build_m2,
    "witt_pos": build_witt_positive,
    "witt_nonneg": build_witt_nonneg,
    "exampleL": build_exampleL,
    "Rn1": lambda N, params=None: build_Rn1(params, N),
    "Rn2": lambda N, params=None: build_Rn2(params, N),
}

FIXTURE_INFO = {
    "n1": "positive part of A1^(1): [e_i,e_j] = c(i-j mod 3) e_{i+j}",
    "n2": "positive part of A2^(2): [f_q,f_l] = d(q mod 8, l mod 8) f_{q+l}",
    "m2": "[e1,e_i] = e_{i+1} (i>=2), [e2,e_j] = e_{j+2} (j>=3)",
    "witt_pos": "positive Witt algebra, [e_i,e_j] = (i-j) e_{i+j}",
    "witt_nonneg": "non-negative Witt algebra including e0",
    "exampleL": "solvable example on {x, y, e1, e2, ...}",
    "Rn1": "solvable extension R_n1(alpha) of n1 by x, y",
    "Rn2": "solvable extension R_n2(beta) of n2 by x, y",
}


def build(name: str, N: int, params=None) -> TruncatedAlgebra:
    """Build a catalog fixture by its stable identifier."""
    if name not in FIXTURES:
        raise AlgebraError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    if name in ("Rn1", "Rn2"):
        return FIXTURES[name](N, params)
    if params:
        raise AlgebraError(f"fixture {name!r} takes no parameters")
    return FIXTURES[name](N)


# -- closed-form derivations ------------------------------------------------
#
# Each parameter family is a list of terms (s, coef, m): for every block b >= 0
# the source b_{P*b+s} receives coef(b, K) * b_{P*b+P*K+m}, where the parameter
# index is p = P*K + r (r is the family's residue, K >= 0).  Residue 0 is
# written as r = P, so for P = 8 the family alpha_{8k+8} has r = 8.

Term = tuple[int, Callable[[int, int], Fraction], int]


def _c(v) -> Callable[[int, int], Fraction]:
    v = Fraction(v)
    return lambda b, K: v


def _lin(a, c) -> Callable[[int, int], Fraction]:
    """b -> a*b + c."""
    a, c = Fraction(a), Fraction(c)
    return lambda b, K: a * b + c


# n1 (P = 3), blocks b = i - 1 for the formulas written with i >= 1
N1_FAMILIES: dict[tuple[str, int], list[Term]] = {
    ("alpha", 1): [(1, _lin(1, 1), 1), (2, _lin(1, 0), 2), (3, _lin(1, 1), 3)],
    ("beta", 2): [(1, _lin(1, 0), 1), (2, _lin(1, 1), 2), (3, _lin(1, 1), 3)],
    ("alpha", 3): [(1, _c(1), 3), (3, _c(-1), 5)],
    ("beta", 3): [(2, _c(1), 3), (3, _c(-1), 4)],
}

N2_FAMILIES: dict[tuple[str, int], list[Term]] = {
    ("alpha", 1): [(1, _lin(4, 1), 1), (2, _lin(4, 0), 2), (3, _lin(4, 1), 3), (4, _lin(4, 2), 4),
                   (5, _lin(4, 3), 5), (6, _lin(4, 4), 6), (7, _lin(4, 3), 7), (8, _lin(4, 4), 8)],
    ("beta", 2): [(1, _lin(2, 0), 1), (2, _lin(2, 1), 2), (3, _lin(2, 1), 3), (4, _lin(2, 1), 4),
                  (5, _lin(2, 1), 5), (6, _lin(2, 1), 6), (7, _lin(2, 2), 7), (8, _lin(2, 2), 8)],
    ("alpha", 3): [(1, _c(1), 3), (5, _c(-1), 7), (6, _c(1), 8), (8, _c(-2), 10)],
    ("beta", 3): [(2, _c(1), 3), (3, _c(1), 4), (4, _c(-3), 5), (5, _c(-2), 6), (7, _c(1), 8), (8, _c(-1), 9)],
    ("alpha", 4): [(1, _c(1), 4), (4, _c(-3), 7), (5, _c(1), 8), (6, _c(-1), 9), (7, _c(2), 10), (8, _c(-1), 11)],
    ("alpha", 5): [(1, _c(1), 5), (3, _c(-1), 7), (5, _c(1), 9), (7, _c(-1), 11)],
    ("beta", 7): [(1, _c(-2), 6), (2, _c(1), 7), (3, _c(-1), 8), (4, _c(3), 9), (7, _c(-1), 12), (8, _c(1), 13)],
    ("alpha", 8): [(1, _c(1), 8), (3, _c(-2), 10), (4, _c(-3), 11), (5, _c(1), 12), (6, _c(1), 13), (8, _c(-1), 15)],
    ("beta", 8): [(2, _c(1), 8), (3, _c(-1), 9), (7, _c(1), 13), (8, _c(-2), 14)],
}

# x-weights of the n2 residues; alpha_{8k+1} (k >= 1) acts by this pattern on R_n2(0)
_RN2_TAIL = [(s, _c(w), s) for s, w in RN2_X_WEIGHTS.items() if w]


def _parse_param(key) -> tuple[str, int]:
    if isinstance(key, tuple):
        sym, idx = key
    else:
        text = str(key).strip().lower().replace("_", "")
        for prefix, sym in (("alpha", "alpha"), ("beta", "beta"), ("a", "alpha"), ("b", "beta")):
            if text.startswith(prefix) and text[len(prefix):].isdigit():
                idx = int(text[len(prefix):])
                break
        else:
            raise AlgebraError(f"cannot parse parameter name {key!r}; use e.g. alpha1 or beta3")
    if sym not in ("alpha", "beta") or int(idx) < 1:
        raise AlgebraError(f"bad parameter {key!r}")
    return sym, int(idx)


def _family_of(sym: str, p: int, P: int) -> tuple[tuple[str, int], int]:
    r = p % P or P
    return (sym, r), (p - r) // P


def _apply_family(images: dict[int, dict[int, Fraction]], terms: list[Term], K: int, value: Fraction,
                  P: int, N: int, offset: int, target_fn=None) -> None:
    for s, coef, m in terms:
        b = 0
        while P * b + s <= N:
            src = P * b + s
            tgt = target_fn(b, K, s, m) if target_fn else P * b + P * K + m
            c = coef(b, K) * value
            if c and 1 <= tgt <= N:
                row = images.setdefault(src + offset, {})
                row[tgt + offset] = row.get(tgt + offset, Fraction(0)) + c
            b += 1


def _add_to(images: dict[int, dict[int, Fraction]], src: int, tgt: int, c: Fraction, N: int, offset: int) -> None:
    if c and 1 <= tgt <= N:
        row = images.setdefault(src, {})
        row[tgt + offset] = row.get(tgt + offset, Fraction(0)) + c


def closed_form_derivations(name: str, params: Mapping, N: int, literal: bool = False) -> GradedOperator:
    """The derivation whose images are given by the closed-form formulas.

    ``name`` is one of n1, n2, Rn1_0, Rn2_0.  ``params`` maps parameter names
    such as ``"alpha1"`` or ``("beta", 3)`` to values; families that the
    formulas force to vanish are rejected.  ``literal=True`` reproduces the
    original formulas for n2 and R_n2(0) verbatim, including the index slips
    documented in the README, so that they can be tested against the
    computed derivation space.
    """
    parsed = {_parse_param(k): as_scalar(v) for k, v in dict(params).items()}
    parsed = {k: v for k, v in parsed.items() if v}
    if name == "n1":
        L = build_n1(N)
        return _closed_n1(L, parsed, N, extension=False)
    if name == "Rn1_0":
        L = build_Rn1(None, N)
        return _closed_n1(L, parsed, N, extension=True)
    if name == "n2":
        L = build_n2(N)
        return _closed_n2(L, parsed, N, literal, extension=False)
    if name == "Rn2_0":
        L = build_Rn2(None, N)
        return _closed_n2(L, parsed, N, literal, extension=True)
    raise AlgebraError(f"no closed-form derivations for {name!r}; choose from n1, n2, Rn1_0, Rn2_0")


def _closed_n1(L: TruncatedAlgebra, params, N: int, extension: bool) -> GradedOperator:
    P = 3
    off = 2 if extension else 0
    images: dict[int, dict[int, Fraction]] = {}
    X, Y = 1, 2
    for (sym, p), v in sorted(params.items()):
        fam, K = _family_of(sym, p, P)
        if fam not in N1_FAMILIES:
            raise AlgebraError(f"{sym}{p} is forced to vanish for n1 derivations")
        if extension and fam == ("beta", 2) and K > 0:
            raise AlgebraError(f"{sym}{p} is not a parameter of the R_n1(0) derivations")
        terms = N1_FAMILIES[fam]
        if extension and fam == ("alpha", 1) and K > 0:
            terms = [(1, _c(1), 1), (2, _c(-1), 2)]
        _apply_family(images, terms, K, v, P, N, off)
        if extension:
            k = K + 1  # the formulas index these parameters as 3k-2, 3k-1, 3k
            if fam == ("beta", 3):
                _add_to(images, X, 3 * k - 2, -k * v, N, off)
                _add_to(images, Y, 3 * k - 2, v, N, off)
            elif fam == ("alpha", 3):
                _add_to(images, X, 3 * k - 1, (k - 1) * v, N, off)
                _add_to(images, Y, 3 * k - 1, v, N, off)
            elif fam == ("alpha", 1) and K > 0:
                _add_to(images, X, 3 * k - 3, (1 - k) * v, N, off)
    label = ",".join(f"{s}{p}={v}" for (s, p), v in sorted(params.items()))
    return GradedOperator(L, images, label)


def _closed_n2(L: TruncatedAlgebra, params, N: int, literal: bool, extension: bool) -> GradedOperator:
    P = 8
    off = 2 if extension else 0
    images: dict[int, dict[int, Fraction]] = {}
    X, Y = 1, 2
    for (sym, p), v in sorted(params.items()):
        fam, K = _family_of(sym, p, P)
        if literal and extension and fam == ("beta", 6):
            # the original d(y) carries a beta_{8k+6} term although beta_{8k+6} is not a parameter
            _add_to(images, Y, 8 * K + 6, (2 * K + 1) * v, N, off)
            continue
        if fam not in N2_FAMILIES:
            raise AlgebraError(f"{sym}{p} is forced to vanish for n2 derivations")
        if extension and fam == ("beta", 2) and K > 0:
            raise AlgebraError(f"{sym}{p} is not a parameter of the R_n2(0) derivations")
        terms = list(N2_FAMILIES[fam])
        if extension and fam == ("alpha", 1) and K > 0:
            terms = _RN2_TAIL
        target_fn = None
        if literal and not extension:
            if fam == ("alpha", 1):
                # original form: coefficient (4i+1) alpha_{8i+8k+1} on f_{8i+8k+1}, and the
                # f_{8i+8} diagonal lands on f_{8k+8}
                terms = [t for t in terms if t[0] not in (1,)]
                for b in range(0, K + 1):
                    _add_to(images, 8 * b + 1 + off, 8 * K + 1, Fraction(4 * b + 1) * v, N, off)
            if fam == ("alpha", 8):
                terms = [t for t in terms if t[0] != 1]
                for b in range(0, K + 1):
                    _add_to(images, 8 * b + 1 + off, 8 * (K - b) + 8, v, N, off)
            if fam in (("alpha", 1), ("beta", 2)):
                def target_fn(b, K_, s, m):
                    return P * K_ + m if s == 8 else P * b + P * K_ + m
        _apply_family(images, terms, K, v, P, N, off, target_fn)
        if extension:
            xy = {
                ("beta", 3): [(X, 1, Fraction(1)), (Y, 1, Fraction(2 * K))],
                ("alpha", 3): [(X, 2, Fraction(2)), (Y, 2, Fraction(-(2 * K + 1)))],
                ("alpha", 4): [(X, 3, Fraction(1)), (Y, 3, Fraction(-(2 * K + 1)))],
                ("alpha", 5): [(Y, 4, Fraction(2 * K + 1, 3))],
                ("beta", 7): [(X, 5, Fraction(-1)), (Y, 5, Fraction(-(2 * K + 1)))],
                ("beta", 8): [(X, 6, Fraction(2))] + ([] if literal else [(Y, 6, Fraction(2 * K + 1))]),
                ("alpha", 8): [(X, 7, Fraction(1)), (Y, 7, Fraction(-(2 * K + 2)))],
            }.get(fam, [])
            for gen, m, c in xy:
                _add_to(images, gen, 8 * K + m, c * v, N, off)
            if fam == ("alpha", 1) and K > 0:
                _add_to(images, Y, 8 * K, Fraction(2 * K) * v, N, off)
    label = ",".join(f"{s}{p}={v}" for (s, p), v in sorted(params.items()))
    return GradedOperator(L, images, label)


def parameter_names(name: str, max_index: int) -> list[str]:
    """Free parameters of the closed-form families with index <= max_index."""
    out = []
    if name in ("n1", "Rn1_0"):
        fams, P = N1_FAMILIES, 3
    elif name in ("n2", "Rn2_0"):
        fams, P = N2_FAMILIES, 8
    else:
        raise AlgebraError(f"no closed-form derivations for {name!r}")
    for p in range(1, max_index + 1):
        for sym in ("alpha", "beta"):
            fam, K = _family_of(sym, p, P)
            if fam not in fams:
                continue
            if name.startswith("R") and fam == ("beta", 2) and K > 0:
                continue
            out.append(f"{sym}{p}")
    return out
