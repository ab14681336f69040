"""JSON interchange for algebra presentations and derivation lists.

An AlgebraFile looks like::

    {
      "name": "n1",
      "truncation": 12,
      "period": 3,
      "graded": true,
      "basis": [{"index": 1, "degree": 1, "name": "e1"}, ...],
      "brackets": [[1, 2, [[3, "-1"]]], ...]
    }

Coefficients are strings in the canonical form "p" or "p/q".  Degree-0 basis
elements must carry ``"generator": true``.  Parse errors carry the JSON path
of the offending value (or line and column for malformed JSON).
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Optional

from .core import AlgebraError, BasisElement, GradedOperator, TruncatedAlgebra, Vector
from .exactla import scalar_str

FORMAT = "gradlie-algebra/1"


class AlgebraFileError(AlgebraError):
    """Malformed AlgebraFile or derivation file; ``path`` locates the problem."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# -- emitting ---------------------------------------------------------------


def _terms(vec: Any) -> list[list]:
    return [[k, scalar_str(Fraction(c))] for k, c in sorted(dict(vec).items())]


def algebra_to_dict(L: TruncatedAlgebra) -> dict:
    basis = []
    for b in L.basis:
        entry: dict[str, Any] = {"index": b.index, "degree": b.degree}
        if b.name:
            entry["name"] = b.name
        if b.generator:
            entry["generator"] = True
        basis.append(entry)
    brackets = [[i, j, _terms(terms)] for (i, j), terms in sorted(L.table.items())]
    return {
        "format": FORMAT,
        "name": L.name,
        "truncation": L.truncation,
        "period": L.period,
        "graded": L.graded,
        "basis": basis,
        "brackets": brackets,
    }


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def emit_algebra(L: TruncatedAlgebra) -> str:
    return dumps(algebra_to_dict(L))


def operator_to_dict(op: GradedOperator) -> dict:
    return {
        "label": op.label,
        "images": [[s, _terms(img)] for s, img in sorted(op.images.items())],
    }


# -- parsing ----------------------------------------------------------------


def _expect(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise AlgebraFileError(path, message)


def _int(value: Any, path: str) -> int:
    _expect(isinstance(value, int) and not isinstance(value, bool), path, f"expected an integer, got {value!r}")
    return value


def _coeff(value: Any, path: str) -> Fraction:
    _expect(isinstance(value, str), path, f"coefficients must be strings like \"3\" or \"-1/2\", got {value!r}")
    try:
        c = Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise AlgebraFileError(path, f"not a rational number: {value!r}") from None
    _expect(scalar_str(c) == value, path, f"coefficient {value!r} is not in canonical form {scalar_str(c)!r}")
    return c


def _vector(value: Any, path: str) -> Vector:
    _expect(isinstance(value, list), path, "expected a list of [index, coefficient] pairs")
    out: Vector = {}
    for n, item in enumerate(value):
        p = f"{path}[{n}]"
        _expect(isinstance(item, list) and len(item) == 2, p, "expected [index, coefficient]")
        k = _int(item[0], f"{p}[0]")
        _expect(k not in out, f"{p}[0]", f"index {k} listed twice")
        out[k] = _coeff(item[1], f"{p}[1]")
    return out


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraFileError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None


def algebra_from_dict(data: Any) -> TruncatedAlgebra:
    _expect(isinstance(data, dict), "$", "expected a JSON object")
    fmt = data.get("format", FORMAT)
    _expect(fmt == FORMAT, "$.format", f"unsupported format {fmt!r}")
    for key in ("name", "truncation", "basis", "brackets"):
        _expect(key in data, "$", f"missing field {key!r}")
    name = data["name"]
    _expect(isinstance(name, str), "$.name", "expected a string")
    N = _int(data["truncation"], "$.truncation")
    period = _int(data.get("period", 1), "$.period")
    graded = data.get("graded", True)
    _expect(isinstance(graded, bool), "$.graded", "expected true or false")
    _expect(isinstance(data["basis"], list), "$.basis", "expected a list")
    basis = []
    for n, b in enumerate(data["basis"]):
        p = f"$.basis[{n}]"
        _expect(isinstance(b, dict), p, "expected an object")
        _expect("index" in b and "degree" in b, p, "needs 'index' and 'degree'")
        idx = _int(b["index"], p + ".index")
        _expect(idx == n + 1, p + ".index", f"basis indices must be 1..n in order, expected {n + 1}")
        deg = _int(b["degree"], p + ".degree")
        label = b.get("name", "")
        _expect(isinstance(label, str), p + ".name", "expected a string")
        gen = b.get("generator", False)
        _expect(isinstance(gen, bool), p + ".generator", "expected true or false")
        basis.append(BasisElement(idx, deg, label, gen))
    _expect(isinstance(data["brackets"], list), "$.brackets", "expected a list")
    table: dict[tuple[int, int], list] = {}
    n = len(basis)
    for m, entry in enumerate(data["brackets"]):
        p = f"$.brackets[{m}]"
        _expect(isinstance(entry, list) and len(entry) == 3, p, "expected [i, j, [[k, coeff], ...]]")
        i = _int(entry[0], p + "[0]")
        j = _int(entry[1], p + "[1]")
        _expect(1 <= i < j <= n, p, f"need 1 <= i < j <= {n}, got ({i}, {j})")
        _expect((i, j) not in table, p, f"pair ({i}, {j}) listed twice")
        vec = _vector(entry[2], p + "[2]")
        for k in vec:
            _expect(1 <= k <= n, p + "[2]", f"target {k} outside the basis")
        table[(i, j)] = sorted(vec.items())
    try:
        return TruncatedAlgebra(name, basis, table, N, period, graded=graded)
    except AlgebraError as exc:
        raise AlgebraFileError("$", str(exc)) from None


def parse_algebra(text: str) -> TruncatedAlgebra:
    return algebra_from_dict(_load_json(text))


def read_algebra(path: str) -> TruncatedAlgebra:
    with open(path, encoding="utf-8") as fh:
        return parse_algebra(fh.read())


def write_algebra(L: TruncatedAlgebra, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit_algebra(L))


# -- derivation files (input of the extend command) -------------------------


def operator_from_dict(L: TruncatedAlgebra, data: Any, path: str) -> GradedOperator:
    """Either explicit images or a closed-form request.

    ``{"images": [[src, [[tgt, "c"], ...]], ...]}`` or
    ``{"closed_form": "n1", "params": {"alpha1": "1"}}``.
    """
    _expect(isinstance(data, dict), path, "expected an object")
    if "closed_form" in data:
        from .catalog import closed_form_derivations

        params = data.get("params", {})
        _expect(isinstance(params, dict), path + ".params", "expected an object")
        values = {k: _coeff(v, f"{path}.params.{k}") for k, v in sorted(params.items())}
        try:
            op = closed_form_derivations(data["closed_form"], values, L.truncation)
        except AlgebraError as exc:
            raise AlgebraFileError(path, str(exc)) from None
        return GradedOperator(L, op.images, data.get("label", op.label))
    _expect("images" in data, path, "needs 'images' or 'closed_form'")
    _expect(isinstance(data["images"], list), path + ".images", "expected a list")
    images: dict[int, Vector] = {}
    for n, item in enumerate(data["images"]):
        p = f"{path}.images[{n}]"
        _expect(isinstance(item, list) and len(item) == 2, p, "expected [source, [[target, coeff], ...]]")
        s = _int(item[0], p + "[0]")
        _expect(1 <= s <= L.dim, p + "[0]", f"source {s} outside the basis")
        _expect(s not in images, p + "[0]", f"source {s} listed twice")
        images[s] = _vector(item[1], p + "[1]")
        for t in images[s]:
            _expect(1 <= t <= L.dim, p + "[1]", f"target {t} outside the basis")
    label = data.get("label", "")
    _expect(isinstance(label, str), path + ".label", "expected a string")
    return GradedOperator(L, images, label)


def parse_extension_spec(L: TruncatedAlgebra, text: str
                         ) -> tuple[list[GradedOperator], dict[tuple[int, int], Vector], Optional[list[str]]]:
    """``{"derivations": [...], "q_bracket": [[s, t, [[k, "c"]]]], "generators": ["x", "y"]}``.

    Generator positions s < t in ``q_bracket`` count from 0; targets index the base basis.
    """
    data = _load_json(text)
    _expect(isinstance(data, dict), "$", "expected a JSON object")
    _expect(isinstance(data.get("derivations"), list), "$.derivations", "expected a list")
    ds = [operator_from_dict(L, d, f"$.derivations[{n}]") for n, d in enumerate(data["derivations"])]
    q: dict[tuple[int, int], Vector] = {}
    for m, entry in enumerate(data.get("q_bracket", [])):
        p = f"$.q_bracket[{m}]"
        _expect(isinstance(entry, list) and len(entry) == 3, p, "expected [s, t, [[k, coeff], ...]]")
        s, t = _int(entry[0], p + "[0]"), _int(entry[1], p + "[1]")
        _expect(0 <= s < t < len(ds), p, f"need 0 <= s < t < {len(ds)}")
        q[(s, t)] = _vector(entry[2], p + "[2]")
    names = data.get("generators")
    if names is not None:
        _expect(isinstance(names, list) and len(names) == len(ds) and all(isinstance(x, str) for x in names),
                "$.generators", "expected one name per derivation")
    return ds, q, names
