"""Index, Euler characteristic and degree-formula arithmetic on variety records.

Records are trusted numeric data (dimension, chi(O_X), index n_X). The checks
here test consistency with the known constraints; they never try to build
the varieties.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .exactnum import INFINITY, check_prime, vp

CONSISTENT = "consistent"
VIOLATES = "VIOLATES"
NOT_APPLICABLE = "not-applicable"
STRONGLY_INCOMPRESSIBLE = "strongly p-incompressible"
INCONSISTENT = "INCONSISTENT DATA"
NO_CONCLUSION = "no conclusion"
NO_CORRESPONDENCE = "correspondence impossible"

REF_INDEX_BOUND = "v_p(n_X) <= [dim X/(p-1)] + v_p(chi(O_X)) for dim X < p(p-1)"
REF_TP = "t_p(X) = p^(i-1) chi(O_X) mod n_X(p), dim X = i(p-1)"
REF_DEGF = "t_p(Y) = deg f . t_p(X) mod n_X(p) for f: Y -> X, 0 < i <= p"
REF_INCOMPRESSIBLE = "v_p(n_X) >= i, p does not divide chi(O_X) => dim X >= i(p-1); equality gives strong p-incompressibility"
REF_CORRESPONDENCE = "no correspondence X ~> Y of multiplicity prime to p"

_JS_SAFE = 2**53


class RecordError(ValueError):
    """Malformed record data; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class VarietyRecord:
    name: str
    dim: int
    chi: int
    index: int

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError(f"{self.name}: dim must be >= 0")
        if self.index < 1:
            raise ValueError(f"{self.name}: index must be >= 1")


@dataclass(frozen=True)
class MorphismRecord:
    source: str
    target: str
    deg: int

    def __post_init__(self):
        if self.deg < 0:
            raise ValueError("deg must be >= 0 (0 encodes a non-dominant map)")


@dataclass(frozen=True)
class TpClass:
    residue: int
    modulus: int
    i: int
    certified: bool  # i <= p, where the degree formula applies


def index_p_part(r: VarietyRecord, p: int) -> int:
    check_prime(p)
    return p ** vp(r.index, p)


def _level(dim: int, p: int) -> int | None:
    if dim > 0 and dim % (p - 1) == 0:
        return dim // (p - 1)
    return None


def t_p_class(r: VarietyRecord, p: int) -> TpClass:
    check_prime(p)
    i = _level(r.dim, p)
    if i is None:
        raise ValueError(f"{r.name}: dim {r.dim} is not a positive multiple of p-1 = {p - 1}")
    mod = index_p_part(r, p)
    return TpClass(p ** (i - 1) * r.chi % mod, mod, i, i <= p)


def _verdict(check: str, subject: str, p: int, verdict: str, ref: str, **detail) -> dict:
    out = {"check": check, "subject": subject, "p": p, "verdict": verdict}
    out.update(detail)
    out["paper_ref"] = ref
    return out


def check_index_bound(r: VarietyRecord, p: int) -> dict:
    check_prime(p)
    if r.dim >= p * (p - 1):
        return _verdict("index-bound", r.name, p, NOT_APPLICABLE, REF_INDEX_BOUND, reason="dim >= p(p-1)")
    lhs = vp(r.index, p)
    v_chi = vp(r.chi, p)
    if v_chi == INFINITY:
        return _verdict("index-bound", r.name, p, CONSISTENT, REF_INDEX_BOUND, lhs=lhs, rhs="inf")
    rhs = r.dim // (p - 1) + v_chi
    verdict = CONSISTENT if lhs <= rhs else VIOLATES
    return _verdict("index-bound", r.name, p, verdict, REF_INDEX_BOUND, lhs=lhs, rhs=rhs)


def check_degree_formula(m: MorphismRecord, records: dict, p: int) -> dict:
    """Y = m.source, X = m.target; both of dimension i(p-1) with 0 < i <= p."""
    check_prime(p)
    try:
        Y, X = records[m.source], records[m.target]
    except KeyError as exc:
        raise ValueError(f"unknown record {exc.args[0]!r}") from None
    if X.dim != Y.dim:
        raise ValueError(f"dimension mismatch: {Y.name} has {Y.dim}, {X.name} has {X.dim}")
    i = _level(X.dim, p)
    if i is None or i > p:
        raise ValueError(f"dimension {X.dim} is not i(p-1) with 0 < i <= {p}")
    mod = index_p_part(X, p)
    lhs = p ** (i - 1) * Y.chi % mod
    rhs = m.deg * p ** (i - 1) * X.chi % mod
    verdict = CONSISTENT if lhs == rhs else VIOLATES
    subject = f"{Y.name} -> {X.name}"
    return _verdict("degree-formula", subject, p, verdict, REF_DEGF, i=i, modulus=mod, lhs=lhs, rhs=rhs, deg=m.deg)


def infer_level(r: VarietyRecord, p: int) -> int:
    """Largest admissible i: min(v_p(index), p); 0 when nothing can be said."""
    return min(vp(r.index, p), p)


def incompressibility_criterion(r: VarietyRecord, p: int, i: int | None = None) -> dict:
    check_prime(p)
    if i is None:
        i = infer_level(r, p)
    detail = {"i": i}
    if not 0 < i <= p or vp(r.index, p) < i or r.chi % p == 0:
        return _verdict("incompressibility", r.name, p, NOT_APPLICABLE, REF_INCOMPRESSIBLE, **detail)
    bound = i * (p - 1)
    if r.dim < bound:
        verdict = INCONSISTENT
    elif r.dim == bound:
        verdict = STRONGLY_INCOMPRESSIBLE
    else:
        verdict = NO_CONCLUSION
    return _verdict("incompressibility", r.name, p, verdict, REF_INCOMPRESSIBLE, dim_bound=bound, **detail)


def correspondence_verdict(X: VarietyRecord, Y: VarietyRecord, p: int) -> dict:
    """Whether a correspondence X ~> Y of multiplicity prime to p is ruled out."""
    check_prime(p)
    subject = f"{X.name} ~> {Y.name}"
    i = max(1, -(-X.dim // (p - 1)), -(-Y.dim // (p - 1)))
    ok = (
        i <= p
        and vp(Y.index, p) >= vp(X.index, p) >= i
        and Y.chi % p == 0
        and X.chi % p != 0
    )
    verdict = NO_CORRESPONDENCE if ok else NO_CONCLUSION
    return _verdict("correspondence", subject, p, verdict, REF_CORRESPONDENCE, i=i)


def record_verdict(r: VarietyRecord, p: int) -> dict:
    """Summary verdict for one record plus the individual checks behind it."""
    bound = check_index_bound(r, p)
    incompressible = incompressibility_criterion(r, p)
    checks = [bound, incompressible]
    if bound["verdict"] == VIOLATES:
        verdict = VIOLATES
    elif incompressible["verdict"] in (INCONSISTENT, STRONGLY_INCOMPRESSIBLE):
        verdict = incompressible["verdict"]
    else:
        verdict = CONSISTENT
    out = {"check": "record", "subject": r.name, "p": p, "verdict": verdict}
    if _level(r.dim, p) is not None:
        tp = t_p_class(r, p)
        out["t_p"] = {"residue": tp.residue, "modulus": tp.modulus, "i": tp.i, "certified": tp.certified}
    out["checks"] = checks
    return out


def evaluate(varieties: list, morphisms: list, p: int) -> list[dict]:
    records = {r.name: r for r in varieties}
    out = [record_verdict(r, p) for r in varieties]
    for m in morphisms:
        out.append(check_degree_formula(m, records, p))
    return out


def is_failure(verdict: dict) -> bool:
    return verdict["verdict"] in (VIOLATES, INCONSISTENT)


# JSON ---------------------------------------------------------------------------


def _int(value, path: str) -> int:
    if isinstance(value, bool):
        raise RecordError(path, "expected an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value.strip(), 10)
        except ValueError:
            pass
    raise RecordError(path, f"expected an integer or decimal string, got {value!r}")


def _str(value, path: str) -> str:
    if not isinstance(value, str) or not value:
        raise RecordError(path, "expected a non-empty string")
    return value


def parse_records(data) -> tuple[list[VarietyRecord], list[MorphismRecord]]:
    if data is None or data == {}:
        return [], []
    if not isinstance(data, dict):
        raise RecordError("$", "expected an object with 'varieties' and 'morphisms'")
    varieties, morphisms = [], []
    vs = data.get("varieties", [])
    if not isinstance(vs, list):
        raise RecordError("$.varieties", "expected a list")
    for k, v in enumerate(vs):
        path = f"$.varieties[{k}]"
        if not isinstance(v, dict):
            raise RecordError(path, "expected an object")
        for key in ("name", "dim", "chi", "index"):
            if key not in v:
                raise RecordError(f"{path}.{key}", "missing field")
        try:
            varieties.append(
                VarietyRecord(
                    _str(v["name"], f"{path}.name"),
                    _int(v["dim"], f"{path}.dim"),
                    _int(v["chi"], f"{path}.chi"),
                    _int(v["index"], f"{path}.index"),
                )
            )
        except RecordError:
            raise
        except ValueError as exc:
            raise RecordError(path, str(exc)) from None
    names = {r.name for r in varieties}
    if len(names) != len(varieties):
        raise RecordError("$.varieties", "duplicate record names")
    ms = data.get("morphisms", [])
    if not isinstance(ms, list):
        raise RecordError("$.morphisms", "expected a list")
    for k, m in enumerate(ms):
        path = f"$.morphisms[{k}]"
        if not isinstance(m, dict):
            raise RecordError(path, "expected an object")
        for key in ("source", "target", "deg"):
            if key not in m:
                raise RecordError(f"{path}.{key}", "missing field")
        src, tgt = _str(m["source"], f"{path}.source"), _str(m["target"], f"{path}.target")
        for key, name in (("source", src), ("target", tgt)):
            if name not in names:
                raise RecordError(f"{path}.{key}", f"unknown record {name!r}")
        try:
            morphisms.append(MorphismRecord(src, tgt, _int(m["deg"], f"{path}.deg")))
        except RecordError:
            raise
        except ValueError as exc:
            raise RecordError(path, str(exc)) from None
    return varieties, morphisms


def load_records(path) -> tuple[list[VarietyRecord], list[MorphismRecord]]:
    text = Path(path).read_text()
    if not text.strip():
        return [], []
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RecordError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    return parse_records(data)


def sample_records_path() -> Path:
    return Path(__file__).with_name("data") / "sample_records.json"


def json_safe(obj):
    """Replace integers beyond 2^53 by decimal strings."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, int):
        return str(obj) if abs(obj) >= _JS_SAFE else obj
    if isinstance(obj, dict):
        return {k: json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    return obj
