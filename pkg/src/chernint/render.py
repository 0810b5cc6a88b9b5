"""Text / JSON / CSV rendering of values."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

from .exactnum import binomial


def _join(terms) -> str:
    """Join (coeff, monomial-string) pairs into 'a*m + b*n - ...'."""
    out = ""
    for c, mono in terms:
        neg = c < 0
        mag = -c if neg else c
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        if not out:
            out = f"-{body}" if neg else body
        else:
            out += f" - {body}" if neg else f" + {body}"
    return out or "0"


def _mono(e, sym) -> str:
    parts = []
    for j, k in enumerate(e, start=1):
        if k == 1:
            parts.append(f"{sym}{j}")
        elif k > 1:
            parts.append(f"{sym}{j}^{k}")
    return "*".join(parts)


def render_poly(x) -> str:
    """Chow classes in h1..hk; K_0 classes expanded in t1..tk."""
    from .kchow.elements import KCohElt

    if isinstance(x, KCohElt):
        return _join([(c, _mono(e, "t")) for e, c in kcoh_t_terms(x)])
    return _join([(c, _mono(e, "h")) for e, c in x.sorted_terms()])


def kcoh_t_terms(x):
    """Coefficients of a K_0 element in the monomial basis t^a, 0 <= a_j <= n_j."""
    out: dict = {}
    for e, c in x.terms.items():
        expansions = [[(k, (-1) ** k * binomial(m, k)) for k in range(m + 1)] for m in e]
        acc = {(): c}
        for opts in expansions:
            acc = {a + (k,): v * w for a, v in acc.items() for k, w in opts}
        for a, v in acc.items():
            out[a] = out.get(a, 0) + v
    if x.mod is not None:
        out = {a: v % x.mod for a, v in out.items()}
    return sorted(((a, v) for a, v in out.items() if v), key=lambda t: (sum(t[0]), t[0]))


def render_khom(x) -> str:
    return _join([(c, "OL(" + ",".join(map(str, idx)) + ")") for idx, c in x.sorted_terms()])


def render_bundle(u) -> str:
    return _join([(m, "O(" + ",".join(map(str, a)) + ")") for a, m in u.sorted_parts()])


def render_value(v) -> str:
    from .kchow.elements import ChowElt, KCohElt, KHomElt, VirtualBundle

    if isinstance(v, (ChowElt, KCohElt)):
        return render_poly(v)
    if isinstance(v, KHomElt):
        return render_khom(v)
    if isinstance(v, VirtualBundle):
        return render_bundle(v)
    if isinstance(v, list):
        return "\n".join(f"ch_{i} = {render_value(c)}" for i, c in reversed(list(enumerate(v))))
    return str(v)


def value_to_json(v) -> dict | list | str:
    from .kchow.elements import ChowElt, KCohElt, KHomElt, VirtualBundle

    if isinstance(v, ChowElt):
        return {
            "variety": v.variety.name,
            "kind": "chow",
            "field": "Q" if v.mod is None else f"Z/{v.mod}",
            "terms": [{"exp": list(e), "coef": str(c)} for e, c in v.sorted_terms()],
        }
    if isinstance(v, KCohElt):
        return {
            "variety": v.variety.name,
            "kind": "k0",
            "basis": "t-monomials",
            "terms": [{"exp": list(e), "coef": str(c)} for e, c in kcoh_t_terms(v)],
        }
    if isinstance(v, KHomElt):
        return {
            "variety": v.variety.name,
            "kind": "k0prime",
            "terms": [{"exp": list(e), "coef": str(c)} for e, c in v.sorted_terms()],
        }
    if isinstance(v, VirtualBundle):
        return {
            "variety": v.variety.name,
            "kind": "bundle",
            "terms": [{"exp": list(a), "coef": str(m)} for a, m in v.sorted_parts()],
        }
    if isinstance(v, list):
        return [value_to_json(c) for c in v]
    if isinstance(v, (int, Fraction)):
        return str(v)
    return str(v)


def value_to_csv(v) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    data = value_to_json(v)
    if isinstance(data, list):
        w.writerow(["component", "exp", "coef"])
        for i, comp in enumerate(data):
            for t in comp["terms"]:
                w.writerow([i, " ".join(map(str, t["exp"])), t["coef"]])
    elif isinstance(data, dict):
        w.writerow(["exp", "coef"])
        for t in data["terms"]:
            w.writerow([" ".join(map(str, t["exp"])), t["coef"]])
    else:
        w.writerow(["value"])
        w.writerow([data])
    return buf.getvalue()


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)
