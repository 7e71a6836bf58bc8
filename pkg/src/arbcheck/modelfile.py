"""Exact JSON model files: parsing, validation, serialization.

Every number in a model file is a string "p/q" or an integer; JSON floats
are rejected outright so no value can silently lose precision.  A model
carries the scenario space, the trader's filtration, one market (a named
constructor or raw generator tables) and optional named claims.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError, UnknownClaim
from .market import FiniteSpace, Filtration, RandomVector, build_space, build_filtration, random_vector
from .rationals import rat, rat_str
from .trademap import (
    ConeSpec,
    TradeMap,
    build_trade_map,
    currency_market_v1,
    currency_market_v1_rates,
    currency_market_v2,
    ordered_pairs,
    security_market,
)

KINDS = ("security", "currency1", "currency2", "generic")


@dataclass
class Model:
    space: FiniteSpace
    filtration: Filtration
    kind: str
    market_data: dict
    claims: dict[str, RandomVector] = field(default_factory=dict)
    trade_map: TradeMap | None = None


def _reject_float(text: str):
    raise ParseError(f"floating point literal {text!r}; use \"p/q\" strings")


def _rat_at(value, where: str) -> Fraction:
    try:
        return rat(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ParseError(str(exc), where) from None


def _rat_grid(raw, where: str):
    if isinstance(raw, list):
        return [_rat_grid(v, f"{where}[{k}]") for k, v in enumerate(raw)]
    return _rat_at(raw, where)


def parse_model(text: str) -> Model:
    try:
        doc = json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} col {exc.colno}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    try:
        space_doc = doc["space"]
        space = build_space(
            space_doc["labels"],
            [_rat_at(p, f"space.probs[{k}]") for k, p in enumerate(space_doc["probs"])],
        )
        filtration = build_filtration(space, doc["filtration"])
        market = doc["market"]
        kind = market["kind"]
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}") from None
    if kind not in KINDS:
        raise ParseError(f"unknown market kind {kind!r}", "market.kind")

    data: dict = {}
    if kind == "security":
        data["pi"] = _rat_grid(market["pi"], "market.pi")
        tm = security_market(space, filtration, data["pi"])
    elif kind == "currency1":
        data["costs"] = _rat_grid(market["costs"], "market.costs")
        if "prices" in market:
            data["prices"] = _rat_grid(market["prices"], "market.prices")
            tm = currency_market_v1(space, filtration, data["prices"], data["costs"])
        else:
            data["rates"] = _rat_grid(market["rates"], "market.rates")
            tm = currency_market_v1_rates(space, filtration, data["rates"], data["costs"])
    elif kind == "currency2":
        data["rates"] = _rat_grid(market["rates"], "market.rates")
        data["costs"] = _rat_grid(market["costs"], "market.costs")
        tm = currency_market_v2(space, filtration, data["rates"], data["costs"])
    else:
        dim = market["dimension"]
        cone_doc = market.get("cone", {})
        plus_tab = cone_doc.get("plus")
        minus_tab = cone_doc.get("minus")
        pairs = ordered_pairs(dim)
        plus = frozenset(
            (i, j) for (i, j) in pairs if plus_tab is None or plus_tab[i][j]
        )
        minus = frozenset(
            (i, j) for (i, j) in pairs if minus_tab is None or minus_tab[i][j]
        )
        cone = ConeSpec(dim, plus, minus)

        def gen_table(name):
            raw = market[name]
            out = []
            for t, per_t in enumerate(raw):
                rows_t = []
                for w, per_w in enumerate(per_t):
                    grid = []
                    for i, per_i in enumerate(per_w):
                        row = []
                        for j, cell in enumerate(per_i):
                            if cell is None:
                                row.append(None)
                            else:
                                row.append(_rat_grid(cell, f"market.{name}[{t}][{w}][{i}][{j}]"))
                        grid.append(row)
                    rows_t.append(grid)
                out.append(rows_t)
            return out

        data["dimension"] = dim
        data["cone"] = {
            "plus": [[(i, j) in plus for j in range(dim)] for i in range(dim)],
            "minus": [[(i, j) in minus for j in range(dim)] for i in range(dim)],
        }
        data["gen_plus"] = gen_table("gen_plus")
        data["gen_minus"] = gen_table("gen_minus")
        tm = build_trade_map(space, filtration, cone, data["gen_plus"], data["gen_minus"])

    claims: dict[str, RandomVector] = {}
    for name, vectors in doc.get("claims", {}).items():
        grid = _rat_grid(vectors, f"claims.{name}")
        claims[name] = random_vector(space, grid)
    return Model(space, filtration, kind, data, claims, tm)


def load_model(path: str) -> Model:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())


def encode_exact(value):
    """Fractions to "p/q" strings, tuples to lists, recursively."""
    if isinstance(value, Fraction):
        return rat_str(value)
    if isinstance(value, (list, tuple)):
        return [encode_exact(v) for v in value]
    if isinstance(value, dict):
        return {k: encode_exact(v) for k, v in value.items()}
    return value


def serialize_model(model: Model) -> str:
    market: dict = {"kind": model.kind}
    for key, value in model.market_data.items():
        market[key] = encode_exact(value)
    doc = {
        "space": {
            "labels": list(model.space.outcomes),
            "probs": [rat_str(p) for p in model.space.probs],
        },
        "filtration": [
            [list(atom) for atom in part] for part in model.filtration.partitions
        ],
        "market": market,
        "claims": {
            name: encode_exact([list(v) for v in rv.values])
            for name, rv in model.claims.items()
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True)
