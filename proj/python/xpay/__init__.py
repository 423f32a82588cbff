"""Deterministic simulator for multi-hop payments across escrows.

Times are exchanged as fractions.Fraction; configurations use the same JSON
schema as the command line tool and may be given as a dict, a JSON string or
a path.
"""

from __future__ import annotations

import json
import os
from fractions import Fraction
from typing import Any, Iterable, Mapping

from . import _core

ConfigError = _core.ConfigError

__all__ = [
    "ConfigError",
    "derive",
    "digest",
    "explore",
    "is_acceptable_payoff",
    "is_well_formed",
    "payment_chain_well_formed",
    "run",
    "sweep",
    "validate",
]


def _config_text(config: Any) -> str:
    if isinstance(config, Mapping):
        return json.dumps(config)
    if isinstance(config, os.PathLike) or (isinstance(config, str) and not config.lstrip().startswith("{")):
        with open(config, encoding="utf-8") as f:
            return f.read()
    return config


def _time(value: Any) -> str:
    f = Fraction(value)
    return f"{f.numerator}/{f.denominator}"


def _fractions(params: dict) -> dict:
    return {
        "a": [Fraction(x) for x in params["a"]],
        "d": [Fraction(x) for x in params["d"]],
        "epsilon": Fraction(params["epsilon"]),
        "D": Fraction(params["D"]),
    }


def run(config: Any, seed: int | None = None) -> dict:
    """One run: verdicts, final states and the rendered trace."""
    return json.loads(_core.run(_config_text(config), seed))


def sweep(config: Any, runs: int, parallelism: int = 1, seed: int | None = None) -> dict:
    return json.loads(_core.sweep(_config_text(config), runs, parallelism, seed))


def explore(config: Any, budget: int | None = None) -> dict:
    return json.loads(_core.explore(_config_text(config), budget))


def digest(config: Any) -> str:
    return _core.digest(_config_text(config))


def derive(n: int, delta: Any, pi: Any, rho: Any = 0, epsilon: Any = None, margin: Any = 0) -> dict:
    eps = None if epsilon is None else _time(epsilon)
    return _fractions(json.loads(_core.derive(n, _time(delta), _time(pi), _time(rho), eps, _time(margin))))


def validate(
    n: int,
    delta: Any,
    pi: Any,
    rho: Any = 0,
    margin: Any = 0,
    force_a: Iterable[Any] | None = None,
    step: Any = Fraction(1, 10),
) -> dict:
    forced = None if force_a is None else [_time(a) for a in force_a]
    out = json.loads(_core.validate(n, _time(delta), _time(pi), _time(rho), _time(margin), forced, _time(step)))
    out["params"] = _fractions(out["params"])
    return out


def _entries(entries: Mapping) -> dict:
    return {tuple(k): (str(v[0]), int(v[1])) for k, v in entries.items()}


def is_well_formed(parties: int, entries: Mapping) -> bool:
    """entries maps (i, j) to (label, magnitude)."""
    return _core.is_well_formed(parties, _entries(entries))


def is_acceptable_payoff(parties: int, entries: Mapping, party: int, outcome: Iterable) -> bool:
    return _core.is_acceptable_payoff(parties, _entries(entries), party, {tuple(a) for a in outcome})


def payment_chain_well_formed(n: int, with_certificate: bool = False) -> bool:
    return _core.payment_chain_well_formed(n, with_certificate)
