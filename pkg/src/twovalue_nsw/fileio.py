"""Instance and report JSON formats, and the seeded instance generator.

Exact rationals travel as strings ("10", "3/2") so nothing is lost to floats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from .core import UNASSIGNED, Allocation, Instance, UsageError, utility_profile, utility_vector, product_of
from .solver import ApproxResult, SolveResult

INSTANCE_KEYS = {"n", "m", "p", "heavy"}


class FormatError(UsageError):
    """Malformed instance or report file."""


def fmt(x) -> str:
    return str(Fraction(x))


def parse_rational(text) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise FormatError(f"expected a rational string, got {text!r}")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {text!r}") from exc


def instance_from_dict(obj: Any) -> Instance:
    if not isinstance(obj, dict):
        raise FormatError("instance must be a JSON object")
    extra = set(obj) - INSTANCE_KEYS
    missing = INSTANCE_KEYS - set(obj)
    if extra:
        raise FormatError(f"unknown keys: {sorted(extra)}")
    if missing:
        raise FormatError(f"missing keys: {sorted(missing)}")
    n, m = obj["n"], obj["m"]
    if not (isinstance(n, int) and isinstance(m, int)) or isinstance(n, bool) or isinstance(m, bool):
        raise FormatError("n and m must be integers")
    heavy = obj["heavy"]
    if not isinstance(heavy, list):
        raise FormatError("heavy must be a list of [agent, good] pairs")
    pairs = []
    for pair in heavy:
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in pair)):
            raise FormatError(f"bad heavy pair {pair!r}")
        pairs.append((pair[0], pair[1]))
    try:
        return Instance(n, m, parse_rational(obj["p"]), pairs)
    except FormatError:
        raise
    except UsageError as exc:
        raise FormatError(str(exc)) from exc


def instance_to_dict(instance: Instance) -> dict:
    return {
        "n": instance.n,
        "m": instance.m,
        "p": fmt(instance.p),
        "heavy": [list(e) for e in sorted(instance.heavy)],
    }


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), separators=(",", ":")) + "\n"


def _read_json(path: Union[str, Path]) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def load_instance(path: Union[str, Path]) -> Instance:
    return instance_from_dict(_read_json(path))


def save_instance(instance: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_instance(instance))


def make_report(instance: Instance, result: Union[SolveResult, ApproxResult]) -> dict:
    """ReportFile for a solver result; utilities are under the instance's own p."""
    inner = result.inner if isinstance(result, ApproxResult) else result
    u = utility_vector(instance, result.allocation)
    report = {
        "assignment": list(result.allocation.owner),
        "utilities": [fmt(x) for x in u],
        "profile": [fmt(x) for x in utility_profile(u)],
        "nsw_product": fmt(result.nsw.product),
        "nsw_float": result.nsw.geometric_mean,
        "moves": [
            {
                "good": mv.good,
                "from_agent": mv.from_agent,
                "to_agent": mv.to_agent,
                "product_before": fmt(mv.product_before.product),
                "product_after": fmt(mv.product_after.product),
            }
            for mv in inner.phase3_moves
        ],
        "phase3_order": list(inner.phase3_order),
        "flags": list(inner.flags),
    }
    if isinstance(result, ApproxResult) and not instance.is_integral:
        report["factor"] = fmt(result.factor)
        report["rounded_p"] = result.rounded_p
    return report


def allocation_from_report(instance: Instance, report: Any) -> Allocation:
    if not isinstance(report, dict) or "assignment" not in report:
        raise FormatError("report must be an object with an 'assignment' array")
    owner = report["assignment"]
    if not isinstance(owner, list) or len(owner) != instance.m:
        raise FormatError(f"assignment must list {instance.m} owners")
    for o in owner:
        if o is not None and (not isinstance(o, int) or isinstance(o, bool) or not 0 <= o < instance.n):
            raise FormatError(f"bad owner {o!r} in assignment")
    return Allocation(UNASSIGNED if o is None else o for o in owner)


def report_inconsistencies(instance: Instance, report: dict) -> list[str]:
    """Fields of ``report`` that disagree with its own assignment."""
    alloc = allocation_from_report(instance, report)
    u = utility_vector(instance, alloc)
    out = []
    if "utilities" in report and [parse_rational(x) for x in report["utilities"]] != list(u):
        out.append("utilities")
    if "profile" in report and [parse_rational(x) for x in report["profile"]] != list(utility_profile(u)):
        out.append("profile")
    if "nsw_product" in report and parse_rational(report["nsw_product"]) != product_of(u).product:
        out.append("nsw_product")
    return out


@dataclass(frozen=True)
class GenSpec:
    """Random instance recipe.

    The heavy set is drawn from numpy's PCG64 seeded with ``seed``: one
    uniform double per (agent, good) pair, agents outer and goods inner; the
    pair is heavy when its draw is below ``density``.
    """

    n: int
    m: int
    p: Fraction
    density: float
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.density <= 1.0:
            raise UsageError(f"density must lie in [0, 1], got {self.density}")
        if self.n < 1 or self.m < 0:
            raise UsageError("need n >= 1 and m >= 0")
        object.__setattr__(self, "p", Fraction(self.p))
        if self.p <= 0:
            raise UsageError("p must be positive")


def generate(spec: GenSpec) -> Instance:
    rng = np.random.Generator(np.random.PCG64(spec.seed & (2**64 - 1)))
    draws = rng.random((spec.n, spec.m))
    agents, goods = np.nonzero(draws < spec.density)
    return Instance(spec.n, spec.m, spec.p, zip(agents.tolist(), goods.tolist()))
