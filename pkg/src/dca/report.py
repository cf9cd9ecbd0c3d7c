"""Reports: claims with expected and computed values, serialized deterministically."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

PROVENANCE = ("published", "derived", "computed", "trivial")


@dataclass
class Claim:
    id: str
    expected: Any
    computed: Any
    provenance: str
    passed: bool

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "expected": self.expected,
            "computed": self.computed,
            "provenance": self.provenance,
            "pass": bool(self.passed),
        }


@dataclass
class Report:
    command: str
    claims: list[Claim] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def claim(self, cid: str, expected, computed, provenance: str, passed: bool) -> Claim:
        if provenance not in PROVENANCE:
            raise ValueError(f"unknown provenance {provenance!r}")
        c = Claim(cid, expected, computed, provenance, bool(passed))
        self.claims.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def extend(self, other: "Report") -> None:
        self.claims.extend(other.claims)
        for k, v in other.data.items():
            self.data[f"{other.command}:{k}"] = v

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "claims": [c.as_dict() for c in self.claims],
            "data": self.data,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return dumps(self.as_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "expected", "computed", "provenance", "pass"])
        for c in self.claims:
            w.writerow([c.id, _plain(c.expected), _plain(c.computed), c.provenance, c.passed])
        return buf.getvalue()

    def lines(self) -> list[str]:
        return [f"{'PASS' if c.passed else 'FAIL'}  {c.id}: expected {_plain(c.expected)}, got {_plain(c.computed)}" for c in self.claims]


def _default(obj):
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else obj.numerator
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, tuple):
        return list(obj)
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _plain(x) -> str:
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (list, dict)):
        return json.dumps(x, sort_keys=True, default=_default)
    return str(x)


def schema(name: str = "report") -> dict:
    """The published JSON Schema for reports (``report``) or surfaces (``surface``)."""
    from importlib.resources import files

    return json.loads(files("dca").joinpath("schemas", f"{name}.schema.json").read_text())


def dumps(obj) -> str:
    """JSON with sorted keys; floats use the shortest round-trip repr."""
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"
