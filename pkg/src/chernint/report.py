"""Structured check reports and the seeded case generator."""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

#: recorded in every report so the seed -> case mapping can be replayed
GENERATOR = "numpy Philox4x64 keyed by SeedSequence([seed, crc32(stream), *case_key])"


def case_rng(seed: int, stream: str, *key: int) -> np.random.Generator:
    """Independent generator for one case of one named stream."""
    # negative keys (e.g. Adams degrees) as 64-bit two's complement
    words = [int(k) % 2**64 for k in (seed, *key)]
    ss = np.random.SeedSequence([words[0], zlib.crc32(stream.encode()), *words[1:]])
    return np.random.Generator(np.random.Philox(ss))


def rand_int(rng: np.random.Generator, lo: int, hi: int) -> int:
    """Uniform integer in [lo, hi] as a Python int."""
    return int(rng.integers(lo, hi + 1))


@dataclass
class CheckReport:
    check: str
    params: dict = field(default_factory=dict)
    cases: int = 0
    failures: list = field(default_factory=list)
    seed: int = 0
    elapsed_ms: float = 0.0
    data: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def status(self) -> str:
        return "ok" if not self.failures else "fail"

    @property
    def ok(self) -> bool:
        return not self.failures

    def case(self, passed: bool, key: str, lhs=None, rhs=None, **extra) -> bool:
        self.cases += 1
        if not passed:
            item = {"case": key}
            if lhs is not None:
                item["lhs"] = str(lhs)
            if rhs is not None:
                item["rhs"] = str(rhs)
            item.update({k: str(v) for k, v in extra.items()})
            self.failures.append(item)
        return passed

    def merge(self, other: "CheckReport") -> "CheckReport":
        self.cases += other.cases
        self.failures.extend(other.failures)
        self.data.extend(other.data)
        self.notes.extend(n for n in other.notes if n not in self.notes)
        return self

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "check": self.check,
            "params": self.params,
            "cases": self.cases,
            "failures": sorted(self.failures, key=lambda f: f["case"]),
            "status": self.status,
            "seed": self.seed,
            "generator": GENERATOR,
        }
        if self.notes:
            out["notes"] = self.notes
        if timing:
            out["elapsed_ms"] = round(self.elapsed_ms, 3)
        return out

    def summary(self) -> str:
        return f"{self.check}: {self.status} ({self.cases} cases, {len(self.failures)} failures)"
