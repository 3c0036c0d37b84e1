"""NL-STL pair records and their JSON Lines serialization.

Dataset, review-queue and decision files all use UTF-8 JSON Lines with the
stable field names documented in the README.  Writes go through a
temp-file-plus-rename so a crash never leaves a half-written store.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from stlkit.errors import StoreFormatError
from stlkit.stl.ast import Formula
from stlkit.stl.parser import parse
from stlkit.stl.printer import format_formula

STATUSES = ("seed", "candidate", "accepted", "rejected")
SOURCES = ("handcrafted", "generated")


@dataclass(frozen=True)
class NLSTLPair:
    id: str
    nl: str
    stl: str
    domain: str = "other"
    source: str = "handcrafted"
    round: int = 0
    status: str = "seed"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise StoreFormatError(f"pair {self.id!r}: unknown status {self.status!r}")
        if self.source not in SOURCES:
            raise StoreFormatError(f"pair {self.id!r}: unknown source {self.source!r}")

    def formula(self) -> Formula:
        return parse(self.stl)

    def canonicalized(self) -> "NLSTLPair":
        """Copy with the formula text in canonical form."""
        return replace(self, stl=format_formula(parse(self.stl)))

    def with_status(self, status: str) -> "NLSTLPair":
        return replace(self, status=status)

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "nl": self.nl,
            "stl": self.stl,
            "domain": self.domain,
            "source": self.source,
            "round": self.round,
            "status": self.status,
        }
        if self.meta:
            d["meta"] = self.meta
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "NLSTLPair":
        try:
            return cls(
                id=str(d["id"]),
                nl=str(d["nl"]),
                stl=str(d["stl"]),
                domain=str(d.get("domain", "other")),
                source=str(d.get("source", "handcrafted")),
                round=int(d.get("round", 0)),
                status=str(d.get("status", "seed")),
                meta=dict(d.get("meta", {})),
            )
        except KeyError as e:
            raise StoreFormatError(f"pair record missing field {e}") from None


@dataclass(frozen=True)
class ReviewDecision:
    pair_id: str
    verdict: str  # "accept" | "reject"
    reason: str = ""
    reviewer: str = ""

    def __post_init__(self):
        if self.verdict not in ("accept", "reject"):
            raise StoreFormatError(f"unknown verdict {self.verdict!r}")

    def to_dict(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "verdict": self.verdict,
            "reason": self.reason,
            "reviewer": self.reviewer,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReviewDecision":
        try:
            return cls(
                pair_id=str(d["pair_id"]),
                verdict=str(d["verdict"]),
                reason=str(d.get("reason", "")),
                reviewer=str(d.get("reviewer", "")),
            )
        except KeyError as e:
            raise StoreFormatError(f"decision record missing field {e}") from None


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write a file via temp-and-rename in the destination directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonl(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in records)


def write_pairs(path: str | Path, pairs: Iterable[NLSTLPair]) -> None:
    atomic_write_text(path, _jsonl(p.to_dict() for p in pairs))


def read_pairs(path: str | Path) -> list[NLSTLPair]:
    return [NLSTLPair.from_dict(d) for d in _read_jsonl(path)]


def write_decisions(path: str | Path, decisions: Iterable[ReviewDecision]) -> None:
    atomic_write_text(path, _jsonl(d.to_dict() for d in decisions))


def read_decisions(path: str | Path) -> list[ReviewDecision]:
    return [ReviewDecision.from_dict(d) for d in _read_jsonl(path)]


def load_bundled_seeds() -> list[NLSTLPair]:
    """The 40-pair handcrafted seed corpus shipped with the package."""
    from importlib import resources

    text = resources.files("stlkit").joinpath("data/seeds.jsonl").read_text(encoding="utf-8")
    pairs = []
    for line in text.splitlines():
        if line.strip():
            pairs.append(NLSTLPair.from_dict(json.loads(line)))
    return pairs


def _read_jsonl(path: str | Path) -> list[dict]:
    out: list[dict] = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise StoreFormatError(f"{path}:{lineno}: invalid JSON: {e}") from None
            if not isinstance(record, dict):
                raise StoreFormatError(f"{path}:{lineno}: expected a JSON object")
            out.append(record)
    return out
