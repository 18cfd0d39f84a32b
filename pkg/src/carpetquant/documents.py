"""JSON codebook documents with exact ``"p/q"`` coordinates."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import InputError
from .geometry import Codebook
from .optimal import decompose

__all__ = ["PROVENANCES", "CodebookDocument", "fraction_str", "parse_fraction"]

PROVENANCES = ("constructed", "lloyd", "file")


def fraction_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(text) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise InputError(f"expected a rational string like '5/6', got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"cannot parse {text!r} as a rational") from None


@dataclass
class CodebookDocument:
    codebook: Codebook
    provenance: str = "constructed"
    t: tuple[str, ...] = ()
    variants: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise InputError(f"provenance must be one of {PROVENANCES}")

    @property
    def n(self) -> int:
        return len(self.codebook)

    def decomposition(self) -> dict:
        if self.n < 4:
            return {"level": 0, "m": self.n, "k": 0, "t": []}
        d = decompose(self.n)
        # t is only known for constructed sets
        t = list(self.t) if self.t or d.k == 0 else None
        return {"level": d.level, "m": d.m, "k": d.k, "t": t}

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "decomposition": self.decomposition(),
            "variants": dict(sorted(self.variants.items())),
            "points": [[fraction_str(x), fraction_str(y)] for x, y in self.codebook],
            "provenance": self.provenance,
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict, provenance: str = "file") -> "CodebookDocument":
        try:
            raw = data["points"]
        except (KeyError, TypeError):
            raise InputError("a codebook document needs a 'points' list") from None
        if not isinstance(raw, list) or not all(isinstance(p, list) and len(p) == 2 for p in raw):
            raise InputError("'points' must be a list of [x, y] pairs")
        codebook = Codebook((parse_fraction(x), parse_fraction(y)) for x, y in raw)
        if "n" in data and data["n"] != len(codebook):
            raise InputError(f"document says n={data['n']} but lists {len(codebook)} points")
        dec = data.get("decomposition") or {}
        return cls(
            codebook,
            provenance=provenance,
            t=tuple(dec.get("t") or ()),
            variants={str(w): int(v) for w, v in (data.get("variants") or {}).items()},
        )

    @classmethod
    def from_json(cls, text: str, provenance: str = "file") -> "CodebookDocument":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from None
        # accept the envelope written by `carpetquant optimal` too
        if isinstance(data, dict) and "documents" in data:
            docs = data["documents"]
            if len(docs) != 1:
                raise InputError(f"expected one codebook document, found {len(docs)}")
            data = docs[0]
        return cls.from_dict(data, provenance)
