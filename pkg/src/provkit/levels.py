"""Levels of the arithmetical hierarchy and their inclusion order."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class LevelKind(str, Enum):
    DELTA0 = "Delta0"
    SIGMA = "Sigma"
    PI = "Pi"


@dataclass(frozen=True, order=False)
class Level:
    kind: LevelKind
    index: int = 0

    def __post_init__(self) -> None:
        if self.kind is LevelKind.DELTA0:
            if self.index != 0:
                raise ValueError("Delta0 carries no index")
        elif self.index < 1:
            raise ValueError("Sigma/Pi levels start at index 1")

    def __le__(self, other: Level) -> bool:
        if self.kind is LevelKind.DELTA0:
            return True
        if other.kind is LevelKind.DELTA0:
            return False
        if self.kind is other.kind:
            return self.index <= other.index
        return self.index < other.index

    def __lt__(self, other: Level) -> bool:
        return self != other and self <= other

    def dual(self) -> Level:
        if self.kind is LevelKind.DELTA0:
            return self
        flipped = LevelKind.PI if self.kind is LevelKind.SIGMA else LevelKind.SIGMA
        return Level(flipped, self.index)

    def __str__(self) -> str:
        if self.kind is LevelKind.DELTA0:
            return "Delta0"
        return f"{self.kind.value}{self.index}"

    def to_json(self) -> dict:
        return {"class": self.kind.value, "index": None if self.kind is LevelKind.DELTA0 else self.index}

    @classmethod
    def parse(cls, text: str) -> Level:
        """Read names such as ``Sigma1``, ``pi2``, ``delta0``, ``Σ1``."""
        t = text.strip().replace("Σ", "Sigma").replace("Π", "Pi").replace("Δ", "Delta")
        low = t.lower()
        if low in ("delta0", "sigma0", "pi0", "d0"):
            return DELTA0
        for prefix, kind in (("sigma", LevelKind.SIGMA), ("pi", LevelKind.PI), ("s", LevelKind.SIGMA), ("p", LevelKind.PI)):
            rest = low[len(prefix):]
            if low.startswith(prefix) and rest.isdigit():
                return cls(kind, int(rest))
        raise ValueError(f"unrecognised level {text!r}")


DELTA0 = Level(LevelKind.DELTA0)


def sigma(n: int) -> Level:
    return DELTA0 if n == 0 else Level(LevelKind.SIGMA, n)


def pi(n: int) -> Level:
    return DELTA0 if n == 0 else Level(LevelKind.PI, n)
