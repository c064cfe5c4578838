"""IP-sets: all finite sums of generators with distinct indices."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .errors import ConfigError

RULES = ("geometric", "arithmetic", "explicit")


@dataclass(frozen=True)
class IPSetSpec:
    """Generator sequence p_1, p_2, ... of an IP-set.

    ``geometric`` yields start·base^(i-1), ``arithmetic`` yields start + (i-1)·step,
    and ``explicit`` is a finite list (repeated values are distinct terms).
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in RULES:
            raise ConfigError(f"unknown IP-set kind {self.kind!r}; expected one of {RULES}")
        p = self.params
        if self.kind == "geometric":
            base, start = p.get("base"), p.get("start", p.get("base"))
            if not _posint(base) or base < 2 or not _posint(start):
                raise ConfigError("geometric IP-set needs integer base >= 2 and start >= 1")
            object.__setattr__(self, "params", {"base": base, "start": start})
        elif self.kind == "arithmetic":
            start, step = p.get("start"), p.get("step")
            if not _posint(start) or not _posint(step):
                raise ConfigError("arithmetic IP-set needs integer start >= 1 and step >= 1")
        else:
            gens = p.get("generators")
            if not isinstance(gens, (list, tuple)) or not gens or not all(_posint(g) for g in gens):
                raise ConfigError("explicit IP-set needs a nonempty list of positive integers")

    @classmethod
    def geometric(cls, base: int, start: int | None = None) -> "IPSetSpec":
        return cls("geometric", {"base": base, "start": base if start is None else start})

    @classmethod
    def arithmetic(cls, start: int, step: int) -> "IPSetSpec":
        return cls("arithmetic", {"start": start, "step": step})

    @classmethod
    def explicit(cls, generators) -> "IPSetSpec":
        return cls("explicit", {"generators": [int(g) for g in generators]})

    @classmethod
    def from_dict(cls, d: dict) -> "IPSetSpec":
        if not isinstance(d, dict) or "kind" not in d:
            raise ConfigError("IP-set spec needs a 'kind'")
        params = d.get("params", {})
        if params is None:
            params = {}
        if not isinstance(params, dict):
            raise ConfigError("IP-set 'params' must be an object")
        return cls(d["kind"], dict(params))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}

    def generators(self, limit: int) -> Iterator[int]:
        """Generators p_i <= limit in index order."""
        p = self.params
        if self.kind == "explicit":
            yield from (g for g in p["generators"] if g <= limit)
        elif self.kind == "geometric":
            g = p["start"]
            while g <= limit:
                yield g
                g *= p["base"]
        else:
            g = p["start"]
            while g <= limit:
                yield g
                g += p["step"]


def _posint(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool) and v >= 1


def ip_enumerate(spec: IPSetSpec, limit: int) -> list[int]:
    """All IP-set elements <= limit, ascending.

    Sums are accumulated as a set of reachable totals, adding each generator
    at most once, which is exactly the distinct-index condition.
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    reach = {0}
    for g in spec.generators(limit):
        reach |= {s + g for s in reach if s + g <= limit}
    reach.discard(0)
    return sorted(reach)


def ip_contains(spec: IPSetSpec, n: int) -> bool:
    if n < 1:
        raise ValueError("n must be >= 1")
    gens = sorted(spec.generators(n), reverse=True)
    suffix = [0] * (len(gens) + 1)
    for i in range(len(gens) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + gens[i]
    seen = set()

    def dfs(i: int, rest: int) -> bool:
        if rest == 0:
            return True
        if i == len(gens) or suffix[i] < rest or (i, rest) in seen:
            return False
        seen.add((i, rest))
        if gens[i] <= rest and dfs(i + 1, rest - gens[i]):
            return True
        return dfs(i + 1, rest)

    return dfs(0, n)
