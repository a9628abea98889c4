"""``key = value`` configuration files.

Blank lines and ``#`` comments are ignored; a key may appear once.  Values
stay strings here and are converted by the consumer, which also rejects
unknown keys.
"""

from __future__ import annotations

from pathlib import Path

from .errors import DomainError
from .gmx import MixtureDensity


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise DomainError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        if key in out:
            raise DomainError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def read_config(path) -> dict[str, str]:
    return parse_config_text(Path(path).read_text(encoding="utf-8"), str(path))


def check_keys(cfg: dict, allowed, source: str = "config") -> None:
    unknown = sorted(set(cfg) - set(allowed))
    if unknown:
        raise DomainError(f"{source}: unknown key(s) {', '.join(unknown)}")


def parse_theta(text: str) -> list[tuple[float, float]]:
    """``"mu:sigma, mu:sigma"`` -> list of pairs."""
    pairs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != 2:
            raise DomainError(f"expected mu:sigma, got {item!r}")
        try:
            pairs.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise DomainError(f"expected mu:sigma, got {item!r}") from None
    if not pairs:
        raise DomainError("empty component list")
    return pairs


def parse_truth(text: str) -> MixtureDensity:
    """``"w:mu:sigma, w:mu:sigma"`` -> mixture density."""
    triples = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != 3:
            raise DomainError(f"expected weight:mu:sigma, got {item!r}")
        try:
            triples.append(tuple(float(p) for p in parts))
        except ValueError:
            raise DomainError(f"expected weight:mu:sigma, got {item!r}") from None
    if not triples:
        raise DomainError("empty mixture specification")
    total = sum(t[0] for t in triples)
    if any(t[0] < 0 for t in triples) or abs(total - 1.0) > 1e-9:
        raise DomainError(f"mixture weights must be non-negative and sum to 1, got {total}")
    return MixtureDensity.from_triples(triples)


def format_truth(m: MixtureDensity) -> str:
    return ", ".join(
        f"{w!r}:{c.mu!r}:{c.sigma!r}" for w, c in zip(m.weights.weights, m.params)
    )


def parse_list(text: str, conv=str) -> list:
    return [conv(p.strip()) for p in text.split(",") if p.strip()]
