"""Group keys: the subgroup coordinates an audit slices on.

A key is an ordered tuple of ``(dimension, category)`` pairs, so composite
keys such as (producer group, consumer group) are first-class. Keys render
canonically as ``"dim1=val1|dim2=val2"`` and parse back from that form.
"""

from __future__ import annotations

from dataclasses import dataclass

_RESERVED = ("|", "=")


def check_category_value(value: str) -> str:
    """Reject category labels that would break the canonical rendering."""
    for ch in _RESERVED:
        if ch in value:
            raise ValueError(
                f"group names and categories may not contain {ch!r}: {value!r}"
            )
    return value


@dataclass(frozen=True)
class GroupKey:
    """Immutable, hashable subgroup identifier.

    Parameters
    ----------
    dims : tuple of (str, str)
        Ordered ``(dimension, category)`` pairs. Dimension names must be
        unique within a key.
    """

    dims: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if not self.dims:
            raise ValueError("GroupKey requires at least one dimension")
        names = [d for d, _ in self.dims]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate dimension names in group key: {names}")
        for name, value in self.dims:
            check_category_value(str(name))
            check_category_value(str(value))

    @classmethod
    def single(cls, dimension: str, category: str) -> "GroupKey":
        return cls(((str(dimension), str(category)),))

    @classmethod
    def from_pairs(cls, pairs) -> "GroupKey":
        """Build from an iterable of pairs or a mapping."""
        if hasattr(pairs, "items"):
            pairs = pairs.items()
        return cls(tuple((str(d), str(v)) for d, v in pairs))

    @classmethod
    def parse(cls, text: str) -> "GroupKey":
        """Inverse of :meth:`render`, e.g. ``"region=a|age=young"``."""
        pairs = []
        for part in text.split("|"):
            if "=" not in part:
                raise ValueError(f"cannot parse group key segment {part!r}")
            dim, _, value = part.partition("=")
            pairs.append((dim.strip(), value.strip()))
        return cls.from_pairs(pairs)

    @property
    def dimensions(self) -> tuple[str, ...]:
        return tuple(d for d, _ in self.dims)

    def get(self, dimension: str) -> str:
        for name, value in self.dims:
            if name == dimension:
                return value
        raise KeyError(dimension)

    def project(self, dimensions) -> "GroupKey":
        """Restrict the key to the named dimensions, in the order given."""
        return GroupKey(tuple((d, self.get(d)) for d in dimensions))

    def render(self) -> str:
        return "|".join(f"{d}={v}" for d, v in self.dims)

    def __str__(self) -> str:
        return self.render()
