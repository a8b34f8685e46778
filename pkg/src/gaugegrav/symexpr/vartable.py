"""Tables of named indeterminates with role tags."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

ROLES = ("chart", "fiber", "jet", "ghost", "antifield", "param")


@dataclass(frozen=True)
class VarInfo:
    name: str
    role: str = "chart"
    base: str | None = None
    # derivative directions, stored sorted
    multi_index: tuple = ()
    # Grassmann parity; ghosts are odd, antifields carry their own parity
    odd: bool = False

    def __post_init__(self):
        if not IDENT_RE.match(self.name):
            raise ValueError(f"invalid identifier {self.name!r}")
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        object.__setattr__(self, "multi_index", tuple(sorted(self.multi_index)))


class VarTable:
    """Ordered collection of unique indeterminate names.

    >>> t = VarTable(["x0", "x1"])
    >>> "x1" in t
    True
    """

    def __init__(self, entries: Iterable = ()):
        self._info: dict[str, VarInfo] = {}
        for e in entries:
            self.add(e)

    def add(self, entry, role: str = "chart", base: str | None = None, multi_index: tuple = (),
            odd: bool | None = None) -> VarInfo:
        if isinstance(entry, VarInfo):
            info = entry
        else:
            if odd is None:
                odd = role == "ghost"
            info = VarInfo(entry, role, base, tuple(multi_index), odd)
        if info.name in self._info:
            raise ValueError(f"duplicate indeterminate {info.name!r}")
        self._info[info.name] = info
        return info

    def extend(self, names: Iterable[str], role: str = "chart") -> "VarTable":
        for n in names:
            self.add(n, role)
        return self

    def merged(self, other: "VarTable") -> "VarTable":
        out = VarTable(self._info.values())
        for info in other:
            if info.name not in out:
                out.add(info)
        return out

    def __contains__(self, name) -> bool:
        return name in self._info

    def __iter__(self) -> Iterator[VarInfo]:
        return iter(self._info.values())

    def __len__(self) -> int:
        return len(self._info)

    def __getitem__(self, name: str) -> VarInfo:
        return self._info[name]

    @property
    def names(self) -> list[str]:
        return list(self._info)

    def by_role(self, role: str) -> list[str]:
        return [n for n, i in self._info.items() if i.role == role]

    def check_even(self, names: Iterable[str]) -> None:
        """Raise if any name is tagged as an odd variable."""
        for n in names:
            info = self._info.get(n)
            if info is not None and info.odd:
                raise ValueError(f"odd variable {n!r} outside a graded polynomial")

    def __repr__(self):
        return f"VarTable({self.names})"
