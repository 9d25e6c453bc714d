"""Tabular reports: nodes grouped by equal result, deterministic order."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .algebra import Interval, Sign, format_number

_SIGN_ORDER = {Sign.POSITIVE: 0, Sign.NEGATIVE: 1, Sign.ZERO: 2, Sign.AMBIGUOUS: 3}


@dataclass(frozen=True)
class ReportRow:
    nodes: tuple[str, ...]
    label: str


def _group_key(value: Union[Sign, Interval]):
    if isinstance(value, Sign):
        return (_SIGN_ORDER[value],)
    # Strongest effects first: by midpoint sum descending, then upper bound.
    return (-(value.lo + value.hi), -value.hi)


def group_results(per_node: Mapping[str, Union[Sign, Interval]]) -> list[ReportRow]:
    """Merge nodes sharing a result; order groups by result, then first NodeId."""
    groups: dict = {}
    for name in sorted(per_node):
        value = per_node[name]
        key = str(value) if isinstance(value, Sign) else (value.lo, value.hi)
        groups.setdefault(key, [value, []])[1].append(name)
    ordered = sorted(
        groups.values(),
        key=lambda pair: _group_key(pair[0]) + (pair[1][0],),
    )
    return [ReportRow(tuple(names), _label(value)) for value, names in ordered]


def _label(value: Union[Sign, Interval]) -> str:
    if isinstance(value, Sign):
        return str(value)
    return f"[{format_number(value.lo)}, {format_number(value.hi)}]"


def render_table(rows: list[ReportRow], header: tuple[str, str]) -> str:
    lines = ["\t".join(header)]
    for row in rows:
        lines.append(f"{', '.join(row.nodes)}\t{row.label}")
    return "\n".join(lines) + "\n"


def render_result_table(per_node: Mapping[str, Union[Sign, Interval]], kind: str) -> str:
    header = ("nodes", "node sign" if kind == "signs" else "node interval")
    return render_table(group_results(per_node), header)
