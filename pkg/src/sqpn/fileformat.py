"""The .sqpn text format: line-oriented network files.

    network <name>
    node <id> [prior=<p>]
    arc <parent> -> <child> [sign=<+|-|0|?>]
    cpt <child> | <parent,...> { <config>=<p>; ... }    # config like "A,!C"
    synergy <child>=<true|false> (<p1>,<p2>) sign=<+|-|0|?>
    interval <from> -> <to> = [<lo>, <hi>]

'#' starts a comment; a cpt's brace block may span lines.  Config tokens
name each parent once, bare for true and '!'-prefixed for false, and the
probability is Pr(child=true | config).  An ``interval`` statement installs
an externally supplied influence interval for one direction of an arc
(e.g. a reverse influence computed elsewhere), overriding the derived one.

Parsing normalizes cpt parent order to NodeId-ascending, so serializing and
reparsing a document yields an equal document.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .algebra import Interval, Sign
from .model import (
    Arc,
    Cpt,
    Node,
    NODE_ID_RE,
    SqpnError,
    SqpnNetwork,
    SynergyDecl,
    enumerate_configs,
    validate,
)


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.message}"


class SqpnParseError(SqpnError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class NetworkStmt:
    name: str
    line: int = 0
    col: int = 1


@dataclass(frozen=True)
class NodeStmt:
    name: str
    prior: Optional[float] = None
    line: int = 0
    col: int = 1


@dataclass(frozen=True)
class ArcStmt:
    parent: str
    child: str
    sign: Optional[Sign] = None
    line: int = 0
    col: int = 1


@dataclass(frozen=True)
class CptStmt:
    child: str
    parents: tuple[str, ...]  # canonical NodeId-ascending order
    entries: tuple[tuple[tuple, float], ...]  # ((bools...), prob) in binary order
    line: int = 0
    col: int = 1


@dataclass(frozen=True)
class SynergyStmt:
    child: str
    observed_value: bool
    pair: tuple[str, str]
    sign: Sign
    line: int = 0
    col: int = 1


@dataclass(frozen=True)
class IntervalStmt:
    source: str
    target: str
    lo: float
    hi: float
    line: int = 0
    col: int = 1


Statement = Union[NodeStmt, ArcStmt, CptStmt, SynergyStmt, IntervalStmt]


@dataclass
class NetworkDocument:
    name: str
    statements: list[Statement] = field(default_factory=list)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NetworkDocument):
            return NotImplemented
        strip = lambda stmts: [_without_span(s) for s in stmts]
        return self.name == other.name and strip(self.statements) == strip(other.statements)


def _without_span(stmt):
    values = {k: v for k, v in stmt.__dict__.items() if k not in ("line", "col")}
    return (type(stmt).__name__, tuple(sorted(values.items())))


_FLOAT = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_ID = r"[A-Za-z][A-Za-z0-9_]*"

_NETWORK_RE = re.compile(rf"^network\s+({_ID})\s*$")
_NODE_RE = re.compile(rf"^node\s+({_ID})(?:\s+prior\s*=\s*({_FLOAT}))?\s*$")
_ARC_RE = re.compile(rf"^arc\s+({_ID})\s*->\s*({_ID})(?:\s+sign\s*=\s*([+\-0?]))?\s*$")
_CPT_RE = re.compile(rf"^cpt\s+({_ID})\s*\|\s*([^{{}}]*?)\s*\{{(.*)\}}\s*$", re.S)
_SYNERGY_RE = re.compile(
    rf"^synergy\s+({_ID})\s*=\s*(true|false)\s*\(\s*({_ID})\s*,\s*({_ID})\s*\)\s*sign\s*=\s*([+\-0?])\s*$"
)
_INTERVAL_RE = re.compile(
    rf"^interval\s+({_ID})\s*->\s*({_ID})\s*=\s*\[\s*({_FLOAT})\s*,\s*({_FLOAT})\s*\]\s*$"
)


def _strip_comment(line: str) -> str:
    pos = line.find("#")
    return line if pos < 0 else line[:pos]


def _logical_statements(text: str) -> list[tuple[int, int, str]]:
    """(line, col, statement-text) triples; cpt brace blocks are joined."""
    out: list[tuple[int, int, str]] = []
    pending: Optional[tuple[int, int, list[str]]] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        if pending is not None:
            pending[2].append(line.strip())
            if "}" in line:
                start_line, start_col, parts = pending
                out.append((start_line, start_col, " ".join(parts)))
                pending = None
            continue
        stripped = line.strip()
        if not stripped:
            continue
        col = len(line) - len(line.lstrip()) + 1
        if stripped.startswith("cpt") and "{" in stripped and "}" not in stripped:
            pending = (lineno, col, [stripped])
        else:
            out.append((lineno, col, stripped))
    if pending is not None:
        out.append((pending[0], pending[1], " ".join(pending[2]) + " }"))
    return out


def _parse_cpt_body(
    child: str,
    parent_field: str,
    body: str,
    line: int,
    col: int,
    errors: list[Diagnostic],
) -> Optional[CptStmt]:
    declared = [p.strip() for p in parent_field.split(",") if p.strip()]
    if not declared:
        errors.append(Diagnostic(line, col, f"cpt for {child} declares no parents"))
        return None
    for p in declared:
        if not NODE_ID_RE.match(p):
            errors.append(Diagnostic(line, col, f"bad parent id {p!r} in cpt for {child}"))
            return None
    if len(set(declared)) != len(declared):
        errors.append(Diagnostic(line, col, f"duplicate parent in cpt for {child}"))
        return None
    canonical = tuple(sorted(declared))
    entries: dict[tuple, float] = {}
    for chunk in body.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            errors.append(Diagnostic(line, col, f"cpt row {chunk!r} is not <config>=<p>"))
            return None
        cfg_text, _, prob_text = chunk.partition("=")
        try:
            prob = float(prob_text.strip())
        except ValueError:
            errors.append(Diagnostic(line, col, f"bad probability {prob_text.strip()!r} in cpt for {child}"))
            return None
        assignment: dict[str, bool] = {}
        ok = True
        for token in (t.strip() for t in cfg_text.split(",")):
            negated = token.startswith("!")
            name = token[1:].strip() if negated else token
            if name not in declared:
                errors.append(Diagnostic(line, col, f"config token {token!r} is not a declared parent of {child}"))
                ok = False
                break
            if name in assignment:
                errors.append(Diagnostic(line, col, f"parent {name} assigned twice in a config of {child}"))
                ok = False
                break
            assignment[name] = not negated
        if not ok:
            return None
        if len(assignment) != len(declared):
            errors.append(Diagnostic(line, col, f"config {cfg_text.strip()!r} must assign every parent of {child}"))
            return None
        key = tuple(assignment[p] for p in canonical)
        if key in entries:
            errors.append(Diagnostic(line, col, f"duplicate config {cfg_text.strip()!r} in cpt for {child}"))
            return None
        entries[key] = prob
    expected = enumerate_configs(len(canonical))
    if set(entries) != set(expected):
        errors.append(Diagnostic(
            line, col,
            f"cpt for {child} must list all {len(expected)} configs exactly once ({len(entries)} given)",
        ))
        return None
    ordered = tuple((cfg, entries[cfg]) for cfg in expected)
    return CptStmt(child, canonical, ordered, line, col)


def parse_document(text: str) -> NetworkDocument:
    """Parse source text into a document; raises SqpnParseError on bad syntax."""
    errors: list[Diagnostic] = []
    statements: list[Statement] = []
    name: Optional[str] = None
    for line, col, stmt in _logical_statements(text):
        if m := _NETWORK_RE.match(stmt):
            if name is not None:
                errors.append(Diagnostic(line, col, "more than one network declaration"))
            else:
                name = m.group(1)
            continue
        if name is None:
            errors.append(Diagnostic(line, col, "declaration before the network header"))
            # keep parsing to report further problems
        if m := _NODE_RE.match(stmt):
            prior = float(m.group(2)) if m.group(2) is not None else None
            statements.append(NodeStmt(m.group(1), prior, line, col))
        elif m := _ARC_RE.match(stmt):
            sign = Sign.parse(m.group(3)) if m.group(3) else None
            statements.append(ArcStmt(m.group(1), m.group(2), sign, line, col))
        elif m := _CPT_RE.match(stmt):
            parsed = _parse_cpt_body(m.group(1), m.group(2), m.group(3), line, col, errors)
            if parsed is not None:
                statements.append(parsed)
        elif m := _SYNERGY_RE.match(stmt):
            statements.append(SynergyStmt(
                m.group(1), m.group(2) == "true",
                (m.group(3), m.group(4)), Sign.parse(m.group(5)), line, col,
            ))
        elif m := _INTERVAL_RE.match(stmt):
            statements.append(IntervalStmt(
                m.group(1), m.group(2), float(m.group(3)), float(m.group(4)), line, col,
            ))
        else:
            keyword = stmt.split(None, 1)[0]
            errors.append(Diagnostic(line, col, f"cannot parse {keyword!r} statement: {stmt!r}"))
    if name is None:
        errors.append(Diagnostic(1, 1, "no network declared"))
    if errors:
        raise SqpnParseError(errors)
    return NetworkDocument(name, statements)


@dataclass
class ParsedNetwork:
    document: NetworkDocument
    network: SqpnNetwork
    installed: dict[tuple[str, str], Interval]
    warnings: list[Diagnostic]


def build_network(document: NetworkDocument, lenient: bool = False) -> ParsedNetwork:
    """Semantic pass: document to validated network plus installed intervals."""
    errors: list[Diagnostic] = []
    warnings: list[Diagnostic] = []

    node_at: dict[str, NodeStmt] = {}
    priors: dict[str, float] = {}
    for stmt in document.statements:
        if isinstance(stmt, NodeStmt):
            if stmt.name in node_at:
                errors.append(Diagnostic(stmt.line, stmt.col, f"node {stmt.name} declared twice"))
                continue
            node_at[stmt.name] = stmt
            if stmt.prior is not None:
                priors[stmt.name] = stmt.prior

    def known(name: str, stmt) -> bool:
        if name not in node_at:
            errors.append(Diagnostic(stmt.line, stmt.col, f"unknown node {name}"))
            return False
        return True

    arc_at: dict[tuple[str, str], ArcStmt] = {}
    cpts: dict[str, CptStmt] = {}
    synergies: list[SynergyStmt] = []
    installed: dict[tuple[str, str], IntervalStmt] = {}
    for stmt in document.statements:
        if isinstance(stmt, ArcStmt):
            if not (known(stmt.parent, stmt) and known(stmt.child, stmt)):
                continue
            key = (stmt.parent, stmt.child)
            if key in arc_at:
                errors.append(Diagnostic(stmt.line, stmt.col, f"duplicate arc {stmt.parent} -> {stmt.child}"))
                continue
            arc_at[key] = stmt
        elif isinstance(stmt, CptStmt):
            if not known(stmt.child, stmt):
                continue
            if stmt.child in cpts:
                errors.append(Diagnostic(stmt.line, stmt.col, f"node {stmt.child} has two cpts"))
                continue
            if all(known(p, stmt) for p in stmt.parents):
                cpts[stmt.child] = stmt
        elif isinstance(stmt, SynergyStmt):
            if known(stmt.child, stmt) and all(known(p, stmt) for p in stmt.pair):
                synergies.append(stmt)
        elif isinstance(stmt, IntervalStmt):
            if not (known(stmt.source, stmt) and known(stmt.target, stmt)):
                continue
            if not (-1.0 <= stmt.lo <= stmt.hi <= 1.0):
                errors.append(Diagnostic(stmt.line, stmt.col, f"bad interval [{stmt.lo}, {stmt.hi}]"))
                continue
            key = (stmt.source, stmt.target)
            if key in installed:
                errors.append(Diagnostic(stmt.line, stmt.col, f"interval for {stmt.source} -> {stmt.target} given twice"))
                continue
            installed[key] = stmt

    # The either/or property, handled here so --lenient can demote it.
    arcs: list[Arc] = []
    for (parent, child), stmt in arc_at.items():
        sign = stmt.sign
        if sign is not None and child in cpts:
            if lenient:
                warnings.append(Diagnostic(
                    stmt.line, stmt.col,
                    f"sign on quantified node: ignoring sign on {parent} -> {child}",
                ))
                sign = None
            else:
                errors.append(Diagnostic(
                    stmt.line, stmt.col,
                    f"sign on quantified node: {child} has a cpt, so {parent} -> {child} must not carry a sign",
                ))
        arcs.append(Arc(parent, child, sign))

    for (source, target), stmt in installed.items():
        if (source, target) not in arc_at and (target, source) not in arc_at:
            errors.append(Diagnostic(
                stmt.line, stmt.col,
                f"interval {source} -> {target} matches no arc direction",
            ))

    if errors:
        raise SqpnParseError(errors)

    nodes = []
    for name, stmt in node_at.items():
        cpt_stmt = cpts.get(name)
        cpt = Cpt(cpt_stmt.parents, dict(cpt_stmt.entries)) if cpt_stmt else None
        nodes.append(Node(name, prior=priors.get(name), cpt=cpt))
    network = SqpnNetwork(
        nodes,
        arcs,
        [SynergyDecl(s.child, s.observed_value, s.pair, s.sign) for s in synergies],
    )

    for violation in validate(network):
        anchor = node_at.get(violation.subject)
        if anchor is None and "->" in violation.subject:
            pc = tuple(violation.subject.split("->", 1))
            anchor = arc_at.get(pc)
        line = anchor.line if anchor else 1
        col = anchor.col if anchor else 1
        errors.append(Diagnostic(line, col, str(violation)))
    if errors:
        raise SqpnParseError(errors)

    intervals = {key: Interval(s.lo, s.hi) for key, s in installed.items()}
    return ParsedNetwork(document, network, intervals, warnings)


def parse_network(text: str, lenient: bool = False) -> ParsedNetwork:
    """Parse and semantically validate source text."""
    return build_network(parse_document(text), lenient=lenient)


def _fmt(x: float) -> str:
    # Shortest repr: exact float round-trip, which keeps serialization bit-exact.
    return repr(float(x))


def _config_text(parents: tuple[str, ...], config: tuple) -> str:
    return ",".join(p if value else f"!{p}" for p, value in zip(parents, config))


def serialize_document(document: NetworkDocument) -> str:
    lines = [f"network {document.name}"]
    for stmt in document.statements:
        if isinstance(stmt, NodeStmt):
            suffix = f" prior={_fmt(stmt.prior)}" if stmt.prior is not None else ""
            lines.append(f"node {stmt.name}{suffix}")
        elif isinstance(stmt, ArcStmt):
            suffix = f" sign={stmt.sign}" if stmt.sign is not None else ""
            lines.append(f"arc {stmt.parent} -> {stmt.child}{suffix}")
        elif isinstance(stmt, CptStmt):
            rows = "; ".join(
                f"{_config_text(stmt.parents, cfg)}={_fmt(p)}" for cfg, p in stmt.entries
            )
            lines.append(f"cpt {stmt.child} | {','.join(stmt.parents)} {{ {rows} }}")
        elif isinstance(stmt, SynergyStmt):
            value = "true" if stmt.observed_value else "false"
            lines.append(
                f"synergy {stmt.child}={value} ({stmt.pair[0]},{stmt.pair[1]}) sign={stmt.sign}"
            )
        elif isinstance(stmt, IntervalStmt):
            lines.append(
                f"interval {stmt.source} -> {stmt.target} = [{_fmt(stmt.lo)}, {_fmt(stmt.hi)}]"
            )
    return "\n".join(lines) + "\n"


def network_to_document(
    network: SqpnNetwork,
    name: str = "network",
    installed: Optional[dict[tuple[str, str], Interval]] = None,
) -> NetworkDocument:
    """Canonical document for a network: sorted nodes, arcs, cpts, synergies."""
    statements: list[Statement] = []
    for node_name in sorted(network.nodes):
        node = network.node(node_name)
        prior = node.prior
        if node.cpt is not None and not node.cpt.parents:
            prior = node.cpt.entries[()]  # root-with-cpt is just a prior
        statements.append(NodeStmt(node_name, prior))
    for parent, child in sorted(network.arcs):
        statements.append(ArcStmt(parent, child, network.arcs[(parent, child)].sign))
    for node_name in sorted(network.nodes):
        cpt = network.node(node_name).cpt
        if cpt is None or not cpt.parents:
            continue
        entries = tuple((cfg, cpt.entries[cfg]) for cfg in enumerate_configs(len(cpt.parents)))
        statements.append(CptStmt(node_name, cpt.parents, entries))
    for decl in sorted(network.synergies, key=lambda d: (d.child, d.pair, not d.observed_value)):
        statements.append(SynergyStmt(decl.child, decl.observed_value, decl.pair, decl.sign))
    for (source, target), interval in sorted((installed or {}).items()):
        statements.append(IntervalStmt(source, target, interval.lo, interval.hi))
    return NetworkDocument(name, statements)


def serialize_network(
    network: SqpnNetwork,
    name: str = "network",
    installed: Optional[dict[tuple[str, str], Interval]] = None,
) -> str:
    return serialize_document(network_to_document(network, name, installed))
