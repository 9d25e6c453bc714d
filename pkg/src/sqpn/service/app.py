"""HTTP service exposing the network operations.

Stateless by design: every request carries the network source text, which
keeps responses a pure function of the request.  Parse and validation
problems come back as 422 with positioned diagnostics; other domain errors
(zero-probability evidence, unresolvable preconditions) as 400.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..abstraction import IntervalNetwork, abstract_cpt_to_sign, build_interval_network
from ..algebra import Interval, Sign
from ..fileformat import ParsedNetwork, SqpnParseError, parse_network
from ..model import SqpnError, validate
from ..oracle import containment_rate, posterior, resolve_tradeoff, soundness_report
from ..propagate import (
    Observation,
    PropagationConfig,
    apply_strength,
    entry_interval,
    propagate_intervals,
    propagate_signs,
)
from . import schemas

app = FastAPI(
    title="sqpn",
    description="Semi-qualitative probabilistic network inference",
    version="0.1.0",
)


@app.exception_handler(SqpnParseError)
async def _parse_error(_request: Request, exc: SqpnParseError) -> JSONResponse:
    return JSONResponse(
        status_code=422,
        content={
            "detail": "network text is not valid",
            "diagnostics": [
                {"line": d.line, "col": d.col, "message": d.message}
                for d in exc.diagnostics
            ],
        },
    )


@app.exception_handler(SqpnError)
async def _domain_error(_request: Request, exc: SqpnError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc), "diagnostics": []})


def _load(request: schemas.NetworkRequest) -> ParsedNetwork:
    return parse_network(request.network, lenient=request.lenient)


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/validate", response_model=schemas.ValidateResponse)
def validate_endpoint(request: schemas.NetworkRequest) -> schemas.ValidateResponse:
    try:
        parsed = _load(request)
    except SqpnParseError as exc:
        # Validation reports problems instead of failing the request.
        return schemas.ValidateResponse(
            valid=False,
            violations=[
                schemas.ViolationModel(code="parse", subject=f"{d.line}:{d.col}", message=d.message)
                for d in exc.diagnostics
            ],
        )
    violations = validate(parsed.network)
    return schemas.ValidateResponse(
        valid=not violations,
        violations=[
            schemas.ViolationModel(code=v.code, subject=v.subject, message=v.message)
            for v in violations
        ],
        warnings=[
            schemas.DiagnosticModel(line=w.line, col=w.col, message=w.message)
            for w in parsed.warnings
        ],
    )


@app.post("/abstract", response_model=schemas.AbstractResponse)
def abstract_endpoint(request: schemas.NetworkRequest) -> schemas.AbstractResponse:
    parsed = _load(request)
    network = parsed.network
    influences = []
    for (parent, child) in sorted(network.arcs):
        arc = network.arcs[(parent, child)]
        sign = abstract_cpt_to_sign(network, arc) if network.node(child).cpt else arc.sign
        influences.append(schemas.ArcSignModel(parent=parent, child=child, sign=str(sign)))
    return schemas.AbstractResponse(influences=influences)


def _interval_network(parsed: ParsedNetwork) -> IntervalNetwork:
    return build_interval_network(parsed.network, installed=parsed.installed)


@app.post("/intervals", response_model=schemas.IntervalsResponse)
def intervals_endpoint(request: schemas.NetworkRequest) -> schemas.IntervalsResponse:
    parsed = _load(request)
    inet = _interval_network(parsed)
    influences = []
    for (source, target) in sorted(inet.influences):
        inf = inet.influences[(source, target)]
        direction = "forward" if (source, target) in parsed.network.arcs else "reverse"
        influences.append(schemas.InfluenceModel(
            source=source, target=target,
            lo=inf.interval.lo, hi=inf.interval.hi,
            origin=inf.origin, direction=direction,
        ))
    intercausal = [
        schemas.IntercausalModel(
            child=child, observed_value=value, parents=pair, lo=iv.lo, hi=iv.hi,
        )
        for (child, value, pair), iv in sorted(
            inet.intercausal.items(), key=lambda kv: (kv[0][0], kv[0][2], not kv[0][1])
        )
    ]
    return schemas.IntervalsResponse(influences=influences, intercausal=intercausal)


@app.post("/propagate", response_model=schemas.PropagateResponse)
def propagate_endpoint(request: schemas.PropagateRequest) -> schemas.PropagateResponse:
    parsed = _load(request)
    network = parsed.network
    observe = request.observe
    if request.algorithm == "signs":
        sign = Sign.POSITIVE if observe.value else Sign.NEGATIVE
        result = propagate_signs(network, request.evidence, observe.node, sign)
        per_node = {n: schemas.NodeResultModel(sign=str(s)) for n, s in result.per_node.items()}
    else:
        if request.mode == "exact":
            from ..oracle import JointTable

            node = network.node(observe.node)
            if node.prior is not None:
                prior = node.prior
            else:
                ancestors = _ancestor_closure(network, observe.node)
                sub = _subnetwork(network, ancestors)
                prior = JointTable(sub).marginals({})[observe.node]
            strength = entry_interval(observe.value, prior, "exact")
        else:
            strength = entry_interval(observe.value, None, request.mode)
        inet = _interval_network(parsed)
        result = propagate_intervals(
            inet,
            request.evidence,
            Observation(observe.node, observe.value, strength),
            PropagationConfig(m=request.m),
            entry_mode=request.mode,
        )
        if request.strength is not None:
            result = apply_strength(result, Interval(request.strength.lo, request.strength.hi))
        per_node = {
            n: schemas.NodeResultModel(lo=iv.lo, hi=iv.hi) for n, iv in result.per_node.items()
        }
    return schemas.PropagateResponse(
        algorithm=result.algorithm,
        observed=result.observed,
        per_node=per_node,
        visits=result.visits,
        changes=result.changes,
        collapsed=sorted(result.collapsed),
        messages=result.messages,
        entry_mode=result.entry_mode,
    )


def _ancestor_closure(network, node: str) -> set[str]:
    closure = {node}
    frontier = [node]
    while frontier:
        current = frontier.pop()
        for parent in network.parents_of(current):
            if parent not in closure:
                closure.add(parent)
                frontier.append(parent)
    return closure


def _subnetwork(network, names: set[str]):
    from ..model import SqpnNetwork

    nodes = [network.node(n) for n in sorted(names)]
    arcs = [arc for (p, c), arc in network.arcs.items() if p in names and c in names]
    return SqpnNetwork(nodes, arcs)


@app.post("/resolve", response_model=schemas.ResolveResponse)
def resolve_endpoint(request: schemas.ResolveRequest) -> schemas.ResolveResponse:
    parsed = _load(request)
    outcome = resolve_tradeoff(
        parsed.network, request.source, request.target,
        sign_abstraction=request.sign_abstraction,
    )
    return schemas.ResolveResponse(
        lo=outcome.net_influence.lo,
        hi=outcome.net_influence.hi,
        removed=outcome.removed_nodes,
        resolved=outcome.resolved,
    )


@app.post("/oracle", response_model=schemas.OracleResponse)
def oracle_endpoint(request: schemas.OracleRequest) -> schemas.OracleResponse:
    parsed = _load(request)
    probability = posterior(parsed.network, request.evidence, request.target)
    return schemas.OracleResponse(target=request.target, probability=probability)


@app.post("/audit", response_model=schemas.AuditResponse)
def audit_endpoint(request: schemas.AuditRequest) -> schemas.AuditResponse:
    parsed = _load(request)
    rows = soundness_report(parsed.network, request.trials, seed=request.seed)
    return schemas.AuditResponse(
        rows=[
            schemas.AuditRowModel(
                trial=r.trial, observed=r.observed, value=r.value, target=r.target,
                delta=r.delta, lo=r.lo, hi=r.hi, contained=r.contained,
            )
            for r in rows
        ],
        containment_rate=containment_rate(rows),
    )
