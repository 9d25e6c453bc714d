"""Request and response models for the inference service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class NetworkRequest(BaseModel):
    """Base request: the network is posted as .sqpn source text."""

    network: str
    lenient: bool = False


class DiagnosticModel(BaseModel):
    line: int
    col: int
    message: str


class ViolationModel(BaseModel):
    code: str
    subject: str
    message: str


class ValidateResponse(BaseModel):
    valid: bool
    violations: list[ViolationModel]
    warnings: list[DiagnosticModel] = []


class ArcSignModel(BaseModel):
    parent: str
    child: str
    sign: str


class AbstractResponse(BaseModel):
    influences: list[ArcSignModel]


class IntervalModel(BaseModel):
    lo: float
    hi: float


class InfluenceModel(BaseModel):
    source: str
    target: str
    lo: float
    hi: float
    origin: str
    direction: str  # "forward" or "reverse"


class IntercausalModel(BaseModel):
    child: str
    observed_value: bool
    parents: tuple[str, str]
    lo: float
    hi: float


class IntervalsResponse(BaseModel):
    influences: list[InfluenceModel]
    intercausal: list[IntercausalModel]


class ObserveModel(BaseModel):
    node: str
    value: bool


class PropagateRequest(NetworkRequest):
    observe: ObserveModel
    algorithm: str = Field(default="intervals", pattern="^(signs|intervals)$")
    mode: str = Field(default="maximal", pattern="^(exact|maximal|ignorant)$")
    evidence: dict[str, bool] = {}
    m: Optional[int] = Field(default=None, ge=1)
    strength: Optional[IntervalModel] = None


class NodeResultModel(BaseModel):
    sign: Optional[str] = None
    lo: Optional[float] = None
    hi: Optional[float] = None


class PropagateResponse(BaseModel):
    algorithm: str
    observed: str
    per_node: dict[str, NodeResultModel]
    visits: dict[str, int]
    changes: dict[str, int]
    collapsed: list[str]
    messages: int
    entry_mode: Optional[str] = None


class ResolveRequest(NetworkRequest):
    source: str
    target: str
    sign_abstraction: bool = False


class ResolveResponse(BaseModel):
    lo: float
    hi: float
    removed: list[str]
    resolved: bool


class OracleRequest(NetworkRequest):
    target: str
    evidence: dict[str, bool] = {}


class OracleResponse(BaseModel):
    target: str
    probability: float


class AuditRequest(NetworkRequest):
    trials: int = Field(default=100, ge=1)
    seed: Optional[int] = None


class AuditRowModel(BaseModel):
    trial: int
    observed: str
    value: bool
    target: str
    delta: float
    lo: float
    hi: float
    contained: bool


class AuditResponse(BaseModel):
    rows: list[AuditRowModel]
    containment_rate: float


class ErrorResponse(BaseModel):
    detail: str
    diagnostics: list[DiagnosticModel] = []
