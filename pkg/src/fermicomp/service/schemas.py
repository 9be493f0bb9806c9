"""Pydantic request/response models shared by the HTTP routes and the CLI."""

from __future__ import annotations

from typing import Annotated

from pydantic import BaseModel, Field

Copies = Annotated[int, Field(ge=1)]


class MatrixPayload(BaseModel):
    data: list[tuple[float, float]]
    dim: int | None = None
    rows: int | None = None
    cols: int | None = None


class StatePayload(BaseModel):
    modes: int = Field(ge=1, le=16)
    matrix: MatrixPayload


class ChannelPayload(BaseModel):
    in_modes: int = Field(ge=1, le=10)
    out_modes: int | None = None
    deterministic: bool = True
    kraus: list[MatrixPayload]


class EntropyRequest(BaseModel):
    state: StatePayload


class EntropyResponse(BaseModel):
    entropy_bits: float
    spectrum: list[float]
    parities: list[str]


class StateReport(BaseModel):
    valid: bool
    modes: int
    trace: float
    parity_residual: float
    min_eigenvalue: float
    hermiticity_deviation: float
    error: str | None = None
    detail: str | None = None


class ChannelReport(BaseModel):
    valid: bool
    in_modes: int
    out_modes: int
    deterministic: bool
    kraus_parities: list[str] = []
    error: str | None = None
    detail: str | None = None


class CompressRequest(BaseModel):
    state: StatePayload
    epsilon: float = Field(gt=0)
    n_grid: list[Copies] = Field(min_length=1)
    seed: int = 0
    dense_cap: int = Field(default=10, ge=0, le=10)


class CompressRow(BaseModel):
    n: int
    epsilon: float
    target_modes: int
    rate: float
    typical_mass: float
    fidelity: float
    delta: float
    dense_checked: bool


class CompressResponse(BaseModel):
    seed: int
    rows: list[CompressRow]


class ConverseRequest(BaseModel):
    state: StatePayload
    rate: float = Field(gt=0)
    n_grid: list[Copies] = Field(min_length=1)
    seed: int = 0


class ConverseRow(BaseModel):
    n: int
    rate: float
    best_mass: float
    fidelity_bound: float


class ConverseResponse(BaseModel):
    seed: int
    rows: list[ConverseRow]


class ParityDemoResponse(BaseModel):
    grid_points: int
    local_residual: float
    extended_trace_distance: float
    entanglement_fidelity: float
    verdict: str


class SelftestRequest(BaseModel):
    dense_cap: int = Field(default=10, ge=2, le=10)
    seed: int = 0


class SuiteOutcome(BaseModel):
    name: str
    passed: bool
    detail: str


class SelftestResponse(BaseModel):
    passed: bool
    seed: int
    suites: list[SuiteOutcome]
