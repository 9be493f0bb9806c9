"""FastAPI application wrapping the core package."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import FermionicError
from . import handlers, schemas

app = FastAPI(
    title="fermicomp",
    version=__version__,
    description=(
        "Fermionic quantum information at desk scale: entropies, typical "
        "subspaces, compression sweeps, and parity-superselection demos."
    ),
)


@app.exception_handler(FermionicError)
async def fermionic_error_handler(request: Request, exc: FermionicError):
    return JSONResponse(
        status_code=422,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/entropy", response_model=schemas.EntropyResponse)
def entropy(request: schemas.EntropyRequest) -> schemas.EntropyResponse:
    return handlers.run_entropy(request)


@app.post("/state/validate", response_model=schemas.StateReport)
def validate_state(payload: schemas.StatePayload) -> schemas.StateReport:
    return handlers.run_state_report(payload)


@app.post("/channel/validate", response_model=schemas.ChannelReport)
def validate_channel(payload: schemas.ChannelPayload) -> schemas.ChannelReport:
    return handlers.run_channel_report(payload)


@app.post("/compress", response_model=schemas.CompressResponse)
def compress(request: schemas.CompressRequest) -> schemas.CompressResponse:
    return handlers.run_compress(request)


@app.post("/converse", response_model=schemas.ConverseResponse)
def converse(request: schemas.ConverseRequest) -> schemas.ConverseResponse:
    return handlers.run_converse(request)


@app.get("/parity-demo", response_model=schemas.ParityDemoResponse)
def parity_demo() -> schemas.ParityDemoResponse:
    return handlers.run_parity_demo()


@app.post("/selftest", response_model=schemas.SelftestResponse)
def selftest(request: schemas.SelftestRequest) -> schemas.SelftestResponse:
    return handlers.run_selftest_request(request)
