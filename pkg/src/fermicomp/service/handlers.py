"""Pure request -> response handlers.

The FastAPI routes and the CLI are both thin clients of these functions;
domain errors (FermionicError subclasses) propagate and the caller maps them
to HTTP 422 or exit code 2.
"""

from __future__ import annotations

import numpy as np

from .. import io
from ..channels import (
    apply,
    entanglement_fidelity,
    identity_channel,
    new_channel,
    parallel_compose,
    parity_channel,
)
from ..compression import (
    build_scheme,
    converse_scheme_fidelity,
    scheme_fidelity,
    scheme_fidelity_dense,
)
from ..errors import FermionicError
from ..linalg import trace_norm
from ..selftest import run_selftest
from ..states import FermionicState, new_state, pure_state, validation_report
from ..typicality import spectral_source
from . import schemas

DENSE_AGREEMENT_TOL = 1e-8

_PARITY_NAMES = {0: "even", 1: "odd"}


def state_from_payload(payload: schemas.StatePayload) -> FermionicState:
    matrix = io.matrix_from_obj(payload.matrix.model_dump(exclude_none=True))
    return new_state(matrix, payload.modes)


def run_entropy(request: schemas.EntropyRequest) -> schemas.EntropyResponse:
    state = state_from_payload(request.state)
    source = spectral_source(state)
    return schemas.EntropyResponse(
        entropy_bits=source.entropy,
        spectrum=list(source.probabilities),
        parities=[_PARITY_NAMES[p] for p in source.parities],
    )


def run_state_report(payload: schemas.StatePayload) -> schemas.StateReport:
    matrix = io.matrix_from_obj(payload.matrix.model_dump(exclude_none=True))
    report = validation_report(matrix, payload.modes)
    try:
        new_state(matrix, payload.modes)
        error = detail = None
    except FermionicError as err:
        error, detail = type(err).__name__, str(err)
    return schemas.StateReport(valid=error is None, **report, error=error, detail=detail)


def run_channel_report(payload: schemas.ChannelPayload) -> schemas.ChannelReport:
    out_modes = payload.out_modes if payload.out_modes is not None else payload.in_modes
    mats = [
        io.matrix_from_obj(k.model_dump(exclude_none=True),
                           rows=1 << out_modes, cols=1 << payload.in_modes)
        for k in payload.kraus
    ]
    try:
        channel = new_channel(mats, payload.in_modes, out_modes, payload.deterministic)
    except FermionicError as err:
        return schemas.ChannelReport(
            valid=False, in_modes=payload.in_modes, out_modes=out_modes,
            deterministic=payload.deterministic,
            error=type(err).__name__, detail=str(err),
        )
    return schemas.ChannelReport(
        valid=True, in_modes=channel.in_modes, out_modes=channel.out_modes,
        deterministic=channel.deterministic,
        kraus_parities=[_PARITY_NAMES[k.parity] for k in channel.kraus],
    )


def run_compress(request: schemas.CompressRequest) -> schemas.CompressResponse:
    state = state_from_payload(request.state)
    rows = []
    for copies in sorted(request.n_grid):
        scheme = build_scheme(state, copies, request.epsilon, dense_cap=request.dense_cap)
        fid = scheme_fidelity(scheme)
        dense_checked = False
        if scheme.dense is not None:
            dense_checked = abs(scheme_fidelity_dense(scheme) - fid) <= DENSE_AGREEMENT_TOL
        rows.append(
            schemas.CompressRow(
                n=copies,
                epsilon=request.epsilon,
                target_modes=scheme.target_modes,
                rate=scheme.rate,
                typical_mass=scheme.typical_mass,
                fidelity=fid,
                delta=1.0 - fid,
                dense_checked=dense_checked,
            )
        )
    return schemas.CompressResponse(seed=request.seed, rows=rows)


def run_converse(request: schemas.ConverseRequest) -> schemas.ConverseResponse:
    state = state_from_payload(request.state)
    rows = []
    for copies in sorted(request.n_grid):
        res = converse_scheme_fidelity(state, copies, request.rate)
        rows.append(
            schemas.ConverseRow(
                n=copies, rate=request.rate,
                best_mass=res.best_mass, fidelity_bound=res.fidelity_bound,
            )
        )
    return schemas.ConverseResponse(seed=request.seed, rows=rows)


def run_parity_demo() -> schemas.ParityDemoResponse:
    channel = parity_channel(1)
    worst = 0.0
    grid = np.linspace(0.0, 1.0, 21)
    for q in grid:
        rho = new_state(np.diag([q, 1.0 - q]), 1)
        worst = max(worst, trace_norm(apply(channel, rho).matrix - rho.matrix))
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 2 ** -0.5
    psi = pure_state(bell, 2)
    extended = parallel_compose(channel, identity_channel(1))
    distance = 0.5 * trace_norm(apply(extended, psi).matrix - psi.matrix)
    ent = entanglement_fidelity(new_state(np.eye(2) / 2, 1), channel)
    verdict = (
        "parity channel is indistinguishable from the identity on every 1-mode "
        "state, yet it destroys shared correlations; input/output fidelity "
        "alone would mislabel it as an ideal compression map"
    )
    return schemas.ParityDemoResponse(
        grid_points=len(grid),
        local_residual=worst,
        extended_trace_distance=distance,
        entanglement_fidelity=ent,
        verdict=verdict,
    )


def run_selftest_request(request: schemas.SelftestRequest) -> schemas.SelftestResponse:
    results = run_selftest(dense_cap=request.dense_cap, seed=request.seed)
    return schemas.SelftestResponse(
        passed=all(r.passed for r in results),
        seed=request.seed,
        suites=[schemas.SuiteOutcome(name=r.name, passed=r.passed, detail=r.detail)
                for r in results],
    )
