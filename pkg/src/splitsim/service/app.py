"""FastAPI service wrapping the simulator and experiment sweeps.

The CLI is a thin client of these endpoints; they can also back a shared
experiment server. Error mapping: parse problems -> 400, semantic config
problems -> 422, runtime failures -> 500, all with a machine-readable
``kind`` field.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from ..experiment import (
    ConfigParseError,
    ConfigSemanticError,
    parse_config,
    run_experiment,
    run_trace,
    validate_config,
)
from .schemas import (
    DiagnosticModel,
    RunRequest,
    RunResponse,
    RunSummary,
    TraceRequest,
    TraceResponse,
    ValidateResponse,
)

app = FastAPI(title="splitsim", version="0.1.0")


def _error(status: int, kind: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"kind": kind, "detail": detail})


@app.exception_handler(ConfigParseError)
async def _parse_error(_, exc: ConfigParseError):
    return _error(400, "parse", str(exc))


@app.exception_handler(ConfigSemanticError)
async def _semantic_error(_, exc: ConfigSemanticError):
    return _error(422, "semantic", str(exc))


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/config/validate", response_model=ValidateResponse)
def validate(req: RunRequest) -> ValidateResponse:
    config = parse_config(req.config_text, base_dir=req.base_dir)
    diags = validate_config(config)
    return ValidateResponse(
        ok=not diags,
        kind="ok" if not diags else "semantic",
        diagnostics=[DiagnosticModel(location=d.location, message=d.message) for d in diags],
    )


@app.post("/experiments/run", response_model=RunResponse)
def run(req: RunRequest) -> RunResponse:
    config = parse_config(req.config_text, base_dir=req.base_dir)
    diags = validate_config(config)
    if diags:
        raise ConfigSemanticError("; ".join(str(d) for d in diags))
    return RunResponse(artifacts=run_experiment(config))


@app.post("/experiments/trace", response_model=TraceResponse)
def trace(req: TraceRequest) -> TraceResponse:
    config = parse_config(req.config_text, base_dir=req.base_dir)
    diags = validate_config(config)
    if diags:
        raise ConfigSemanticError("; ".join(str(d) for d in diags))
    trace_csv, result = run_trace(config, req.policy, (req.cell_i, req.cell_j), v=req.v)
    return TraceResponse(
        trace_csv=trace_csv,
        result=RunSummary(
            policy=result.policy,
            v=result.v,
            avg_energy=result.avg_energy,
            avg_delay=result.avg_delay,
            avg_accuracy=result.avg_accuracy,
            avg_sp=result.avg_sp,
            final_z_over_n=result.final_z_over_n,
            final_y_over_n=result.final_y_over_n,
            slots_counted=result.slots_counted,
        ),
    )
