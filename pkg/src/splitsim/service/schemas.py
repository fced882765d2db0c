"""Pydantic request/response models for the experiment service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class ConfigPayload(BaseModel):
    """An experiment configuration as raw YAML text.

    ``base_dir`` resolves relative profile/LUT paths on the server side;
    it defaults to the server's working directory.
    """

    config_text: str
    base_dir: str = "."


class DiagnosticModel(BaseModel):
    location: str
    message: str


class ValidateResponse(BaseModel):
    ok: bool
    kind: str = "ok"  # "ok" | "parse" | "semantic"
    diagnostics: list[DiagnosticModel] = Field(default_factory=list)


class RunRequest(ConfigPayload):
    pass


class RunResponse(BaseModel):
    artifacts: dict[str, str]  # file name -> CSV text


class TraceRequest(ConfigPayload):
    policy: str = "dynamic"
    cell_i: int = 0  # index into sweep.g_avg_list
    cell_j: int = 0  # index into sweep.path_loss_db_list
    v: float | None = None


class RunSummary(BaseModel):
    policy: str
    v: float
    avg_energy: float
    avg_delay: float
    avg_accuracy: float
    avg_sp: float
    final_z_over_n: float
    final_y_over_n: float
    slots_counted: int


class TraceResponse(BaseModel):
    trace_csv: str
    result: RunSummary


class ErrorResponse(BaseModel):
    kind: str  # "parse" | "semantic" | "runtime"
    detail: str
