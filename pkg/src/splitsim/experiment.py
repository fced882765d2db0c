"""Config-driven experiment orchestration.

Parses a YAML experiment configuration, validates it, sweeps the trade-off
weight V over accuracy targets, path losses and policies, selects the
energy-minimizing V that meets the constraints, and emits plot-ready CSV
artifacts (one per sweep cell plus a summary and an average-splitting-point
table). All numbers in the summary are recomputable from the per-cell files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .accuracy import AccuracyLUT, SynthShape, load_lut, synth_lut
from .controller import ControllerState, PolicyKind, PolicySpec
from .models import (
    DeviceParams,
    RadioParams,
    ServerParams,
    SplitProfile,
    db_to_linear,
    dbm_per_hz_to_w_per_hz,
)
from .simulate import EnvironmentParams, RunResult, run_simulation


class ConfigParseError(ValueError):
    """The configuration text could not be read into the expected structure."""


class ConfigSemanticError(ValueError):
    """The configuration parsed but violates a model invariant."""


@dataclass(frozen=True)
class Diagnostic:
    location: str  # dotted key path
    message: str

    def __str__(self) -> str:
        return f"{self.location}: {self.message}"


def _section(raw: dict, name: str) -> dict:
    if name not in raw or not isinstance(raw[name], dict):
        raise ConfigParseError(f"missing or non-mapping section '{name}'")
    return raw[name]


def _num(section: dict, where: str, key: str) -> float:
    if key not in section:
        raise ConfigParseError(f"missing key '{where}.{key}'")
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigParseError(f"'{where}.{key}' must be a number, got {type(v).__name__}")
    return float(v)


def _num_list(section: dict, where: str, key: str) -> list[float]:
    if key not in section or not isinstance(section[key], list) or not section[key]:
        raise ConfigParseError(f"'{where}.{key}' must be a non-empty list")
    out = []
    for i, v in enumerate(section[key]):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigParseError(f"'{where}.{key}[{i}]' must be a number")
        out.append(float(v))
    return out


@dataclass
class ExperimentConfig:
    """Fully parsed experiment description; values are plain (dB kept as dB)."""

    base_dir: Path
    profile_file: str
    device: dict
    server: dict
    radio: dict
    environment: dict
    controller: dict
    lut: dict
    v_list: list[float]
    g_avg_list: list[float]
    path_loss_db_list: list[float]
    policies: list[str]
    n_slots: int
    seed: int
    transient_fraction: float
    feasibility_slack: float
    stability_threshold: float
    output_dir: str

    # populated by build()
    _built: dict = field(default_factory=dict, repr=False)

    def build_profile(self) -> SplitProfile:
        path = Path(self.profile_file)
        if not path.is_absolute():
            local = self.base_dir / path
            if local.exists():
                path = local
            else:
                builtin = resources.files("splitsim") / "data" / self.profile_file
                if builtin.is_file():
                    return SplitProfile.from_csv(str(builtin))
                raise ConfigSemanticError(f"profile.file: no such file '{self.profile_file}'")
        return SplitProfile.from_csv(path)

    def build_device(self) -> DeviceParams:
        d = self.device
        return DeviceParams(
            f_l_min=_num(d, "device", "f_l_min_hz"),
            f_l_max=_num(d, "device", "f_l_max_hz"),
            eta_l=_num(d, "device", "eta_l_flops_per_cycle"),
            kappa=_num(d, "device", "kappa"),
            p_tx_max=_num(d, "device", "p_tx_max_w"),
        )

    def build_server(self) -> ServerParams:
        s = self.server
        return ServerParams(
            f_r_max=_num(s, "server", "f_r_max_hz"),
            eta_r=_num(s, "server", "eta_r_flops_per_cycle"),
        )

    def build_radio(self) -> RadioParams:
        r = self.radio
        grid_db = _num_list(r, "radio", "snr_grid_db")
        return RadioParams(
            n0=dbm_per_hz_to_w_per_hz(_num(r, "radio", "n0_dbm_hz")),
            noise_figure=db_to_linear(_num(r, "radio", "noise_figure_db")),
            w_max=_num(r, "radio", "w_max_hz"),
            beta=_num(r, "radio", "beta"),
            snr_grid=tuple(db_to_linear(g) for g in grid_db),
        )

    def build_lut(self, profile: SplitProfile, radio: RadioParams) -> AccuracyLUT:
        if "file" in self.lut:
            path = Path(self.lut["file"])
            if not path.is_absolute():
                path = self.base_dir / path
            if not path.exists():
                raise ConfigSemanticError(f"lut.file: no such file '{self.lut['file']}'")
            lut = load_lut(path)
        elif "synthetic" in self.lut:
            s = self.lut["synthetic"]
            shape = SynthShape(
                g_max=_num(s, "lut.synthetic", "g_max"),
                depth_slope=_num(s, "lut.synthetic", "depth_slope"),
                snr_slope=_num(s, "lut.synthetic", "snr_slope"),
                midpoint_k=_num(s, "lut.synthetic", "midpoint_k"),
                midpoint_snr_db=_num(s, "lut.synthetic", "midpoint_snr_db"),
            )
            lut = synth_lut(profile.last_index, radio.snr_grid, shape)
        else:
            raise ConfigParseError("lut section needs either 'file' or 'synthetic'")
        return lut

    def initial_state(self, v: float, g_avg: float) -> ControllerState:
        return ControllerState(
            z=0.0,
            y=0.0,
            mu=_num(self.controller, "controller", "mu"),
            lambda_y=_num(self.controller, "controller", "lambda_y"),
            v=v,
            d_avg=_num(self.controller, "controller", "d_avg_s"),
            g_avg=g_avg,
        )

    @property
    def v_default(self) -> float:
        return _num(self.controller, "controller", "v_default")

    def environment_for(self, path_loss_db: float) -> EnvironmentParams:
        e = self.environment
        return EnvironmentParams(
            path_loss=db_to_linear(path_loss_db),
            arrival_rate=_num(e, "environment", "arrival_rate"),
            alpha_floor=float(e.get("alpha_floor", 0.0)),
        )


def parse_config(text: str, base_dir: str | Path = ".") -> ExperimentConfig:
    """Parse YAML config text; raises ConfigParseError on structural problems."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigParseError(f"invalid YAML: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigParseError("top level must be a mapping")

    profile = _section(raw, "profile")
    if "file" not in profile or not isinstance(profile["file"], str):
        raise ConfigParseError("'profile.file' must be a string path")
    sweep = _section(raw, "sweep")
    run = _section(raw, "run")
    policies = sweep.get("policies")
    if not isinstance(policies, list) or not policies or not all(isinstance(p, str) for p in policies):
        raise ConfigParseError("'sweep.policies' must be a non-empty list of strings")

    return ExperimentConfig(
        base_dir=Path(base_dir),
        profile_file=profile["file"],
        device=_section(raw, "device"),
        server=_section(raw, "server"),
        radio=_section(raw, "radio"),
        environment=_section(raw, "environment"),
        controller=_section(raw, "controller"),
        lut=_section(raw, "lut"),
        v_list=_num_list(sweep, "sweep", "v_list"),
        g_avg_list=_num_list(sweep, "sweep", "g_avg_list"),
        path_loss_db_list=_num_list(sweep, "sweep", "path_loss_db_list"),
        policies=list(policies),
        n_slots=int(_num(run, "run", "n_slots")),
        seed=int(_num(run, "run", "seed")),
        transient_fraction=_num(run, "run", "transient_fraction"),
        feasibility_slack=_num(run, "run", "feasibility_slack"),
        stability_threshold=_num(run, "run", "stability_threshold"),
        output_dir=str(raw.get("output_dir", "results")),
    )


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigParseError(f"cannot read config: {exc}") from None
    return parse_config(text, base_dir=path.parent)


def expand_policy(name: str, profile: SplitProfile, radio: RadioParams) -> list[PolicySpec]:
    """Turn a policy name into the concrete candidate set it stands for.

    'best_fixed_sp' / 'best_fixed_snr' expand to every pinnable value; the
    energy-minimizing candidate is selected after the runs.
    """
    if name == "dynamic":
        return [PolicySpec(PolicyKind.DYNAMIC)]
    if name == "flc":
        return [PolicySpec(PolicyKind.FLC)]
    if name == "accuracy_unaware":
        return [PolicySpec(PolicyKind.ACCURACY_UNAWARE)]
    if name == "best_fixed_sp":
        return [PolicySpec(PolicyKind.FIXED_SP, fixed_k=k) for k in range(profile.last_index + 1)]
    if name == "best_fixed_snr":
        return [PolicySpec(PolicyKind.FIXED_SNR, fixed_gamma=g) for g in radio.snr_grid]
    if name.startswith("fixed_sp:"):
        return [PolicySpec(PolicyKind.FIXED_SP, fixed_k=int(name.split(":", 1)[1]))]
    if name.startswith("fixed_snr:"):
        gamma = db_to_linear(float(name.split(":", 1)[1]))
        return [PolicySpec(PolicyKind.FIXED_SNR, fixed_gamma=gamma)]
    raise ConfigSemanticError(f"unknown policy '{name}'")


def validate_config(config: ExperimentConfig) -> list[Diagnostic]:
    """Collect every invariant violation with its config location."""
    diags: list[Diagnostic] = []

    def check(location, fn):
        try:
            return fn()
        except (ValueError, ConfigParseError) as exc:
            diags.append(Diagnostic(location, str(exc)))
            return None

    profile = check("profile", config.build_profile)
    dev = check("device", config.build_device)
    check("server", config.build_server)
    radio = check("radio", config.build_radio)
    check("environment", lambda: config.environment_for(config.path_loss_db_list[0]))
    check("controller", lambda: config.initial_state(config.v_list[0], config.g_avg_list[0]))

    if dev is not None and dev.f_l_min > dev.f_l_max:  # unreachable via DeviceParams; kept for clarity
        diags.append(Diagnostic("device", "f_l_min exceeds f_l_max"))
    if profile is not None and radio is not None:
        lut = check("lut", lambda: config.build_lut(profile, radio))
        if lut is not None:
            if lut.last_index != profile.last_index:
                diags.append(Diagnostic(
                    "lut",
                    f"table has {lut.last_index + 1} splitting points, profile has {profile.last_index + 1}",
                ))
            mismatch = len(lut.snr_grid) != len(radio.snr_grid) or any(
                not math.isclose(a, b, rel_tol=1e-9) for a, b in zip(lut.snr_grid, radio.snr_grid)
            )
            if mismatch:
                diags.append(Diagnostic("lut", "LUT SNR grid does not match radio.snr_grid"))
        for name in config.policies:
            check(f"sweep.policies.{name}", lambda n=name: expand_policy(n, profile, radio))
    for g in config.g_avg_list:
        if not 0 <= g <= 1:
            diags.append(Diagnostic("sweep.g_avg_list", f"accuracy target {g} outside [0, 1]"))
    if config.n_slots < 1:
        diags.append(Diagnostic("run.n_slots", "must be >= 1"))
    if not 0 <= config.transient_fraction < 1:
        diags.append(Diagnostic("run.transient_fraction", "must lie in [0, 1)"))
    if config.feasibility_slack < 0:
        diags.append(Diagnostic("run.feasibility_slack", "must be >= 0"))
    return diags


@dataclass
class CellOutcome:
    """Best run of one policy group in one (accuracy target, path loss) cell."""

    policy_group: str
    best: RunResult
    feasible: bool
    candidates: list[RunResult] = field(default_factory=list)


def _is_feasible(r: RunResult, config: ExperimentConfig, check_accuracy: bool) -> bool:
    slack = config.feasibility_slack
    if r.avg_delay > r.d_avg * (1 + slack):
        return False
    if check_accuracy and r.avg_accuracy < r.g_avg * (1 - slack):
        return False
    return r.final_z_over_n < config.stability_threshold and (
        not check_accuracy or r.final_y_over_n < config.stability_threshold
    )


def run_cell(
    config: ExperimentConfig,
    g_avg: float,
    path_loss_db: float,
    policy_names: list[str] | None = None,
) -> list[CellOutcome]:
    """Sweep V (and any pinned value) for every policy group in one cell.

    For each group the winner is the energy-minimizing feasible run; groups
    with no feasible run are flagged and report their lowest-energy attempt.
    """
    profile = config.build_profile()
    dev, srv, radio = config.build_device(), config.build_server(), config.build_radio()
    lut = config.build_lut(profile, radio)
    env = config.environment_for(path_loss_db)

    outcomes = []
    for name in policy_names or config.policies:
        runs = []
        for spec in expand_policy(name, profile, radio):
            for v in config.v_list:
                runs.append(
                    run_simulation(
                        spec, profile, dev, srv, radio, lut, env,
                        config.initial_state(v, g_avg),
                        n_slots=config.n_slots,
                        seed=config.seed,
                        transient_fraction=config.transient_fraction,
                    )
                )
        check_acc = name != "accuracy_unaware"
        feasible = [r for r in runs if _is_feasible(r, config, check_acc)]
        pool = feasible or runs
        best = min(pool, key=lambda r: (r.avg_energy, r.policy, r.v))
        outcomes.append(CellOutcome(name, best, bool(feasible), runs))
    return outcomes


def run_experiment(config: ExperimentConfig) -> dict[str, str]:
    """Full sweep; returns artifact CSVs keyed by file name."""
    artifacts: dict[str, str] = {}
    summary = [
        "g_avg,path_loss_db,policy_group,selected,best_v,avg_energy_j,"
        "saving_vs_flc_pct,avg_delay_s,avg_accuracy,avg_sp,z_over_n,y_over_n,feasible"
    ]
    sp_rows = {}  # g_avg -> {pl: avg_sp of dynamic}

    for g_avg in config.g_avg_list:
        for pl in config.path_loss_db_list:
            outcomes = run_cell(config, g_avg, pl)
            flc = next((o for o in outcomes if o.policy_group == "flc"), None)
            cell_lines = [
                "policy_group,selected,v,avg_energy_j,avg_delay_s,avg_accuracy,avg_sp,"
                "z_over_n,y_over_n,feasible"
            ]
            for o in outcomes:
                r = o.best
                cell_lines.append(
                    f"{o.policy_group},{r.policy},{r.v!r},{r.avg_energy!r},{r.avg_delay!r},"
                    f"{r.avg_accuracy!r},{r.avg_sp!r},{r.final_z_over_n!r},{r.final_y_over_n!r},"
                    f"{'yes' if o.feasible else 'INFEASIBLE'}"
                )
                saving = (
                    repr(100.0 * (1.0 - r.avg_energy / flc.best.avg_energy))
                    if flc is not None and flc.best.avg_energy > 0
                    else ""
                )
                summary.append(
                    f"{g_avg!r},{pl:g},{o.policy_group},{r.policy},{r.v!r},{r.avg_energy!r},"
                    f"{saving},{r.avg_delay!r},{r.avg_accuracy!r},{r.avg_sp!r},"
                    f"{r.final_z_over_n!r},{r.final_y_over_n!r},{'yes' if o.feasible else 'INFEASIBLE'}"
                )
                if o.policy_group == "dynamic":
                    sp_rows.setdefault(g_avg, {})[pl] = r.avg_sp
            artifacts[f"cell_g{g_avg:g}_pl{pl:g}.csv"] = "\n".join(cell_lines) + "\n"

    artifacts["summary.csv"] = "\n".join(summary) + "\n"
    if sp_rows:
        pls = config.path_loss_db_list
        lines = ["g_avg," + ",".join(f"avg_sp_pl{pl:g}db" for pl in pls)]
        for g_avg in config.g_avg_list:
            cells = sp_rows.get(g_avg, {})
            lines.append(f"{g_avg!r}," + ",".join(repr(cells[pl]) if pl in cells else "" for pl in pls))
        artifacts["avg_sp_vs_accuracy.csv"] = "\n".join(lines) + "\n"
    return artifacts


def run_trace(
    config: ExperimentConfig,
    policy_name: str,
    cell: tuple[int, int],
    v: float | None = None,
) -> tuple[str, RunResult]:
    """Single traced run for cell (i, j) = (g_avg index, path loss index)."""
    i, j = cell
    if not (0 <= i < len(config.g_avg_list) and 0 <= j < len(config.path_loss_db_list)):
        raise ConfigSemanticError(
            f"cell ({i},{j}) outside sweep grid "
            f"{len(config.g_avg_list)}x{len(config.path_loss_db_list)}"
        )
    profile = config.build_profile()
    dev, srv, radio = config.build_device(), config.build_server(), config.build_radio()
    lut = config.build_lut(profile, radio)
    specs = expand_policy(policy_name, profile, radio)
    if len(specs) != 1:
        raise ConfigSemanticError(
            f"policy '{policy_name}' expands to {len(specs)} candidates; pin a value for tracing"
        )
    result = run_simulation(
        specs[0], profile, dev, srv, radio, lut,
        config.environment_for(config.path_loss_db_list[j]),
        config.initial_state(v if v is not None else config.v_default, config.g_avg_list[i]),
        n_slots=config.n_slots,
        seed=config.seed,
        transient_fraction=config.transient_fraction,
        record_trace=True,
    )
    return result.trace_csv(), result


def default_config_text() -> str:
    return (resources.files("splitsim") / "data" / "default_config.yaml").read_text()
