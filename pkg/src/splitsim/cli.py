"""Thin-client CLI: talks HTTP to the experiment service.

Without ``--server`` the service app runs in-process over an ASGI
transport, so the CLI works standalone while staying a pure HTTP client.
Exit codes: 0 ok, 1 config parse error, 2 semantic error, 3 runtime failure.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click
import httpx

OUTPUT_DIR_ENV = "SPLITSIM_OUTPUT_DIR"

_EXIT_BY_KIND = {"parse": 1, "semantic": 2, "runtime": 3}


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=None)
    # no server given: mount the service app in-process behind the same HTTP interface
    from starlette.testclient import TestClient

    from .service.app import app

    return TestClient(app, raise_server_exceptions=False)


def _payload(config_path: str) -> dict:
    path = Path(config_path)
    try:
        text = path.read_text()
    except OSError as exc:
        click.echo(f"error: cannot read config: {exc}", err=True)
        sys.exit(1)
    return {"config_text": text, "base_dir": str(path.parent.resolve())}


def _fail(resp: httpx.Response):
    try:
        body = resp.json()
        kind, detail = body.get("kind", "runtime"), body.get("detail", resp.text)
    except ValueError:
        kind, detail = "runtime", resp.text
    click.echo(f"error ({kind}): {detail}", err=True)
    sys.exit(_EXIT_BY_KIND.get(kind, 3))


def _output_dir(option_value: str | None, default: str) -> Path:
    out = option_value or os.environ.get(OUTPUT_DIR_ENV) or default
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


@click.group()
@click.option("--server", default=None, help="Base URL of a running splitsim service; in-process by default.")
@click.pass_context
def main(ctx, server):
    """Goal-oriented DNN splitting: experiment sweeps and per-slot traces."""
    ctx.obj = server


@main.command()
@click.argument("config", type=click.Path())
@click.option("-o", "--output-dir", default=None, help=f"Artifact directory (or ${OUTPUT_DIR_ENV}).")
@click.pass_obj
def run(server, config, output_dir):
    """Run the full experiment sweep described by CONFIG."""
    with _client(server) as client:
        resp = client.post("/experiments/run", json=_payload(config))
        if resp.status_code != 200:
            _fail(resp)
        artifacts = resp.json()["artifacts"]
    outdir = _output_dir(output_dir, "results")
    for name, text in sorted(artifacts.items()):
        (outdir / name).write_text(text)
        click.echo(f"wrote {outdir / name}")


@main.command()
@click.argument("config", type=click.Path())
@click.pass_obj
def validate(server, config):
    """Check CONFIG for structural and semantic problems."""
    with _client(server) as client:
        resp = client.post("/config/validate", json=_payload(config))
        if resp.status_code != 200:
            _fail(resp)
        body = resp.json()
    if body["ok"]:
        click.echo("ok")
        return
    for d in body["diagnostics"]:
        click.echo(f"{d['location']}: {d['message']}", err=True)
    sys.exit(2)


@main.command()
@click.argument("config", type=click.Path())
@click.option("--policy", default="dynamic", help="dynamic, flc, accuracy_unaware, fixed_sp:<k>, fixed_snr:<db>")
@click.option("--cell", default="0,0", help="i,j indices into g_avg_list x path_loss_db_list")
@click.option("--v", type=float, default=None, help="Trade-off weight override for this run.")
@click.option("-o", "--output-dir", default=None, help=f"Trace directory (or ${OUTPUT_DIR_ENV}).")
@click.pass_obj
def trace(server, config, policy, cell, v, output_dir):
    """Run one policy in one sweep cell and write the per-slot trace CSV."""
    try:
        i, j = (int(x) for x in cell.split(","))
    except ValueError:
        click.echo(f"error: --cell must be 'i,j', got {cell!r}", err=True)
        sys.exit(2)
    body = {**_payload(config), "policy": policy, "cell_i": i, "cell_j": j, "v": v}
    with _client(server) as client:
        resp = client.post("/experiments/trace", json=body)
        if resp.status_code != 200:
            _fail(resp)
        out = resp.json()
    outdir = _output_dir(output_dir, "results")
    dest = outdir / f"trace_{policy.replace(':', '_')}_cell{i}_{j}.csv"
    dest.write_text(out["trace_csv"])
    r = out["result"]
    click.echo(f"wrote {dest}")
    click.echo(
        f"policy={r['policy']} avg_energy={r['avg_energy']:.6g} J/slot "
        f"avg_delay={r['avg_delay']:.6g} s avg_accuracy={r['avg_accuracy']:.4f} avg_sp={r['avg_sp']:.3f}"
    )


if __name__ == "__main__":
    main()
