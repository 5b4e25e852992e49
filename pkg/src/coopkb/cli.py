"""Operator command line.

Exit codes: 0 success, 1 diagnostics were emitted, 2 usage error,
3 internal failure. ``--journal DIR`` points at a server data directory
(journal + metadata); without it commands run on a throwaway in-memory
store seeded with the built-in ontology.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .errors import KbError
from .fl.linter import lint_text
from .journal import read_snapshot, write_snapshot
from .kb import KnowledgeBase
from .query import run_query
from .replication import SimulationConfig, simulate

INTERNAL = 3
DIAGNOSTICS = 1


def _open_kb(journal: str | None, server_id: str = "local") -> KnowledgeBase:
    return KnowledgeBase(server_id, data_dir=journal)


def _is_html(path: Path) -> bool:
    return path.suffix.lower() in (".html", ".htm")


@click.group()
def main() -> None:
    """Cooperative knowledge base tooling."""


@main.command()
@click.argument("file", type=click.Path(exists=True, path_type=Path))
@click.option("--as", "as_user", required=True, help="user the load runs as")
@click.option("--journal", type=click.Path(path_type=Path), default=None)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def load(file: Path, as_user: str, journal: Path | None, fmt: str) -> None:
    """Load an FL file (or HTML with FL segments) into the store."""
    try:
        kb = _open_kb(journal)
        if as_user not in kb.store.users:
            kb.register_user(as_user)
        report = kb.load_fl(file.read_text(encoding="utf-8"), as_user,
                            html=_is_html(file), file=str(file))
    except KbError as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(INTERNAL)
    if fmt == "json":
        click.echo(json.dumps(report.to_dict(), indent=2))
    else:
        click.echo(f"categories: {report.categories}  statements: {report.statements}  "
                   f"relations: {report.relations}  beliefs: {report.beliefs}  "
                   f"skipped: {report.skipped}")
        for line in report.diagnostics:
            click.echo(line, err=True)
    if report.diagnostics:
        sys.exit(DIAGNOSTICS)


@main.command()
@click.argument("file", type=click.Path(exists=True, path_type=Path))
@click.option("--journal", type=click.Path(path_type=Path), default=None)
def lint(file: Path, journal: Path | None) -> None:
    """Lint an FL file; one diagnostic per line."""
    try:
        kb = _open_kb(journal)
        diagnostics = lint_text(file.read_text(encoding="utf-8"), kb.store,
                                html=_is_html(file), file=str(file))
    except KbError as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(INTERNAL)
    for d in diagnostics:
        click.echo(d.format())
    if diagnostics:
        sys.exit(DIAGNOSTICS)


@main.command()
@click.argument("q")
@click.option("--journal", type=click.Path(path_type=Path), default=None)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def query(q: str, journal: Path | None, fmt: str) -> None:
    """Run a query command: spec/gen/search/subset."""
    try:
        kb = _open_kb(journal)
        result = run_query(kb.store, q)
    except KbError as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(INTERNAL)
    click.echo(json.dumps(result.to_dict(), indent=2) if fmt == "json" else result.text)


@main.command()
@click.option("--config", type=click.Path(exists=True, path_type=Path), default=None,
              help="JSON config: listen, data_dir, server_id, seed, peers")
@click.option("--listen", default="127.0.0.1:8765")
@click.option("--data-dir", type=click.Path(path_type=Path), default=None)
@click.option("--server-id", default="local")
@click.option("--seed", "seed_path", type=click.Path(exists=True, path_type=Path),
              default=None, help="FL file loaded as the system user on first boot")
def serve(config: Path | None, listen: str, data_dir: Path | None,
          server_id: str, seed_path: Path | None) -> None:
    """Start the HTTP server (journal replayed on boot)."""
    import uvicorn

    from .api import create_app

    peers: list[str] = []
    if config is not None:
        conf = json.loads(config.read_text())
        listen = conf.get("listen", listen)
        data_dir = Path(conf["data_dir"]) if "data_dir" in conf else data_dir
        server_id = conf.get("server_id", server_id)
        seed_path = Path(conf["seed"]) if "seed" in conf else seed_path
        peers = conf.get("peers", [])
    try:
        kb = KnowledgeBase(server_id, data_dir=data_dir)
        if seed_path is not None and not kb.records:
            kb.load_fl(seed_path.read_text(encoding="utf-8"), "kb",
                       html=_is_html(seed_path), file=str(seed_path))
        app = create_app(kb)
        _sync_with_peers(kb, peers)
        host, _, port = listen.partition(":")
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8765))
    except KbError as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(INTERNAL)
    except OSError as exc:  # PortBusy and friends
        click.echo(f"error: {exc}", err=True)
        sys.exit(INTERNAL)


def _sync_with_peers(kb: KnowledgeBase, peers: list[str]) -> None:
    if not peers:
        return
    import httpx

    for peer in peers:
        try:
            reply = httpx.post(f"{peer}/sync/digest", json=kb.digest(), timeout=10.0)
            reply.raise_for_status()
            body = reply.json()
            kb.ingest(body["delta"]["records"])
            delta = kb.delta_for(body["digest"]["vector"])
            httpx.post(f"{peer}/sync/delta", json=delta, timeout=10.0)
        except Exception as exc:  # noqa: BLE001 - peers may simply be down
            click.echo(f"warning: sync with {peer} failed: {exc}", err=True)


@main.command()
@click.argument("config_file", type=click.Path(exists=True, path_type=Path))
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def simulate_cmd(config_file: Path, fmt: str) -> None:
    """Run the multi-server convergence simulator from a JSON config."""
    conf = SimulationConfig.from_dict(json.loads(config_file.read_text()))
    report = simulate(conf)
    if fmt == "json":
        click.echo(json.dumps(report.to_dict(), indent=2))
    else:
        click.echo(f"peers: {report.peers}  rounds: {report.rounds_run}  "
                   f"messages: {report.messages}  converged: {report.converged}")
    if not report.converged:
        sys.exit(DIAGNOSTICS)


@main.command()
@click.argument("action", type=click.Choice(["write", "read"]))
@click.argument("file", type=click.Path(path_type=Path))
@click.option("--journal", type=click.Path(path_type=Path), default=None)
@click.option("--restore-to", type=click.Path(path_type=Path), default=None,
              help="with read: data directory to rebuild from the snapshot")
def snapshot(action: str, file: Path, journal: Path | None,
             restore_to: Path | None) -> None:
    """Write the store state to a snapshot file, or read one back."""
    try:
        if action == "write":
            kb = _open_kb(journal)
            write_snapshot(file, kb.snapshot())
            click.echo(f"wrote {kb.journal_position} records to {file}")
        else:
            snap = read_snapshot(file)
            kb = KnowledgeBase.restore(snap, data_dir=restore_to)
            click.echo(f"restored {kb.journal_position} records "
                       f"(server {kb.server_id})")
    except KbError as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(INTERNAL)


main.add_command(simulate_cmd, name="simulate")

if __name__ == "__main__":
    main()
