"""Command-line entry points: serve, repl and interpret."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .interpreter import default_registry, load_registry
from .session import frame_for_command, load_algorithm_specs, load_config, run_repl


@click.group()
def main():
    """Conversational machine-learning workbench."""


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(), help="Path to the JSON service config.")
def serve(config_path):
    """Run the network API for the chat UI."""
    from .api import serve as run_service

    run_service(load_config(config_path))


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(), help="Path to the JSON service config.")
@click.option("--script", "script_path", type=click.Path(exists=True),
              default=None,
              help="File with one input line per prompt (non-interactive run).")
def repl(config_path, script_path):
    """Interactive terminal session."""
    config = load_config(config_path)
    script = None
    if script_path:
        script = [line.rstrip("\n") for line in
                  Path(script_path).read_text(encoding="utf-8").splitlines()]
    run_repl(config, script=script)


@main.command()
@click.option("--command", "command_text", required=True,
              help="English command to interpret (no execution).")
@click.option("--registry", "registry_path", type=click.Path(exists=True),
              default=None, help="Registry CSV (defaults to the built-in one).")
def interpret(command_text, registry_path):
    """Print the CommandFrame for a command as JSON."""
    registry = load_registry(registry_path) if registry_path \
        else default_registry()
    frame = frame_for_command(command_text, registry, load_algorithm_specs())
    click.echo(json.dumps(frame.to_json(), indent=2))
    if frame.unresolved:
        sys.exit(1)


if __name__ == "__main__":
    main()
