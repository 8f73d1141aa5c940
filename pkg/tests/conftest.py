import contextlib
import io
import json
import os
from pathlib import Path

import pytest

from nharm import cli

GOLDEN = Path(__file__).parent / "golden"
COMMANDS = ("sum", "scan", "classify", "verdict", "badpoint", "sieve")


def help_text(command=None) -> str:
    """Help output at a fixed 80-column width."""
    old = os.environ.get("COLUMNS")
    os.environ["COLUMNS"] = "80"
    try:
        buf = io.StringIO()
        argv = [command, "--help"] if command else ["--help"]
        with contextlib.redirect_stdout(buf):
            assert cli.main(argv) == 0
        return buf.getvalue()
    finally:
        if old is None:
            del os.environ["COLUMNS"]
        else:
            os.environ["COLUMNS"] = old


def run_cli(argv, capsys):
    """Run the CLI in-process; returns (exit code, stdout, stderr)."""
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def load_schema(command):
    from importlib.resources import files
    return json.loads(files("nharm").joinpath("schemas", f"{command}.json").read_text())


@pytest.fixture(autouse=True)
def _clear_precision_env(monkeypatch):
    monkeypatch.delenv("HARMONIC_PRECISION", raising=False)
