"""
Module entrypoint so ``python -m adiageo ...`` works without the console script.

Notes
-----
No logic lives here; it delegates to :func:`adiageo.cli.main`.
"""

from __future__ import annotations

from adiageo.cli import main


def _run() -> None:
    """Run the CLI and exit with its status code."""
    raise SystemExit(main())


if __name__ == "__main__":
    _run()
