"""Constants shared across test modules (kept out of conftest so the module
can be imported by name without colliding with other suites' conftests)."""

from pathlib import Path

FIXTURES = Path(__file__).parent / "fixtures"

PB = {"Patient": "user", "Bot": "assistant"}
