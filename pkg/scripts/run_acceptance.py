"""Run only the acceptance tests and show the per-criterion summary."""

import sys
from pathlib import Path

import pytest

root = Path(__file__).resolve().parents[1]
sys.exit(pytest.main([str(root / "tests" / "test_acceptance.py"), "-q", "-rxX", *sys.argv[1:]]))
