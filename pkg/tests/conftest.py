import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for oracles.py

FIXTURES = Path(__file__).parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    if not FIXTURES.exists():
        pytest.skip("fixtures/ not generated; run scripts/make_fixtures.py")
    return FIXTURES


@pytest.fixture(scope="session")
def labeled_corpus():
    """The 200-page synthetic corpus with its ground-truth labels."""
    from scamscan.synthcorpus import generate_corpus

    return generate_corpus()
