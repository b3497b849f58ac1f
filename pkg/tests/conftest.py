import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from nomic.exactalg import Field  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(params=["Z2", "Z3", "Q"])
def field(request):
    return Field.from_name(request.param)


@pytest.fixture
def z2():
    return Field.prime(2)


@pytest.fixture
def z3():
    return Field.prime(3)


@pytest.fixture
def qq():
    return Field.rationals()
