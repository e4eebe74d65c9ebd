import json

import pytest

from helpers import FIXTURES


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def load_json():
    def load(relative):
        return json.loads((FIXTURES / relative).read_text(encoding="utf-8"))
    return load
