from __future__ import annotations

from pathlib import Path

import pytest

from support import SCENES


@pytest.fixture
def scenes_dir() -> Path:
    return SCENES
