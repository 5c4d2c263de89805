"""Pytest fixtures for the adapter suite."""

from __future__ import annotations

import pytest

from wire_helpers import AdapterProcess


@pytest.fixture
def adapter():
    proc = AdapterProcess()
    yield proc
    proc.close()
