from __future__ import annotations

import pytest

import support


@pytest.fixture
def camera_ad():
    return support.camera_annotated()


@pytest.fixture
def camera_jsonl():
    return support.camera_record_jsonl()


@pytest.fixture
def phone():
    return support.phone_dialogue()
