from __future__ import annotations

from pathlib import Path

import pytest

from thresh import parse_instances, parse_template

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text("utf-8")


@pytest.fixture(scope="session")
def salsa():
    return parse_template(fixture_text("salsa_like.yml"))


@pytest.fixture(scope="session")
def mqm():
    return parse_template(fixture_text("mqm_like.yml"))


@pytest.fixture(scope="session")
def wide_tree():
    return parse_template(fixture_text("wide_tree_35.yml"))


@pytest.fixture(scope="session")
def subword_template():
    return parse_template(fixture_text("subword_template.yml"))


@pytest.fixture(scope="session")
def instances(salsa):
    return parse_instances(fixture_text("instances.json"), salsa.config)


@pytest.fixture(scope="session")
def subword_instances(subword_template):
    return parse_instances(fixture_text("subword_instances.json"), subword_template.config)


@pytest.fixture(scope="session")
def alice_json():
    return fixture_text("salsa_annotations_alice.json")


@pytest.fixture(scope="session")
def bob_json():
    return fixture_text("salsa_annotations_bob.json")


@pytest.fixture(scope="session")
def mqm_annotations_json():
    return fixture_text("mqm_annotations.json")
