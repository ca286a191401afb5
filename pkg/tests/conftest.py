import pathlib

import pytest

from treeplace.instance import parse_instance

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def worked_example():
    return parse_instance(load_fixture_text("worked_example.json"))


@pytest.fixture(scope="session")
def shared_link():
    return parse_instance(load_fixture_text("shared_link.json"))
