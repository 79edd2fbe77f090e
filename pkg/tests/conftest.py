from decimal import Decimal

import pytest

# 18-patient recovery-hours dataset used throughout: ten observations for
# treatment A, five for B, three for C.
HOURS_UNTIED = {
    "A": [12, 13, 15, 20, 23, 28, 30, 32, 40, 48],
    "B": [29, 31, 49, 52, 54],
    "C": [24, 26, 44],
}

# same design with three cross-group ties: 24 (A,C), 29 (A,B), 49 (A,B)
HOURS_TIED = {
    "A": [12, 13, 15, 20, 24, 29, 30, 32, 40, 49],
    "B": [29, 31, 49, 52, 54],
    "C": [24, 26, 44],
}


def records_from(table):
    return [
        (label, Decimal(value)) for label, values in table.items() for value in values
    ]


def csv_text(table):
    lines = ["group,value"]
    for label, values in table.items():
        lines.extend(f"{label},{value}" for value in values)
    return "\n".join(lines) + "\n"


@pytest.fixture
def untied_records():
    return records_from(HOURS_UNTIED)


@pytest.fixture
def tied_records():
    return records_from(HOURS_TIED)


@pytest.fixture
def untied_csv(tmp_path):
    path = tmp_path / "untied.csv"
    path.write_text(csv_text(HOURS_UNTIED), encoding="utf-8")
    return path


@pytest.fixture
def tied_csv(tmp_path):
    path = tmp_path / "tied.csv"
    path.write_text(csv_text(HOURS_TIED), encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def dist_cache(tmp_path_factory):
    """Shared distribution cache so the (10,5,3) enumeration runs once."""
    return tmp_path_factory.mktemp("dist-cache")
