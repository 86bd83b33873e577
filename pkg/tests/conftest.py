import csv
import io
import json

import pytest

from semxr.scenario import bundled_scenario_path, load_scenario_file


@pytest.fixture(scope="session")
def casestudy1_path():
    return bundled_scenario_path("casestudy1")


@pytest.fixture(scope="session")
def casestudy2_path():
    return bundled_scenario_path("casestudy2")


@pytest.fixture()
def casestudy1(casestudy1_path):
    return load_scenario_file(casestudy1_path)


@pytest.fixture()
def casestudy2(casestudy2_path):
    return load_scenario_file(casestudy2_path)


def parse_report_csv(text: str) -> list[dict]:
    """Parse a report CSV back into typed rows (floats, bools, None)."""
    rows = []
    for raw in csv.DictReader(io.StringIO(text)):
        row = {}
        for key, value in raw.items():
            if value == "":
                row[key] = None
            elif value in ("true", "false"):
                row[key] = value == "true"
            else:
                try:
                    row[key] = int(value)
                except ValueError:
                    try:
                        row[key] = float(value)
                    except ValueError:
                        row[key] = value
        rows.append(row)
    return rows


def parse_report_json(text: str) -> list[dict]:
    return json.loads(text)
