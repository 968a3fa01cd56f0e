from pathlib import Path

import pytest

from achieve import parse_instance_file, parse_program_file

CORPUS = Path(__file__).resolve().parents[1] / "src" / "achieve" / "corpus"


def load(name: str):
    return parse_program_file(str(CORPUS / f"{name}.lp"))


def instance(program, name: str):
    return parse_instance_file(str(CORPUS / f"{program.name}-{name}.facts"), program.input_spec)


@pytest.fixture(scope="session")
def nqueens():
    return load("nqueens")


@pytest.fixture(scope="session")
def hamiltonian():
    return load("hamiltonian")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
