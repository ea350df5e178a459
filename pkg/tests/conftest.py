import pytest

from smspace import smachine as sm
from smspace import tm
from smspace.presentation import compile as compile_presentation
from smspace.words import Alphabet, Symbol

# criterion id -> (passed, detail); filled by test_acceptance
RESULTS: dict = {}


def record(key, ok, detail=""):
    RESULTS[key] = (bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(RESULTS, key=lambda k: (len(k), k)):
        ok, detail = RESULTS[key]
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}")


@pytest.fixture(scope="session")
def toy():
    return tm.toy_machine()


@pytest.fixture(scope="session")
def pipeline(toy):
    """Every stage of the shipped construction chain, keyed by name."""
    M2 = tm.pad_machine(toy)
    sym = tm.symmetrize(M2)
    split = tm.split_single_letter(sym)
    norm = tm.normalize_s10(split)
    MZ = sm.compose(norm)
    return {"M1": toy, "M2": M2, "sym": sym, "split": split, "norm": norm,
            "S": sm.s_from_tm(norm), "MZ": MZ}


@pytest.fixture(scope="session")
def sl4(pipeline):
    return sm.multiply(pipeline["MZ"], 4)


@pytest.fixture(scope="session")
def g4(sl4):
    return compile_presentation(sl4)


@pytest.fixture(scope="session")
def zmachine():
    return sm.build_adding(Alphabet([Symbol("a", "a")]))


@pytest.fixture(scope="session")
def zl2(zmachine):
    return sm.multiply(zmachine, 2)


@pytest.fixture(scope="session")
def gz(zl2):
    return compile_presentation(zl2)
