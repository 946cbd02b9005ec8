import random

import pytest

from partsmt.generate import random_idl_script, random_uf_script


@pytest.fixture
def rng():
    return random.Random(1234)


def small_scripts(count, seed=0, atoms=(6, 14)):
    """Deterministic mix of small QF_UF / QF_IDL scripts."""
    r = random.Random(seed)
    out = []
    for i in range(count):
        gen = random_uf_script if i % 2 == 0 else random_idl_script
        out.append(gen(r, r.randint(*atoms), ratio=r.uniform(1.5, 3.0)))
    return out


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
