import sys
from pathlib import Path

import pytest

from nbestgec.corpus import tokens
from nbestgec.kernels import backends
from nbestgec.lm import train_lm

ROOT = Path(__file__).resolve().parent.parent
DEMO = ROOT / "data" / "demo"
GOLDEN = Path(__file__).resolve().parent / "golden"

WAITS_SENTENCE = tokens("the cat waits on the dog and eats a mouse .")


@pytest.fixture(params=sorted(backends()))
def kernel(request):
    return backends()[request.param]


@pytest.fixture(scope="session")
def toy_lm():
    corpus = [
        tokens("the cat sat on the dog ."),
        tokens("the cat eats a mouse ."),
        tokens("the dog waits on the cat ."),
        tokens("a cat sat on a mat ."),
    ]
    return train_lm(corpus, order=3)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is not None and module.RESULTS:
        RESULTS = module.RESULTS
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
