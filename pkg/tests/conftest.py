import numpy as np
import pytest

from entroprune import EnsemblePredictions


def random_ensemble(rng, n, d, n_classes=2):
    preds = rng.integers(0, n_classes, size=(n, d))
    labels = rng.integers(0, n_classes, size=d)
    return EnsemblePredictions(preds, labels, n_classes)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
