import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fairhpo.metrics import PredictionSet


def random_prediction_set(rng, m=None) -> PredictionSet:
    m = m or int(rng.integers(4, 65))
    while True:
        y = rng.integers(0, 2, m).astype(np.int8)
        a = rng.integers(0, 2, m).astype(np.int8)
        if 0 < a.sum() < m:  # ddsp needs both groups
            break
    yh = rng.integers(0, 2, m).astype(np.int8)
    return PredictionSet(y_true=y, y_pred=yh, protected=a)


@pytest.fixture
def data_root(tmp_path):
    return tmp_path / "store"


@pytest.fixture
def tiny_dataset():
    from fairhpo.data import synth_german_credit
    return synth_german_credit(200, 3)
