import numpy as np
import pytest

from litscreen.corpus import Corpus, Document


@pytest.fixture
def toy_corpus() -> Corpus:
    return Corpus(
        [
            Document(id="d1", title="Statin therapy outcomes", abstract="statin therapy reduces cholesterol levels", label=1),
            Document(id="d2", title="Cardiac surgery review", abstract="outcomes after cardiac surgery and statin use", label=0),
            Document(id="d3", title="Dietary interventions", abstract="fruit and vegetable consumption in children", label=0),
            Document(id="d4", title="Vegetable trials", abstract="vegetable consumption trials in schools", label=1),
        ]
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
