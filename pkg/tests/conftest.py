import pytest

from rubblesar.fusion import ForestHyper, Protocol, generate_dataset, train_model


@pytest.fixture(scope="session")
def combined_rf():
    """Default RF trained on the train split of the default combined dataset."""
    ds = generate_dataset("combined", Protocol(), seed=0)
    return train_model("rf", ds.train, ForestHyper(seed=0))


@pytest.fixture(scope="session")
def small_rf():
    """Cheap combined-scenario forest for tests that only need a working model."""
    ds = generate_dataset("combined", Protocol(per_class=300), seed=1)
    return train_model("rf", ds, ForestHyper(n_trees=20, seed=1))
