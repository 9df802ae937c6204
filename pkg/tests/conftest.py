import pytest

from fklab.models import cell_model, nn_model, nonreversible_model


@pytest.fixture(scope="session")
def ref_model():
    """Polynomial kernel (beta=3) with linear potential on the line."""
    return cell_model("poly-poly")


@pytest.fixture(scope="session")
def log_model():
    """Polynomial kernel with logarithmic potential (progressive regime)."""
    return cell_model("poly-log")


@pytest.fixture(scope="session")
def lazy_walk_model():
    return nn_model(lazy=0.5, pot="poly", rho=1.0)


@pytest.fixture(scope="session")
def weighted_model():
    return nonreversible_model(eta=0.3, beta=3.0)
