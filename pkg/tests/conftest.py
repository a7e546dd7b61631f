import pytest

from compover.modelfile import load_model_file

from util import bench_path


@pytest.fixture(scope="session")
def trainpass():
    """(model, property-with-deadline-16) from the bundled benchmark."""
    return load_model_file(bench_path("trainpass.yaml"))
