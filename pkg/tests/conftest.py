import pytest

from detclust import _backend


def _available_backends():
    names = ["python"]
    try:
        from detclust import _core  # noqa: F401

        names.append("compiled")
    except ImportError:
        pass
    return names


BACKENDS = _available_backends()


@pytest.fixture(params=BACKENDS)
def backend(request):
    """Run the test once per available numerical backend."""
    previous = _backend.core.BACKEND_NAME
    _backend.use_backend(request.param)
    yield request.param
    _backend.use_backend(previous)
