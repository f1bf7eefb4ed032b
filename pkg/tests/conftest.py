import os

import pytest

from zetaclt import _backend

BACKENDS = ["python"] + (["compiled"] if _backend.NAME == "compiled" else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def pytest_report_header(config):
    return f"zetaclt kernels: {_backend.NAME} (ZETACLT_BACKEND={os.environ.get('ZETACLT_BACKEND', '')!r})"
