import socket

import pytest

from blimpsim import BlimpParams


@pytest.fixture
def params():
    return BlimpParams()


def free_port() -> int:
    """Ask the OS for an unused TCP port."""
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]
