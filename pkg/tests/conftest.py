import socket
import threading
import time

import httpx
import pytest
import uvicorn

from mmsym import catalog


@pytest.fixture(scope="session")
def builtins():
    return {name: catalog.builtin(name) for name in catalog.BUILTIN_NAMES}


class LiveServer:
    def __init__(self, app):
        sock = socket.socket()
        sock.bind(("127.0.0.1", 0))
        self.port = sock.getsockname()[1]
        sock.close()
        self.base = f"http://127.0.0.1:{self.port}"
        config = uvicorn.Config(app, host="127.0.0.1", port=self.port,
                                log_level="error")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)
        self.manager = app.state.manager

    def start(self):
        self.thread.start()
        deadline = time.monotonic() + 10
        while time.monotonic() < deadline:
            try:
                if httpx.get(f"{self.base}/api/health", timeout=0.2).status_code == 200:
                    return self
            except httpx.HTTPError:
                pass
            time.sleep(0.02)
        raise RuntimeError("test server failed to start")

    def stop(self):
        self.server.should_exit = True
        self.thread.join(timeout=5)


@pytest.fixture
def live_server_factory():
    servers = []

    def make(app):
        srv = LiveServer(app).start()
        servers.append(srv)
        return srv

    yield make
    for srv in servers:
        srv.stop()
