"""Shared fixtures: frozen count samples, corpus builders, a stub provider."""
from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from time import monotonic

import pytest

from readscale.corpus import PublicationRecord

# 85 integer counts, mean exactly 527/85 = 6.2, max 17, three zeros: a small
# field with low, heavily tied counts.
MATHS_COUNTS = (
    17, 16, 16, 14, 14, 14, 14, 12, 12, 11, 11, 10, 10, 10, 10, 9, 9, 9,
    8, 8, 8, 8, 8, 8, 8, 8, 8, 8, 7, 7, 7, 7, 7, 6, 6, 6, 6, 6, 6,
    5, 5, 5, 5, 5, 5, 5, 5, 5, 5,
    4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4,
    3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 2, 2, 2, 2, 2, 2, 0, 0, 0,
)

# 96 integer counts, mean 2074/96 = 21.6042 (renders as 21.6), max 101.
SURGERY_COUNTS = (
    101, 100, 64, 60, 56, 55, 52, 49, 44, 42, 42, 40, 39, 37, 35, 35, 32,
    31, 30, 28, 28, 28, 28, 27, 26, 26, 23, 23, 22, 21, 21, 20, 20, 20, 20,
    19, 19, 19, 18, 18, 18, 18, 17, 17, 17, 17, 17, 17, 16, 16, 16, 16, 16,
    16, 16, 16, 15, 15, 14, 14, 14, 14, 13, 13, 12, 12, 12, 12, 12, 11, 11,
    11, 11, 10, 10, 10, 10, 10, 10, 10, 9, 9, 9, 9, 8, 8, 8, 8, 8, 7, 6,
    5, 5, 5, 0, 0,
)

assert sum(MATHS_COUNTS) == 527 and len(MATHS_COUNTS) == 85
assert sum(SURGERY_COUNTS) == 2074 and len(SURGERY_COUNTS) == 96


def make_records(counts, field, year, prefix=None):
    """Build one stratum of records from a count sequence."""
    prefix = prefix or field.lower().replace(" ", "-")
    return [
        PublicationRecord(id=f"{prefix}-{i:04d}", field=field, year=year, reads=int(c))
        for i, c in enumerate(counts)
    ]


@pytest.fixture
def maths_records():
    return make_records(MATHS_COUNTS, "Mathematics", 2010)


@pytest.fixture
def surgery_records():
    return make_records(SURGERY_COUNTS, "Surgery", 2010)


class StubProvider:
    """In-process readership provider for client tests.

    ``responses`` maps a DOI to a (readers, match_probability) pair; DOIs
    absent from the map are left out of the response body. ``fail_first``
    makes the server answer 500 to that many requests before behaving.
    Request bodies and arrival times (monotonic clock) are recorded.
    """

    def __init__(self, responses=None, fail_first=0):
        self.responses = dict(responses or {})
        self.fail_first = fail_first
        self.requests: list[list[str]] = []
        self.arrivals: list[float] = []
        self.headers_seen: list[dict] = []
        self._lock = threading.Lock()
        provider = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", "0"))
                dois = json.loads(self.rfile.read(length))
                arrived = monotonic()
                with provider._lock:
                    provider.arrivals.append(arrived)
                    provider.requests.append(list(dois))
                    provider.headers_seen.append(dict(self.headers))
                    must_fail = provider.fail_first > 0
                    if must_fail:
                        provider.fail_first -= 1
                if must_fail:
                    self.send_response(500)
                    self.send_header("Content-Length", "0")
                    self.end_headers()
                    return
                out = []
                for doi in dois:
                    if doi in provider.responses:
                        readers, prob = provider.responses[doi]
                        out.append(
                            {"doi": doi, "readers": readers, "match_probability": prob}
                        )
                body = json.dumps(out).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.url = f"http://127.0.0.1:{self._server.server_port}"
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def request_count(self) -> int:
        with self._lock:
            return len(self.requests)

    def close(self):
        self._server.shutdown()
        self._server.server_close()


@pytest.fixture
def stub_provider():
    servers = []

    def start(responses=None, fail_first=0):
        server = StubProvider(responses, fail_first)
        servers.append(server)
        return server

    yield start
    for server in servers:
        server.close()
