"""A deterministic in-process chat-completion endpoint for tests and demos.

Speaks just enough of the de facto chat-completion JSON protocol
({model, messages} in, {choices:[{message:{content}}]} out) to stand in for
a real provider.  Replies come from a supplied script, falling back to a
numbered echo of the last user message, so runs are reproducible.  Failure
injection (``fail_status``) lets callers exercise error paths.
"""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class MockChatEndpoint:
    def __init__(self, replies: list[str] | None = None, fail_status: int | None = None):
        self.replies = list(replies or [])
        self.fail_status = fail_status
        self.delay_s = 0.0  # response latency, for exercising in-flight behavior
        self.requests: list[dict] = []  # captured request payloads, in order
        self._served = 0
        self._lock = threading.Lock()

        endpoint = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):  # noqa: N802 (http.server API)
                length = int(self.headers.get("Content-Length", 0))
                try:
                    payload = json.loads(self.rfile.read(length).decode("utf-8"))
                except json.JSONDecodeError:
                    payload = {}
                if endpoint.delay_s:
                    time.sleep(endpoint.delay_s)
                with endpoint._lock:
                    endpoint.requests.append(payload)
                    if endpoint.fail_status is not None:
                        self.send_response(endpoint.fail_status)
                        self.end_headers()
                        self.wfile.write(b'{"error": "injected failure"}')
                        return
                    content = endpoint._next_reply(payload)
                body = json.dumps(
                    {"choices": [{"message": {"role": "assistant", "content": content}}]}
                ).encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    def _next_reply(self, payload: dict) -> str:
        if self._served < len(self.replies):
            reply = self.replies[self._served]
        else:
            last_user = next(
                (m.get("content", "") for m in reversed(payload.get("messages", [])) if m.get("role") == "user"),
                "",
            )
            reply = f"mock reply {self._served}: {last_user[:60]}"
        self._served += 1
        return reply

    @property
    def url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}/v1/chat/completions"

    def start(self) -> MockChatEndpoint:
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self) -> MockChatEndpoint:
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()
