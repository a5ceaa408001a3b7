"""Local-first persistence of per-reader session state.

One JSON file per page id (``<pageId>.dstate``) in a configurable state
directory, written atomically (temp file + rename) so a crash mid-save can
never destroy the previous state.  Page content is never written here:
sharing a page file leaks nothing about any reader.
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from pathlib import Path

from .errors import StateCorruptError
from .navigation import UserState

STATE_EXTENSION = ".dstate"


def state_path(key: str, state_dir: str | Path) -> Path:
    return Path(state_dir) / f"{key}{STATE_EXTENSION}"


def default_state_dir() -> Path:
    base = os.environ.get("XDG_DATA_HOME") or Path.home() / ".local" / "share"
    return Path(base) / "dpage"


def save_state(state: UserState, state_dir: str | Path, key: str | None = None) -> Path:
    """Atomically persist a session state; returns the file written.

    Files are keyed by page id; pass ``key`` to store per-session instead
    (multi-user services).
    """
    directory = Path(state_dir)
    directory.mkdir(parents=True, exist_ok=True)
    target = state_path(key or state.page_id, directory)
    payload = (json.dumps(state.to_json_dict(), ensure_ascii=False, sort_keys=True, indent=2) + "\n").encode("utf-8")
    fd, temp_name = tempfile.mkstemp(dir=directory, prefix=target.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(temp_name, target)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise
    return target


def load_state(key: str, state_dir: str | Path) -> UserState | None:
    """The last fully written state for a page (or session key), or None.

    A corrupt file is moved aside to a recovery name and reported via
    StateCorruptError so no reader data is silently discarded.
    """
    target = state_path(key, state_dir)
    if not target.exists():
        return None
    try:
        data = json.loads(target.read_text(encoding="utf-8"))
        return UserState.from_json_dict(data)
    except (json.JSONDecodeError, UnicodeDecodeError, KeyError, TypeError) as err:
        recovery = target.with_name(f"{target.name}.corrupt-{int(time.time())}")
        counter = 0
        while recovery.exists():
            counter += 1
            recovery = target.with_name(f"{target.name}.corrupt-{int(time.time())}-{counter}")
        os.replace(target, recovery)
        raise StateCorruptError(target, recovery) from err
