"""Line-granularity diff engine for incremental code samples.

Code attached to a dialog cell is stored as a list of per-file diffs against
the parent cell's code, so a page never repeats unchanged file content.  A
diff is an ordered list of keep/add/del lines; applying it to the base file
must consume the base's lines exactly, which makes corrupt chains detectable.

Trailing newlines are not representable in a line list, so each file diff
carries an explicit ``eof_newline`` bit describing the *result* file.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DiffConflictError

KEEP = "keep"
ADD = "add"
DEL = "del"

_OPS = (KEEP, ADD, DEL)


@dataclass
class DiffLine:
    op: str
    text: str

    def __post_init__(self):
        if self.op not in _OPS:
            raise ValueError(f"invalid diff op {self.op!r}")


@dataclass
class FileDiff:
    file: str
    lines: list[DiffLine] = field(default_factory=list)
    deleted: bool = False
    eof_newline: bool = True
    extra: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            **self.extra,
            "file": self.file,
            "deleted": self.deleted,
            "lines": [{"op": ln.op, "text": ln.text} for ln in self.lines],
            "eofNewline": self.eof_newline,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> FileDiff:
        known = {"file", "deleted", "lines", "eofNewline"}
        return cls(
            file=data["file"],
            deleted=bool(data.get("deleted", False)),
            lines=[DiffLine(ln["op"], ln["text"]) for ln in data.get("lines", [])],
            eof_newline=bool(data.get("eofNewline", True)),
            extra={k: v for k, v in data.items() if k not in known},
        )


@dataclass
class CodeSnapshot:
    """Full multi-file code state at one cell: filename -> file text."""

    files: dict[str, str] = field(default_factory=dict)

    def __contains__(self, filename: str) -> bool:
        return filename in self.files

    def line_count(self, filename: str) -> int:
        return len(split_lines(self.files[filename])[0])

    def copy(self) -> CodeSnapshot:
        return CodeSnapshot(dict(self.files))


def split_lines(text: str) -> tuple[list[str], bool]:
    """Split file text into terminator-free lines plus a trailing-newline bit."""
    if text == "":
        return [], False
    if text.endswith("\n"):
        return text[:-1].split("\n"), True
    return text.split("\n"), False


def join_lines(lines: list[str], eof_newline: bool) -> str:
    if not lines:
        return ""
    return "\n".join(lines) + ("\n" if eof_newline else "")


def apply_file_diff(base_lines: list[str], diff: FileDiff) -> list[str]:
    """Apply one file's diff to its base line list.

    Raises DiffConflictError when a keep/del line disagrees with the base or
    when the diff does not consume the base exactly.
    """
    out: list[str] = []
    pos = 0
    for ln in diff.lines:
        if ln.op == ADD:
            out.append(ln.text)
            continue
        if pos >= len(base_lines):
            raise DiffConflictError(diff.file, pos + 1, f"diff expects {ln.op} {ln.text!r} past end of base")
        if base_lines[pos] != ln.text:
            raise DiffConflictError(
                diff.file, pos + 1, f"diff expects {ln.text!r} but base has {base_lines[pos]!r}"
            )
        if ln.op == KEEP:
            out.append(ln.text)
        pos += 1
    if pos != len(base_lines):
        raise DiffConflictError(diff.file, pos + 1, "diff does not consume the whole base file")
    return out


def apply_diff(base: CodeSnapshot, diffs: list[FileDiff]) -> CodeSnapshot:
    """Apply per-file diffs to a snapshot; untouched files pass through."""
    files = dict(base.files)
    for fd in diffs:
        if fd.deleted:
            if fd.file not in files:
                raise DiffConflictError(fd.file, 1, "deletion of a file absent from the base")
            del files[fd.file]
            continue
        if fd.file in files:
            base_lines = split_lines(files[fd.file])[0]
        else:
            base_lines = []
            for ln in fd.lines:
                if ln.op != ADD:
                    raise DiffConflictError(fd.file, 1, f"{ln.op} line in diff for a file absent from the base")
        new_lines = apply_file_diff(base_lines, fd)
        files[fd.file] = join_lines(new_lines, fd.eof_newline)
    return CodeSnapshot(files)


def diff_lines(old: list[str], new: list[str]) -> list[DiffLine]:
    """Minimal keep/add/del script turning ``old`` into ``new`` (Myers)."""
    trace = _myers_trace(old, new)
    script: list[DiffLine] = []
    x, y = len(old), len(new)
    for d in range(len(trace) - 1, -1, -1):
        v = trace[d]
        k = x - y
        if k == -d or (k != d and v.get(k - 1, 0) < v.get(k + 1, 0)):
            prev_k = k + 1
        else:
            prev_k = k - 1
        prev_x = v.get(prev_k, 0)
        prev_y = prev_x - prev_k
        while x > prev_x and y > prev_y:
            script.append(DiffLine(KEEP, old[x - 1]))
            x -= 1
            y -= 1
        if d > 0:
            if x == prev_x:
                script.append(DiffLine(ADD, new[prev_y]))
            else:
                script.append(DiffLine(DEL, old[prev_x]))
        x, y = prev_x, prev_y
    script.reverse()
    return script


def _myers_trace(a: list[str], b: list[str]) -> list[dict[int, int]]:
    n, m = len(a), len(b)
    v: dict[int, int] = {1: 0}
    trace: list[dict[int, int]] = []
    for d in range(n + m + 1):
        trace.append(dict(v))
        for k in range(-d, d + 1, 2):
            if k == -d or (k != d and v.get(k - 1, 0) < v.get(k + 1, 0)):
                x = v.get(k + 1, 0)
            else:
                x = v.get(k - 1, 0) + 1
            y = x - k
            while x < n and y < m and a[x] == b[y]:
                x += 1
                y += 1
            v[k] = x
            if x >= n and y >= m:
                return trace
    return trace


def compute_diff(old: CodeSnapshot, new: CodeSnapshot) -> list[FileDiff]:
    """Per-file diffs from ``old`` to ``new``; identical files are omitted.

    apply_diff(old, compute_diff(old, new)) == new for any pair of snapshots,
    and each file's add+del count is minimal.
    """
    result: list[FileDiff] = []
    for name in sorted(set(old.files) | set(new.files)):
        if name not in new.files:
            result.append(FileDiff(file=name, deleted=True, lines=[], eof_newline=False))
            continue
        new_text = new.files[name]
        old_text = old.files.get(name)
        if old_text == new_text:
            continue
        old_lines = split_lines(old_text)[0] if old_text is not None else []
        new_lines, eof = split_lines(new_text)
        result.append(FileDiff(file=name, lines=diff_lines(old_lines, new_lines), eof_newline=eof))
    return result
