"""Extended-Markdown directive parsing for interactive assessment blocks.

Dialog messages are plain Markdown extended with generic directives:

    container form (multi-line)               leaf form (one line)
    :::multiple-choice                        ::option[1+1]{correct}
    Which of the following adds up to `2`?
    ::option[5+5]{feedback="Not quite. That adds to 10"}
    ::option[1+1]{correct}
    ::option[2+2]{feedback="Not quite. That adds to 4"}
    :::

A container opens with ``:::<type>`` or ``:::<type>{attrs}`` and closes with
a bare ``:::`` line.  Attributes are ``{key="value" flag}`` with double-quoted
values and bare flags.  Leaf directives are only meaningful inside containers
(``::option`` above); a leaf at the top level is reported as a diagnostic.
Nested containers are unsupported and reported.  Lines inside fenced code
blocks are never treated as directive markers.

Every directive gets a stable id of the form ``<messageId>:<type>:<index>``
where the index counts directives of that type within the message, so ids
survive wording edits that do not add, remove, or reorder same-type blocks.

Supported directive types:

``multiple-choice``
    Prompt (leading markdown) followed by ``::option[label]{...}`` lines.
    ``{correct}`` marks correct options, ``{feedback="..."}`` attaches
    feedback shown when that option is picked incorrectly.

``code-question``
    ``{language="python"}`` attribute is required.  The body is prompt
    markdown plus fenced code blocks whose info strings name their role:
    ```` ```starter ````, ```` ```solution ````, ```` ```test ````.

Unknown container types still become directives (with an opaque spec) so
future types round-trip; they are flagged with a diagnostic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import DirectiveError

MULTIPLE_CHOICE = "multiple-choice"
CODE_QUESTION = "code-question"

_CONTAINER_RE = re.compile(r"^:::([A-Za-z][\w-]*)(\{.*\})?\s*$")
_CLOSE_RE = re.compile(r"^:::\s*$")
_LEAF_RE = re.compile(r"^::([A-Za-z][\w-]*)(?:\[(.*)\])?(\{.*\})?\s*$")
_FENCE_RE = re.compile(r"^\s{0,3}(```+|~~~+)(.*)$")
_ATTR_RE = re.compile(r'([A-Za-z_][\w-]*)(?:="((?:[^"\\]|\\.)*)")?')


@dataclass
class MultipleChoiceOption:
    label: str
    correct: bool = False
    feedback: str | None = None


@dataclass
class MultipleChoiceSpec:
    prompt: str
    options: list[MultipleChoiceOption]

    def correct_indices(self) -> set[int]:
        return {i for i, opt in enumerate(self.options) if opt.correct}


@dataclass
class CodeQuestionSpec:
    prompt: str
    language: str
    starter: str = ""
    solution: str | None = None
    tests: str | None = None


@dataclass
class Directive:
    id: str
    dir_type: str
    attributes: dict[str, str | None]
    body: str
    spec: MultipleChoiceSpec | CodeQuestionSpec | None = None


@dataclass
class Segment:
    kind: str  # "markdown" | "directive"
    text: str  # exact source span; concatenation of spans reproduces the input
    directive: Directive | None = None


@dataclass
class Diagnostic:
    message: str
    line: int  # 1-based source line


@dataclass
class ScanResult:
    segments: list[Segment] = field(default_factory=list)
    directives: list[Directive] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)


def parse_attributes(raw: str | None) -> dict[str, str | None]:
    """Parse ``{key="value" flag}`` into an ordered map; flags map to None."""
    if raw is None or raw == "":
        return {}
    inner = raw.strip()
    if not (inner.startswith("{") and inner.endswith("}")):
        raise DirectiveError(f"malformed attribute syntax: {raw!r}")
    inner = inner[1:-1]
    attrs: dict[str, str | None] = {}
    pos = 0
    while pos < len(inner):
        if inner[pos].isspace():
            pos += 1
            continue
        m = _ATTR_RE.match(inner, pos)
        if not m:
            raise DirectiveError(f"malformed attribute syntax near {inner[pos:]!r}")
        value = m.group(2)
        attrs[m.group(1)] = value.replace('\\"', '"').replace("\\\\", "\\") if value is not None else None
        pos = m.end()
    return attrs


def parse_multiple_choice(body: str) -> MultipleChoiceSpec:
    """Parse a multiple-choice body: prompt markdown then ``::option`` lines."""
    prompt_lines: list[str] = []
    options: list[MultipleChoiceOption] = []
    for line in body.split("\n"):
        m = _LEAF_RE.match(line)
        if m and m.group(1) == "option":
            attrs = parse_attributes(m.group(3))
            options.append(
                MultipleChoiceOption(
                    label=m.group(2) or "",
                    correct="correct" in attrs,
                    feedback=attrs.get("feedback"),
                )
            )
        elif not options:
            prompt_lines.append(line)
        elif line.strip():
            raise DirectiveError(f"unexpected content after options: {line!r}")
    if not options:
        raise DirectiveError("multiple-choice block has no options")
    if not any(opt.correct for opt in options):
        raise DirectiveError("multiple-choice block has no correct option")
    return MultipleChoiceSpec(prompt="\n".join(prompt_lines).strip("\n"), options=options)


def parse_code_question(body: str, attributes: dict[str, str | None]) -> CodeQuestionSpec:
    """Parse a code-question body: prompt plus starter/solution/test fences."""
    language = attributes.get("language")
    if not language:
        raise DirectiveError("code-question requires a language attribute")
    sections: dict[str, list[str]] = {}
    prompt_lines: list[str] = []
    current: list[str] | None = None
    fence_marker = ""
    for line in body.split("\n"):
        fence = _FENCE_RE.match(line)
        if current is not None:
            if fence and fence.group(1).startswith(fence_marker[0]) and not fence.group(2).strip():
                current = None
            else:
                current.append(line)
            continue
        if fence:
            info = fence.group(2).strip()
            if info in ("starter", "solution", "test"):
                if info in sections:
                    raise DirectiveError(f"duplicate {info} block in code-question")
                fence_marker = fence.group(1)
                current = sections.setdefault(info, [])
                continue
        prompt_lines.append(line)
    if current is not None:
        raise DirectiveError("unclosed code fence in code-question")
    return CodeQuestionSpec(
        prompt="\n".join(prompt_lines).strip("\n"),
        language=language,
        starter="\n".join(sections.get("starter", [])),
        solution="\n".join(sections["solution"]) if "solution" in sections else None,
        tests="\n".join(sections["test"]) if "test" in sections else None,
    )


def scan(message_id: str, source: str) -> ScanResult:
    """Segment a message into markdown and directive blocks and parse each.

    Never raises: malformed blocks degrade to markdown segments and leave a
    diagnostic behind.  Directive ids are assigned per the message-scoped,
    type-local indexing scheme.
    """
    result = ScanResult()
    lines = source.split("\n")
    starts = [0]
    for line in lines:
        starts.append(starts[-1] + len(line) + 1)

    def span(first: int, last: int) -> str:
        # Char span from the start of line `first` through line `last`,
        # including its terminating newline when one exists.
        return source[starts[first] : min(starts[last + 1], len(source))]

    counters: dict[str, int] = {}
    segments = result.segments
    md_start = 0  # first line of the pending markdown run
    i = 0
    in_fence = False

    def flush_markdown(upto: int) -> None:
        if upto > md_start:
            text = span(md_start, upto - 1)
            if text:
                segments.append(Segment("markdown", text))

    while i < len(lines):
        line = lines[i]
        if in_fence:
            fence = _FENCE_RE.match(line)
            if fence and not fence.group(2).strip():
                in_fence = False
            i += 1
            continue
        if _FENCE_RE.match(line):
            in_fence = True
            i += 1
            continue
        open_match = _CONTAINER_RE.match(line)
        if not open_match and line.startswith(":::") and line.strip() != ":::":
            result.diagnostics.append(Diagnostic(f"malformed directive opening: {line!r}", i + 1))
            i += 1
            continue
        if open_match:
            close = _find_close(lines, i + 1, result.diagnostics)
            if close is None:
                result.diagnostics.append(Diagnostic(f"unclosed directive container {open_match.group(1)!r}", i + 1))
                i += 1
                continue
            dir_type = open_match.group(1)
            try:
                attributes = parse_attributes(open_match.group(2))
            except DirectiveError as err:
                result.diagnostics.append(Diagnostic(str(err), i + 1))
                i += 1
                continue
            body = "\n".join(lines[i + 1 : close])
            spec = None
            if dir_type == MULTIPLE_CHOICE:
                try:
                    spec = parse_multiple_choice(body)
                except DirectiveError as err:
                    result.diagnostics.append(Diagnostic(str(err), i + 1))
            elif dir_type == CODE_QUESTION:
                try:
                    spec = parse_code_question(body, attributes)
                except DirectiveError as err:
                    result.diagnostics.append(Diagnostic(str(err), i + 1))
            else:
                result.diagnostics.append(Diagnostic(f"unknown directive type {dir_type!r}", i + 1))
            index = counters.get(dir_type, 0)
            counters[dir_type] = index + 1
            directive = Directive(
                id=f"{message_id}:{dir_type}:{index}",
                dir_type=dir_type,
                attributes=attributes,
                body=body,
                spec=spec,
            )
            flush_markdown(i)
            segments.append(Segment("directive", span(i, close), directive))
            result.directives.append(directive)
            i = close + 1
            md_start = i
            continue
        leaf = _LEAF_RE.match(line)
        if leaf:
            result.diagnostics.append(Diagnostic(f"leaf directive {leaf.group(1)!r} outside a container", i + 1))
        i += 1
    flush_markdown(len(lines))
    return result


def _find_close(lines: list[str], start: int, diagnostics: list[Diagnostic]) -> int | None:
    in_fence = False
    nested: list[Diagnostic] = []
    for j in range(start, len(lines)):
        line = lines[j]
        fence = _FENCE_RE.match(line)
        if in_fence:
            if fence and not fence.group(2).strip():
                in_fence = False
            continue
        if fence:
            in_fence = True
            continue
        if _CLOSE_RE.match(line):
            diagnostics.extend(nested)
            return j
        if _CONTAINER_RE.match(line):
            nested.append(Diagnostic("nested directive containers are unsupported", j + 1))
    return None


def scan_directives(message_id: str, source: str) -> list[Directive]:
    """All directives in a message, in document order, with stable ids."""
    return scan(message_id, source).directives


def render_segments(source: str, message_id: str = "") -> list[Segment]:
    """Lossless split of a message into markdown and directive segments."""
    return scan(message_id, source).segments


def strip_directives(source: str, placeholder: str = "[{dir_type} exercise omitted]") -> str:
    """Replace directive blocks with a one-line placeholder naming the type."""
    parts: list[str] = []
    for seg in render_segments(source):
        if seg.kind == "markdown":
            parts.append(seg.text)
        else:
            line = placeholder.format(dir_type=seg.directive.dir_type)
            parts.append(line + ("\n" if seg.text.endswith("\n") else ""))
    return "".join(parts)
