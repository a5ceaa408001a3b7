"""Grading for interactive assessments and the opt-in code runner.

Grading is pure; answer records live in the reader's session state, never in
the page.  Code execution shells out to a per-language command template and
is disabled unless the service configuration explicitly enables it.
"""

from __future__ import annotations

import subprocess
import tempfile
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

from .directives import CodeQuestionSpec, MultipleChoiceSpec
from .errors import RunnerDisabledError, RunnerLaunchError, UnsupportedLanguageError

UNANSWERED = "unanswered"
CORRECT = "correct"
INCORRECT = "incorrect"
REVEALED = "revealed"
SKIPPED = "skipped"

# correct and revealed are terminal; incorrect may still become correct
_TERMINAL = {CORRECT, REVEALED}


@dataclass
class AnswerRecord:
    directive_id: str
    attempts: int = 0
    last_answer: list[int] | str | None = None
    status: str = UNANSWERED

    def to_json_dict(self) -> dict:
        return {
            "directiveId": self.directive_id,
            "attempts": self.attempts,
            "lastAnswer": self.last_answer,
            "status": self.status,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> AnswerRecord:
        return cls(
            directive_id=data["directiveId"],
            attempts=int(data.get("attempts", 0)),
            last_answer=data.get("lastAnswer"),
            status=data.get("status", UNANSWERED),
        )


@dataclass
class MultipleChoiceResult:
    correct: bool
    feedback: list[tuple[int, str]] = field(default_factory=list)


@dataclass
class RunResult:
    exit_status: int | None
    stdout: str
    stderr: str
    duration_ms: int
    tests_passed: bool | None = None
    timed_out: bool = False

    def to_json_dict(self) -> dict:
        return {
            "exitStatus": self.exit_status,
            "stdout": self.stdout,
            "stderr": self.stderr,
            "durationMs": self.duration_ms,
            "testsPassed": self.tests_passed,
            "timedOut": self.timed_out,
        }


@dataclass
class LanguageRunner:
    command: list[str]  # argv template; "{file}" is replaced by the source path
    timeout_ms: int = 10_000
    enabled: bool = False


@dataclass
class RunnerConfig:
    languages: dict[str, LanguageRunner] = field(default_factory=dict)

    @classmethod
    def from_json_dict(cls, data: dict) -> RunnerConfig:
        languages = {}
        for lang, raw in data.items():
            languages[lang] = LanguageRunner(
                command=list(raw["command"]),
                timeout_ms=int(raw.get("timeoutMs", 10_000)),
                enabled=bool(raw.get("enabled", False)),
            )
        return cls(languages)


_SUFFIXES = {"python": ".py", "javascript": ".js", "scheme": ".scm", "ruby": ".rb", "shell": ".sh"}


def answer_multiple_choice(spec: MultipleChoiceSpec, selected: set[int]) -> MultipleChoiceResult:
    """Grade a selection: correct iff it equals the set of correct options.

    Feedback is returned for each selected incorrect option that has any.
    """
    for index in selected:
        if index < 0 or index >= len(spec.options):
            raise ValueError(f"option index {index} out of range (0..{len(spec.options) - 1})")
    correct = set(selected) == spec.correct_indices()
    feedback = [
        (i, spec.options[i].feedback)
        for i in sorted(selected)
        if not spec.options[i].correct and spec.options[i].feedback
    ]
    return MultipleChoiceResult(correct=correct, feedback=feedback)


def submit_code_answer(spec: CodeQuestionSpec, code: str, runner: RunnerConfig) -> RunResult:
    """Run submitted code (with the question's tests appended) under a timeout.

    Timeouts are reported in the result, not raised.  A disabled or missing
    runner raises so callers can distinguish configuration from failure.
    """
    lang = runner.languages.get(spec.language)
    if lang is None:
        raise UnsupportedLanguageError(f"no runner configured for language {spec.language!r}")
    if not lang.enabled:
        raise RunnerDisabledError(f"code execution for {spec.language!r} is disabled")

    program = code if not spec.tests else f"{code}\n\n{spec.tests}\n"
    suffix = _SUFFIXES.get(spec.language, ".txt")
    with tempfile.TemporaryDirectory(prefix="dpage-run-") as workdir:
        path = Path(workdir) / f"submission{suffix}"
        path.write_text(program, encoding="utf-8")
        argv = [arg.replace("{file}", str(path)) for arg in lang.command]
        if not any("{file}" in arg for arg in lang.command):
            argv.append(str(path))
        started = time.monotonic()
        try:
            proc = subprocess.run(
                argv,
                capture_output=True,
                text=True,
                timeout=lang.timeout_ms / 1000.0,
                cwd=workdir,
            )
        except subprocess.TimeoutExpired as err:
            return RunResult(
                exit_status=None,
                stdout=_decode(err.stdout),
                stderr=_decode(err.stderr),
                duration_ms=lang.timeout_ms,
                tests_passed=False if spec.tests else None,
                timed_out=True,
            )
        except OSError as err:
            raise RunnerLaunchError(f"could not launch {argv[0]!r}: {err}") from err
        duration = min(int((time.monotonic() - started) * 1000), lang.timeout_ms)
        return RunResult(
            exit_status=proc.returncode,
            stdout=proc.stdout,
            stderr=proc.stderr,
            duration_ms=duration,
            tests_passed=(proc.returncode == 0) if spec.tests else None,
        )


def _decode(data) -> str:
    if data is None:
        return ""
    return data.decode("utf-8", "replace") if isinstance(data, bytes) else data


def reveal_answer(spec: MultipleChoiceSpec | CodeQuestionSpec) -> str:
    """The stored solution: labels of correct options, or the solution code."""
    if isinstance(spec, MultipleChoiceSpec):
        return ", ".join(opt.label for opt in spec.options if opt.correct)
    if spec.solution is None:
        raise ValueError("code question has no stored solution")
    return spec.solution


# ---------------------------------------------------------------------------
# answer-record transitions


def record_attempt(record: AnswerRecord, answer: list[int] | str) -> AnswerRecord:
    """Count one submission; every graded submission passes through here."""
    return replace(record, attempts=record.attempts + 1, last_answer=answer)


def apply_grade(record: AnswerRecord, correct: bool) -> AnswerRecord:
    if record.status in _TERMINAL:
        return record
    return replace(record, status=CORRECT if correct else INCORRECT)


def skip(record: AnswerRecord) -> AnswerRecord:
    """Mark a question explicitly skipped; attempts are unchanged."""
    if record.status in _TERMINAL:
        return record
    return replace(record, status=SKIPPED)


def mark_revealed(record: AnswerRecord) -> AnswerRecord:
    """Revealed answers never count as correct afterwards."""
    if record.status in _TERMINAL:
        return record
    return replace(record, status=REVEALED)
