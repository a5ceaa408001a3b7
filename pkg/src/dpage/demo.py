"""A small built-in demo page exercising every engine feature.

The demo is a dice-rolling Python tutorial shaped as a branching dialog
tree.  Cell ids encode depth and breadth-first order (1a is the root, 5d is
the target), the reader's on-ramp to the target runs 1a - 2a - 3b - 4c - 5d,
and the 3a branch is an explorable tangent.  The root cell carries a
multiple-choice quiz, the target carries a code-writing question, cell 3b
edits the code sample and points at the lines it discusses.
"""

from __future__ import annotations

from .diffs import ADD, KEEP, DiffLine, FileDiff
from .model import Cell, DeicticPointer, Page, Persona, PAGE_VERSION

DEMO_PAGE_ID = "a4c2e9d8-5b07-4f7e-9c31-2d6f08d1b3a5"

QUIZ_BLOCK = """:::multiple-choice
Which of the following adds up to `2`?
::option[5+5]{feedback="Not quite. That adds to 10"}
::option[1+1]{correct}
::option[2+2]{feedback="Not quite. That adds to 4"}
:::"""

CODE_QUESTION_BLOCK = """:::code-question{language="python"}
Write a function `total(a, b)` that returns the total of two dice rolls.

```starter
def total(a, b):
    ...
```

```solution
def total(a, b):
    return a + b
```

```test
assert total(1, 1) == 2
assert total(3, 4) == 7
```
:::"""

_MAIN_PY = [
    "import random",
    "",
    "def roll():",
    "    return random.randint(1, 6)",
]

_ROLL_MANY = [
    "",
    "def roll_many(n):",
    "    return [roll() for _ in range(n)]",
]


def demo_page() -> Page:
    """Build the demo page; the same tree backs tests and sample exports."""
    personas = [
        Persona(
            id="inst",
            name="Ana",
            description="A knowledgeable instructor teaching the basics of Python dice simulations to novices.",
            kind="instructor",
        ),
        Persona(id="reader", name="You", description="A learner with some Python experience.", kind="reader"),
    ]

    cells = {
        "1a": Cell(
            id="1a",
            persona_id="inst",
            source=(
                "Welcome! Today we build a tiny dice-rolling script, one step at a time.\n"
                "Before we start, a quick warm-up:\n\n" + QUIZ_BLOCK
            ),
            child_ids=["2a"],
            code_diffs=[FileDiff(file="main.py", lines=[DiffLine(ADD, ln) for ln in _MAIN_PY], eof_newline=True)],
        ),
        "2a": Cell(
            id="2a",
            persona_id="reader",
            source="What does `randint` do here?",
            child_ids=["3a", "3b"],
        ),
        "3a": Cell(
            id="3a",
            persona_id="inst",
            source=(
                "Good question, though it is a bit of a tangent: `randint(1, 6)` picks an integer "
                "between 1 and 6, both ends included."
            ),
            child_ids=["4a", "4b"],
        ),
        "3b": Cell(
            id="3b",
            persona_id="inst",
            source=(
                "It picks a whole number from 1 to 6, like a die. Now let's roll several dice at "
                "once -- look at the new `roll_many` helper."
            ),
            child_ids=["4c"],
            code_diffs=[
                FileDiff(
                    file="main.py",
                    lines=[DiffLine(KEEP, ln) for ln in _MAIN_PY] + [DiffLine(ADD, ln) for ln in _ROLL_MANY],
                    eof_newline=True,
                )
            ],
            pointers=[DeicticPointer(file="main.py", start_line=6, end_line=7)],
        ),
        "4a": Cell(
            id="4a",
            persona_id="reader",
            source="Is `random` a built-in module?",
            child_ids=["5a"],
        ),
        "4b": Cell(
            id="4b",
            persona_id="reader",
            source="Could we call `import` inside of `roll`?",
            child_ids=["5b", "5c"],
        ),
        "4c": Cell(
            id="4c",
            persona_id="reader",
            source="Got it -- what's next?",
            child_ids=["5d"],
        ),
        "5a": Cell(
            id="5a",
            persona_id="inst",
            source="`random` ships with Python's standard library, so there is nothing extra to install.",
        ),
        "5b": Cell(
            id="5b",
            persona_id="inst",
            source="You could, but imports at the top keep the cost out of the hot path and are easier to find.",
        ),
        "5c": Cell(
            id="5c",
            persona_id="inst",
            source="Python allows it, but style guides recommend module-level imports.",
        ),
        "5d": Cell(
            id="5d",
            persona_id="inst",
            source=(
                "That's the whole script! To wrap up, try writing one last function yourself.\n\n"
                + CODE_QUESTION_BLOCK
            ),
        ),
    }

    return Page(
        version=PAGE_VERSION,
        id=DEMO_PAGE_ID,
        title="Rolling dice with Python",
        personas=personas,
        cells=cells,
        root_id="1a",
        target_id="5d",
        media={"logo.png": b"\x89PNG\r\n\x1a\n\x00\x01\x02\x03\x04\x05\x06\x07"},
    )
