from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpage.directives import (
    Directive,
    MultipleChoiceSpec,
    parse_attributes,
    parse_code_question,
    parse_multiple_choice,
    render_segments,
    scan,
    scan_directives,
    strip_directives,
)
from dpage.errors import DirectiveError

QUIZ = """:::multiple-choice
Which of the following adds up to `2`?
::option[5+5]{feedback="Not quite. That adds to 10"}
::option[1+1]{correct}
::option[2+2]{feedback="Not quite. That adds to 4"}
:::"""

CODE_Q = """:::code-question{language="python"}
Write a function `two()` that returns 2.

```starter
def two():
    ...
```

```solution
def two():
    return 2
```

```test
assert two() == 2
```
:::"""


def test_quiz_listing_scans_to_one_directive():
    directives = scan_directives("m7", QUIZ)
    assert len(directives) == 1
    d = directives[0]
    assert d.id == "m7:multiple-choice:0"
    assert isinstance(d.spec, MultipleChoiceSpec)
    assert len(d.spec.options) == 3
    assert [opt.correct for opt in d.spec.options] == [False, True, False]
    assert d.spec.options[0].feedback == "Not quite. That adds to 10"


def test_quiz_listing_spec_fields_verbatim():
    spec = parse_multiple_choice("\n".join(QUIZ.split("\n")[1:-1]))
    assert spec.prompt == "Which of the following adds up to `2`?"
    assert [(o.label, o.correct, o.feedback) for o in spec.options] == [
        ("5+5", False, "Not quite. That adds to 10"),
        ("1+1", True, None),
        ("2+2", False, "Not quite. That adds to 4"),
    ]


def test_plain_prose_has_no_directives():
    assert scan_directives("m7", "Just some *plain* prose.\n\nTwo paragraphs.") == []


def test_type_local_indexing():
    source = "\n\n".join([QUIZ, QUIZ, CODE_Q])
    ids = [d.id for d in scan_directives("m9", source)]
    assert ids == ["m9:multiple-choice:0", "m9:multiple-choice:1", "m9:code-question:0"]


def test_ids_stable_under_wording_edits():
    source = "intro text\n\n" + QUIZ + "\n\nmiddle\n\n" + CODE_Q + "\n"
    edited = source.replace("intro text", "completely different intro")
    edited = edited.replace("adds up to `2`", "sums to `2`")
    edited = edited.replace("5+5", "7+7")
    assert [d.id for d in scan_directives("m", source)] == [d.id for d in scan_directives("m", edited)]


def test_reordering_changes_ids():
    one = QUIZ + "\n\n" + CODE_Q
    other = CODE_Q + "\n\n" + QUIZ
    assert [d.id for d in scan_directives("m", one)] != [d.id for d in scan_directives("m", other)]
    # per-type indices still make the multiset of ids equal
    assert sorted(d.id for d in scan_directives("m", one)) == sorted(d.id for d in scan_directives("m", other))


def test_segments_are_lossless():
    source = "before\n\n" + QUIZ + "\n\nafter"
    segments = render_segments(source, "m")
    assert [s.kind for s in segments] == ["markdown", "directive", "markdown"]
    assert "".join(s.text for s in segments) == source


def test_segments_empty_source():
    assert render_segments("") == []


def test_segments_lossless_with_trailing_newline():
    source = QUIZ + "\n"
    segments = render_segments(source, "m")
    assert [s.kind for s in segments] == ["directive"]
    assert "".join(s.text for s in segments) == source


def test_code_question_parses_all_sections():
    (d,) = scan_directives("m", CODE_Q)
    spec = d.spec
    assert spec.language == "python"
    assert spec.prompt == "Write a function `two()` that returns 2."
    assert spec.starter == "def two():\n    ..."
    assert spec.solution == "def two():\n    return 2"
    assert spec.tests == "assert two() == 2"


def test_code_question_missing_language():
    with pytest.raises(DirectiveError, match="language"):
        parse_code_question("prompt only", {})


def test_multiple_choice_no_options():
    with pytest.raises(DirectiveError, match="no options"):
        parse_multiple_choice("just a prompt")


def test_multiple_choice_no_correct_option():
    with pytest.raises(DirectiveError, match="no correct"):
        parse_multiple_choice('::option[a]{feedback="nope"}')


def test_malformed_block_degrades_with_diagnostic():
    source = ":::multiple-choice\nprompt but no options\n:::"
    result = scan("m", source)
    assert len(result.directives) == 1
    assert result.directives[0].spec is None
    assert any("no options" in d.message for d in result.diagnostics)


def test_unclosed_container_degrades_to_markdown():
    source = ":::multiple-choice\nnever closed"
    result = scan("m", source)
    assert result.directives == []
    assert [s.kind for s in result.segments] == ["markdown"]
    assert "".join(s.text for s in result.segments) == source
    assert any("unclosed" in d.message for d in result.diagnostics)


def test_unknown_directive_type_kept_with_diagnostic():
    source = ":::hint\nsome body\n:::"
    result = scan("m", source)
    assert len(result.directives) == 1
    assert result.directives[0].id == "m:hint:0"
    assert result.directives[0].spec is None
    assert any("unknown directive type" in d.message for d in result.diagnostics)


def test_leaf_outside_container_flagged():
    result = scan("m", "text\n::option[a]{correct}\nmore")
    assert result.directives == []
    assert any("outside a container" in d.message for d in result.diagnostics)


def test_directive_markers_inside_fences_ignored():
    source = "```\n:::multiple-choice\n:::\n```\nreal text"
    result = scan("m", source)
    assert result.directives == []
    assert "".join(s.text for s in result.segments) == source


def test_nested_container_diagnostic():
    source = ":::multiple-choice\n:::hint\n::option[a]{correct}\n:::"
    result = scan("m", source)
    assert len(result.directives) == 1
    assert any("nested" in d.message for d in result.diagnostics)


def test_attribute_parsing():
    assert parse_attributes('{correct feedback="a \\"b\\" c" x="1"}') == {
        "correct": None,
        "feedback": 'a "b" c',
        "x": "1",
    }
    assert parse_attributes(None) == {}
    with pytest.raises(DirectiveError):
        parse_attributes('{bad=unquoted}')


def test_strip_directives_inserts_placeholder():
    source = "before\n" + QUIZ + "\nafter"
    stripped = strip_directives(source)
    assert "multiple-choice" in stripped
    assert "::option" not in stripped
    assert "before" in stripped and "after" in stripped


@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=400))
@settings(max_examples=300, deadline=None)
def test_scan_never_raises_and_segments_lossless(source):
    result = scan("m", source)
    assert "".join(s.text for s in result.segments) == source
    for d in result.directives:
        assert isinstance(d, Directive)
