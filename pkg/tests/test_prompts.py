"""Template loading, overrides, and the fenced-JSON extraction convention."""

from __future__ import annotations

import pytest

from townlet.prompts import (
    PROMPTS_DIR_ENV,
    TEMPLATE_NAMES,
    extract_structured_block,
    load_templates,
    render,
)


class TestLoadAndRender:
    def test_all_templates_ship_with_package(self, templates) -> None:
        assert set(templates) == set(TEMPLATE_NAMES)

    def test_packaged_templates_substitute_cleanly(self, templates) -> None:
        # every placeholder must be covered by the render call sites; smoke the
        # plan template with a representative value set
        text = render(
            templates,
            "plan",
            name="Ada",
            personality="steady",
            traits="curious, steady",
            lifestyle="tests things",
            current_time="07:00",
            current_tick=0,
            minutes_per_tick=1,
            memories="(none)",
            prior_plan="(none)",
            areas="Plot",
            horizon_ticks=120,
        )
        assert "Ada" in text and "$" not in text

    def test_directory_override_wins(self, tmp_path) -> None:
        (tmp_path / "plan.txt").write_text("custom $name plan", encoding="utf-8")
        templates = load_templates(tmp_path)
        assert render(templates, "plan", name="Bo") == "custom Bo plan"
        # untouched templates still come from the package
        assert templates["react"].template != ""

    def test_env_override(self, tmp_path, monkeypatch) -> None:
        (tmp_path / "react.txt").write_text("env react $name", encoding="utf-8")
        monkeypatch.setenv(PROMPTS_DIR_ENV, str(tmp_path))
        templates = load_templates()
        assert render(templates, "react", name="Cy") == "env react Cy"

    def test_explicit_directory_beats_env(self, tmp_path, monkeypatch) -> None:
        env_dir = tmp_path / "env"
        arg_dir = tmp_path / "arg"
        env_dir.mkdir()
        arg_dir.mkdir()
        (env_dir / "plan.txt").write_text("from env", encoding="utf-8")
        (arg_dir / "plan.txt").write_text("from arg", encoding="utf-8")
        monkeypatch.setenv(PROMPTS_DIR_ENV, str(env_dir))
        templates = load_templates(arg_dir)
        assert templates["plan"].template == "from arg"

    def test_missing_placeholder_raises(self, templates) -> None:
        with pytest.raises(KeyError):
            render(templates, "plan", name="Ada")


class TestExtractStructuredBlock:
    def test_plain_object(self) -> None:
        assert extract_structured_block('{"a": 1}') == {"a": 1}

    def test_prose_and_fences_tolerated(self) -> None:
        text = 'Sure! Here you go:\n```json\n{"decision": "continue"}\n```\nHope that helps.'
        assert extract_structured_block(text) == {"decision": "continue"}

    def test_nested_braces(self) -> None:
        text = 'prefix {"outer": {"inner": [1, 2]}} suffix'
        assert extract_structured_block(text) == {"outer": {"inner": [1, 2]}}

    def test_braces_inside_strings_ignored(self) -> None:
        text = '{"note": "curly } inside \\" quoted"}'
        assert extract_structured_block(text) == {"note": 'curly } inside " quoted'}

    def test_first_block_wins(self) -> None:
        text = '{"first": true} and later {"second": true}'
        assert extract_structured_block(text) == {"first": True}

    def test_no_block(self) -> None:
        with pytest.raises(ValueError, match="no structured block"):
            extract_structured_block("just words")

    def test_unbalanced(self) -> None:
        with pytest.raises(ValueError, match="unbalanced"):
            extract_structured_block('{"open": 1')

    def test_invalid_json(self) -> None:
        with pytest.raises(ValueError, match="not valid JSON"):
            extract_structured_block("{'single': 'quotes'}")

    def test_non_object_rejected(self) -> None:
        # an array never reaches brace balance, so it reads as "no block"
        with pytest.raises(ValueError):
            extract_structured_block("[1, 2, 3]")
