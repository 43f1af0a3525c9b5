"""Prompt template loading and the structured-output parsing convention.

Templates are plain text files with ``$name`` placeholders, shipped as package
data and overridable via a directory argument or TOWNLET_PROMPTS_DIR. Models
are asked to answer with one fenced block holding a single JSON object; the
parser extracts the first balanced-braces block, so stray prose before or
after the block is tolerated.
"""

from __future__ import annotations

import json
import os
import string
from importlib import resources
from pathlib import Path

PROMPTS_DIR_ENV = "TOWNLET_PROMPTS_DIR"

TEMPLATE_NAMES = (
    "plan",
    "decompose",
    "react",
    "dialogue",
    "importance",
    "life_summary",
    "judge",
)


def load_templates(directory: str | Path | None = None) -> dict[str, string.Template]:
    """Read every known template at startup; missing files raise immediately."""
    out: dict[str, string.Template] = {}
    override = Path(directory) if directory else None
    env_dir = os.environ.get(PROMPTS_DIR_ENV)
    if override is None and env_dir:
        override = Path(env_dir)
    for name in TEMPLATE_NAMES:
        filename = f"{name}.txt"
        if override is not None and (override / filename).exists():
            text = (override / filename).read_text(encoding="utf-8")
        else:
            text = (resources.files("townlet") / "prompts" / filename).read_text(encoding="utf-8")
        out[name] = string.Template(text)
    return out


def render(templates: dict[str, string.Template], template: str, /, **values: object) -> str:
    return templates[template].substitute({k: str(v) for k, v in values.items()})


def extract_structured_block(text: str) -> dict:
    """First balanced ``{...}`` block in the text, parsed as a JSON object.

    Raises ValueError when no block exists, braces never balance, the block is
    not valid JSON, or the value is not an object.
    """
    start = text.find("{")
    if start < 0:
        raise ValueError("no structured block found")
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                try:
                    value = json.loads(text[start : i + 1])
                except json.JSONDecodeError as exc:
                    raise ValueError(f"structured block is not valid JSON: {exc}") from exc
                if not isinstance(value, dict):
                    raise ValueError("structured block is not an object")
                return value
    raise ValueError("unbalanced braces in structured block")
