"""Prompt template loading and rendering.

Templates are plain text files with a ``<<SYSTEM>>`` / ``<<USER>>`` split
and ``{placeholder}`` fields; the packaged defaults can be overridden by
pointing ``prompts_dir`` at a directory containing files with the same
names.

Placeholders by template:

* ``generation``: ``{count}``, ``{examples}``, ``{n}``
* ``baseline_generation``: ``{nl}``
* ``refinement``: ``{nl}``, ``{preliminary}``, ``{references}``
* ``self_refine_feedback``: ``{nl}``, ``{preliminary}``
* ``self_refine_refinement``: ``{nl}``, ``{preliminary}``, ``{feedback}``
* ``incontext_generation``: ``{nl}``, ``{references}``
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from stlkit.errors import DomainError

TEMPLATE_NAMES = (
    "generation",
    "baseline_generation",
    "refinement",
    "self_refine_feedback",
    "self_refine_refinement",
    "incontext_generation",
)

_SYSTEM_MARK = "<<SYSTEM>>"
_USER_MARK = "<<USER>>"


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    system: str
    user: str

    def render(self, **fields: object) -> tuple[str, str]:
        """(system, user) with placeholders substituted."""
        try:
            return self.system.format(**fields), self.user.format(**fields)
        except (KeyError, IndexError) as e:
            raise DomainError(f"template {self.name!r}: missing placeholder {e}") from None


def load_template(name: str, prompts_dir: str | Path | None = None) -> PromptTemplate:
    if name not in TEMPLATE_NAMES:
        raise DomainError(f"unknown prompt template {name!r}")
    if prompts_dir is not None:
        override = Path(prompts_dir) / f"{name}.txt"
        if override.exists():
            return _parse(name, override.read_text(encoding="utf-8"))
    text = resources.files("stlkit.prompts").joinpath(f"{name}.txt").read_text(encoding="utf-8")
    return _parse(name, text)


def _parse(name: str, text: str) -> PromptTemplate:
    if _SYSTEM_MARK not in text or _USER_MARK not in text:
        raise DomainError(f"template {name!r} must contain {_SYSTEM_MARK} and {_USER_MARK}")
    _, rest = text.split(_SYSTEM_MARK, 1)
    system, user = rest.split(_USER_MARK, 1)
    return PromptTemplate(name=name, system=system.strip(), user=user.strip())


def format_example_block(pairs) -> str:
    """Numbered NL/STL blocks used for exemplars and reference pairs."""
    blocks = []
    for i, pair in enumerate(pairs, start=1):
        blocks.append(f"Example {i}:\nNL: {pair.nl}\nSTL: {pair.stl}")
    return "\n\n".join(blocks) if blocks else "(none)"
