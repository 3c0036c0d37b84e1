"""NL-to-STL transformation pipelines.

Four modes share one entry point:

* ``kgst`` — knowledge-guided generate-then-refine: a generator backend
  drafts a formula, the top-k most similar pairs are retrieved from the
  knowledge store, and a refiner backend corrects the draft with those
  reference pairs in context.
* ``no-refine`` — generator only (refinement ablated).
* ``no-finetune`` — no dedicated generator: the refiner backend produces
  the formula directly from the retrieved reference pairs in context.
* ``self-refine`` — the refiner critiques the draft with no retrieved
  references (a feedback call, then a refinement call using the feedback).

Refinement iterations beyond the first reuse the same retrieved references
and feed the latest output back in.  Whatever happens, the final formula
always parses: an invalid refinement falls back to the draft, and if no
valid formula exists at all the transform raises instead of returning junk.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from stlkit.backends import Backend, ChatRequest
from stlkit.errors import AllRetriesInvalid, TransformFailed
from stlkit.knowledge import KnowledgeStore, RetrievalHit
from stlkit.prompts import format_example_block, load_template
from stlkit.stl.ast import Formula
from stlkit.stl.parser import check_syntax, parse
from stlkit.stl.printer import format_formula

MODES = ("kgst", "no-refine", "no-finetune", "self-refine")
GENERATION_RETRIES = 3


@dataclass(frozen=True)
class TransformRequest:
    nl: str
    k: int = 5
    iterations: int = 1
    mode: str = "kgst"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.k < 0 or self.iterations < 0:
            raise ValueError("k and iterations must be nonnegative")


@dataclass(frozen=True)
class Exchange:
    tag: str
    system_prompt: str
    user_prompt: str
    response: str
    backend_id: str

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "system_prompt": self.system_prompt,
            "user_prompt": self.user_prompt,
            "response": self.response,
            "backend_id": self.backend_id,
        }


@dataclass
class TransformResult:
    nl: str
    mode: str
    preliminary: str
    preliminary_valid: bool
    references: list[RetrievalHit]
    refined: str
    final: Formula
    fallback_used: bool
    transcript: list[Exchange] = field(default_factory=list)

    @property
    def final_stl(self) -> str:
        return format_formula(self.final)

    def to_dict(self, include_transcript: bool = True) -> dict:
        d = {
            "nl": self.nl,
            "mode": self.mode,
            "preliminary": self.preliminary,
            "preliminary_valid": self.preliminary_valid,
            "references": [
                {"id": hit.pair.id, "stl": hit.pair.stl, "score": hit.score}
                for hit in self.references
            ],
            "refined": self.refined,
            "final": self.final_stl,
            "fallback_used": self.fallback_used,
        }
        if include_transcript:
            d["transcript"] = [x.to_dict() for x in self.transcript]
        return d


def extract_formula(text: str) -> str | None:
    """First syntactically valid formula line in a model response.

    Fenced code blocks are searched first, then the remaining lines; a
    leading ``STL:`` label is stripped.
    """
    fenced: list[str] = []
    plain: list[str] = []
    in_fence = False
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("```"):
            in_fence = not in_fence
            continue
        if not line:
            continue
        (fenced if in_fence else plain).append(line)
    for line in fenced + plain:
        candidate = line.strip().strip("`")
        lowered = candidate.lower()
        if lowered.startswith("stl:"):
            candidate = candidate[4:].strip()
        if candidate and check_syntax(candidate).ok:
            return candidate
    return None


def _call(backend: Backend, tag: str, system: str, user: str, transcript: list[Exchange]) -> str:
    response = backend.complete(ChatRequest(system_prompt=system, user_prompt=user, tag=tag))
    transcript.append(
        Exchange(
            tag=tag,
            system_prompt=system,
            user_prompt=user,
            response=response.text,
            backend_id=response.backend_id,
        )
    )
    return response.text


def _generate_with_retries(
    backend: Backend,
    tag: str,
    system: str,
    user: str,
    transcript: list[Exchange],
) -> tuple[str, bool]:
    """Re-ask up to GENERATION_RETRIES times until a line parses.

    Returns (text, valid); text is the last raw response when invalid.
    """
    last = ""
    for _ in range(GENERATION_RETRIES):
        last = _call(backend, tag, system, user, transcript)
        candidate = extract_formula(last)
        if candidate is not None:
            return candidate, True
    return last.strip(), False


def generate_preliminary(
    nl: str, generator: Backend, prompts_dir: str | None = None
) -> tuple[str, list[Exchange]]:
    """Draft formula for a sentence; raises after three invalid attempts."""
    transcript: list[Exchange] = []
    template = load_template("baseline_generation", prompts_dir)
    system, user = template.render(nl=nl)
    text, valid = _generate_with_retries(generator, "gen", system, user, transcript)
    if not valid:
        raise AllRetriesInvalid(text, transcript)
    return text, transcript


def retrieve_references(nl: str, store: KnowledgeStore | None, k: int) -> list[RetrievalHit]:
    """Top-k reference pairs for a sentence; empty store means no references."""
    if store is None or len(store) == 0 or k == 0:
        return []
    return store.top_k(nl, k)


def refine(
    nl: str,
    preliminary: str,
    references: list[RetrievalHit],
    refiner: Backend,
    transcript: list[Exchange],
    prompts_dir: str | None = None,
) -> tuple[str, bool]:
    """One refinement pass; returns (formula, fallback_used).

    An unparseable refinement falls back to the preliminary.
    """
    template = load_template("refinement", prompts_dir)
    system, user = template.render(
        nl=nl,
        preliminary=preliminary,
        references=format_example_block([hit.pair for hit in references]),
    )
    response = _call(refiner, "refine", system, user, transcript)
    candidate = extract_formula(response)
    if candidate is None:
        return preliminary, True
    return candidate, False


def self_refine(
    nl: str,
    preliminary: str,
    backend: Backend,
    transcript: list[Exchange],
    prompts_dir: str | None = None,
) -> tuple[str, bool]:
    """Feedback pass then refinement pass using the backend's own critique."""
    feedback_template = load_template("self_refine_feedback", prompts_dir)
    system, user = feedback_template.render(nl=nl, preliminary=preliminary)
    feedback = _call(backend, "feedback", system, user, transcript)
    refine_template = load_template("self_refine_refinement", prompts_dir)
    system, user = refine_template.render(nl=nl, preliminary=preliminary, feedback=feedback.strip())
    response = _call(backend, "refine", system, user, transcript)
    candidate = extract_formula(response)
    if candidate is None:
        return preliminary, True
    return candidate, False


def transform(
    request: TransformRequest,
    generator: Backend | None,
    refiner: Backend | None,
    store: KnowledgeStore | None,
    prompts_dir: str | None = None,
) -> TransformResult:
    """Run one sentence through the requested mode's stage sequence."""
    transcript: list[Exchange] = []
    references: list[RetrievalHit] = []
    fallback_used = False

    if request.mode == "no-finetune":
        if refiner is None:
            raise TransformFailed("mode no-finetune requires a refiner backend", transcript)
        references = retrieve_references(request.nl, store, request.k)
        template = load_template("incontext_generation", prompts_dir)
        system, user = template.render(
            nl=request.nl,
            references=format_example_block([hit.pair for hit in references]),
        )
        preliminary, valid = _generate_with_retries(
            refiner, "incontext", system, user, transcript
        )
        refined = preliminary
    else:
        if generator is None:
            raise TransformFailed(f"mode {request.mode} requires a generator backend", transcript)
        template = load_template("baseline_generation", prompts_dir)
        system, user = template.render(nl=request.nl)
        preliminary, valid = _generate_with_retries(generator, "gen", system, user, transcript)
        refined = preliminary

        if request.mode == "kgst":
            if refiner is None:
                raise TransformFailed("mode kgst requires a refiner backend", transcript)
            references = retrieve_references(request.nl, store, request.k)
            for _ in range(request.iterations):
                refined, fell_back = refine(
                    request.nl, refined, references, refiner, transcript, prompts_dir
                )
                fallback_used = fallback_used or fell_back
        elif request.mode == "self-refine":
            if refiner is None:
                raise TransformFailed("mode self-refine requires a refiner backend", transcript)
            for _ in range(request.iterations):
                refined, fell_back = self_refine(
                    request.nl, refined, refiner, transcript, prompts_dir
                )
                fallback_used = fallback_used or fell_back

    final_text = refined if check_syntax(refined).ok else (preliminary if valid else None)
    if final_text is None:
        raise TransformFailed(
            f"no syntactically valid formula obtained for {request.nl!r}", transcript
        )
    if final_text != refined:
        fallback_used = True
        refined = final_text
    return TransformResult(
        nl=request.nl,
        mode=request.mode,
        preliminary=preliminary,
        preliminary_valid=valid,
        references=references,
        refined=refined,
        final=parse(final_text),
        fallback_used=fallback_used,
        transcript=transcript,
    )
