"""Dataset growth loop: exemplar selection, generation, filtering, review.

One round selects k cluster exemplars from the seed/accepted pool, asks the
backend for new NL-STL pairs using the exemplars as prompt examples, drops
candidates that fail the syntax check or are textually too close to the
existing pool (ROUGE-L against every pool sentence must stay below the
threshold), and queues the survivors for human review.  Accepted pairs join
the store and therefore both the exemplar pool and the novelty pool of
later rounds.

A round is atomic: all generation and filtering happens in memory and the
caller persists the queue and report only on success.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from stlkit.backends import Backend, ChatRequest
from stlkit.errors import MalformedResponse, UnknownCandidate
from stlkit.knowledge import KnowledgeStore
from stlkit.metrics import rouge_l
from stlkit.pairs import NLSTLPair, ReviewDecision
from stlkit.prompts import format_example_block, load_template
from stlkit.stl.parser import check_syntax
from stlkit.stl.printer import format_formula

#: Reminders shown next to every pair during review.
REVIEW_CHECKS = (
    "operators: temporal/boolean operators match the sentence",
    "values: numeric constants and time bounds are the stated ones",
    "syntax: the formula is well-formed STL",
    "semantics: the formula as a whole means what the sentence says",
)


@dataclass(frozen=True)
class DatagenConfig:
    n_candidates: int = 10
    k_exemplars: int = 5
    novelty_threshold: float = 0.5
    seed: int = 42
    prompts_dir: str | None = None


@dataclass
class RoundReport:
    round: int
    generated: int = 0
    malformed_blocks: int = 0
    syntax_rejected: int = 0
    novelty_rejected: int = 0
    queued: int = 0
    accepted: int = 0
    exemplar_ids: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "generated": self.generated,
            "malformed_blocks": self.malformed_blocks,
            "syntax_rejected": self.syntax_rejected,
            "novelty_rejected": self.novelty_rejected,
            "queued": self.queued,
            "accepted": self.accepted,
            "exemplar_ids": list(self.exemplar_ids),
        }

    def check_accounting(self) -> bool:
        return self.generated == self.syntax_rejected + self.novelty_rejected + self.queued


def select_exemplars(store: KnowledgeStore, k: int, seed: int) -> list[NLSTLPair]:
    """k cluster exemplars over the seed/accepted pool, deterministic per seed."""
    return store.exemplars(k, seed)


_BLOCK_RE = re.compile(
    r"^\s*(?:[-*\d.)\s]*)NL\s*:\s*(?P<nl>.+?)\s*$", re.IGNORECASE
)
_STL_RE = re.compile(r"^\s*(?:[-*\d.)\s]*)STL\s*:\s*(?P<stl>.+?)\s*$", re.IGNORECASE)


def parse_candidate_blocks(text: str) -> tuple[list[tuple[str, str]], int]:
    """Extract (nl, stl) blocks from a generation response.

    Tolerates bullet/numbering prefixes and fenced code blocks; a block is
    an ``NL:`` line followed by an ``STL:`` line.  Returns the parsed blocks
    and the number of malformed (incomplete) ones.
    """
    pending_nl: str | None = None
    blocks: list[tuple[str, str]] = []
    dropped = 0
    for raw in text.splitlines():
        line = raw.strip().strip("`")
        if not line:
            continue
        nl_match = _BLOCK_RE.match(line)
        if nl_match:
            if pending_nl is not None:
                dropped += 1  # NL without a following STL
            pending_nl = nl_match.group("nl")
            continue
        stl_match = _STL_RE.match(line)
        if stl_match:
            if pending_nl is None:
                dropped += 1  # STL without a preceding NL
                continue
            blocks.append((pending_nl, stl_match.group("stl")))
            pending_nl = None
    if pending_nl is not None:
        dropped += 1
    return blocks, dropped


def generate_candidates(
    exemplars: list[NLSTLPair],
    backend: Backend,
    n: int,
    round_no: int,
    prompts_dir: str | None = None,
) -> tuple[list[NLSTLPair], int]:
    """Ask the backend for n new pairs; returns (candidates, malformed count)."""
    template = load_template("generation", prompts_dir)
    system, user = template.render(
        count=len(exemplars), n=n, examples=format_example_block(exemplars)
    )
    response = backend.complete(ChatRequest(system_prompt=system, user_prompt=user, tag="gen"))
    blocks, dropped = parse_candidate_blocks(response.text)
    if not blocks:
        raise MalformedResponse("generation response contained no NL/STL blocks")
    candidates = [
        NLSTLPair(
            id=f"r{round_no:03d}-c{i:03d}",
            nl=nl,
            stl=stl,
            domain="other",
            source="generated",
            round=round_no,
            status="candidate",
        )
        for i, (nl, stl) in enumerate(blocks, start=1)
    ]
    return candidates, dropped


def filter_syntax(candidates: list[NLSTLPair]) -> tuple[list[NLSTLPair], list[NLSTLPair]]:
    """Split candidates on the syntax check; passing formulas are canonicalized."""
    passed: list[NLSTLPair] = []
    failed: list[NLSTLPair] = []
    for cand in candidates:
        result = check_syntax(cand.stl)
        if result.ok:
            passed.append(replace(cand, stl=format_formula(result.formula)))
        else:
            cand.meta["diagnostics"] = [d.render() for d in result.diagnostics]
            failed.append(cand)
    return passed, failed


def filter_novelty(
    candidates: list[NLSTLPair], store: KnowledgeStore, threshold: float = 0.5
) -> tuple[list[NLSTLPair], list[NLSTLPair]]:
    """Keep candidates whose max ROUGE-L against the pool stays below threshold."""
    passed: list[NLSTLPair] = []
    failed: list[NLSTLPair] = []
    for cand in candidates:
        best_score = -1.0
        best_id = None
        for existing in store.pairs:
            score = rouge_l(cand.nl, existing.nl)
            if score > best_score:
                best_score, best_id = score, existing.id
        cand.meta["max_rouge"] = best_score if best_score >= 0 else 0.0
        cand.meta["nearest_id"] = best_id
        if best_score < threshold:
            passed.append(cand)
        else:
            failed.append(cand)
    return passed, failed


def run_round(
    store: KnowledgeStore,
    backend: Backend,
    config: DatagenConfig,
    round_no: int,
) -> tuple[RoundReport, list[NLSTLPair]]:
    """Execute one generation round; returns the report and the queued pairs.

    The store is read-only here; queued pairs only enter it after review.
    Backend failures propagate before anything is produced, so a failed
    round leaves no partial state behind.
    """
    exemplars = select_exemplars(store, config.k_exemplars, config.seed)
    report = RoundReport(round=round_no, exemplar_ids=[p.id for p in exemplars])
    candidates, dropped = generate_candidates(
        exemplars, backend, config.n_candidates, round_no, config.prompts_dir
    )
    report.generated = len(candidates)
    report.malformed_blocks = dropped
    syntax_ok, syntax_bad = filter_syntax(candidates)
    report.syntax_rejected = len(syntax_bad)
    novel, stale = filter_novelty(syntax_ok, store, config.novelty_threshold)
    report.novelty_rejected = len(stale)
    report.queued = len(novel)
    return report, novel


def apply_review(
    store: KnowledgeStore,
    queue: list[NLSTLPair],
    decisions: list[ReviewDecision],
) -> tuple[list[NLSTLPair], list[NLSTLPair], list[NLSTLPair]]:
    """Apply review decisions to the queue.

    Accepted pairs are embedded into the store (growing the exemplar and
    novelty pools); rejected pairs are returned for the audit log.  Returns
    (remaining queue, accepted, rejected).
    """
    queued_ids = {p.id for p in queue}
    for decision in decisions:
        if decision.pair_id not in queued_ids:
            raise UnknownCandidate(decision.pair_id)
    by_id = {d.pair_id: d for d in decisions}
    remaining: list[NLSTLPair] = []
    accepted: list[NLSTLPair] = []
    rejected: list[NLSTLPair] = []
    for pair in queue:
        decision = by_id.get(pair.id)
        if decision is None:
            remaining.append(pair)
        elif decision.verdict == "accept":
            accepted.append(pair.with_status("accepted"))
        else:
            audited = pair.with_status("rejected")
            audited.meta["reason"] = decision.reason
            rejected.append(audited)
    if accepted:
        store.add_pairs(accepted)
    return remaining, accepted, rejected
