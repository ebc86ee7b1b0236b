"""Evaluation metrics: closeness, cycle-consistency controllability,
fluency ratio, and perplexity-based candidate filtering.

Closeness compares an original sentence against an edited string at the
token level: a minimal edit script aligns the two, an argument span
counts as changed when at least half its tokens were substituted or
deleted, and precision/recall/F1 over expected-vs-actually-changed spans
are weighted by span length.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import ContractError
from .morph import infer_verb_features
from .prompts import ArgCode, PromptSpec, TaggedOutput, TaggedSegment
from .srl import SrlSentence, STAR, _is_subsequence, classify_specificity

Span = tuple[int, int]


# --- token alignment ----------------------------------------------------------

def align_tokens(original: Sequence[str], edited: Sequence[str]) -> list[tuple[str, int | None, int | None]]:
    """Minimal unit-cost edit script between two token sequences.

    Returns (tag, i, j) steps where tag is 'match', 'sub', 'del', or
    'ins'. Ties are broken preferring match, then substitution, then
    deletion, then insertion, which fixes one canonical alignment.
    """
    n, m = len(original), len(edited)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            same = original[i - 1] == edited[j - 1]
            dist[i][j] = min(
                dist[i - 1][j - 1] + (0 if same else 1),
                dist[i - 1][j] + 1,
                dist[i][j - 1] + 1,
            )
    steps: list[tuple[str, int | None, int | None]] = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and original[i - 1] == edited[j - 1] and dist[i][j] == dist[i - 1][j - 1]:
            steps.append(("match", i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and dist[i][j] == dist[i - 1][j - 1] + 1:
            steps.append(("sub", i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i > 0 and dist[i][j] == dist[i - 1][j] + 1:
            steps.append(("del", i - 1, None))
            i -= 1
        else:
            steps.append(("ins", None, j - 1))
            j -= 1
    steps.reverse()
    return steps


def changed_token_indices(original: Sequence[str], edited: Sequence[str]) -> frozenset[int]:
    """Original-token indices substituted or deleted by the minimal edit."""
    return frozenset(
        i for tag, i, _ in align_tokens(original, edited) if tag in ("sub", "del")
    )


def span_changed(span: Span, changed: Iterable[int]) -> bool:
    """A span counts as edited when at least half its tokens changed."""
    start, end = span
    if end <= start:
        raise ContractError(f"empty span {span}")
    hits = sum(1 for i in changed if start <= i < end)
    return hits / (end - start) >= 0.5


# --- closeness ----------------------------------------------------------------

@dataclass(frozen=True)
class SpanOutcome:
    span: Span
    expected: bool
    changed: bool
    weight: int


@dataclass(frozen=True)
class ClosenessReport:
    precision: float
    recall: float
    f1: float
    per_span: tuple[SpanOutcome, ...]


def closeness(original: SrlSentence, edited: str, expected: Iterable[Span]) -> ClosenessReport:
    """Weighted F1 between expected-to-change and actually-changed spans.

    The scored universe is every argument span of the original's frames
    plus whatever the expected set adds (the verb token enters through
    the expected set when a verb operation is present). Weights are span
    token counts. Empty expected and nothing changed scores 1.0.
    """
    expected_set = {(int(s), int(e)) for s, e in expected}
    universe: set[Span] = set(expected_set)
    for frame in original.frames:
        for arg in frame.args:
            universe.add((arg.start, arg.end))

    original_tokens = [t.text for t in original.tokens]
    edited_tokens = edited.split()
    changed = changed_token_indices(original_tokens, edited_tokens)

    outcomes = []
    for span in sorted(universe):
        outcomes.append(SpanOutcome(
            span=span,
            expected=span in expected_set,
            changed=span_changed(span, changed),
            weight=span[1] - span[0],
        ))
    w_changed = sum(o.weight for o in outcomes if o.changed)
    w_expected = sum(o.weight for o in outcomes if o.expected)
    w_both = sum(o.weight for o in outcomes if o.changed and o.expected)
    precision = 1.0 if w_changed == 0 else w_both / w_changed
    recall = 1.0 if w_expected == 0 else w_both / w_expected
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return ClosenessReport(precision=precision, recall=recall, f1=f1, per_span=tuple(outcomes))


# --- controllability ----------------------------------------------------------

@dataclass(frozen=True)
class VerbChecks:
    lemma_ok: bool
    tense_ok: bool
    voice_ok: bool

    def all_ok(self) -> bool:
        return self.lemma_ok and self.tense_ok and self.voice_ok


@dataclass(frozen=True)
class ArgChecks:
    role: str
    role_ok: bool
    content_ok: bool
    spec_ok: bool

    def all_ok(self) -> bool:
        return self.role_ok and self.content_ok and self.spec_ok


@dataclass(frozen=True)
class ControllabilityReport:
    verb: VerbChecks
    per_arg: tuple[ArgChecks, ...]
    ambiguous: bool = False

    def all_ok(self) -> bool:
        return self.verb.all_ok() and all(a.all_ok() for a in self.per_arg)


def _observed_spans(observed: Union[TaggedOutput, SrlSentence]) -> tuple[dict[str, list[list[str]]], list[tuple[str, str, str]]]:
    """Collect (role -> candidate token lists) and verb feature candidates."""
    by_role: dict[str, list[list[str]]] = {}
    verb_features: list[tuple[str, str, str]] = []
    if isinstance(observed, TaggedOutput):
        unit: list[str] = []
        for seg in observed.spans_for("VERB"):
            unit.extend(seg.text.split(" "))
        if unit:
            verb_features.append(infer_verb_features(unit))
        for seg in observed.segments:
            if isinstance(seg, TaggedSegment) and seg.role != "VERB":
                by_role.setdefault(seg.role, []).append(seg.text.split(" "))
    else:
        for frame in observed.frames:
            verb_features.append((frame.voice, frame.tense, frame.lemma))
            for arg in frame.args:
                tokens = [t.text for t in arg.tokens(observed)]
                by_role.setdefault(arg.role.name, []).append(tokens)
    return by_role, verb_features


def cycle_consistency(prompt: PromptSpec, observed: Union[TaggedOutput, SrlSentence]) -> ControllabilityReport:
    """Check a generation against its prompt's control codes.

    The observation is either the parsed tagged output (offline path) or
    a role-labeled analysis of the raw generation (model path). Each
    argument code is scored against the best-matching candidate span of
    its role; extra candidates flag the report ambiguous. Verb checks
    compare coded (lemma, tense, voice) against features recovered from
    the observed verb.
    """
    by_role, verb_features = _observed_spans(observed)

    verb_code = prompt.header.verb
    verb = VerbChecks(False, False, False)
    for voice, tense, lemma in verb_features:
        cand = VerbChecks(
            lemma_ok=(lemma == verb_code.lemma),
            tense_ok=(tense == verb_code.tense),
            voice_ok=(voice == verb_code.voice),
        )
        if (cand.lemma_ok, cand.tense_ok, cand.voice_ok) > (verb.lemma_ok, verb.tense_ok, verb.voice_ok):
            verb = cand

    ambiguous = False
    per_arg = []
    for code in prompt.header.arg_codes:
        candidates = by_role.get(code.role.name, [])
        if len(candidates) > 1:
            ambiguous = True
        if not candidates:
            per_arg.append(ArgChecks(code.role.name, False, False, False))
            continue
        best = None
        for pos, span_tokens in enumerate(candidates):
            content_ok, spec_ok = _keyword_checks(code, span_tokens)
            overlap = _content_overlap(code, span_tokens)
            key = (content_ok, spec_ok, overlap, -pos)
            if best is None or key > best[0]:
                best = (key, ArgChecks(code.role.name, True, content_ok, spec_ok))
        per_arg.append(best[1])
    return ControllabilityReport(verb=verb, per_arg=tuple(per_arg), ambiguous=ambiguous)


def _keyword_checks(code: ArgCode, span_tokens: list[str]) -> tuple[bool, bool]:
    if code.content == STAR:
        return True, True
    keyword = code.content.split(" ")
    if not span_tokens:
        return False, False
    if not _is_subsequence([t.casefold() for t in keyword], [t.casefold() for t in span_tokens]):
        return False, False
    return True, classify_specificity(keyword, span_tokens) is code.spec


def _content_overlap(code: ArgCode, span_tokens: list[str]) -> int:
    if code.content == STAR:
        return 0
    keyword = {t.casefold() for t in code.content.split(" ")}
    return sum(1 for t in span_tokens if t.casefold() in keyword)


# --- fluency and filtering -----------------------------------------------------

@dataclass(frozen=True)
class FluencyReport:
    ratio: float

    def __post_init__(self):
        if self.ratio <= 0:
            raise ContractError("fluency ratio must be positive")


def fluency_ratio(original_loss: float, edited_loss: float) -> FluencyReport:
    """Loss of the edited text divided by loss of the original."""
    if original_loss <= 0 or edited_loss <= 0:
        raise ContractError("losses must be positive")
    return FluencyReport(ratio=edited_loss / original_loss)


def perplexity_filter(candidates: Sequence[tuple[object, float]], keep_fraction: float) -> list[object]:
    """Keep the ceil(keep_fraction * n) lowest-scored items, preserving
    the input order; score ties at the cut keep the earlier item."""
    if not (0 < keep_fraction <= 1):
        raise ContractError(f"keep_fraction must be in (0, 1], got {keep_fraction}")
    n = len(candidates)
    if n == 0:
        return []
    k = math.ceil(keep_fraction * n)
    ranked = sorted(range(n), key=lambda i: (candidates[i][1], i))
    kept = set(ranked[:k])
    return [item for i, (item, _) in enumerate(candidates) if i in kept]


def select_best(candidates: Sequence[tuple[object, float]]) -> object:
    """The lowest-scored candidate; ties go to the earliest."""
    if not candidates:
        raise ContractError("no candidates to select from")
    best_i = min(range(len(candidates)), key=lambda i: (candidates[i][1], i))
    return candidates[best_i][0]
