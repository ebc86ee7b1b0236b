"""Data model and ingestion for semantic-role-annotated sentences.

Sentences arrive pre-annotated as JSON Lines: tokens (text/pos/lemma),
predicate frames with labeled argument spans, and optional noun-chunk
spans. Indices are 0-based, end-exclusive, over tokens.
"""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from random import Random
from typing import Iterable, Mapping, Sequence

from .errors import ContractError, CorpusError, FeatureDetectionError, RecordError, UnknownRoleError

log = logging.getLogger(__name__)

_ROLE_NAME_RE = re.compile(r"^[A-Z][A-Z0-9_-]*$")


@dataclass(frozen=True)
class RoleLabel:
    """A thematic role name. Canonical names cover PropBank cores and
    common adjuncts; anything else is carried as an open label."""

    name: str

    def __post_init__(self):
        if not _ROLE_NAME_RE.match(self.name):
            raise ContractError(f"role name must be uppercase ASCII, got {self.name!r}")

    def __str__(self) -> str:
        return self.name

    @property
    def is_core(self) -> bool:
        return self.name in ("AGENT", "PATIENT")


AGENT = RoleLabel("AGENT")
PATIENT = RoleLabel("PATIENT")
TEMPORAL = RoleLabel("TEMPORAL")
LOCATIVE = RoleLabel("LOCATIVE")
MANNER = RoleLabel("MANNER")
CAUSE = RoleLabel("CAUSE")
EXTENT = RoleLabel("EXTENT")
PURPOSE = RoleLabel("PURPOSE")
DISCOURSE = RoleLabel("DISCOURSE")
GOAL = RoleLabel("GOAL")
ADVERBIAL = RoleLabel("ADVERBIAL")
MODAL = RoleLabel("MODAL")
NEGATION = RoleLabel("NEGATION")

CORE_ROLES = (AGENT, PATIENT)
ADJUNCT_ROLES = (
    TEMPORAL, LOCATIVE, MANNER, CAUSE, EXTENT, PURPOSE,
    DISCOURSE, GOAL, ADVERBIAL, MODAL, NEGATION,
)

_TAG_TABLE = {
    "ARG0": AGENT,
    "ARG1": PATIENT,
    "ARGM-TMP": TEMPORAL,
    "ARGM-LOC": LOCATIVE,
    "ARGM-MNR": MANNER,
    "ARGM-CAU": CAUSE,
    "ARGM-EXT": EXTENT,
    "ARGM-PRP": PURPOSE,
    "ARGM-DIS": DISCOURSE,
    "ARGM-GOL": GOAL,
    "ARGM-ADV": ADVERBIAL,
    "ARGM-MOD": MODAL,
    "ARGM-NEG": NEGATION,
}
# output names map to themselves so re-mapping is idempotent
_TAG_TABLE.update({r.name: r for r in (AGENT, PATIENT) + ADJUNCT_ROLES})

_FUNCTION_TABLE = {
    "GOL": GOAL,
    "LOC": LOCATIVE,
    "TMP": TEMPORAL,
    "MNR": MANNER,
    "EXT": EXTENT,
    "CAU": CAUSE,
    "PRP": PURPOSE,
    "ADV": ADVERBIAL,
    "DIS": DISCOURSE,
    "COM": MANNER,
}

_NUMBERED_ARG_RE = re.compile(r"^ARG[2-5]$")
# span-level discontinuity / reference markers excluded at ingestion
DROPPED_TAG_PREFIXES = ("B-C-", "B-R-", "C-", "R-")


def map_role_label(raw_tag: str, frame_function: str | None = None) -> RoleLabel:
    """Map a raw SRL tag (optionally with a PropBank frame function) to a
    RoleLabel. Unrecognized tags become open labels; the mapping is
    idempotent over its own outputs."""
    tag = raw_tag.strip().upper()
    if not tag:
        raise ContractError("empty role tag")
    if tag in _TAG_TABLE:
        return _TAG_TABLE[tag]
    if _NUMBERED_ARG_RE.match(tag) and frame_function:
        fn = frame_function.strip().upper().replace(" ", "_")
        if fn in _FUNCTION_TABLE:
            return _FUNCTION_TABLE[fn]
        if _ROLE_NAME_RE.match(fn):
            return RoleLabel(fn)
    if _ROLE_NAME_RE.match(tag):
        return RoleLabel(tag)
    raise ContractError(f"role tag {raw_tag!r} cannot be normalized")


class Specificity(Enum):
    """How much of the original span a keyword pins down."""

    COMPLETE = "complete"
    PARTIAL = "partial"
    SPARSE = "sparse"

    def __str__(self) -> str:
        return self.value


# a keyword is partial while it misses at most this many span tokens
PARTIAL_MISS_LIMIT = 5

STAR = "*"


def _is_subsequence(needle: Sequence[str], haystack: Sequence[str]) -> bool:
    it = iter(haystack)
    return all(any(tok == h for h in it) for tok in needle)


def classify_specificity(keyword_tokens: Sequence[str], span_tokens: Sequence[str]) -> Specificity:
    """Classify a keyword against its span: complete covers every token,
    partial misses at most PARTIAL_MISS_LIMIT, sparse misses more. The
    bare ``*`` keys as sparse. Comparison is case-folded."""
    if list(keyword_tokens) == [STAR]:
        return Specificity.SPARSE
    if not span_tokens:
        raise ContractError("empty span")
    if not keyword_tokens:
        raise ContractError("empty keyword")
    kw = [t.casefold() for t in keyword_tokens]
    sp = [t.casefold() for t in span_tokens]
    if not _is_subsequence(kw, sp):
        raise ContractError(f"keyword {keyword_tokens!r} is not a subsequence of span {span_tokens!r}")
    missing = len(sp) - len(kw)
    if missing == 0:
        return Specificity.COMPLETE
    if missing <= PARTIAL_MISS_LIMIT:
        return Specificity.PARTIAL
    return Specificity.SPARSE


@dataclass(frozen=True)
class Token:
    text: str
    index: int
    pos: str | None = None
    lemma: str | None = None

    def __post_init__(self):
        if not self.text or any(c.isspace() for c in self.text):
            raise ContractError(f"token text must be non-empty and space-free, got {self.text!r}")
        if self.index < 0:
            raise ContractError("token index must be >= 0")


@dataclass(frozen=True)
class ArgSpan:
    role: RoleLabel
    start: int
    end: int
    raw_tag: str = ""

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ContractError(f"bad span [{self.start}, {self.end})")

    def tokens(self, sentence: "SrlSentence") -> list[Token]:
        return list(sentence.tokens[self.start:self.end])

    def text(self, sentence: "SrlSentence") -> str:
        return " ".join(t.text for t in self.tokens(sentence))


@dataclass(frozen=True)
class PredicateFrame:
    verb_index: int
    lemma: str
    voice: str
    tense: str
    args: tuple[ArgSpan, ...]
    aux_indices: tuple[int, ...] = ()
    dropped_tags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.voice not in ("active", "passive"):
            raise ContractError(f"unknown voice {self.voice!r}")
        if self.tense not in ("past", "present", "future"):
            raise ContractError(f"unknown tense {self.tense!r}")
        spans = sorted(self.args, key=lambda a: a.start)
        for left, right in zip(spans, spans[1:]):
            if left.end > right.start:
                raise ContractError(f"overlapping arg spans {left} / {right}")
        for span in spans:
            if span.start <= self.verb_index < span.end:
                raise ContractError(f"verb index {self.verb_index} inside arg span {span}")

    def sorted_args(self) -> list[ArgSpan]:
        return sorted(self.args, key=lambda a: a.start)

    def occurrences(self, role: RoleLabel) -> list[ArgSpan]:
        return [a for a in self.sorted_args() if a.role == role]

    def has_relative_clause(self) -> bool:
        return any(t.upper().startswith(("B-R-", "R-")) for t in self.dropped_tags)


@dataclass(frozen=True)
class SrlSentence:
    tokens: tuple[Token, ...]
    frames: tuple[PredicateFrame, ...]
    chunks: tuple[tuple[int, int], ...] = ()
    sent_id: str | None = field(default=None, compare=False)

    def __post_init__(self):
        n = len(self.tokens)
        for frame in self.frames:
            if not (0 <= frame.verb_index < n):
                raise ContractError(f"verb index {frame.verb_index} out of range")
            for span in frame.args:
                if span.end > n:
                    raise ContractError(f"arg span {span} out of range")
            for aux in frame.aux_indices:
                if not (0 <= aux < n):
                    raise ContractError(f"aux index {aux} out of range")

    def text(self) -> str:
        return " ".join(t.text for t in self.tokens)

    def span_text(self, start: int, end: int) -> str:
        return " ".join(t.text for t in self.tokens[start:end])


# --- verb feature detection -------------------------------------------------

_BE_FORMS = frozenset({"be", "is", "are", "was", "were", "been", "being", "am"})
_FUTURE_MARKERS = frozenset({"will", "shall", "wo", "'ll"})
_AUX_WORDS = _BE_FORMS | _FUTURE_MARKERS | frozenset({
    "have", "has", "had", "do", "does", "did",
    "would", "should", "could", "can", "may", "might", "must",
    "going", "to", "'d", "'ve", "'re",
})
_PAST_AUX = frozenset({"was", "were", "did", "had"})


def _inside_any(index: int, spans: Iterable[ArgSpan]) -> bool:
    return any(s.start <= index < s.end for s in spans)


def detect_aux_indices(verb_index: int, args: Sequence[ArgSpan], sentence: SrlSentence) -> tuple[int, ...]:
    """Collect auxiliary tokens by walking left from the verb, skipping
    tokens inside this frame's arg spans, stopping at the first token
    that is neither. Keeps sentence order."""
    found: list[int] = []
    i = verb_index - 1
    while i >= 0:
        tok = sentence.tokens[i]
        if _inside_any(i, args):
            i -= 1
            continue
        if tok.text.lower() in _AUX_WORDS or (tok.pos or "") == "MD":
            found.append(i)
            i -= 1
            continue
        break
    return tuple(sorted(found))


def detect_verb_features(verb_index: int, aux_indices: Sequence[int], sentence: SrlSentence) -> tuple[str, str, str]:
    """Derive (voice, tense, lemma) for a predicate from POS tags.

    Passive iff a be-auxiliary precedes a past-participle (VBN) predicate.
    Future iff a will/shall/going-to auxiliary is present. Otherwise the
    tense-bearing token is the first finite auxiliary when one exists,
    else the predicate itself; VBD means past, anything else present.
    """
    verb = sentence.tokens[verb_index]
    if verb.pos is None:
        raise FeatureDetectionError(f"token {verb.text!r}@{verb_index} has no POS tag")
    aux_tokens = [sentence.tokens[i] for i in aux_indices]
    aux_texts = [t.text.lower() for t in aux_tokens]

    future = any(t in _FUTURE_MARKERS for t in aux_texts)
    if not future and "going" in aux_texts:
        going_at = aux_indices[aux_texts.index("going")]
        nxt = sentence.tokens[going_at + 1] if going_at + 1 < len(sentence.tokens) else None
        future = nxt is not None and nxt.text.lower() == "to"

    passive = verb.pos == "VBN" and any(t in _BE_FORMS for t in aux_texts)

    if future:
        tense = "future"
    elif any((t.pos or "") == "VBD" or t.text.lower() in _PAST_AUX for t in aux_tokens):
        tense = "past"
    elif verb.pos == "VBD":
        tense = "past"
    else:
        tense = "present"

    lemma = verb.lemma if verb.lemma else verb.text.lower()
    return ("passive" if passive else "active"), tense, lemma


# --- keyword candidates -----------------------------------------------------

# sub-window draws per span; stand-ins for subtree keywords
_N_WINDOW_DRAWS = 3


def extract_keyword_candidates(
    span: ArgSpan,
    sentence: SrlSentence,
    seed: int,
    lowercase: bool = True,
) -> list[tuple[str, Specificity]]:
    """Enumerate keyword candidates for a span: the exact span, every
    prefix, noun chunks intersecting the span, seeded contiguous
    sub-windows, and ``*``. Deterministic for a fixed seed."""
    toks = [t.text for t in span.tokens(sentence)]
    if lowercase:
        toks = [t.lower() for t in toks]
    n = len(toks)
    rng = Random(seed)

    raw: list[list[str]] = [toks]
    for k in range(1, n):
        raw.append(toks[:k])
    for cs, ce in sentence.chunks:
        s, e = max(cs, span.start), min(ce, span.end)
        if s < e:
            piece = toks[s - span.start:e - span.start]
            raw.append(piece)
    if n >= 2:
        for _ in range(_N_WINDOW_DRAWS):
            length = rng.randint(1, n - 1)
            start = rng.randint(0, n - length)
            raw.append(toks[start:start + length])

    out: list[tuple[str, Specificity]] = []
    seen: set[str] = set()
    for cand in raw:
        text = " ".join(cand)
        if text in seen:
            continue
        seen.add(text)
        out.append((text, classify_specificity(cand, toks)))
    out.append((STAR, Specificity.SPARSE))
    return out


# --- corpus ingestion -------------------------------------------------------

def _parse_frame(obj: Mapping, sentence_tokens: tuple[Token, ...], chunks, line: int) -> PredicateFrame | None:
    try:
        verb_index = int(obj["verb_index"])
    except (KeyError, TypeError, ValueError):
        raise RecordError("frame missing integer verb_index", line)
    if not (0 <= verb_index < len(sentence_tokens)):
        raise RecordError(f"verb_index {verb_index} out of range", line)

    provisional = SrlSentence(tokens=sentence_tokens, frames=(), chunks=chunks)
    spans: list[ArgSpan] = []
    dropped: list[str] = []
    for arg in obj.get("args", ()):
        tag = str(arg.get("tag", ""))
        try:
            start, end = int(arg["start"]), int(arg["end"])
        except (KeyError, TypeError, ValueError):
            raise RecordError(f"arg {tag!r} missing integer start/end", line)
        if tag.upper().startswith(DROPPED_TAG_PREFIXES):
            dropped.append(tag)
            log.warning("line %d: dropping discontinuous/referent arg %r [%d, %d)", line, tag, start, end)
            continue
        if not (0 <= start < end <= len(sentence_tokens)):
            raise RecordError(f"arg {tag!r} span [{start}, {end}) out of range", line)
        role = map_role_label(tag, arg.get("frame_function"))
        if start <= verb_index < end:
            log.warning("line %d: dropping arg %r covering the verb", line, tag)
            continue
        candidate = ArgSpan(role, start, end, raw_tag=tag)
        if any(not (candidate.end <= s.start or s.end <= candidate.start) for s in spans):
            log.warning("line %d: dropping arg %r overlapping an earlier span", line, tag)
            continue
        spans.append(candidate)

    if "aux" in obj:
        aux = tuple(sorted(int(i) for i in obj["aux"]))
    else:
        aux = detect_aux_indices(verb_index, spans, provisional)
    aux = tuple(i for i in aux if not _inside_any(i, spans) and i != verb_index)
    voice, tense, lemma = detect_verb_features(verb_index, aux, provisional)
    return PredicateFrame(
        verb_index=verb_index, lemma=lemma, voice=voice, tense=tense,
        args=tuple(spans), aux_indices=aux, dropped_tags=tuple(dropped),
    )


def parse_record(obj: Mapping, line: int = 0, sent_id: str | None = None) -> SrlSentence:
    """Build one SrlSentence from a decoded corpus record."""
    try:
        raw_tokens = obj["tokens"]
    except (KeyError, TypeError):
        raise CorpusError("record has no tokens array", line)
    if not raw_tokens:
        raise CorpusError("record has an empty tokens array", line)
    tokens = []
    for i, t in enumerate(raw_tokens):
        if isinstance(t, str):
            tokens.append(Token(text=t, index=i))
        else:
            tokens.append(Token(text=str(t["text"]), index=i, pos=t.get("pos"), lemma=t.get("lemma")))
    toks = tuple(tokens)

    chunk_list: list[tuple[int, int]] = []
    for pair in obj.get("chunks") or ():
        s, e = int(pair[0]), int(pair[1])
        if 0 <= s < e <= len(toks):
            chunk_list.append((s, e))
        else:
            log.warning("line %d: dropping out-of-range chunk [%d, %d)", line, s, e)

    frames = []
    for fobj in obj.get("frames", ()):
        frame = _parse_frame(fobj, toks, tuple(chunk_list), line)
        if frame is not None:
            frames.append(frame)
    rid = obj.get("id")
    return SrlSentence(
        tokens=toks, frames=tuple(frames), chunks=tuple(chunk_list),
        sent_id=str(rid) if rid is not None else sent_id,
    )


def parse_corpus(data: bytes | str) -> list[SrlSentence]:
    """Parse a JSON Lines corpus. Malformed JSON fails the whole parse
    with the line number; a record with out-of-range spans is rejected
    individually with a logged warning."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    sentences: list[SrlSentence] = []
    for lineno, raw in enumerate(data.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"invalid JSON ({exc.msg})", lineno)
        try:
            sentences.append(parse_record(obj, lineno, sent_id=str(lineno - 1)))
        except (RecordError, ContractError, FeatureDetectionError) as exc:
            log.warning("rejecting record at line %d: %s", lineno, exc)
    return sentences


def require_role(frame: PredicateFrame, role: RoleLabel) -> list[ArgSpan]:
    spans = frame.occurrences(role)
    if not spans:
        raise UnknownRoleError(f"frame has no {role} argument")
    return spans
