"""Compile SRL frames into control-coded infilling prompts.

A prompt is a bracketed header of control codes followed by the sentence
context with masked spans replaced by numbered blank sentinels:

    [VERB+active+past: comfort | AGENT+complete: the doctor | ...] <extra_id_0> , ...

Targets wrap each masked span with its role:

    [LOCATIVE: In the operating room] , [AGENT: the doctor] ...

Serialization is token-based: items join with single spaces, one space
after the header bracket. Blanks number left to right from 0.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from random import Random
from typing import Iterable, Mapping, Sequence, Union

from .errors import ContractError, PromptParseError, TaggedParseError, UnknownRoleError
from .srl import (
    ArgSpan,
    PredicateFrame,
    RoleLabel,
    Specificity,
    SrlSentence,
    STAR,
    classify_specificity,
)

DEFAULT_SENTINEL = "<extra_id_{}>"
_SENTINEL_RE_CACHE: dict[str, re.Pattern] = {}

VOICES = ("active", "passive")
TENSES = ("past", "present", "future")

_ROLE_RE = re.compile(r"^[A-Z][A-Z0-9_-]*$")
_FORBIDDEN_CONTENT = ("|", "[", "]", "\n", "\t")

# header index used for auxiliary-only verb runs: they belong to the verb
# code but realize empty in the mock and carry the VERB tag in targets
AUX_RUN = -1


def _sentinel_regex(sentinel: str) -> re.Pattern:
    pat = _SENTINEL_RE_CACHE.get(sentinel)
    if pat is None:
        pat = re.compile("^" + re.escape(sentinel).replace(r"\{\}", r"(\d+)") + "$")
        _SENTINEL_RE_CACHE[sentinel] = pat
    return pat


def _check_content(content: str) -> None:
    if not content:
        raise ContractError("empty keyword content")
    if content != content.strip() or "  " in content:
        raise ContractError(f"keyword content has stray whitespace: {content!r}")
    for ch in _FORBIDDEN_CONTENT:
        if ch in content:
            raise ContractError(f"keyword content may not contain {ch!r}: {content!r}")


@dataclass(frozen=True)
class VerbCode:
    voice: str
    tense: str
    lemma: str

    def __post_init__(self):
        if self.voice not in VOICES:
            raise ContractError(f"unknown voice {self.voice!r}")
        if self.tense not in TENSES:
            raise ContractError(f"unknown tense {self.tense!r}")
        if not self.lemma or any(c.isspace() for c in self.lemma):
            raise ContractError(f"verb lemma must be a single token, got {self.lemma!r}")
        for ch in _FORBIDDEN_CONTENT:
            if ch in self.lemma:
                raise ContractError(f"verb lemma may not contain {ch!r}")

    def render(self) -> str:
        return f"VERB+{self.voice}+{self.tense}: {self.lemma}"


@dataclass(frozen=True)
class ArgCode:
    role: RoleLabel
    spec: Specificity | None
    content: str

    def __post_init__(self):
        if self.role.name == "VERB":
            raise ContractError("VERB is not an argument role")
        if self.content == STAR:
            if self.spec is not None:
                raise ContractError("'*' content implies no specificity")
        else:
            _check_content(self.content)
            if self.spec is None:
                raise ContractError(f"content {self.content!r} needs a specificity")

    def render(self) -> str:
        if self.content == STAR:
            return f"{self.role}: *"
        return f"{self.role}+{self.spec}: {self.content}"

    def content_tokens(self) -> list[str]:
        return self.content.split(" ")


@dataclass(frozen=True)
class Header:
    codes: tuple[Union[VerbCode, ArgCode], ...]

    def __post_init__(self):
        if not self.codes or not isinstance(self.codes[0], VerbCode):
            raise ContractError("header must start with the verb code")
        if any(isinstance(c, VerbCode) for c in self.codes[1:]):
            raise ContractError("header carries exactly one verb code")

    @property
    def verb(self) -> VerbCode:
        return self.codes[0]

    @property
    def arg_codes(self) -> tuple[ArgCode, ...]:
        return self.codes[1:]

    def render(self) -> str:
        return "[" + " | ".join(c.render() for c in self.codes) + "]"

    def is_canonical_order(self) -> bool:
        ranks = []
        for code in self.arg_codes:
            if code.role.name == "AGENT":
                ranks.append(0)
            elif code.role.name == "PATIENT":
                ranks.append(1)
            else:
                ranks.append(2)
        return ranks == sorted(ranks)


@dataclass(frozen=True)
class Blank:
    """A numbered hole in the context; its number is its position."""


@dataclass(frozen=True)
class LiteralTok:
    text: str
    source_index: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.text or any(c.isspace() for c in self.text):
            raise ContractError(f"literal must be a single token, got {self.text!r}")
        if _sentinel_regex(DEFAULT_SENTINEL).match(self.text):
            raise ContractError(f"literal collides with the blank sentinel: {self.text!r}")


ContextItem = Union[Blank, LiteralTok]


@dataclass(frozen=True)
class Context:
    items: tuple[ContextItem, ...]

    def n_blanks(self) -> int:
        return sum(1 for it in self.items if isinstance(it, Blank))

    def blank_positions(self) -> list[int]:
        return [i for i, it in enumerate(self.items) if isinstance(it, Blank)]

    def literal_positions(self) -> list[int]:
        return [i for i, it in enumerate(self.items) if isinstance(it, LiteralTok)]

    def render(self, sentinel: str = DEFAULT_SENTINEL) -> str:
        out, slot = [], 0
        for it in self.items:
            if isinstance(it, Blank):
                out.append(sentinel.format(slot))
                slot += 1
            else:
                out.append(it.text)
        return " ".join(out)


@dataclass(frozen=True)
class SourceInfo:
    """Provenance linking a compiled prompt back to its sentence."""

    frame_idx: int
    n_tokens: int
    verb_index: int
    # (start, end, code_index) for every masked region, sentence order
    regions: tuple[tuple[int, int, int], ...]
    # (role name, start, end) for every frame arg, sentence order
    args: tuple[tuple[str, int, int], ...]
    sent_id: str | None = None


@dataclass(frozen=True)
class PromptSpec:
    """A control header plus blanked context.

    Equality is structural over header and context: slot assignments and
    source provenance are bookkeeping that the serialized form does not
    carry.
    """

    header: Header
    context: Context
    # (blank slot, header code index); AUX_RUN marks auxiliary-only runs
    assignments: tuple[tuple[int, int], ...] = field(default=(), compare=False)
    source: SourceInfo | None = field(default=None, compare=False)

    def code_for_slot(self, slot: int) -> int | None:
        for s, idx in self.assignments:
            if s == slot:
                return idx
        return None

    def slot_for_code(self, code_index: int) -> int | None:
        for s, idx in self.assignments:
            if idx == code_index:
                return s
        return None

    def roles(self) -> list[RoleLabel]:
        return [c.role for c in self.header.arg_codes]


# --- compiling ---------------------------------------------------------------

MaskKey = Union[RoleLabel, tuple[RoleLabel, int]]


def _normalize_mask(mask, frame: PredicateFrame) -> list[tuple[RoleLabel, int]]:
    """Expand a mask request into (role, occurrence) pairs, sentence order."""
    occs: list[tuple[RoleLabel, int, ArgSpan]] = []
    counters: dict[str, int] = {}
    for span in frame.sorted_args():
        k = counters.get(span.role.name, 0)
        counters[span.role.name] = k + 1
        occs.append((span.role, k, span))

    if mask == "all" or mask is None:
        return [(r, k) for r, k, _ in occs]
    wanted: list[tuple[RoleLabel, int]] = []
    for entry in mask:
        if isinstance(entry, RoleLabel):
            hits = [(r, k) for r, k, _ in occs if r == entry]
            if not hits:
                raise UnknownRoleError(f"frame has no {entry} argument")
            wanted.extend(hits)
        else:
            role, k = entry
            if not any(r == role and kk == k for r, kk, _ in occs):
                raise UnknownRoleError(f"frame has no occurrence {k} of {role}")
            wanted.append((role, k))
    seen, out = set(), []
    for key in sorted(wanted, key=lambda rk: _occ_start(rk, occs)):
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


def _occ_start(key, occs):
    role, k = key
    for r, kk, span in occs:
        if r == role and kk == k:
            return span.start
    raise UnknownRoleError(f"frame has no occurrence {k} of {role}")


def _runs(indices: Iterable[int]) -> list[tuple[int, int]]:
    run_list: list[tuple[int, int]] = []
    for i in sorted(indices):
        if run_list and run_list[-1][1] == i:
            run_list[-1] = (run_list[-1][0], i + 1)
        else:
            run_list.append((i, i + 1))
    return run_list


def _resolve_keyword(
    keyword_choice,
    role: RoleLabel,
    occ: int,
    span: ArgSpan,
    sentence: SrlSentence,
) -> ArgCode:
    raw = None
    if keyword_choice:
        if (role, occ) in keyword_choice:
            raw = keyword_choice[(role, occ)]
        elif role in keyword_choice:
            raw = keyword_choice[role]
    if raw is None:
        return ArgCode(role, Specificity.COMPLETE, span.text(sentence).lower())
    if isinstance(raw, str):
        content, spec = raw, None
    else:
        content, spec = raw
    if content == STAR:
        return ArgCode(role, None, STAR)
    if spec is None:
        spec = classify_specificity(content.split(" "), [t.text for t in span.tokens(sentence)])
    return ArgCode(role, spec, content)


def eligible_boundaries(sentence: SrlSentence, frame: PredicateFrame) -> list[int]:
    """Token boundaries where an extra blank may sit: anywhere not strictly
    inside an argument span or the verb(+aux) unit."""
    unit = _runs({frame.verb_index, *frame.aux_indices})
    out = []
    for b in range(len(sentence.tokens) + 1):
        if any(s.start < b < s.end for s in frame.args):
            continue
        if any(s < b < e for s, e in unit):
            continue
        out.append(b)
    return out


def compile_prompt(
    sentence: SrlSentence,
    frame_idx: int = 0,
    mask: Union[str, Iterable[MaskKey], None] = "all",
    n_extra_blanks: int = 0,
    keyword_choice: Mapping | None = None,
    seed: int = 0,
) -> PromptSpec:
    """Compile one predicate frame into a PromptSpec.

    The verb (with its auxiliaries) is always masked. ``mask`` selects
    argument roles or (role, occurrence) pairs, or "all". Unlisted masked
    roles default to their span text lowercased, classified complete. Extra
    blanks land at seeded boundaries outside argument spans. The seed also
    shuffles adjunct code order (draw order: shuffle, then placements).
    """
    if not (0 <= frame_idx < len(sentence.frames)):
        raise ContractError(f"sentence has no frame {frame_idx}")
    if n_extra_blanks < 0:
        raise ContractError("n_extra_blanks must be >= 0")
    frame = sentence.frames[frame_idx]
    rng = Random(seed)

    masked = _normalize_mask(mask, frame)
    occ_span: dict[tuple[str, int], ArgSpan] = {}
    counters: dict[str, int] = {}
    for span in frame.sorted_args():
        k = counters.get(span.role.name, 0)
        counters[span.role.name] = k + 1
        occ_span[(span.role.name, k)] = span

    # header codes: verb, agent occurrences, patient occurrences, shuffled rest
    cores = [(r, k) for r, k in masked if r.name == "AGENT"]
    cores += [(r, k) for r, k in masked if r.name == "PATIENT"]
    rest = [(r, k) for r, k in masked if not r.is_core]
    rng.shuffle(rest)
    ordered = cores + rest

    codes: list[Union[VerbCode, ArgCode]] = [VerbCode(frame.voice, frame.tense, frame.lemma)]
    key_to_code_index: dict[tuple[str, int], int] = {}
    for role, k in ordered:
        span = occ_span[(role.name, k)]
        key_to_code_index[(role.name, k)] = len(codes)
        codes.append(_resolve_keyword(keyword_choice, role, k, span, sentence))

    # masked regions: arg spans plus verb(+aux) runs
    regions: list[tuple[int, int, int]] = []
    for role, k in masked:
        span = occ_span[(role.name, k)]
        regions.append((span.start, span.end, key_to_code_index[(role.name, k)]))
    unit_runs = _runs({frame.verb_index, *frame.aux_indices})
    for s, e in unit_runs:
        regions.append((s, e, 0 if s <= frame.verb_index < e else AUX_RUN))
    regions.sort()

    # extra blank boundaries: sample without replacement while possible
    eligible = eligible_boundaries(sentence, frame)
    pool = list(eligible)
    draws: list[int] = []
    for _ in range(n_extra_blanks):
        if pool:
            draws.append(pool.pop(rng.randrange(len(pool))))
        else:
            draws.append(eligible[rng.randrange(len(eligible))])
    extras = sorted(draws)

    items: list[ContextItem] = []
    assignments: list[tuple[int, int]] = []
    slot = 0
    ei = 0
    pos = 0
    region_i = 0
    while pos <= len(sentence.tokens):
        while ei < len(extras) and extras[ei] <= pos:
            items.append(Blank())
            slot += 1
            ei += 1
        if pos == len(sentence.tokens):
            break
        if region_i < len(regions) and regions[region_i][0] == pos:
            s, e, code_idx = regions[region_i]
            items.append(Blank())
            assignments.append((slot, code_idx))
            slot += 1
            pos = e
            region_i += 1
        else:
            tok = sentence.tokens[pos]
            items.append(LiteralTok(tok.text, source_index=pos))
            pos += 1

    source = SourceInfo(
        frame_idx=frame_idx,
        n_tokens=len(sentence.tokens),
        verb_index=frame.verb_index,
        regions=tuple(regions),
        args=tuple((s.role.name, s.start, s.end) for s in frame.sorted_args()),
        sent_id=sentence.sent_id,
    )
    return PromptSpec(
        header=Header(tuple(codes)),
        context=Context(tuple(items)),
        assignments=tuple(assignments),
        source=source,
    )


# keep the operation name the module contract uses
compile = compile_prompt


# --- serializing and parsing -------------------------------------------------

def serialize(prompt: PromptSpec, sentinel: str = DEFAULT_SENTINEL) -> str:
    head = prompt.header.render()
    ctx = prompt.context.render(sentinel)
    return f"{head} {ctx}" if ctx else head


def _parse_verb_code(text: str, offset: int) -> VerbCode:
    m = re.match(r"^VERB\+([a-z]+)\+([a-z]+): (\S+)$", text)
    if not m:
        raise PromptParseError(f"malformed verb code {text!r}", offset)
    voice, tense, lemma = m.groups()
    if voice not in VOICES:
        raise PromptParseError(f"unknown voice {voice!r}", offset)
    if tense not in TENSES:
        raise PromptParseError(f"unknown tense {tense!r}", offset)
    return VerbCode(voice, tense, lemma)


def _parse_arg_code(text: str, offset: int) -> ArgCode:
    m = re.match(r"^([A-Za-z][\w-]*)(?:\+([a-z]+))?: (.+)$", text)
    if not m:
        raise PromptParseError(f"malformed control code {text!r}", offset)
    role_name, spec_name, content = m.groups()
    if not _ROLE_RE.match(role_name):
        raise PromptParseError(f"unknown role name {role_name!r}", offset)
    if role_name == "VERB":
        raise PromptParseError("duplicate verb code", offset)
    role = RoleLabel(role_name)
    if content == STAR and spec_name is None:
        return ArgCode(role, None, STAR)
    if spec_name is None:
        raise PromptParseError(f"missing specificity in {text!r}", offset)
    try:
        spec = Specificity(spec_name)
    except ValueError:
        raise PromptParseError(f"unknown specificity {spec_name!r}", offset)
    try:
        return ArgCode(role, spec, content)
    except ContractError as exc:
        raise PromptParseError(str(exc), offset)


def parse_prompt(text: str, sentinel: str = DEFAULT_SENTINEL) -> PromptSpec:
    """Parse a serialized prompt. Inverse of :func:`serialize`.

    Code order is accepted as-is (negative training inputs scramble role
    names on purpose); blanks must number 0..k-1 left to right. Parsed
    prompts get a default assignment: header codes map to blanks in
    order. Source provenance is absent.
    """
    if not text.startswith("["):
        raise PromptParseError("prompt must start with '['", 0)
    end = text.find("]")
    if end < 0:
        raise PromptParseError("unbalanced header bracket", 0)
    head = text[1:end]
    parts = head.split(" | ")
    codes: list[Union[VerbCode, ArgCode]] = [_parse_verb_code(parts[0], 1)]
    offset = 1 + len(parts[0])
    for part in parts[1:]:
        offset += 3
        codes.append(_parse_arg_code(part, offset))
        offset += len(part)

    rest = text[end + 1:]
    items: list[ContextItem] = []
    if rest:
        if not rest.startswith(" "):
            raise PromptParseError("expected a single space after the header", end + 1)
        body = rest[1:]
        if body != body.strip() or not body:
            raise PromptParseError("stray whitespace around context", end + 2)
        pat = _sentinel_regex(sentinel)
        slot = 0
        for tok in body.split(" "):
            if not tok:
                raise PromptParseError("double space in context", end + 2)
            m = pat.match(tok)
            if m:
                if int(m.group(1)) != slot:
                    raise PromptParseError(
                        f"blank numbered {m.group(1)} where {slot} was expected", end + 2)
                items.append(Blank())
                slot += 1
            else:
                items.append(LiteralTok(tok))

    n_blanks = sum(1 for it in items if isinstance(it, Blank))
    default_assign = tuple(
        (slot, code_idx)
        for slot, code_idx in zip(range(n_blanks), range(len(codes)))
    )
    return PromptSpec(
        header=Header(tuple(codes)),
        context=Context(tuple(items)),
        assignments=default_assign,
    )


# --- targets and tagged outputs ----------------------------------------------

@dataclass(frozen=True)
class TaggedSegment:
    role: str
    text: str


@dataclass(frozen=True)
class LiteralSegment:
    text: str


Segment = Union[TaggedSegment, LiteralSegment]


@dataclass(frozen=True)
class TaggedOutput:
    segments: tuple[Segment, ...]

    def plain_text(self) -> str:
        return " ".join(s.text for s in self.segments if s.text)

    def render(self) -> str:
        parts = []
        for seg in self.segments:
            if isinstance(seg, TaggedSegment):
                parts.append(f"[{seg.role}: {seg.text}]")
            else:
                parts.append(seg.text)
        return " ".join(parts)

    def spans_for(self, role: str) -> list[TaggedSegment]:
        return [s for s in self.segments if isinstance(s, TaggedSegment) and s.role == role]


_TAG_OPEN = re.compile(r"\[([A-Z][A-Z0-9_-]*): ")


def parse_tagged_output(text: str) -> TaggedOutput:
    """Parse '[ROLE: span] literal ...' generations. A plain sentence is a
    single literal segment; unbalanced or nested tags raise."""
    segments: list[Segment] = []
    buf: list[str] = []

    def flush():
        words = "".join(buf).split()
        if words:
            segments.append(LiteralSegment(" ".join(words)))
        buf.clear()

    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "[":
            m = _TAG_OPEN.match(text, i)
            if not m:
                raise TaggedParseError(f"malformed tag at offset {i}")
            close = text.find("]", m.end())
            if close < 0:
                raise TaggedParseError(f"unbalanced tag at offset {i}")
            content = text[m.end():close]
            if "[" in content:
                raise TaggedParseError(f"nested tag at offset {i}")
            flush()
            segments.append(TaggedSegment(m.group(1), " ".join(content.split())))
            i = close + 1
        elif ch == "]":
            raise TaggedParseError(f"unbalanced ']' at offset {i}")
        else:
            buf.append(ch)
            i += 1
    flush()
    return TaggedOutput(tuple(segments))


def build_target(sentence: SrlSentence, prompt: PromptSpec) -> str:
    """Render the full-sentence training target for a compiled prompt:
    masked spans wrapped '[ROLE: original text]', everything else verbatim."""
    src = prompt.source
    if src is None:
        raise ContractError("prompt has no source; targets need a compiled prompt")
    if src.n_tokens != len(sentence.tokens):
        raise ContractError("prompt source does not match this sentence")
    role_by_index = {idx: code.role.name
                     for idx, code in enumerate(prompt.header.codes)
                     if isinstance(code, ArgCode)}
    parts: list[str] = []
    pos = 0
    region_i = 0
    regions = sorted(src.regions)
    while pos < len(sentence.tokens):
        if region_i < len(regions) and regions[region_i][0] == pos:
            s, e, code_idx = regions[region_i]
            label = "VERB" if code_idx in (0, AUX_RUN) else role_by_index[code_idx]
            parts.append(f"[{label}: {sentence.span_text(s, e)}]")
            pos = e
            region_i += 1
        else:
            parts.append(sentence.tokens[pos].text)
            pos += 1
    return " ".join(parts)


def untag(text: str) -> str:
    """Strip role tags from a generation, leaving the plain sentence."""
    return parse_tagged_output(text).plain_text()
