"""Likelihood / unlikelihood training example generation.

Positives pair a compiled prompt with its tagged full-sentence target
(reward +1). Each positive yields up to three negatives (reward −1) by
corrupting the header along one axis: role labels plus verb voice/tense,
keyword contents, or keyword specificities. A strategy with nothing to
corrupt is skipped, which is why corpus-scale negative:positive ratios
fall below 3.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from random import Random
from typing import Iterable, Iterator, TextIO

from .errors import ContractError
from .prompts import (
    ArgCode,
    Header,
    PromptSpec,
    TaggedSegment,
    VerbCode,
    build_target,
    compile_prompt,
    parse_prompt,
    parse_tagged_output,
    serialize,
)
from .srl import (
    ADJUNCT_ROLES,
    ArgSpan,
    RoleLabel,
    Specificity,
    SrlSentence,
    STAR,
    extract_keyword_candidates,
)

POSITIVE_STRATEGY = "positive"
NEGATIVE_STRATEGIES = ("negative-roles-verb", "negative-contents", "negative-specs")

# keyword-table truncation depth
TABLE_TOP_K = 15

# deterministic per-item seed derivation (plain integer arithmetic so the
# stream is reproducible regardless of worker fan-out)
_SEED_STRIDE = 1_000_003


@dataclass(frozen=True)
class Provenance:
    sent_id: str | None
    frame_idx: int
    strategy: str


@dataclass(frozen=True)
class TrainingExample:
    input: str
    target: str
    reward: int
    provenance: Provenance

    def __post_init__(self):
        if self.reward not in (1, -1):
            raise ContractError(f"reward must be +1 or -1, got {self.reward}")

    def to_json(self) -> dict:
        return {
            "input": self.input,
            "target": self.target,
            "reward": self.reward,
            "provenance": {
                "sent_id": self.provenance.sent_id,
                "frame_idx": self.provenance.frame_idx,
                "strategy": self.provenance.strategy,
            },
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TrainingExample":
        prov = obj["provenance"]
        return cls(
            input=obj["input"],
            target=obj["target"],
            reward=int(obj["reward"]),
            provenance=Provenance(
                sent_id=prov.get("sent_id"),
                frame_idx=int(prov.get("frame_idx", 0)),
                strategy=prov.get("strategy", ""),
            ),
        )


# --- positives ----------------------------------------------------------------

def sample_positive(sentence: SrlSentence, frame_idx: int, seed: int) -> TrainingExample:
    """Draw one positive example for a frame.

    Draw order (frozen so seeds stay meaningful): mask-all coin; else the
    masked proportion and the subset; the total-blank budget (the blank
    count is the max of a uniform draw from [0,10) and the number of
    masked arguments, so extras only appear when the draw exceeds it);
    then one keyword per masked span; finally the compile seed that
    shuffles adjunct order and places the extra blanks.
    """
    frame = sentence.frames[frame_idx]
    rng = Random(seed)

    occurrences: list[tuple[RoleLabel, int, ArgSpan]] = []
    counters: dict[str, int] = {}
    for span in frame.sorted_args():
        k = counters.get(span.role.name, 0)
        counters[span.role.name] = k + 1
        occurrences.append((span.role, k, span))

    n_args = len(occurrences)
    if rng.random() < 0.5 or n_args == 0:
        masked = list(occurrences)
    else:
        u = 1.0 - rng.random()  # uniform in (0, 1]
        k = min(n_args, max(1, math.ceil(u * n_args)))
        masked = sorted(rng.sample(occurrences, k), key=lambda o: o[2].start)

    total_blanks = max(rng.randrange(10), len(masked))
    n_extra = total_blanks - len(masked)

    keyword_choice: dict[tuple[RoleLabel, int], tuple[str, Specificity | None]] = {}
    for role, occ, span in masked:
        candidates = extract_keyword_candidates(span, sentence, seed=rng.randrange(1 << 30))
        content, spec = candidates[rng.randrange(len(candidates))]
        keyword_choice[(role, occ)] = (content, None if content == STAR else spec)

    prompt = compile_prompt(
        sentence,
        frame_idx,
        mask=[(role, occ) for role, occ, _ in masked],
        n_extra_blanks=n_extra,
        keyword_choice=keyword_choice,
        seed=rng.randrange(1 << 30),
    )
    return TrainingExample(
        input=serialize(prompt),
        target=build_target(sentence, prompt),
        reward=1,
        provenance=Provenance(sentence.sent_id, frame_idx, POSITIVE_STRATEGY),
    )


# --- keyword table ------------------------------------------------------------

class KeywordTable:
    """Most common keyword contents per (role, specificity), depth 15,
    sorted by descending count with lexicographic tie-breaks."""

    def __init__(self, entries: dict[tuple[str, Specificity], tuple[tuple[str, int], ...]]):
        for key, items in entries.items():
            counts = [c for _, c in items]
            if counts != sorted(counts, reverse=True) or len(items) > TABLE_TOP_K:
                raise ContractError(f"table entry {key} is not a sorted top-{TABLE_TOP_K} list")
        self._entries = dict(entries)

    def lookup(self, role: RoleLabel | str, spec: Specificity) -> tuple[tuple[str, int], ...]:
        name = role.name if isinstance(role, RoleLabel) else role
        return self._entries.get((name, spec), ())

    def keys(self):
        return self._entries.keys()

    def __eq__(self, other):
        return isinstance(other, KeywordTable) and self._entries == other._entries

    def to_json(self) -> dict:
        return {
            f"{name}|{spec}": [[c, n] for c, n in items]
            for (name, spec), items in sorted(self._entries.items(),
                                              key=lambda kv: (kv[0][0], kv[0][1].value))
        }

    @classmethod
    def from_json(cls, obj: dict) -> "KeywordTable":
        entries = {}
        for key, items in obj.items():
            name, _, spec_name = key.partition("|")
            entries[(name, Specificity(spec_name))] = tuple((c, int(n)) for c, n in items)
        return cls(entries)


def build_keyword_table(corpus: Iterable[SrlSentence], seed: int) -> KeywordTable:
    """Count keyword candidates over every argument span in the corpus
    and keep the 15 most common per (role, specificity)."""
    counts: dict[tuple[str, Specificity], dict[str, int]] = {}
    item = 0
    for sentence in corpus:
        for frame in sentence.frames:
            for span in frame.sorted_args():
                cands = extract_keyword_candidates(
                    span, sentence, seed=seed + _SEED_STRIDE * item)
                item += 1
                for content, spec in cands:
                    bucket = counts.setdefault((span.role.name, spec), {})
                    bucket[content] = bucket.get(content, 0) + 1
    entries = {}
    for key, bucket in counts.items():
        ranked = sorted(bucket.items(), key=lambda kv: (-kv[1], kv[0]))[:TABLE_TOP_K]
        entries[key] = tuple(ranked)
    return KeywordTable(entries)


# --- negatives ----------------------------------------------------------------

def _remap_roles_and_verb(header: Header, rng: Random) -> tuple[Header, dict[str, str]]:
    """Strategy 1: swap core role names, rename each distinct adjunct
    role to a different canonical adjunct, and flip voice plus move tense,
    leaving contents and specificities alone."""
    mapping: dict[str, str] = {}
    for code in header.arg_codes:
        name = code.role.name
        if name in mapping:
            continue
        if name == "AGENT":
            mapping[name] = "PATIENT"
        elif name == "PATIENT":
            mapping[name] = "AGENT"
        else:
            alternatives = [r.name for r in ADJUNCT_ROLES if r.name != name]
            mapping[name] = alternatives[rng.randrange(len(alternatives))]

    verb = header.verb
    new_voice = "passive" if verb.voice == "active" else "active"
    tenses = [t for t in ("past", "present", "future") if t != verb.tense]
    new_tense = tenses[rng.randrange(len(tenses))]

    codes: list = [VerbCode(new_voice, new_tense, verb.lemma)]
    for code in header.arg_codes:
        codes.append(ArgCode(RoleLabel(mapping[code.role.name]), code.spec, code.content))
    return Header(tuple(codes)), mapping


def _remap_target(target: str, mapping: dict[str, str]) -> str:
    tagged = parse_tagged_output(target)
    segments = []
    for seg in tagged.segments:
        if isinstance(seg, TaggedSegment) and seg.role in mapping:
            segments.append(TaggedSegment(mapping[seg.role], seg.text))
        else:
            segments.append(seg)
    return type(tagged)(tuple(segments)).render()


def _resample_contents(header: Header, table: KeywordTable, rng: Random) -> Header | None:
    """Strategy 2: replace keyword contents with common contents of the
    same (role, specificity). Codes with no listed alternative keep their
    content; the strategy applies only if at least one code changes."""
    codes: list = [header.verb]
    changed = False
    for code in header.arg_codes:
        if code.content == STAR or code.spec is None:
            codes.append(code)
            continue
        pool = [c for c, _ in table.lookup(code.role, code.spec)
                if c != code.content and c != STAR]
        if not pool:
            codes.append(code)
            continue
        codes.append(ArgCode(code.role, code.spec, pool[rng.randrange(len(pool))]))
        changed = True
    return Header(tuple(codes)) if changed else None


def _reassign_specs(header: Header, rng: Random) -> Header | None:
    """Strategy 3: move every specificity to a different value, keeping
    role names and contents."""
    codes: list = [header.verb]
    changed = False
    for code in header.arg_codes:
        if code.spec is None:
            codes.append(code)
            continue
        options = [s for s in Specificity if s is not code.spec]
        codes.append(ArgCode(code.role, options[rng.randrange(len(options))], code.content))
        changed = True
    return Header(tuple(codes)) if changed else None


def gen_negatives(
    sentence: SrlSentence,
    positive: TrainingExample,
    table: KeywordTable,
    seed: int,
) -> list[TrainingExample]:
    """Up to three unlikelihood examples for one positive.

    Strategy 1 rewrites role labels and the verb's voice/tense and remaps
    the target's span labels the same way; strategies 2 and 3 corrupt
    only the header (contents, then specificities) and keep the target.
    Inapplicable strategies are skipped; which ones ran is visible in the
    returned strategy tags.
    """
    rng = Random(seed)
    prompt = parse_prompt(positive.input)
    context_str = positive.input[positive.input.index("]") + 1:].lstrip()

    out: list[TrainingExample] = []

    header1, mapping = _remap_roles_and_verb(prompt.header, rng)
    out.append(TrainingExample(
        input=_with_header(header1, context_str),
        target=_remap_target(positive.target, mapping),
        reward=-1,
        provenance=Provenance(sentence.sent_id, positive.provenance.frame_idx,
                              NEGATIVE_STRATEGIES[0]),
    ))

    header2 = _resample_contents(prompt.header, table, rng)
    if header2 is not None:
        out.append(TrainingExample(
            input=_with_header(header2, context_str),
            target=positive.target,
            reward=-1,
            provenance=Provenance(sentence.sent_id, positive.provenance.frame_idx,
                                  NEGATIVE_STRATEGIES[1]),
        ))

    header3 = _reassign_specs(prompt.header, rng)
    if header3 is not None:
        out.append(TrainingExample(
            input=_with_header(header3, context_str),
            target=positive.target,
            reward=-1,
            provenance=Provenance(sentence.sent_id, positive.provenance.frame_idx,
                                  NEGATIVE_STRATEGIES[2]),
        ))
    return out


def _with_header(header: Header, context_str: str) -> str:
    rendered = header.render()
    return f"{rendered} {context_str}" if context_str else rendered


# --- dataset streaming ----------------------------------------------------------

@dataclass
class DatasetSummary:
    positives: int = 0
    negatives: int = 0
    skipped: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "positives": self.positives,
            "negatives": self.negatives,
            "skipped": dict(self.skipped),
        }


def iter_dataset(
    corpus: list[SrlSentence],
    seed: int,
    table: KeywordTable | None = None,
    summary: DatasetSummary | None = None,
) -> Iterator[TrainingExample]:
    """Stream one positive and its negatives per frame, in corpus order.
    Per-frame seeds derive from the master seed by position, so the
    stream is reproducible and order-independent of any parallelism."""
    if table is None:
        table = build_keyword_table(corpus, seed)
    counter = 0
    for sentence in corpus:
        for frame_idx in range(len(sentence.frames)):
            pos_seed = seed + _SEED_STRIDE * (2 * counter)
            neg_seed = seed + _SEED_STRIDE * (2 * counter + 1)
            counter += 1
            positive = sample_positive(sentence, frame_idx, pos_seed)
            negatives = gen_negatives(sentence, positive, table, neg_seed)
            if summary is not None:
                summary.positives += 1
                summary.negatives += len(negatives)
                ran = {ex.provenance.strategy for ex in negatives}
                for tag in NEGATIVE_STRATEGIES:
                    if tag not in ran:
                        summary.skipped[tag] = summary.skipped.get(tag, 0) + 1
            yield positive
            yield from negatives


def gen_dataset(
    corpus: list[SrlSentence],
    seed: int,
    out: TextIO,
    table: KeywordTable | None = None,
) -> DatasetSummary:
    """Write the example stream as JSON Lines and return its counts."""
    summary = DatasetSummary()
    for example in iter_dataset(corpus, seed, table=table, summary=summary):
        out.write(json.dumps(example.to_json(), ensure_ascii=False) + "\n")
    return summary
