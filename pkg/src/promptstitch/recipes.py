"""Named perturbation recipes: sentence-level strategies that compile a
base prompt, choose a perturbation program, and hand both back ready for
generation.

Covered families: NLI hypothesis augmentation (meaning-preserving edits
label entailment, meaning-changing ones neutral), prepositional-phrase
attachment swaps, per-dataset contrast edits, and style transfers over
tense, voice, and phrase placement or removal.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

from .clients import mock_generate
from .errors import ContractError, RecipeInapplicableError, RecipeParameterError
from .ops import Clause, OpKind, OpProgram, PerturbOp, apply
from .prompts import LiteralTok, PromptSpec, compile_prompt, serialize, untag
from .srl import (
    AGENT,
    ArgSpan,
    MODAL,
    NEGATION,
    PATIENT,
    PredicateFrame,
    RoleLabel,
    Specificity,
    SrlSentence,
)

log = logging.getLogger(__name__)

ENTAILMENT = "entailment"
NEUTRAL = "neutral"

NLI_STRATEGIES = (
    "untangle_relative_clause",
    "shorten_core",
    "change_voice",
    "replace_core_with_subsequences",
    "swap_core",
)
_NLI_LABELS = {
    "untangle_relative_clause": ENTAILMENT,
    "shorten_core": ENTAILMENT,
    "change_voice": ENTAILMENT,
    "replace_core_with_subsequences": NEUTRAL,
    "swap_core": NEUTRAL,
}


@dataclass(frozen=True)
class RecipeCandidate:
    """A compiled base prompt plus the program that perturbs it."""

    prompt: PromptSpec
    program: OpProgram
    label: str | None = None
    meta: dict = field(default_factory=dict)

    def apply(self, seed: int = 0) -> PromptSpec:
        return apply(self.prompt, self.program, seed=seed)

    def realize(self, seed: int = 0) -> str:
        """Offline plain-text realization of the perturbed prompt."""
        return untag(mock_generate(self.apply(seed)))


@dataclass(frozen=True)
class LabeledPair:
    premise: str
    hypothesis: str
    label: str
    strategy: str

    def __post_init__(self):
        if self.label != _NLI_LABELS.get(self.strategy, self.label):
            raise ContractError(
                f"label {self.label!r} conflicts with strategy {self.strategy!r}")


# --- shared helpers -----------------------------------------------------------

def _cap_first(text: str) -> str:
    return text[:1].upper() + text[1:] if text else text


def _decap_first(text: str) -> str:
    words = text.split(" ")
    first = words[0]
    # leave acronyms and mid-word capitals alone
    if len(first) > 1 and first[1:] != first[1:].lower():
        return text
    words[0] = first.lower()
    return " ".join(words)


def _first_frame(
    sentence: SrlSentence, want: Callable[[PredicateFrame], bool]
) -> int | None:
    for i, frame in enumerate(sentence.frames):
        if want(frame):
            return i
    return None


def _role_span(frame: PredicateFrame, role: RoleLabel) -> ArgSpan | None:
    spans = frame.occurrences(role)
    return spans[0] if spans else None


def _chunks_in(sentence: SrlSentence, span: ArgSpan) -> list[tuple[int, int]]:
    out = []
    for cs, ce in sentence.chunks:
        s, e = max(cs, span.start), min(ce, span.end)
        if s < e:
            out.append((s, e))
    return out


def _content_clause(
    role: RoleLabel, text: str, spec: Specificity | None = None
) -> Clause:
    ops = [PerturbOp(OpKind.CHANGE_CONTENT, text=text)]
    if spec is not None:
        ops.append(PerturbOp(OpKind.CHANGE_SPEC, spec=spec))
    return Clause(role, tuple(ops))


def _skip(name: str, reason: str) -> list:
    log.info("recipe %s skipped: %s", name, reason)
    return []


def _verbatim_keywords(sentence: SrlSentence, frame: PredicateFrame) -> dict:
    """Exact-cased complete keyword for every argument occurrence.

    The compiler lowercases keywords by default, which suits sampled
    training keywords; recipe edits reuse argument text in place, so the
    original casing must survive the round trip.
    """
    out: dict = {}
    counters: dict[str, int] = {}
    for span in frame.sorted_args():
        k = counters.get(span.role.name, 0)
        counters[span.role.name] = k + 1
        out[(span.role, k)] = (span.text(sentence), Specificity.COMPLETE)
    return out


# --- NLI hypothesis perturbation ------------------------------------------------

def _nli_candidates(sentence: SrlSentence, strategy: str, seed: int) -> list[RecipeCandidate]:
    label = _NLI_LABELS[strategy]
    meta = {"recipe": f"nli/{strategy}", "label": label}

    if strategy == "untangle_relative_clause":
        idx = _first_frame(sentence, lambda f: f.has_relative_clause())
        if idx is None:
            return _skip(strategy, "no argument carries a relative-clause referent tag")
        prompt = compile_prompt(
            sentence, idx, mask="all", seed=seed,
            keyword_choice=_verbatim_keywords(sentence, sentence.frames[idx]))
        literals = [it for it in prompt.context.items if isinstance(it, LiteralTok)]
        keep = len(literals)
        while keep > 0 and all(not ch.isalnum() for ch in literals[keep - 1].text):
            keep -= 1
        if keep == 0:
            return _skip(strategy, "the frame already covers the whole sentence")
        program = OpProgram((Clause(None, (
            PerturbOp(OpKind.CONTEXT_DELETE_TEXT, span=(0, keep)),
        )),))
        return [RecipeCandidate(prompt, program, label, meta)]

    if strategy == "shorten_core":
        idx = _first_frame(sentence, lambda f: any(a.role.is_core for a in f.args))
        if idx is None:
            return _skip(strategy, "no frame has a core argument")
        frame = sentence.frames[idx]
        clauses, seen = [], set()
        for span in frame.sorted_args():
            if not span.role.is_core or span.role in seen:
                continue
            seen.add(span.role)
            chunks = _chunks_in(sentence, span)
            if not chunks:
                continue
            head = sentence.span_text(*chunks[0])
            if head != span.text(sentence):
                clauses.append(_content_clause(span.role, head))
        if not clauses:
            return _skip(strategy, "no core argument shortens to a noun chunk")
        prompt = compile_prompt(
            sentence, idx, mask="all", seed=seed,
            keyword_choice=_verbatim_keywords(sentence, frame))
        return [RecipeCandidate(prompt, OpProgram(tuple(clauses)), label, meta)]

    if strategy == "change_voice":
        idx = _first_frame(
            sentence,
            lambda f: _role_span(f, AGENT) is not None and _role_span(f, PATIENT) is not None,
        )
        if idx is None:
            return _skip(strategy, "voice swaps need both core roles")
        frame = sentence.frames[idx]
        agent_text = _role_span(frame, AGENT).text(sentence)
        patient_text = _role_span(frame, PATIENT).text(sentence)
        clauses = [Clause(None, (PerturbOp(
            OpKind.CHANGE_VVOICE,
            voice="passive" if frame.voice == "active" else "active"),))]
        if frame.voice == "active":
            # the patient will surface first, the agent inside a by-phrase
            clauses.append(_content_clause(AGENT, f"by {_decap_first(agent_text)}"))
            clauses.append(_content_clause(PATIENT, _cap_first(patient_text)))
        else:
            stripped = agent_text[3:] if agent_text.lower().startswith("by ") else agent_text
            clauses.append(_content_clause(AGENT, _cap_first(stripped)))
            clauses.append(_content_clause(PATIENT, _decap_first(patient_text)))
        prompt = compile_prompt(
            sentence, idx, mask="all", seed=seed,
            keyword_choice=_verbatim_keywords(sentence, frame))
        return [RecipeCandidate(prompt, OpProgram(tuple(clauses)), label, meta)]

    if strategy == "replace_core_with_subsequences":
        idx = _first_frame(sentence, lambda f: any(a.role.is_core for a in f.args))
        if idx is None:
            return _skip(strategy, "no frame has a core argument")
        frame = sentence.frames[idx]
        args = frame.sorted_args()
        clauses, seen = [], set()
        for span in args:
            if not span.role.is_core or span.role in seen:
                continue
            seen.add(span.role)
            own = span.text(sentence).casefold()
            candidates = [
                sentence.span_text(cs, ce)
                for other in args if other is not span
                for cs, ce in _chunks_in(sentence, other)
                if sentence.span_text(cs, ce).casefold() != own
            ]
            if not candidates:
                continue
            replacement = candidates[-1]
            if span.start == 0:
                replacement = _cap_first(replacement)
            clauses.append(_content_clause(span.role, replacement))
        if not clauses:
            return _skip(strategy, "no noun chunk from another argument is available")
        prompt = compile_prompt(
            sentence, idx, mask="all", seed=seed,
            keyword_choice=_verbatim_keywords(sentence, frame))
        return [RecipeCandidate(prompt, OpProgram(tuple(clauses)), label, meta)]

    if strategy == "swap_core":
        idx = _first_frame(
            sentence,
            lambda f: _role_span(f, AGENT) is not None and _role_span(f, PATIENT) is not None,
        )
        if idx is None:
            return _skip(strategy, "core swaps need both core roles")
        frame = sentence.frames[idx]
        agent_text = _role_span(frame, AGENT).text(sentence)
        patient = _role_span(frame, PATIENT)
        patient_text = patient.text(sentence)
        if agent_text.lower().startswith("by "):
            # keep the agent marker in place and exchange the payloads
            new_agent = f"by {_decap_first(patient_text)}"
            new_patient = agent_text[3:]
            if patient.start == 0 or patient_text[:1].isupper():
                new_patient = _cap_first(new_patient)
            program = OpProgram((
                _content_clause(AGENT, new_agent),
                _content_clause(PATIENT, new_patient),
            ))
        else:
            program = OpProgram((Clause(None, (PerturbOp(OpKind.SWAP_CORE),)),))
        prompt = compile_prompt(
            sentence, idx, mask="all", seed=seed,
            keyword_choice=_verbatim_keywords(sentence, frame))
        return [RecipeCandidate(prompt, program, label, meta)]

    raise RecipeParameterError(f"unknown augmentation strategy {strategy!r}")


def nli_perturb(
    sentence: SrlSentence, strategy: str, seed: int = 0
) -> list[tuple[PromptSpec, str]]:
    """One perturbed prompt and its entailment label, or an empty list
    (with the reason logged) when the sentence lacks the needed structure."""
    if strategy not in NLI_STRATEGIES:
        raise RecipeParameterError(f"unknown augmentation strategy {strategy!r}")
    return [
        (cand.apply(seed), cand.label)
        for cand in _nli_candidates(sentence, strategy, seed)
    ]


def nli_labeled_pair(
    sentence: SrlSentence,
    strategy: str,
    seed: int = 0,
    hypothesis: str | None = None,
) -> LabeledPair | None:
    """Premise/hypothesis pair for one strategy; the hypothesis defaults
    to the offline mock realization."""
    candidates = _nli_candidates(sentence, strategy, seed)
    if not candidates:
        return None
    cand = candidates[0]
    return LabeledPair(
        premise=sentence.text(),
        hypothesis=hypothesis if hypothesis is not None else cand.realize(seed),
        label=cand.label,
        strategy=strategy,
    )


# --- PP attachment ----------------------------------------------------------------

PREPOSITION_ROLES = {
    "at": RoleLabel("LOCATIVE"),
    "in": RoleLabel("LOCATIVE"),
    "on": RoleLabel("LOCATIVE"),
    "near": RoleLabel("LOCATIVE"),
    "during": RoleLabel("TEMPORAL"),
    "after": RoleLabel("TEMPORAL"),
    "before": RoleLabel("TEMPORAL"),
    "with": RoleLabel("MANNER"),
    "without": RoleLabel("MANNER"),
    "by": RoleLabel("MANNER"),
    "for": RoleLabel("PURPOSE"),
    "to": RoleLabel("GOAL"),
    "toward": RoleLabel("GOAL"),
    "into": RoleLabel("GOAL"),
}


def _pp_candidate(sentence: SrlSentence, direction: str, preposition: str) -> RecipeCandidate:
    if direction not in ("to_noun", "to_verb"):
        raise RecipeParameterError(f"unknown direction {direction!r}")
    if not preposition:
        raise RecipeParameterError("a preposition is required")
    prep = preposition.lower()
    meta = {"recipe": f"pp/{direction}", "preposition": prep}

    if direction == "to_noun":
        def fits(f: PredicateFrame) -> bool:
            return _role_span(f, PATIENT) is not None and any(
                not a.role.is_core and a.tokens(sentence)[0].text.lower() == prep
                for a in f.args)

        idx = _first_frame(sentence, fits)
        if idx is None:
            raise RecipeInapplicableError(
                f"need a patient plus a verb-attached adjunct starting with {preposition!r}")
        frame = sentence.frames[idx]
        patient = _role_span(frame, PATIENT)
        adjunct = next(a for a in frame.sorted_args()
                       if not a.role.is_core and a.tokens(sentence)[0].text.lower() == prep)
        program = OpProgram((
            _content_clause(
                PATIENT,
                f"{patient.text(sentence)} {adjunct.tokens(sentence)[0].text}",
                Specificity.PARTIAL),
            Clause(adjunct.role, (PerturbOp(OpKind.DELETE),)),
        ))
        prompt = compile_prompt(
            sentence, idx, mask=[PATIENT, adjunct.role],
            keyword_choice=_verbatim_keywords(sentence, frame))
        return RecipeCandidate(prompt, program, None, meta)

    def fits(f: PredicateFrame) -> bool:
        span = _role_span(f, PATIENT)
        return span is not None and any(
            t.text.lower() == prep for t in span.tokens(sentence)[1:])

    idx = _first_frame(sentence, fits)
    if idx is None:
        raise RecipeInapplicableError(
            f"need a patient containing the preposition {preposition!r} mid-span")
    frame = sentence.frames[idx]
    patient = _role_span(frame, PATIENT)
    tokens = [t.text for t in patient.tokens(sentence)]
    cut = next(i for i, t in enumerate(tokens) if i > 0 and t.lower() == prep)
    adjunct_role = PREPOSITION_ROLES.get(prep, RoleLabel("ADVERBIAL"))
    program = OpProgram((
        _content_clause(PATIENT, " ".join(tokens[:cut])),
        _content_clause(adjunct_role, tokens[cut], Specificity.PARTIAL),
    ))
    prompt = compile_prompt(
        sentence, idx, mask=[PATIENT],
        keyword_choice=_verbatim_keywords(sentence, frame))
    return RecipeCandidate(prompt, program, None, meta)


def pp_attachment_swap(sentence: SrlSentence, direction: str, preposition: str) -> PromptSpec:
    """Flip a prepositional phrase between verb and noun attachment.

    to_noun glues the preposition onto the patient keyword (specificity
    drops to partial so the generator completes the phrase) and deletes
    the adjunct that carried the verb attachment; to_verb trims the PP
    from the patient and introduces a new adjunct code with the
    preposition as a partial keyword.
    """
    return _pp_candidate(sentence, direction, preposition).apply()


# --- contrast edits ----------------------------------------------------------------

CONTRAST_NAMES = (
    "change_entity",
    "matres_change_tense",
    "matres_change_order",
    "qa_swap_answer_to_agent",
)

_WH_WORDS = frozenset(
    {"who", "whom", "whose", "what", "when", "where", "why", "how", "which"})


def _contrast_candidate(sentence: SrlSentence, name: str, params: dict) -> RecipeCandidate:
    if name not in CONTRAST_NAMES:
        raise RecipeParameterError(f"unknown contrast recipe {name!r}")
    params = params or {}
    meta = {"recipe": f"contrast/{name}"}
    frame_idx = int(params.get("frame_idx", 0))
    if not (0 <= frame_idx < len(sentence.frames)):
        raise RecipeInapplicableError(f"sentence has no frame {frame_idx}")
    frame = sentence.frames[frame_idx]

    if name == "change_entity":
        role_name, text = params.get("role"), params.get("text")
        if not role_name or not text:
            raise RecipeParameterError("change_entity needs role= and text=")
        role = RoleLabel(role_name)
        if _role_span(frame, role) is None:
            raise RecipeInapplicableError(f"frame has no {role} argument")
        prompt = compile_prompt(
            sentence, frame_idx, mask=[role],
            keyword_choice=_verbatim_keywords(sentence, frame))
        return RecipeCandidate(prompt, OpProgram((_content_clause(role, text),)), None, meta)

    if name == "matres_change_tense":
        tense = params.get("tense")
        if tense not in ("past", "present", "future"):
            raise RecipeParameterError("matres_change_tense needs tense=past|present|future")
        prompt = compile_prompt(sentence, frame_idx, mask=[])
        program = OpProgram((Clause(None, (
            PerturbOp(OpKind.CHANGE_VTENSE, tense=tense),)),))
        return RecipeCandidate(prompt, program, None, meta)

    if name == "matres_change_order":
        if _role_span(frame, PATIENT) is None:
            raise RecipeInapplicableError("order changes move the patient span")
        prompt = compile_prompt(
            sentence, frame_idx, mask=[PATIENT],
            keyword_choice=_verbatim_keywords(sentence, frame))
        program = OpProgram((Clause(PATIENT, (
            PerturbOp(OpKind.MOVE, to_slot="end"),)),))
        return RecipeCandidate(prompt, program, None, meta)

    # qa_swap_answer_to_agent
    answer = params.get("answer")
    if not answer:
        raise RecipeParameterError("qa_swap_answer_to_agent needs answer=")
    wh = params.get("wh", "who")
    questioned = None
    for span in frame.sorted_args():
        toks = span.tokens(sentence)
        if len(toks) == 1 and toks[0].text.lower() in _WH_WORDS:
            questioned = span
            break
    if questioned is None:
        raise RecipeInapplicableError("no interrogative argument to swap the answer into")
    if questioned.role == AGENT:
        raise RecipeInapplicableError("the question already targets the agent")
    if _role_span(frame, AGENT) is None:
        raise RecipeInapplicableError("answer swaps need an agent argument")
    prompt = compile_prompt(
        sentence, frame_idx, mask="all",
        keyword_choice=_verbatim_keywords(sentence, frame))
    program = OpProgram((
        _content_clause(AGENT, wh),
        _content_clause(questioned.role, answer, Specificity.PARTIAL),
    ))
    return RecipeCandidate(prompt, program, None, meta)


def contrast_recipe(sentence: SrlSentence, name: str, params: dict) -> PromptSpec:
    """Single-edit contrast-set perturbations. params carries the pieces
    the caller sources from its dataset: replacement text (role=, text=),
    target tense (tense=), governing frame (frame_idx=), or the answer
    text to move into the questioned role (answer=, wh=)."""
    return _contrast_candidate(sentence, name, params).apply()


# --- style transfer ----------------------------------------------------------------

STYLE_TENSE = {"to_future": "future", "to_past": "past", "to_present": "present"}
STYLE_VOICE = {"active_to_passive": "passive", "passive_to_active": "active"}
STYLE_NAMES = tuple(STYLE_TENSE) + tuple(STYLE_VOICE) + (
    "adj_adv_removal", "pp_removal", "pp_front_to_back")

_ADJ_ADV_POS = frozenset({"JJ", "JJR", "JJS", "RB", "RBR", "RBS"})
_PREP_POS = frozenset({"IN"})


def _require_pos(sentence: SrlSentence) -> None:
    if any(t.pos is None for t in sentence.tokens):
        raise ContractError("removal transfers need part-of-speech tags on every token")


def _removal_edits(
    sentence: SrlSentence,
    frame: PredicateFrame,
    pos_set: frozenset,
    trim_from_prep: bool,
) -> tuple[list[RoleLabel], list[Clause]]:
    """Mask roles and clauses that strip matching tokens from argument
    keywords (first occurrence of each role; emptied arguments are
    deleted outright)."""
    masked: list[RoleLabel] = []
    clauses: list[Clause] = []
    for span in frame.sorted_args():
        if span.role in masked:
            continue
        toks = span.tokens(sentence)
        if trim_from_prep:
            hit = next((i for i, t in enumerate(toks) if t.pos in pos_set), None)
            if hit is None:
                continue
            keep = [t.text for t in toks[:hit]]
        else:
            if not any(t.pos in pos_set for t in toks):
                continue
            keep = [t.text for t in toks if t.pos not in pos_set]
        masked.append(span.role)
        if keep:
            clauses.append(_content_clause(span.role, " ".join(keep)))
        else:
            clauses.append(Clause(span.role, (PerturbOp(OpKind.DELETE),)))
    return masked, clauses


def _style_parts(
    sentence: SrlSentence, frame_idx: int, atoms: list[str]
) -> tuple[list[RoleLabel], list[Clause | None]] | None:
    """Mask roles and program clauses for one frame, or None when some
    atom does not apply. A None clause is a placeholder for the
    front-to-back move, which needs the compiled blank count."""
    frame = sentence.frames[frame_idx]
    mask: list[RoleLabel] = []
    clauses: list[Clause | None] = []
    for atom in atoms:
        if atom in STYLE_TENSE:
            for role in (MODAL, NEGATION):
                if _role_span(frame, role) is not None and role not in mask:
                    mask.append(role)
            clauses.append(Clause(None, (
                PerturbOp(OpKind.CHANGE_VTENSE, tense=STYLE_TENSE[atom]),)))
        elif atom in STYLE_VOICE:
            if _role_span(frame, AGENT) is None or _role_span(frame, PATIENT) is None:
                return None
            for role in (AGENT, PATIENT):
                if role not in mask:
                    mask.append(role)
            clauses.append(Clause(None, (
                PerturbOp(OpKind.CHANGE_VVOICE, voice=STYLE_VOICE[atom]),)))
        elif atom == "adj_adv_removal":
            _require_pos(sentence)
            hit, edits = _removal_edits(sentence, frame, _ADJ_ADV_POS, trim_from_prep=False)
            if not hit:
                return None
            mask.extend(r for r in hit if r not in mask)
            clauses.extend(edits)
        elif atom == "pp_removal":
            _require_pos(sentence)
            hit, edits = _removal_edits(sentence, frame, _PREP_POS, trim_from_prep=True)
            if not hit:
                return None
            mask.extend(r for r in hit if r not in mask)
            clauses.extend(edits)
        elif atom == "pp_front_to_back":
            front = next((a for a in frame.sorted_args() if a.start == 0), None)
            if front is None:
                return None
            if front.role not in mask:
                mask.append(front.role)
            clauses.append(None)
        else:
            raise RecipeParameterError(f"unknown style transfer {atom!r}")
    return mask, clauses


def _style_candidates(sentence: SrlSentence, transfer: str, seed: int) -> list[RecipeCandidate]:
    atoms = [a.strip() for a in transfer.split("+") if a.strip()]
    if not atoms:
        raise RecipeParameterError("empty transfer name")
    for atom in atoms:
        if atom not in STYLE_NAMES:
            raise RecipeParameterError(f"unknown style transfer {atom!r}")
    tense_only = all(a in STYLE_TENSE for a in atoms)

    out: list[RecipeCandidate] = []
    for frame_idx in range(len(sentence.frames)):
        parts = _style_parts(sentence, frame_idx, atoms)
        if parts is None:
            log.info("recipe style/%s skipped frame %d: missing material", transfer, frame_idx)
            continue
        mask, clauses = parts
        frame = sentence.frames[frame_idx]
        keywords = _verbatim_keywords(sentence, frame)
        if "pp_front_to_back" in atoms:
            # the fronted phrase lands mid-sentence, so drop its capital
            front = next(a for a in frame.sorted_args() if a.start == 0)
            keywords[(front.role, 0)] = (
                front.text(sentence).lower(), Specificity.COMPLETE)
        prompt = compile_prompt(
            sentence, frame_idx, mask=mask, keyword_choice=keywords,
            n_extra_blanks=2 if tense_only else 0, seed=seed)
        last = prompt.context.n_blanks() - 1
        fixed = tuple(
            clause if clause is not None else Clause(None, (
                PerturbOp(OpKind.CHANGE_IDX, from_slot=0, to_slot=last),))
            for clause in clauses
        )
        if "pp_front_to_back" in atoms:
            # moving the fronted phrase strands its comma at sentence start
            literals = [it for it in prompt.context.items if isinstance(it, LiteralTok)]
            if literals and literals[0].text == ",":
                fixed += (Clause(None, (PerturbOp(
                    OpKind.CONTEXT_DELETE_TEXT, span=(0, 1)),)),)
        out.append(RecipeCandidate(
            prompt, OpProgram(fixed), None,
            {"recipe": f"style/{transfer}", "frame_idx": frame_idx}))
    return out


def style_transfer_program(sentence: SrlSentence, transfer: str, seed: int = 0) -> list[PromptSpec]:
    """One perturbed prompt per predicate frame for a named transfer
    ('to_past', 'active_to_passive', 'pp_removal', ... or compositions
    joined with '+'). Frames missing the needed material are skipped;
    a sentence with no frames yields an empty list."""
    return [cand.apply(seed) for cand in _style_candidates(sentence, transfer, seed)]


# --- registry for the batch front door -----------------------------------------------

def recipe_names() -> list[str]:
    """All namespaced recipe names the dispatcher accepts."""
    names = [f"nli/{s}" for s in NLI_STRATEGIES]
    names += ["pp/to_noun", "pp/to_verb"]
    names += [f"contrast/{n}" for n in CONTRAST_NAMES]
    names += [f"style/{n}" for n in STYLE_NAMES]
    return names


def recipe_candidates(
    sentence: SrlSentence, name: str, params: dict | None = None, seed: int = 0
) -> list[RecipeCandidate]:
    """Dispatch a namespaced recipe name ('nli/swap_core', 'pp/to_noun',
    'contrast/change_entity', 'style/to_past+active_to_passive') to its
    family and return the compiled candidates. Inapplicable inputs yield
    an empty list with the reason logged; bad names or parameters raise."""
    params = params or {}
    family, _, detail = name.partition("/")
    if family == "nli":
        if detail not in NLI_STRATEGIES:
            raise RecipeParameterError(f"unknown augmentation strategy {detail!r}")
        return _nli_candidates(sentence, detail, seed)
    if family == "pp":
        try:
            return [_pp_candidate(sentence, detail, params.get("preposition", ""))]
        except RecipeInapplicableError as exc:
            return _skip(name, str(exc))
    if family == "contrast":
        try:
            return [_contrast_candidate(sentence, detail, params)]
        except RecipeInapplicableError as exc:
            return _skip(name, str(exc))
    if family == "style":
        return _style_candidates(sentence, detail, seed)
    raise RecipeParameterError(f"unknown recipe family {family!r}")


def candidate_record(cand: RecipeCandidate) -> dict:
    """JSON-ready view of one candidate: base prompt, program, metadata."""
    meta = dict(cand.meta)
    if cand.label is not None:
        meta["label"] = cand.label
    return {
        "prompt": serialize(cand.prompt),
        "program": cand.program.render(),
        "metadata": meta,
    }


def run_recipe(
    sentence: SrlSentence, name: str, params: dict | None = None, seed: int = 0
) -> list[dict]:
    """recipe_candidates, rendered as JSON-ready records."""
    return [candidate_record(c) for c in recipe_candidates(sentence, name, params, seed)]
