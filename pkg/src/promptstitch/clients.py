"""Clients for the three generation-time services, plus offline mocks.

The wire protocol is HTTP/1.1 + JSON against three endpoints:

    POST <gen_url>/generate     {prompt, n_beams, no_repeat_bigrams,
                                 banned_phrases, max_candidates}
                                -> {"candidates": [str, ...]}
    POST <srl_url>/srl          {"text": str} -> one corpus record object
    POST <score_url>/score      {"texts": [str, ...]}
                                -> {"scores": [{"loss": float, ...}, ...]}

Base URLs come from (in rising precedence) built-in defaults, CLI flags,
a JSON config file, and the TAILOR_GEN_URL / TAILOR_SRL_URL /
TAILOR_SCORE_URL environment variables.

The mock_* functions are deterministic in-process stand-ins: the mock
generator realizes every control code by rule, so re-checking its output
against the prompt always agrees (the offline test oracle).
"""
from __future__ import annotations

import logging
import math
import os
import zlib
from dataclasses import dataclass

import requests

from .errors import ContractError, SchemaError, TransportError
from .morph import conjugate, infer_verb_features
from .prompts import (
    AUX_RUN,
    ArgCode,
    Blank,
    LiteralSegment,
    PromptSpec,
    Segment,
    TaggedOutput,
    TaggedSegment,
    parse_tagged_output,
)
from .srl import (
    ArgSpan,
    PredicateFrame,
    RoleLabel,
    Specificity,
    SrlSentence,
    STAR,
    Token,
)

log = logging.getLogger(__name__)

ENV_GEN_URL = "TAILOR_GEN_URL"
ENV_SRL_URL = "TAILOR_SRL_URL"
ENV_SCORE_URL = "TAILOR_SCORE_URL"


@dataclass(frozen=True)
class GenerateRequest:
    prompt: str
    n_beams: int = 10
    no_repeat_bigrams: bool = True
    banned_phrases: tuple[str, ...] = ()
    max_candidates: int = 1

    def __post_init__(self):
        if self.n_beams < 1:
            raise ContractError("n_beams must be >= 1")
        if self.max_candidates < 0:
            raise ContractError("max_candidates must be >= 0")


@dataclass(frozen=True)
class ScoreResponse:
    loss: float
    perplexity: float

    def __post_init__(self):
        if self.loss <= 0 or self.perplexity <= 0:
            raise ContractError("losses and perplexities are positive")
        if not math.isclose(self.perplexity, math.exp(self.loss), rel_tol=1e-6):
            raise ContractError("perplexity must equal exp(loss)")

    @classmethod
    def from_loss(cls, loss: float) -> "ScoreResponse":
        return cls(loss=loss, perplexity=math.exp(loss))


@dataclass(frozen=True)
class ClientConfig:
    gen_url: str | None = None
    srl_url: str | None = None
    score_url: str | None = None
    timeout: float = 30.0
    retries: int = 2

    def __post_init__(self):
        if self.timeout <= 0:
            raise ContractError("timeout must be positive")
        if self.retries < 0:
            raise ContractError("retries must be >= 0")


_CONFIG_KEYS = ("gen_url", "srl_url", "score_url", "timeout", "retries")
_ENV_KEYS = {"gen_url": ENV_GEN_URL, "srl_url": ENV_SRL_URL, "score_url": ENV_SCORE_URL}


def resolve_config(
    flags: dict | None = None,
    config_file: dict | None = None,
    env: dict | None = None,
) -> ClientConfig:
    """Merge client settings. Later sources win: defaults, then CLI flags,
    then the config file, then environment variables."""
    values: dict = {}
    for layer in (flags or {}, config_file or {}):
        for key in _CONFIG_KEYS:
            if layer.get(key) is not None:
                values[key] = layer[key]
    env = os.environ if env is None else env
    for key, var in _ENV_KEYS.items():
        if env.get(var):
            values[key] = env[var]
    if "timeout" in values:
        values["timeout"] = float(values["timeout"])
    if "retries" in values:
        values["retries"] = int(values["retries"])
    return ClientConfig(**values)


class _HttpClient:
    def __init__(self, base_url: str, config: ClientConfig):
        if not base_url:
            raise ContractError("no backend URL configured")
        self._base = base_url.rstrip("/")
        self._config = config
        self._session = requests.Session()

    def _post(self, path: str, payload: dict) -> dict:
        url = f"{self._base}{path}"
        last_error: Exception | None = None
        for attempt in range(self._config.retries + 1):
            try:
                resp = self._session.post(url, json=payload, timeout=self._config.timeout)
                resp.raise_for_status()
                body = resp.json()
                if not isinstance(body, dict):
                    raise SchemaError(f"{url} returned non-object JSON")
                return body
            except (requests.RequestException, ValueError) as exc:
                last_error = exc
                if attempt < self._config.retries:
                    log.warning("retrying %s after %s (attempt %d)", url, exc, attempt + 1)
        raise TransportError(f"{url} failed after {self._config.retries + 1} attempts: {last_error}")

    def close(self) -> None:
        self._session.close()


class GeneratorClient(_HttpClient):
    def generate(self, request: GenerateRequest) -> list[str]:
        if request.max_candidates == 0:
            return []
        body = self._post("/generate", {
            "prompt": request.prompt,
            "n_beams": request.n_beams,
            "no_repeat_bigrams": request.no_repeat_bigrams,
            "banned_phrases": list(request.banned_phrases),
            "max_candidates": request.max_candidates,
        })
        if body.get("constraint_unsupported"):
            log.warning("backend ignored constrained-decoding options")
        candidates = body.get("candidates")
        if not isinstance(candidates, list) or not all(isinstance(c, str) for c in candidates):
            raise SchemaError("generate response lacks a 'candidates' string list")
        return candidates[: request.max_candidates]


class SrlClient(_HttpClient):
    def predict(self, text: str) -> SrlSentence:
        if not text.strip():
            raise SchemaError("cannot run role labeling on empty text")
        body = self._post("/srl", {"text": text})
        from .srl import parse_record

        return parse_record(body, line=0, sent_id=None)


class ScoreClient(_HttpClient):
    def score_many(self, texts: list[str]) -> list[ScoreResponse]:
        body = self._post("/score", {"texts": list(texts)})
        scores = body.get("scores")
        if not isinstance(scores, list) or len(scores) != len(texts):
            raise SchemaError("score response must carry one entry per text")
        out = []
        for entry in scores:
            if not isinstance(entry, dict) or "loss" not in entry:
                raise SchemaError("score entries need a 'loss' field")
            loss = float(entry["loss"])
            if "perplexity" in entry:
                resp = ScoreResponse(loss=loss, perplexity=float(entry["perplexity"]))
            else:
                resp = ScoreResponse.from_loss(loss)
            out.append(resp)
        return out

    def score(self, text: str) -> ScoreResponse:
        return self.score_many([text])[0]


# --- deterministic in-process mocks -------------------------------------------

# fixed filler vocabulary: realizing a partial keyword appends two tokens,
# a sparse keyword six, so re-classifying the realized span against the
# keyword reproduces the coded specificity
PARTIAL_FILLER = "as expected"
SPARSE_FILLER = "in a way nobody could foresee"

STAR_PHRASES = {
    "AGENT": "someone",
    "PATIENT": "something",
    "TEMPORAL": "at some point",
    "LOCATIVE": "somewhere nearby",
    "MANNER": "in some way",
    "CAUSE": "for some reason",
    "EXTENT": "to some extent",
    "PURPOSE": "for some purpose",
    "DISCOURSE": "of course",
    "GOAL": "toward some goal",
    "ADVERBIAL": "in any case",
    "MODAL": "might",
    "NEGATION": "not",
}
_STAR_FALLBACK = "something else"


def _realize_code(code: ArgCode) -> str:
    if code.content == STAR:
        return STAR_PHRASES.get(code.role.name, _STAR_FALLBACK)
    if code.spec is Specificity.COMPLETE:
        return code.content
    if code.spec is Specificity.PARTIAL:
        return f"{code.content} {PARTIAL_FILLER}"
    return f"{code.content} {SPARSE_FILLER}"


def mock_generate(prompt: PromptSpec) -> str:
    """Realize a prompt by rule, in the tagged-output format.

    Every assigned blank is filled from its control code: keyword content
    (plus fixed filler for partial/sparse, or a fixed placeholder for
    '*'), the verb by conjugating (lemma, voice, tense). Auxiliary-run
    blanks and unassigned extra blanks realize empty. A passive verb
    swaps the slots of the first AGENT and PATIENT codes so the patient
    span surfaces first; no agent marker is injected — recipes that need
    a "by"-phrase encode it in the keyword content.
    """
    slot_code = dict(prompt.assignments)
    verb = prompt.header.verb
    if verb.voice == "passive":
        agent_slot = patient_slot = None
        for slot, idx in sorted(prompt.assignments):
            code = prompt.header.codes[idx] if idx >= 0 else None
            if isinstance(code, ArgCode):
                if code.role.name == "AGENT" and agent_slot is None:
                    agent_slot = slot
                elif code.role.name == "PATIENT" and patient_slot is None:
                    patient_slot = slot
        if agent_slot is not None and patient_slot is not None and agent_slot < patient_slot:
            slot_code[agent_slot], slot_code[patient_slot] = (
                slot_code[patient_slot], slot_code[agent_slot])

    segments: list[Segment] = []
    slot = 0
    for item in prompt.context.items:
        if isinstance(item, Blank):
            idx = slot_code.get(slot)
            slot += 1
            if idx is None or idx == AUX_RUN:
                continue
            if idx == 0:
                segments.append(TaggedSegment("VERB", conjugate(verb.lemma, verb.voice, verb.tense)))
            else:
                code = prompt.header.codes[idx]
                segments.append(TaggedSegment(code.role.name, _realize_code(code)))
        else:
            segments.append(LiteralSegment(item.text))
    return TaggedOutput(tuple(_merge_literals(segments))).render()


def _merge_literals(segments: list[Segment]) -> list[Segment]:
    out: list[Segment] = []
    for seg in segments:
        if isinstance(seg, LiteralSegment) and out and isinstance(out[-1], LiteralSegment):
            out[-1] = LiteralSegment(f"{out[-1].text} {seg.text}")
        else:
            out.append(seg)
    return out


def mock_predict_srl(text: str) -> SrlSentence:
    """Recover an SrlSentence from tagged text: each tagged span becomes
    an argument, the VERB spans become the predicate unit (features
    inferred from its surface form). Plain text yields a frameless
    sentence."""
    if not text.strip():
        raise SchemaError("cannot run role labeling on empty text")
    tagged = parse_tagged_output(text)
    tokens: list[Token] = []
    spans: list[tuple[str, int, int]] = []
    verb_unit: list[int] = []
    for seg in tagged.segments:
        words = seg.text.split(" ") if seg.text else []
        start = len(tokens)
        for w in words:
            tokens.append(Token(text=w, index=len(tokens)))
        if isinstance(seg, TaggedSegment):
            if seg.role == "VERB":
                verb_unit.extend(range(start, len(tokens)))
            else:
                spans.append((seg.role, start, len(tokens)))
    frames = ()
    if verb_unit:
        voice, tense, lemma = infer_verb_features([tokens[i].text for i in verb_unit])
        verb_index = verb_unit[-1]
        args = tuple(
            ArgSpan(role=RoleLabel(name), start=s, end=e, raw_tag=name)
            for name, s, e in spans
        )
        frames = (PredicateFrame(
            verb_index=verb_index,
            lemma=lemma,
            voice=voice,
            tense=tense,
            args=args,
            aux_indices=tuple(verb_unit[:-1]),
        ),)
    return SrlSentence(tokens=tuple(tokens), frames=frames)


def mock_score(text: str) -> ScoreResponse:
    """Deterministic stand-in scorer: loss in [1, 3) keyed on the text."""
    digest = zlib.crc32(text.encode("utf-8"))
    return ScoreResponse.from_loss(1.0 + (digest % 1000) / 500.0)
