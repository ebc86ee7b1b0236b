"""Shared fixtures and independent oracles for the test suite.

Fixture sentences are plain corpus records (dicts) so tests exercise the
same ingestion path as real data. The random builders draw from small
closed vocabularies whose verbs all round-trip through the morphology
helpers, which keeps generation-and-recovery checks meaningful. The
edit-distance and closeness oracles reimplement the documented contracts
from scratch so metric tests do not lean on the code under test.
"""
import json
from functools import lru_cache
from random import Random

from promptstitch import (
    STAR,
    RoleLabel,
    Specificity,
    compile_prompt,
    conjugate,
    extract_keyword_candidates,
    parse_corpus,
)
from promptstitch.ops import END, Clause, OpKind, OpProgram, PerturbOp


def tok(text, pos, lemma=None):
    d = {"text": text, "pos": pos}
    if lemma:
        d["lemma"] = lemma
    return d


def sent(rec):
    """Parse one record dict through the normal corpus reader."""
    return parse_corpus(json.dumps(rec))[0]


def corpus_lines(records):
    return "".join(json.dumps(r) + "\n" for r in records)


# --- canonical fixture records --------------------------------------------------

# the running example: an adjunct, both cores, a simple past verb
OPERATION_REC = {
    "id": "canonical",
    "tokens": [
        tok("In", "IN"), tok("the", "DT"), tok("operation", "NN"),
        tok("room", "NN"), tok(",", ","), tok("the", "DT"), tok("doctor", "NN"),
        tok("comforted", "VBD", "comfort"), tok("the", "DT"),
        tok("athlete", "NN"), tok(".", "."),
    ],
    "chunks": [[1, 4], [5, 7], [8, 10]],
    "frames": [
        {"verb_index": 7, "args": [
            {"tag": "ARGM-LOC", "start": 0, "end": 4},
            {"tag": "ARG0", "start": 5, "end": 7},
            {"tag": "ARG1", "start": 8, "end": 10},
        ]},
    ],
}

# same shape, "operating" spelling: the masked-pair golden fixtures use it
OPERATING_REC = {
    "id": "canonical",
    "tokens": [
        tok("In", "IN"), tok("the", "DT"), tok("operating", "NN"),
        tok("room", "NN"), tok(",", ","), tok("the", "DT"), tok("doctor", "NN"),
        tok("comforted", "VBD", "comfort"), tok("the", "DT"),
        tok("athlete", "NN"), tok(".", "."),
    ],
    "chunks": [[1, 4], [5, 7], [8, 10]],
    "frames": [
        {"verb_index": 7, "args": [
            {"tag": "ARGM-LOC", "start": 0, "end": 4},
            {"tag": "ARG0", "start": 5, "end": 7},
            {"tag": "ARG1", "start": 8, "end": 10},
        ]},
    ],
}

# relative clause on the agent plus an embedded passive frame
NLI_A_REC = {
    "id": "nli-a",
    "tokens": [
        tok("The", "DT"), tok("athlete", "NN"), tok("who", "WP"),
        tok("was", "VBD"), tok("seen", "VBN", "see"), tok("by", "IN"),
        tok("the", "DT"), tok("judges", "NNS"), tok("yesterday", "RB"),
        tok("called", "VBD", "call"), tok("the", "DT"), tok("manager", "NN"),
        tok(".", "."),
    ],
    "chunks": [[0, 2], [6, 8], [10, 12]],
    "frames": [
        {"verb_index": 9, "args": [
            {"tag": "ARG0", "start": 0, "end": 9},
            {"tag": "ARG1", "start": 10, "end": 12},
        ]},
        {"verb_index": 4, "args": [
            {"tag": "ARG1", "start": 0, "end": 2},
            {"tag": "R-ARG1", "start": 2, "end": 3},
            {"tag": "ARG0", "start": 5, "end": 8},
            {"tag": "ARGM-TMP", "start": 8, "end": 9},
        ]},
    ],
}

# prepositional modifier inside the agent, no relative clause
NLI_B_REC = {
    "id": "nli-b",
    "tokens": [
        tok("The", "DT"), tok("judge", "NN"), tok("behind", "IN"),
        tok("the", "DT"), tok("manager", "NN"), tok("saw", "VBD", "see"),
        tok("the", "DT"), tok("doctors", "NNS"), tok(".", "."),
    ],
    "chunks": [[0, 2], [3, 5], [6, 8]],
    "frames": [
        {"verb_index": 5, "args": [
            {"tag": "ARG0", "start": 0, "end": 5},
            {"tag": "ARG1", "start": 6, "end": 8},
        ]},
    ],
}

# a single passive frame whose agent arrives as a by-phrase
NLI_C_REC = {
    "id": "nli-c",
    "tokens": [
        tok("The", "DT"), tok("athlete", "NN"), tok("who", "WP"),
        tok("was", "VBD"), tok("seen", "VBN", "see"), tok("by", "IN"),
        tok("the", "DT"), tok("judges", "NNS"), tok("called", "VBD", "call"),
        tok("the", "DT"), tok("manager", "NN"), tok(".", "."),
    ],
    "chunks": [[0, 2], [6, 8], [9, 11]],
    "frames": [
        {"verb_index": 4, "args": [
            {"tag": "ARG1", "start": 0, "end": 2},
            {"tag": "R-ARG1", "start": 2, "end": 3},
            {"tag": "ARG0", "start": 5, "end": 8},
        ]},
    ],
}

# no argument spans at all
NLI_D_REC = {
    "id": "nli-d",
    "tokens": [tok("It", "PRP"), tok("rained", "VBD", "rain"), tok(".", ".")],
    "chunks": [],
    "frames": [{"verb_index": 1, "args": []}],
}

# attachment ambiguity: "with your breakfast" labeled as a verb modifier
PP1_REC = {
    "id": "pp-1",
    "tokens": [
        tok("Do", "VBP"), tok("you", "PRP"), tok("prefer", "VBP", "prefer"),
        tok("ham", "NN"), tok(",", ","), tok("bacon", "NN"), tok("or", "CC"),
        tok("sausages", "NNS"), tok("with", "IN"), tok("your", "PRP$"),
        tok("breakfast", "NN"), tok("?", "."),
    ],
    "chunks": [[1, 2], [3, 8], [9, 11]],
    "frames": [
        {"verb_index": 2, "args": [
            {"tag": "ARG0", "start": 1, "end": 2},
            {"tag": "ARG1", "start": 3, "end": 8},
            {"tag": "ARGM-ADV", "start": 8, "end": 11},
        ]},
    ],
}

# attachment ambiguity the other way: "at all prices" inside the patient
PP2_REC = {
    "id": "pp-2",
    "tokens": [
        tok("It", "PRP"), tok("has", "VBZ", "have"), tok("local", "JJ"),
        tok("boutiques", "NNS"), tok("and", "CC"), tok("a", "DT"),
        tok("diverse", "JJ"), tok("range", "NN"), tok("of", "IN"),
        tok("food", "NN"), tok("at", "IN"), tok("all", "DT"),
        tok("prices", "NNS"), tok("and", "CC"), tok("styles", "NNS"),
        tok(".", "."),
    ],
    "chunks": [[0, 1], [2, 4], [5, 10], [11, 15]],
    "frames": [
        {"verb_index": 1, "args": [
            {"tag": "ARG0", "start": 0, "end": 1},
            {"tag": "ARG1", "start": 2, "end": 15},
        ]},
    ],
}

BOOLQ_REC = {
    "id": "boolq",
    "tokens": [
        tok("does", "VBZ"), tok("Deadpool", "NNP"), tok("have", "VB", "have"),
        tok("a", "DT"), tok("kid", "NN"), tok("in", "IN"), tok("the", "DT"),
        tok("comics", "NNS"), tok("?", "."),
    ],
    "chunks": [[1, 2], [3, 5], [6, 8]],
    "frames": [
        {"verb_index": 2, "args": [
            {"tag": "ARG0", "start": 1, "end": 2},
            {"tag": "ARG1", "start": 3, "end": 8},
        ]},
    ],
}

WATCH_REC = {
    "id": "watch",
    "tokens": [
        tok("She", "PRP"), tok("would", "MD"), tok("be", "VB"),
        tok("watching", "VBG", "watch"), tok("the", "DT"), tok("game", "NN"),
        tok(".", "."),
    ],
    "chunks": [[0, 1], [4, 6]],
    "frames": [
        {"verb_index": 3, "args": [
            {"tag": "ARG0", "start": 0, "end": 1},
            {"tag": "ARG1", "start": 4, "end": 6},
        ]},
    ],
}

ORDER_REC = {
    "id": "order",
    "tokens": [
        tok("She", "PRP"), tok("called", "VBD", "call"), tok("him", "PRP"),
        tok("yesterday", "RB"), tok(".", "."),
    ],
    "chunks": [[0, 1], [2, 3]],
    "frames": [
        {"verb_index": 1, "args": [
            {"tag": "ARG0", "start": 0, "end": 1},
            {"tag": "ARG1", "start": 2, "end": 3},
            {"tag": "ARGM-TMP", "start": 3, "end": 4},
        ]},
    ],
}

QA_REC = {
    "id": "qa",
    "tokens": [
        tok("How", "WRB"), tok("did", "VBD"), tok("the", "DT"),
        tok("Huguenots", "NNPS"), tok("defend", "VB", "defend"),
        tok("themselves", "PRP"), tok("?", "."),
    ],
    "chunks": [[2, 4], [5, 6]],
    "frames": [
        {"verb_index": 4, "args": [
            {"tag": "ARGM-MNR", "start": 0, "end": 1},
            {"tag": "ARG0", "start": 2, "end": 4},
            {"tag": "ARG1", "start": 5, "end": 6},
        ]},
    ],
}


# --- generated corpora -----------------------------------------------------------

# every verb here survives conjugate -> infer round-trips in both voices
_VERBS = [
    ("call", "called", "called"), ("comfort", "comforted", "comforted"),
    ("follow", "followed", "followed"), ("visit", "visited", "visited"),
    ("help", "helped", "helped"), ("watch", "watched", "watched"),
    ("join", "joined", "joined"), ("support", "supported", "supported"),
    ("answer", "answered", "answered"), ("invite", "invited", "invited"),
    ("thank", "thanked", "thanked"), ("greet", "greeted", "greeted"),
    ("warn", "warned", "warned"), ("trust", "trusted", "trusted"),
    ("see", "saw", "seen"), ("find", "found", "found"),
]
_NOUNS = [
    "doctor", "athlete", "manager", "teacher", "farmer", "judge",
    "nurse", "pilot", "singer", "writer", "lawyer", "student",
    "dancer", "painter", "driver", "waiter",
]
# (raw tag, tokens); every tag maps to a distinct canonical adjunct role
_ADJUNCTS = [
    ("ARGM-TMP", [("yesterday", "RB")]),
    ("ARGM-TMP", [("last", "JJ"), ("week", "NN")]),
    ("ARGM-LOC", [("in", "IN"), ("the", "DT"), ("park", "NN")]),
    ("ARGM-LOC", [("at", "IN"), ("the", "DT"), ("station", "NN")]),
    ("ARGM-MNR", [("with", "IN"), ("great", "JJ"), ("care", "NN")]),
    ("ARGM-CAU", [("because", "IN"), ("of", "IN"), ("the", "DT"), ("rain", "NN")]),
    ("ARGM-PRP", [("to", "TO"), ("win", "VB"), ("the", "DT"), ("game", "NN")]),
    ("ARGM-ADV", [("of", "IN"), ("course", "NN")]),
]

# wider spans for the dataset fixture: more keyword candidates per span,
# so sampled headers rarely come out all-wildcard
_CORE_ADJS = ["tired", "young", "senior", "famous", "local", "patient", "retired", "busy"]
_LONG_ADJUNCTS = [
    ("ARGM-TMP", [("late", "RB"), ("last", "JJ"), ("week", "NN")]),
    ("ARGM-TMP", [("in", "IN"), ("the", "DT"), ("morning", "NN")]),
    ("ARGM-LOC", [("in", "IN"), ("the", "DT"), ("old", "JJ"), ("park", "NN")]),
    ("ARGM-LOC", [("at", "IN"), ("the", "DT"), ("main", "JJ"), ("station", "NN")]),
    ("ARGM-MNR", [("with", "IN"), ("great", "JJ"), ("care", "NN")]),
    ("ARGM-MNR", [("without", "IN"), ("any", "DT"), ("doubt", "NN")]),
    ("ARGM-CAU", [("because", "IN"), ("of", "IN"), ("the", "DT"), ("rain", "NN")]),
    ("ARGM-CAU", [("due", "JJ"), ("to", "TO"), ("the", "DT"), ("strike", "NN")]),
    ("ARGM-PRP", [("to", "TO"), ("win", "VB"), ("the", "DT"), ("game", "NN")]),
    ("ARGM-PRP", [("to", "TO"), ("catch", "VB"), ("the", "DT"), ("train", "NN")]),
    ("ARGM-ADV", [("in", "IN"), ("any", "DT"), ("case", "NN")]),
    ("ARGM-ADV", [("at", "IN"), ("long", "JJ"), ("last", "NN")]),
]


def _simple_active_record(sent_id, agent, lemma, past, patient, adjunct):
    tag, words = adjunct
    tokens = [
        tok("The", "DT"), tok(agent, "NN"),
        tok(past, "VBD", lemma),
        tok("the", "DT"), tok(patient, "NN"),
    ]
    a_start = len(tokens)
    tokens += [tok(t, p) for t, p in words]
    a_end = len(tokens)
    tokens.append(tok(".", "."))
    return {
        "id": sent_id,
        "tokens": tokens,
        "chunks": [[0, 2], [3, 5]],
        "frames": [{"verb_index": 2, "args": [
            {"tag": "ARG0", "start": 0, "end": 2},
            {"tag": "ARG1", "start": 3, "end": 5},
            {"tag": tag, "start": a_start, "end": a_end},
        ]}],
    }


def _wide_active_record(sent_id, agent_adj, agent, lemma, past, patient_adj, patient, adjunct):
    tag, words = adjunct
    tokens = [
        tok("The", "DT"), tok(agent_adj, "JJ"), tok(agent, "NN"),
        tok(past, "VBD", lemma),
        tok("the", "DT"), tok(patient_adj, "JJ"), tok(patient, "NN"),
    ]
    a_start = len(tokens)
    tokens += [tok(t, p) for t, p in words]
    a_end = len(tokens)
    tokens.append(tok(".", "."))
    return {
        "id": sent_id,
        "tokens": tokens,
        "chunks": [[0, 3], [4, 7]],
        "frames": [{"verb_index": 3, "args": [
            {"tag": "ARG0", "start": 0, "end": 3},
            {"tag": "ARG1", "start": 4, "end": 7},
            {"tag": tag, "start": a_start, "end": a_end},
        ]}],
    }


def hundred_frame_records():
    """One hundred one-frame records cycling small adjective, noun, verb,
    and adjunct pools. Spans are three or four tokens wide so every span
    offers several keyword candidates, and the pools repeat across
    sentences so the shared keyword table holds alternatives for every
    (role, specificity) bucket a sampled header can draw."""
    records = []
    for i in range(100):
        agent = _NOUNS[i % len(_NOUNS)]
        patient = _NOUNS[(i * 5 + 3) % len(_NOUNS)]
        if patient == agent:
            patient = _NOUNS[(i * 5 + 4) % len(_NOUNS)]
        agent_adj = _CORE_ADJS[i % len(_CORE_ADJS)]
        patient_adj = _CORE_ADJS[(i * 3 + 1) % len(_CORE_ADJS)]
        lemma, past, _ = _VERBS[(i * 7 + 1) % len(_VERBS)]
        adjunct = _LONG_ADJUNCTS[i % len(_LONG_ADJUNCTS)]
        records.append(_wide_active_record(
            f"s{i:03d}", agent_adj, agent, lemma, past, patient_adj, patient, adjunct))
    return records


def hundred_frame_corpus():
    return [sent(r) for r in hundred_frame_records()]


def random_sentence(rng: Random):
    """A one-frame sentence in a random voice and tense with up to two
    adjuncts, every piece drawn from the closed vocabularies above."""
    lemma, past, participle = _VERBS[rng.randrange(len(_VERBS))]
    agent = _NOUNS[rng.randrange(len(_NOUNS))]
    patient = _NOUNS[rng.randrange(len(_NOUNS))]
    while patient == agent:
        patient = _NOUNS[rng.randrange(len(_NOUNS))]
    voice = "passive" if rng.random() < 0.4 else "active"
    tense = ("past", "present", "future")[rng.randrange(3)]

    tokens, args = [], []
    if voice == "active":
        tokens += [tok("The", "DT"), tok(agent, "NN")]
        args.append(("ARG0", 0, 2))
        if tense == "past":
            tokens.append(tok(past, "VBD", lemma))
        elif tense == "present":
            tokens.append(tok(conjugate(lemma, "active", "present"), "VBZ", lemma))
        else:
            tokens += [tok("will", "MD"), tok(lemma, "VB", lemma)]
        verb_index = len(tokens) - 1
        p_start = len(tokens)
        tokens += [tok("the", "DT"), tok(patient, "NN")]
        args.append(("ARG1", p_start, p_start + 2))
    else:
        tokens += [tok("The", "DT"), tok(patient, "NN")]
        args.append(("ARG1", 0, 2))
        if tense == "past":
            tokens.append(tok("was", "VBD"))
        elif tense == "present":
            tokens.append(tok("is", "VBZ"))
        else:
            tokens += [tok("will", "MD"), tok("be", "VB")]
        tokens.append(tok(participle, "VBN", lemma))
        verb_index = len(tokens) - 1
        a_start = len(tokens)
        tokens += [tok("by", "IN"), tok("the", "DT"), tok(agent, "NN")]
        args.append(("ARG0", a_start, a_start + 3))

    chunks = [[0, 2], [len(tokens) - 2, len(tokens)]]
    for tag, words in rng.sample(_ADJUNCTS, rng.randrange(3)):
        if any(a[0] == tag for a in args):
            continue
        start = len(tokens)
        tokens += [tok(t, p) for t, p in words]
        args.append((tag, start, len(tokens)))
    tokens.append(tok(".", "."))

    return sent({
        "id": f"r{rng.randrange(1 << 30):08x}",
        "tokens": tokens,
        "chunks": chunks,
        "frames": [{"verb_index": verb_index, "args": [
            {"tag": t, "start": s, "end": e} for t, s, e in args
        ]}],
    })


def random_prompt(rng: Random, sentence=None):
    """Compile a random prompt: random mask, keyword draws (wildcards
    included), extra blanks, and placement seed."""
    if sentence is None:
        sentence = random_sentence(rng)
    frame = sentence.frames[0]
    spans = frame.sorted_args()
    pick = rng.random()
    if pick < 0.4 or not spans:
        mask = "all"
        masked = list(spans)
    elif pick < 0.5:
        mask = []
        masked = []
    else:
        masked = [s for s in spans if rng.random() < 0.6] or [spans[rng.randrange(len(spans))]]
        mask = [s.role for s in masked]

    keyword_choice = None
    if masked and rng.random() < 0.7:
        keyword_choice = {}
        for span in masked:
            cands = extract_keyword_candidates(span, sentence, seed=rng.randrange(1 << 30))
            content, spec = cands[rng.randrange(len(cands))]
            if content == STAR:
                keyword_choice[span.role] = STAR
            elif rng.random() < 0.5:
                keyword_choice[span.role] = (content, spec)
            else:
                keyword_choice[span.role] = content

    prompt = compile_prompt(
        sentence, 0,
        mask=mask,
        n_extra_blanks=rng.randrange(3),
        keyword_choice=keyword_choice,
        seed=rng.randrange(1 << 30),
    )
    return sentence, prompt


_CONTENT_WORDS = ["the", "storm", "harbor", "quiet", "signal", "bright", "meadow", "engine"]
_PROGRAM_ROLES = [RoleLabel(n) for n in
                  ("AGENT", "PATIENT", "TEMPORAL", "LOCATIVE", "MANNER", "CAUSE")]


def _random_content(rng: Random) -> str:
    words = [_CONTENT_WORDS[rng.randrange(len(_CONTENT_WORDS))]
             for _ in range(1 + rng.randrange(3))]
    if len(words) > 2 and rng.random() < 0.3:
        words.insert(1, ",")  # commas nest fine inside parentheses
    return " ".join(words)


def random_program(rng: Random) -> OpProgram:
    """A random well-formed perturbation program in canonical form."""
    clauses = []
    deleted = set()
    for _ in range(1 + rng.randrange(3)):
        if rng.random() < 0.65:
            role = _PROGRAM_ROLES[rng.randrange(len(_PROGRAM_ROLES))]
            ops = []
            for _ in range(1 + rng.randrange(2)):
                kind = rng.randrange(4)
                if kind == 0:
                    ops.append(PerturbOp(OpKind.CHANGE_CONTENT, text=_random_content(rng)))
                elif kind == 1:
                    spec = list(Specificity)[rng.randrange(3)]
                    ops.append(PerturbOp(OpKind.CHANGE_SPEC, spec=spec))
                elif kind == 2:
                    to = END if rng.random() < 0.5 else rng.randrange(5)
                    ops.append(PerturbOp(OpKind.MOVE, to_slot=to))
                elif role.name not in deleted:
                    ops.append(PerturbOp(OpKind.DELETE))
                    deleted.add(role.name)
                else:
                    ops.append(PerturbOp(OpKind.CHANGE_SPEC, spec=Specificity.SPARSE))
            clauses.append(Clause(role, tuple(ops)))
        else:
            kind = rng.randrange(6)
            if kind == 0:
                op = PerturbOp(OpKind.CHANGE_VTENSE,
                               tense=("past", "present", "future")[rng.randrange(3)])
            elif kind == 1:
                op = PerturbOp(OpKind.CHANGE_VVOICE,
                               voice=("active", "passive")[rng.randrange(2)])
            elif kind == 2:
                op = PerturbOp(OpKind.CHANGE_VLEMMA,
                               text=_VERBS[rng.randrange(len(_VERBS))][0])
            elif kind == 3:
                op = PerturbOp(OpKind.SWAP_CORE)
            elif kind == 4:
                op = PerturbOp(OpKind.CHANGE_IDX,
                               from_slot=rng.randrange(6), to_slot=rng.randrange(6))
            else:
                lo = rng.randrange(8)
                op = PerturbOp(OpKind.CONTEXT_DELETE_TEXT,
                               span=(lo, lo + 1 + rng.randrange(3)))
            clauses.append(Clause(None, (op,)))
    return OpProgram(tuple(clauses))


# --- independent oracles ----------------------------------------------------------

def oracle_changed_indices(original, edited):
    """Original-token indices a minimal edit script touches, recomputed
    from the documented contract: unit costs, ties broken match, then
    substitution, then deletion, then insertion, walking from the ends."""
    a, b = list(original), list(edited)

    @lru_cache(maxsize=None)
    def cost(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(
            cost(i - 1, j - 1) + (0 if a[i - 1] == b[j - 1] else 1),
            cost(i - 1, j) + 1,
            cost(i, j - 1) + 1,
        )

    changed = set()
    i, j = len(a), len(b)
    while i > 0 or j > 0:
        if i > 0 and j > 0 and a[i - 1] == b[j - 1] and cost(i, j) == cost(i - 1, j - 1):
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and cost(i, j) == cost(i - 1, j - 1) + 1:
            changed.add(i - 1)
            i, j = i - 1, j - 1
        elif i > 0 and cost(i, j) == cost(i - 1, j) + 1:
            changed.add(i - 1)
            i -= 1
        else:
            j -= 1
    return frozenset(changed)


def oracle_closeness(sentence, edited, expected):
    """Span-weighted precision/recall/F1 recomputed from the documented
    contract: the universe is the expected set plus every frame argument
    span, a span counts as changed when at least half its tokens were
    substituted or deleted, weights are token counts, and an empty side
    scores 1.0."""
    expected_set = {(int(s), int(e)) for s, e in expected}
    universe = set(expected_set)
    for frame in sentence.frames:
        for arg in frame.args:
            universe.add((arg.start, arg.end))

    changed = oracle_changed_indices([t.text for t in sentence.tokens], edited.split())

    def span_hit(span):
        start, end = span
        hits = sum(1 for k in changed if start <= k < end)
        return hits / (end - start) >= 0.5

    w_changed = w_expected = w_both = 0
    for span in universe:
        weight = span[1] - span[0]
        hit = span_hit(span)
        exp = span in expected_set
        w_changed += weight * hit
        w_expected += weight * exp
        w_both += weight * (hit and exp)
    precision = 1.0 if w_changed == 0 else w_both / w_changed
    recall = 1.0 if w_expected == 0 else w_both / w_expected
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def mangle_tokens(tokens, rng: Random):
    """A noisy copy of a token list: random substitutions, deletions,
    insertions, and occasionally an untouched or fully rewritten copy."""
    roll = rng.random()
    if roll < 0.1:
        return list(tokens)
    if roll < 0.2:
        return [_CONTENT_WORDS[rng.randrange(len(_CONTENT_WORDS))]
                for _ in range(1 + rng.randrange(8))]
    out = []
    for t in tokens:
        r = rng.random()
        if r < 0.15:
            continue  # delete
        if r < 0.35:
            out.append(_CONTENT_WORDS[rng.randrange(len(_CONTENT_WORDS))])  # substitute
        else:
            out.append(t)
        if rng.random() < 0.1:
            out.append(_CONTENT_WORDS[rng.randrange(len(_CONTENT_WORDS))])  # insert
    if not out:
        out.append(tokens[0] if tokens else "empty")
    return out
