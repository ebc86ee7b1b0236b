"""Rule-based verb conjugation and its inverse.

The mock generator realizes verb codes with these rules, and the
controllability checks invert them, so the two halves are written (and
tested) as exact inverses. This is a template engine, not a linguist:
regular -ed/-s rules plus a table of common irregulars.
"""
from __future__ import annotations

from .errors import ContractError

VOICES = ("active", "passive")
TENSES = ("past", "present", "future")

# lemma -> (past, past participle, third person singular present)
IRREGULAR = {
    "be": ("was", "been", "is"),
    "become": ("became", "become", "becomes"),
    "begin": ("began", "begun", "begins"),
    "break": ("broke", "broken", "breaks"),
    "bring": ("brought", "brought", "brings"),
    "build": ("built", "built", "builds"),
    "buy": ("bought", "bought", "buys"),
    "catch": ("caught", "caught", "catches"),
    "choose": ("chose", "chosen", "chooses"),
    "come": ("came", "come", "comes"),
    "cut": ("cut", "cut", "cuts"),
    "do": ("did", "done", "does"),
    "draw": ("drew", "drawn", "draws"),
    "drive": ("drove", "driven", "drives"),
    "eat": ("ate", "eaten", "eats"),
    "fall": ("fell", "fallen", "falls"),
    "feel": ("felt", "felt", "feels"),
    "find": ("found", "found", "finds"),
    "give": ("gave", "given", "gives"),
    "go": ("went", "gone", "goes"),
    "grow": ("grew", "grown", "grows"),
    "have": ("had", "had", "has"),
    "hear": ("heard", "heard", "hears"),
    "hold": ("held", "held", "holds"),
    "keep": ("kept", "kept", "keeps"),
    "know": ("knew", "known", "knows"),
    "lead": ("led", "led", "leads"),
    "leave": ("left", "left", "leaves"),
    "let": ("let", "let", "lets"),
    "lose": ("lost", "lost", "loses"),
    "make": ("made", "made", "makes"),
    "mean": ("meant", "meant", "means"),
    "meet": ("met", "met", "meets"),
    "pay": ("paid", "paid", "pays"),
    "read": ("read", "read", "reads"),
    "rise": ("rose", "risen", "rises"),
    "run": ("ran", "run", "runs"),
    "say": ("said", "said", "says"),
    "see": ("saw", "seen", "sees"),
    "sell": ("sold", "sold", "sells"),
    "send": ("sent", "sent", "sends"),
    "set": ("set", "set", "sets"),
    "show": ("showed", "shown", "shows"),
    "sing": ("sang", "sung", "sings"),
    "sit": ("sat", "sat", "sits"),
    "speak": ("spoke", "spoken", "speaks"),
    "spend": ("spent", "spent", "spends"),
    "stand": ("stood", "stood", "stands"),
    "take": ("took", "taken", "takes"),
    "teach": ("taught", "taught", "teaches"),
    "tell": ("told", "told", "tells"),
    "think": ("thought", "thought", "thinks"),
    "throw": ("threw", "thrown", "throws"),
    "understand": ("understood", "understood", "understands"),
    "wear": ("wore", "worn", "wears"),
    "write": ("wrote", "written", "writes"),
}

_VOWELS = set("aeiou")

# e-final lemmas whose -ed/-s forms would otherwise invert to a bogus stem
# ("moved" -> "mov"). The inverse checks this set before the regular strips.
KNOWN_E_FINAL = frozenset({
    "move", "like", "love", "use", "live", "close", "note", "hope",
    "change", "receive", "serve", "save", "place", "raise", "share",
    "describe", "notice", "observe", "create", "prepare", "compare",
    "smile", "realize", "announce", "examine", "invite", "manage",
    "promise", "release", "store",
})


def _regular_past(lemma: str) -> str:
    if lemma.endswith("e"):
        return lemma + "d"
    if len(lemma) > 1 and lemma.endswith("y") and lemma[-2] not in _VOWELS:
        return lemma[:-1] + "ied"
    return lemma + "ed"


def _regular_3sg(lemma: str) -> str:
    if lemma.endswith(("s", "x", "z", "ch", "sh", "o")):
        return lemma + "es"
    if len(lemma) > 1 and lemma.endswith("y") and lemma[-2] not in _VOWELS:
        return lemma[:-1] + "ies"
    return lemma + "s"


def past_form(lemma: str) -> str:
    entry = IRREGULAR.get(lemma)
    return entry[0] if entry else _regular_past(lemma)


def participle(lemma: str) -> str:
    entry = IRREGULAR.get(lemma)
    return entry[1] if entry else _regular_past(lemma)


def third_person(lemma: str) -> str:
    entry = IRREGULAR.get(lemma)
    return entry[2] if entry else _regular_3sg(lemma)


def conjugate(lemma: str, voice: str, tense: str) -> str:
    """Realize (lemma, voice, tense) as a surface verb group.

    Active verbs are realized third-person singular in the present; the
    mock has no subject agreement information.
    """
    if voice not in VOICES:
        raise ContractError(f"unknown voice {voice!r}")
    if tense not in TENSES:
        raise ContractError(f"unknown tense {tense!r}")
    if not lemma:
        raise ContractError("empty lemma")
    lemma = lemma.lower()
    if voice == "active":
        if tense == "past":
            return past_form(lemma)
        if tense == "present":
            return third_person(lemma)
        return f"will {lemma}"
    if tense == "past":
        return f"was {participle(lemma)}"
    if tense == "present":
        return f"is {participle(lemma)}"
    return f"will be {participle(lemma)}"


_PAST_INVERSE = {v[0]: k for k, v in IRREGULAR.items()}
_PART_INVERSE = {v[1]: k for k, v in IRREGULAR.items()}
_3SG_INVERSE = {v[2]: k for k, v in IRREGULAR.items()}


def _strip_past(word: str) -> str | None:
    if word in _PAST_INVERSE:
        return _PAST_INVERSE[word]
    if word.endswith("ied"):
        return word[:-3] + "y"
    if word.endswith("ed"):
        stem = word[:-2]
        # "comforted" -> "comfort" but "moved" -> "move"
        if stem + "e" in KNOWN_E_FINAL and _regular_past(stem + "e") == word:
            return stem + "e"
        if _regular_past(stem) == word:
            return stem
        if _regular_past(stem + "e") == word:
            return stem + "e"
    return None


def _strip_participle(word: str) -> str | None:
    if word in _PART_INVERSE:
        return _PART_INVERSE[word]
    return _strip_past(word)


def _strip_3sg(word: str) -> str | None:
    if word in _3SG_INVERSE:
        return _3SG_INVERSE[word]
    if word.endswith("ies"):
        return word[:-3] + "y"
    if word.endswith("s") and word[:-1] in KNOWN_E_FINAL:
        return word[:-1]
    if word.endswith("es") and _regular_3sg(word[:-2]) == word:
        return word[:-2]
    if word.endswith("s") and not word.endswith("ss"):
        return word[:-1]
    return None


def infer_verb_features(tokens: list[str]) -> tuple[str, str, str]:
    """Invert :func:`conjugate`: verb-group tokens -> (voice, tense, lemma).

    Accepts the surface shapes the mock emits plus bare base forms. Unknown
    shapes fall back to (active, present, surface).
    """
    if not tokens:
        raise ContractError("empty verb group")
    words = [t.lower() for t in tokens]
    if words[0] in ("will", "shall"):
        rest = words[1:]
        if rest and rest[0] == "be" and len(rest) > 1:
            lemma = _strip_participle(rest[1]) or rest[1]
            return "passive", "future", lemma
        if rest:
            return "active", "future", rest[0]
        return "active", "future", "be"
    if words[0] in ("was", "were", "is", "are", "am", "been", "being") and len(words) > 1:
        tense = "past" if words[0] in ("was", "were") else "present"
        lemma = _strip_participle(words[-1]) or words[-1]
        return "passive", tense, lemma
    last = words[-1]
    lemma = _strip_past(last)
    if lemma is not None:
        has_present_aux = any(w in ("has", "have", "is", "are", "does", "do") for w in words[:-1])
        return "active", ("present" if has_present_aux else "past"), lemma
    lemma = _strip_3sg(last)
    if lemma is not None:
        return "active", "present", lemma
    return "active", "present", last
