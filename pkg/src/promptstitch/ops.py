"""A small language of prompt perturbation operations.

Programs are strings like::

    PATIENT:CHANGE_CONTENT(ham or sausages with),CHANGE_SPEC(partial);ADVERBIAL:DELETE

A program is clauses joined by ';'. A clause is an optional role scope
followed by ':' and one or more comma-separated operations. Verb and
global operations take no role scope ('VERB:' is tolerated and dropped).
Operations apply left to right; later operations see earlier effects.
"""
from __future__ import annotations

import string as _string
from dataclasses import dataclass, replace
from enum import Enum
from random import Random
from typing import Union

from .errors import ContractError, ProgramParseError, UnknownRoleError
from .prompts import (
    AUX_RUN,
    ArgCode,
    Blank,
    Context,
    Header,
    LiteralTok,
    PromptSpec,
    SourceInfo,
    TENSES,
    VOICES,
    VerbCode,
)
from .srl import RoleLabel, Specificity, SrlSentence, STAR


class OpKind(Enum):
    CHANGE_VTENSE = "CHANGE_VTENSE"
    CHANGE_VVOICE = "CHANGE_VVOICE"
    CHANGE_VLEMMA = "CHANGE_VLEMMA"
    SWAP_CORE = "SWAP_CORE"
    CHANGE_IDX = "CHANGE_IDX"
    MOVE = "MOVE"
    CHANGE_CONTENT = "CHANGE_CONTENT"
    CHANGE_SPEC = "CHANGE_SPEC"
    DELETE = "DELETE"
    CONTEXT_DELETE_TEXT = "CONTEXT_DELETE_TEXT"


VERB_OPS = frozenset({OpKind.CHANGE_VTENSE, OpKind.CHANGE_VVOICE, OpKind.CHANGE_VLEMMA})
GLOBAL_OPS = frozenset({OpKind.SWAP_CORE, OpKind.CHANGE_IDX, OpKind.CONTEXT_DELETE_TEXT})
ROLE_OPS = frozenset({OpKind.CHANGE_CONTENT, OpKind.CHANGE_SPEC, OpKind.DELETE, OpKind.MOVE})

END = "end"


@dataclass(frozen=True)
class PerturbOp:
    kind: OpKind
    text: str | None = None          # CHANGE_CONTENT / CHANGE_VLEMMA
    tense: str | None = None         # CHANGE_VTENSE
    voice: str | None = None         # CHANGE_VVOICE
    spec: Specificity | None = None  # CHANGE_SPEC
    from_slot: int | None = None     # CHANGE_IDX
    to_slot: Union[int, str, None] = None  # CHANGE_IDX / MOVE ('end' allowed)
    span: tuple[int, int] | None = None    # CONTEXT_DELETE_TEXT

    def render(self) -> str:
        k = self.kind
        if k is OpKind.CHANGE_VTENSE:
            return f"CHANGE_VTENSE({self.tense})"
        if k is OpKind.CHANGE_VVOICE:
            return f"CHANGE_VVOICE({self.voice})"
        if k is OpKind.CHANGE_VLEMMA:
            return f"CHANGE_VLEMMA({self.text})"
        if k is OpKind.SWAP_CORE:
            return "SWAP_CORE"
        if k is OpKind.CHANGE_IDX:
            return f"CHANGE_IDX({self.from_slot}:{self.to_slot})"
        if k is OpKind.MOVE:
            return "MOVE" if self.to_slot == END else f"MOVE({self.to_slot})"
        if k is OpKind.CHANGE_CONTENT:
            return f"CHANGE_CONTENT({self.text})"
        if k is OpKind.CHANGE_SPEC:
            return f"CHANGE_SPEC({self.spec})"
        if k is OpKind.DELETE:
            return "DELETE"
        return ("CONTEXT(DELETE_TEXT)" if self.span is None
                else f"CONTEXT_DELETE_TEXT({self.span[0]},{self.span[1]})")


@dataclass(frozen=True)
class Clause:
    role: RoleLabel | None
    ops: tuple[PerturbOp, ...]

    def __post_init__(self):
        if not self.ops:
            raise ContractError("empty clause")
        for op in self.ops:
            if op.kind in ROLE_OPS and self.role is None:
                raise ContractError(f"{op.kind.value} needs a role scope")
            if op.kind not in ROLE_OPS and self.role is not None:
                raise ContractError(f"{op.kind.value} takes no role scope")

    def render(self) -> str:
        body = ",".join(op.render() for op in self.ops)
        return f"{self.role}:{body}" if self.role else body


@dataclass(frozen=True)
class OpProgram:
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        if not self.clauses:
            raise ContractError("empty program")
        deleted: set[str] = set()
        for cl in self.clauses:
            for op in cl.ops:
                if op.kind is OpKind.DELETE:
                    if cl.role.name in deleted:
                        raise ContractError(f"{cl.role} deleted twice")
                    deleted.add(cl.role.name)

    def render(self) -> str:
        return ";".join(cl.render() for cl in self.clauses)

    def roles(self) -> list[RoleLabel]:
        return [cl.role for cl in self.clauses if cl.role is not None]


def render_program(program: OpProgram) -> str:
    return program.render()


# --- parsing -----------------------------------------------------------------

def _split_top(text: str, seps: str, base: int) -> list[tuple[int, str]]:
    """Split on separator chars outside parentheses, keeping offsets."""
    pieces, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ProgramParseError("unbalanced ')'", base + i)
        elif depth == 0 and ch in seps:
            pieces.append((base + start, text[start:i]))
            start = i + 1
    if depth:
        raise ProgramParseError("unbalanced '('", base + len(text))
    pieces.append((base + start, text[start:]))
    return pieces


_ALIAS = {
    "CONTENT": "CHANGE_CONTENT",
    "SPEC": "CHANGE_SPEC",
    "CHANGE_VFORM": "CHANGE_VTENSE",
    "CHANGE_VOICE": "CHANGE_VVOICE",
}


def _parse_op(piece: str, offset: int) -> PerturbOp:
    text = piece.strip()
    offset += len(piece) - len(piece.lstrip())
    if not text:
        raise ProgramParseError("empty operation", offset)
    if "(" in text:
        if not text.endswith(")"):
            raise ProgramParseError(f"malformed operation {text!r}", offset)
        name, arg = text[: text.index("(")], text[text.index("(") + 1 : -1].strip()
    else:
        name, arg = text, None
    name = name.strip()
    name = _ALIAS.get(name, name)

    if name == "CORE":
        if arg != "SWAP_CORE":
            raise ProgramParseError(f"unknown operation CORE({arg})", offset)
        return PerturbOp(OpKind.SWAP_CORE)
    if name == "CONTEXT":
        if arg != "DELETE_TEXT":
            raise ProgramParseError(f"unknown operation CONTEXT({arg})", offset)
        return PerturbOp(OpKind.CONTEXT_DELETE_TEXT, span=None)

    try:
        kind = OpKind(name)
    except ValueError:
        raise ProgramParseError(f"unknown operation {name!r}", offset)

    if kind is OpKind.CHANGE_VTENSE:
        if arg not in TENSES:
            raise ProgramParseError(f"unknown tense {arg!r}", offset)
        return PerturbOp(kind, tense=arg)
    if kind is OpKind.CHANGE_VVOICE:
        if arg not in VOICES:
            raise ProgramParseError(f"unknown voice {arg!r}", offset)
        return PerturbOp(kind, voice=arg)
    if kind is OpKind.CHANGE_VLEMMA:
        if not arg or any(c.isspace() for c in arg):
            raise ProgramParseError("CHANGE_VLEMMA needs a single-token lemma", offset)
        return PerturbOp(kind, text=arg)
    if kind is OpKind.SWAP_CORE:
        if arg is not None:
            raise ProgramParseError("SWAP_CORE takes no argument", offset)
        return PerturbOp(kind)
    if kind is OpKind.CHANGE_IDX:
        if arg is None:
            raise ProgramParseError("CHANGE_IDX needs from:to slots", offset)
        sep = ":" if ":" in arg else ","
        parts = [p.strip() for p in arg.split(sep)]
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise ProgramParseError(f"malformed CHANGE_IDX argument {arg!r}", offset)
        return PerturbOp(kind, from_slot=int(parts[0]), to_slot=int(parts[1]))
    if kind is OpKind.MOVE:
        if arg is None or arg == END:
            return PerturbOp(kind, to_slot=END)
        if not arg.isdigit():
            raise ProgramParseError(f"malformed MOVE argument {arg!r}", offset)
        return PerturbOp(kind, to_slot=int(arg))
    if kind is OpKind.CHANGE_CONTENT:
        if not arg:
            raise ProgramParseError("CHANGE_CONTENT needs text", offset)
        return PerturbOp(kind, text=arg)
    if kind is OpKind.CHANGE_SPEC:
        try:
            spec = Specificity(arg)
        except ValueError:
            raise ProgramParseError(f"unknown specificity {arg!r}", offset)
        return PerturbOp(kind, spec=spec)
    if kind is OpKind.DELETE:
        if arg is not None:
            raise ProgramParseError("DELETE takes no argument", offset)
        return PerturbOp(kind)
    # CONTEXT_DELETE_TEXT, direct form
    if arg is None:
        return PerturbOp(kind, span=None)
    sep = "," if "," in arg else ":"
    parts = [p.strip() for p in arg.split(sep)]
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise ProgramParseError(f"malformed text range {arg!r}", offset)
    lo, hi = int(parts[0]), int(parts[1])
    if lo >= hi:
        raise ProgramParseError(f"empty text range {arg!r}", offset)
    return PerturbOp(kind, span=(lo, hi))


def _parse_clause(piece: str, offset: int) -> Clause:
    text = piece
    role: RoleLabel | None = None
    head = _split_top(text, ":", offset)
    ops_part, ops_offset = text, offset
    if len(head) > 1:
        # a role scope only if the first piece is a bare role name
        cand = head[0][1].strip()
        if cand and cand.replace("_", "").replace("-", "").isalnum() and "(" not in cand:
            if len(head) > 2:
                raise ProgramParseError("too many ':' in clause", head[2][0])
            if cand != "VERB":
                if not cand.isupper():
                    raise ProgramParseError(f"role names are uppercase, got {cand!r}", offset)
                role = RoleLabel(cand)
            ops_offset, ops_part = head[1]
    if not ops_part.strip():
        raise ProgramParseError("clause has no operations", ops_offset)
    ops = tuple(_parse_op(p, o) for o, p in _split_top(ops_part, ",", ops_offset))
    if role is None and any(op.kind in ROLE_OPS for op in ops):
        bad = next(op for op in ops if op.kind in ROLE_OPS)
        raise ProgramParseError(f"{bad.kind.value} needs a role scope", ops_offset)
    if role is not None and any(op.kind not in ROLE_OPS for op in ops):
        bad = next(op for op in ops if op.kind not in ROLE_OPS)
        raise ProgramParseError(f"{bad.kind.value} takes no role scope", ops_offset)
    try:
        return Clause(role, ops)
    except ContractError as exc:
        raise ProgramParseError(str(exc), offset)


def parse_program(text: str) -> OpProgram:
    """Parse a perturbation program string. Inverse of ``render_program``
    on canonical spellings; aliases normalize (CONTENT, SPEC, CHANGE_VFORM,
    CHANGE_VOICE, CORE(SWAP_CORE), CONTEXT(DELETE_TEXT))."""
    if not text or not text.strip():
        raise ProgramParseError("empty program", 0)
    clauses = []
    for offset, piece in _split_top(text, ";", 0):
        if not piece.strip():
            raise ProgramParseError("empty clause", offset)
        clauses.append(_parse_clause(piece, offset))
    try:
        return OpProgram(tuple(clauses))
    except ContractError as exc:
        raise ProgramParseError(str(exc), 0)


# --- applying ----------------------------------------------------------------

_PUNCT = set(_string.punctuation)


def _is_punct(tok: LiteralTok) -> bool:
    return all(ch in _PUNCT for ch in tok.text)


class _Applier:
    """Mutable working copy of a prompt under perturbation.

    Context entries are ('lit', LiteralTok) / ('blank', code_index) pairs
    where the code index is None for unassigned blanks and AUX_RUN for
    auxiliary runs of the verb.
    """

    def __init__(self, prompt: PromptSpec, rng: Random):
        self.rng = rng
        self.codes: list = list(prompt.header.codes)
        slot_code = dict(prompt.assignments)
        self.entries: list[tuple[str, object]] = []
        slot = 0
        for it in prompt.context.items:
            if isinstance(it, Blank):
                self.entries.append(("blank", slot_code.get(slot)))
                slot += 1
            else:
                self.entries.append(("lit", it))
        self.source = prompt.source
        self.regions = list(prompt.source.regions) if prompt.source else []

    # -- lookups --

    def _code_index(self, role: RoleLabel) -> int | None:
        for i, code in enumerate(self.codes[1:], start=1):
            if code.role == role:
                return i
        return None

    def _require_code(self, role: RoleLabel) -> int:
        idx = self._code_index(role)
        if idx is None:
            raise UnknownRoleError(f"prompt has no {role} control code")
        return idx

    def _blank_positions(self) -> list[int]:
        return [i for i, (k, _) in enumerate(self.entries) if k == "blank"]

    def _literal_positions(self) -> list[int]:
        return [i for i, (k, _) in enumerate(self.entries) if k == "lit"]

    def _end_insertion_point(self) -> int:
        i = len(self.entries)
        while i > 0:
            kind, val = self.entries[i - 1]
            if kind == "lit" and _is_punct(val):
                i -= 1
            else:
                break
        return i

    def _shift_codes_after_delete(self, removed: int) -> None:
        self.codes.pop(removed)
        remapped = []
        for kind, val in self.entries:
            if kind == "blank" and isinstance(val, int) and val > removed:
                val = val - 1
            remapped.append((kind, val))
        self.entries = remapped
        self.regions = [
            (s, e, (c - 1 if c > removed else c))
            for (s, e, c) in self.regions
            if c != removed
        ]

    # -- op handlers --

    def change_verb(self, op: PerturbOp) -> None:
        verb: VerbCode = self.codes[0]
        if op.kind is OpKind.CHANGE_VTENSE:
            self.codes[0] = replace(verb, tense=op.tense)
        elif op.kind is OpKind.CHANGE_VVOICE:
            self.codes[0] = replace(verb, voice=op.voice)
        else:
            self.codes[0] = replace(verb, lemma=op.text)

    def swap_core(self) -> None:
        ia = self._code_index(RoleLabel("AGENT"))
        ip = self._code_index(RoleLabel("PATIENT"))
        if ia is None or ip is None:
            raise UnknownRoleError("SWAP_CORE needs both AGENT and PATIENT codes")
        a, p = self.codes[ia], self.codes[ip]
        self.codes[ia] = ArgCode(a.role, p.spec, p.content)
        self.codes[ip] = ArgCode(p.role, a.spec, a.content)

    def change_content(self, role: RoleLabel, text: str) -> None:
        spec = None if text == STAR else Specificity.COMPLETE
        idx = self._code_index(role)
        if idx is not None:
            self.codes[idx] = ArgCode(role, spec, text)
            return
        self.codes.append(ArgCode(role, spec, text))
        pos = self.rng.randrange(len(self.entries) + 1)
        self.entries.insert(pos, ("blank", len(self.codes) - 1))

    def change_spec(self, role: RoleLabel, spec: Specificity) -> None:
        idx = self._require_code(role)
        code: ArgCode = self.codes[idx]
        if code.content == STAR:
            raise ContractError(f"cannot set a specificity on {role}: *")
        self.codes[idx] = ArgCode(role, spec, code.content)

    def _remove_region(self, positions: list[int]) -> None:
        """Remove the given entry positions plus one adjacent comma."""
        first = positions[0]
        for p in sorted(positions, reverse=True):
            self.entries.pop(p)
        if first == 0:
            if self.entries and self.entries[0][0] == "lit" and self.entries[0][1].text == ",":
                self.entries.pop(0)
        else:
            p = first - 1
            if self.entries[p][0] == "lit" and self.entries[p][1].text == ",":
                self.entries.pop(p)

    def delete_role(self, role: RoleLabel) -> None:
        idx = self._code_index(role)
        if idx is not None:
            blanks = [i for i, (k, v) in enumerate(self.entries) if k == "blank" and v == idx]
            if blanks:
                self._remove_region(blanks)
            self._shift_codes_after_delete(idx)
            return
        # unmasked role: its tokens sit in the context as literals
        span = None
        if self.source is not None:
            for name, s, e in self.source.args:
                if name == role.name:
                    span = (s, e)
                    break
        if span is None:
            raise UnknownRoleError(f"prompt has no {role} control code or source span")
        positions = [
            i for i, (k, v) in enumerate(self.entries)
            if k == "lit" and v.source_index is not None and span[0] <= v.source_index < span[1]
        ]
        if not positions:
            raise UnknownRoleError(f"{role} tokens are no longer in the context")
        self._remove_region(positions)

    def _relocate_blank(self, entry_pos: int, to_slot) -> None:
        entry = self.entries.pop(entry_pos)
        if to_slot == END:
            self.entries.insert(self._end_insertion_point(), entry)
            return
        if to_slot < 0:
            raise ContractError(f"blank slot {to_slot} out of range")
        remaining = self._blank_positions()
        if to_slot == 0:
            self.entries.insert(0, entry)
        elif to_slot >= len(remaining):
            self.entries.insert(self._end_insertion_point(), entry)
        else:
            self.entries.insert(remaining[to_slot], entry)

    def change_idx(self, from_slot: int, to_slot: int) -> None:
        blanks = self._blank_positions()
        if not (0 <= from_slot < len(blanks)):
            raise ContractError(f"blank slot {from_slot} out of range")
        self._relocate_blank(blanks[from_slot], to_slot)

    def move_role(self, role: RoleLabel, to_slot) -> None:
        idx = self._require_code(role)
        blanks = [i for i, (k, v) in enumerate(self.entries) if k == "blank" and v == idx]
        if not blanks:
            raise ContractError(f"{role} has no blank to move")
        self._relocate_blank(blanks[0], to_slot)

    def context_delete_text(self, span: tuple[int, int]) -> None:
        lits = self._literal_positions()
        lo, hi = span
        if not (0 <= lo < hi <= len(lits)):
            raise ContractError(f"text range {span} out of range for {len(lits)} tokens")
        for p in sorted(lits[lo:hi], reverse=True):
            self.entries.pop(p)

    # -- output --

    def finish(self) -> PromptSpec:
        items: list = []
        assignments: list[tuple[int, int]] = []
        slot = 0
        for kind, val in self.entries:
            if kind == "blank":
                items.append(Blank())
                if val is not None:
                    assignments.append((slot, val))
                slot += 1
            else:
                items.append(val)
        source = None
        if self.source is not None:
            source = replace(self.source, regions=tuple(sorted(self.regions)))
        return PromptSpec(
            header=Header(tuple(self.codes)),
            context=Context(tuple(items)),
            assignments=tuple(assignments),
            source=source,
        )


def apply(
    prompt: PromptSpec,
    program: OpProgram | str,
    seed: int = 0,
    context_delete_span: tuple[int, int] | None = None,
) -> PromptSpec:
    """Apply a perturbation program to a prompt.

    The seed drives blank placement when CHANGE_CONTENT introduces a new
    role. ``context_delete_span`` supplies the literal-token range for a
    CONTEXT(DELETE_TEXT) written without one; explicit ranges win.
    """
    if isinstance(program, str):
        program = parse_program(program)
    state = _Applier(prompt, Random(seed))
    for clause in program.clauses:
        for op in clause.ops:
            if op.kind in VERB_OPS:
                state.change_verb(op)
            elif op.kind is OpKind.SWAP_CORE:
                state.swap_core()
            elif op.kind is OpKind.CHANGE_CONTENT:
                state.change_content(clause.role, op.text)
            elif op.kind is OpKind.CHANGE_SPEC:
                state.change_spec(clause.role, op.spec)
            elif op.kind is OpKind.DELETE:
                state.delete_role(clause.role)
            elif op.kind is OpKind.CHANGE_IDX:
                state.change_idx(op.from_slot, op.to_slot)
            elif op.kind is OpKind.MOVE:
                state.move_role(clause.role, op.to_slot)
            else:
                span = op.span or context_delete_span
                if span is None:
                    raise ContractError("CONTEXT(DELETE_TEXT) needs a text range")
                state.context_delete_text(span)
    return state.finish()


def expected_changes(
    sentence: SrlSentence,
    frame_idx: int,
    program: OpProgram | str,
) -> frozenset[tuple[int, int]]:
    """Sentence spans a program intends to change: every span of every
    role touched by a role-scoped op, both core spans for SWAP_CORE, and
    the verb token for verb ops. Blank relocations and literal deletions
    leave no span of their own."""
    if isinstance(program, str):
        program = parse_program(program)
    frame = sentence.frames[frame_idx]
    spans: set[tuple[int, int]] = set()

    def add_role(role: RoleLabel) -> None:
        for span in frame.args:
            if span.role == role:
                spans.add((span.start, span.end))

    for clause in program.clauses:
        for op in clause.ops:
            if op.kind in VERB_OPS:
                spans.add((frame.verb_index, frame.verb_index + 1))
            elif op.kind is OpKind.SWAP_CORE:
                add_role(RoleLabel("AGENT"))
                add_role(RoleLabel("PATIENT"))
            elif op.kind in ROLE_OPS:
                add_role(clause.role)
    return frozenset(spans)
