"""Batch front door for the pipeline.

Subcommands: compile, perturb, gen-data, recipe, eval, filter. All I/O
is JSON Lines; a run summary goes to standard error as JSON. Exit codes:
0 on success, 1 when individual records failed (the batch still
completes), 2 on configuration errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, TextIO

from . import report as report_mod
from .clients import (
    ClientConfig,
    GenerateRequest,
    GeneratorClient,
    ScoreClient,
    SrlClient,
    mock_generate,
    mock_predict_srl,
    mock_score,
    resolve_config,
)
from .errors import (
    ContractError,
    CorpusError,
    ProgramParseError,
    PromptstitchError,
    RecipeParameterError,
)
from .metrics import closeness, cycle_consistency, fluency_ratio, perplexity_filter
from .ops import OpKind, OpProgram, apply, expected_changes, parse_program
from .prompts import (
    build_target,
    compile_prompt,
    parse_prompt,
    parse_tagged_output,
    serialize,
    untag,
)
from .recipes import candidate_record, recipe_candidates
from .srl import RoleLabel, SrlSentence, parse_corpus
from .training import _SEED_STRIDE, gen_dataset

log = logging.getLogger(__name__)


class ConfigError(PromptstitchError):
    """A problem with flags or configuration, not with any one record."""


# --- plumbing ---------------------------------------------------------------------

def _load_corpus(path: str) -> list[SrlSentence]:
    try:
        data = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read corpus {path}: {exc}")
    try:
        return parse_corpus(data)
    except CorpusError as exc:
        raise ConfigError(f"corpus {path}: {exc}")


def _read_jsonl(path: str) -> list[dict]:
    try:
        data = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}")
    rows = []
    for lineno, raw in enumerate(data.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            rows.append(json.loads(raw))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{lineno}: invalid JSON ({exc.msg})")
    return rows


def _open_out(path: str) -> TextIO:
    if path == "-":
        return sys.stdout
    try:
        return open(path, "w", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}")


def _write_rows(out: TextIO, rows: list[dict]) -> None:
    for row in rows:
        out.write(json.dumps(row, ensure_ascii=False) + "\n")
    if out is not sys.stdout:
        out.close()


def _summary(payload: dict) -> None:
    sys.stderr.write(json.dumps(payload, ensure_ascii=False) + "\n")


def _fan_out(items: list, fn: Callable[[int, object], dict], jobs: int) -> list[dict]:
    """Run fn over (index, item) pairs, preserving input order."""
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, range(len(items)), items))
    return [fn(i, item) for i, item in enumerate(items)]


def _guarded(fn: Callable[[int, object], dict]) -> Callable[[int, object], dict]:
    """Per-record failures become error rows instead of aborting the batch.
    Parameter problems are configuration-level and propagate."""

    def wrapped(i: int, item: object) -> dict:
        try:
            return fn(i, item)
        except (ConfigError, RecipeParameterError, ProgramParseError):
            raise
        except PromptstitchError as exc:
            return {"index": i, "error": str(exc)}

    return wrapped


def _record_seed(base: int, index: int) -> int:
    return base + _SEED_STRIDE * index


def _parse_mask(text: str):
    if text == "all":
        return "all"
    if text in ("none", ""):
        return []
    try:
        return [RoleLabel(part.strip()) for part in text.split(",")]
    except ContractError as exc:
        raise ConfigError(f"bad --mask value: {exc}")


def _backend_config(args) -> ClientConfig:
    file_cfg = None
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
    flags = {
        "gen_url": args.gen_url,
        "srl_url": args.srl_url,
        "score_url": args.score_url,
    }
    return resolve_config(flags=flags, config_file=file_cfg)


def _add_io_flags(p: argparse.ArgumentParser, corpus: bool = True) -> None:
    if corpus:
        p.add_argument("--corpus", required=True, help="input corpus (JSON Lines)")
    p.add_argument("--out", default="-", help="output path, or - for stdout")
    p.add_argument("--seed", type=int, default=0, help="master seed for all sampling")


def _add_backend_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mock", action="store_true",
                   help="use the deterministic in-process oracle instead of HTTP backends")
    p.add_argument("--gen-url", help="generator endpoint")
    p.add_argument("--srl-url", help="role-labeler endpoint")
    p.add_argument("--score-url", help="scoring endpoint")
    p.add_argument("--config", help="JSON config file with backend URLs")


def _add_jobs_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers; output order stays equal to input order")


# --- subcommands -----------------------------------------------------------------

def _cmd_compile(args) -> int:
    corpus = _load_corpus(args.corpus)
    mask = _parse_mask(args.mask)
    if args.frame != "all":
        try:
            fixed_frame = int(args.frame)
        except ValueError:
            raise ConfigError(f"--frame expects an index or 'all', got {args.frame!r}")

    tasks = []
    for sentence in corpus:
        if args.frame == "all":
            frames = range(len(sentence.frames))
        else:
            frames = [fixed_frame]
        for frame_idx in frames:
            tasks.append((sentence, frame_idx))

    def one(i: int, task) -> dict:
        sentence, frame_idx = task
        if not (0 <= frame_idx < len(sentence.frames)):
            return {"sent_id": sentence.sent_id, "error": f"sentence has no frame {frame_idx}"}
        prompt = compile_prompt(
            sentence, frame_idx, mask=mask,
            n_extra_blanks=args.extra_blanks, seed=_record_seed(args.seed, i))
        return {
            "sent_id": sentence.sent_id,
            "frame_idx": frame_idx,
            "prompt": serialize(prompt),
            "target": build_target(sentence, prompt),
        }

    rows = _fan_out(tasks, _guarded(one), 1)
    failures = sum(1 for r in rows if "error" in r)
    _write_rows(_open_out(args.out), rows)
    _summary({"subcommand": "compile", "inputs": len(tasks),
              "outputs": len(rows) - failures, "failures": failures})
    return 1 if failures else 0


def _mask_for_program(program: OpProgram, sentence: SrlSentence, frame_idx: int):
    """Roles a perturbation needs masked: every scoped role present in
    the frame, plus both cores when the program swaps them."""
    frame = sentence.frames[frame_idx]
    roles = [r for r in program.roles() if frame.occurrences(r)]
    if any(op.kind is OpKind.SWAP_CORE for cl in program.clauses for op in cl.ops):
        for name in ("AGENT", "PATIENT"):
            role = RoleLabel(name)
            if frame.occurrences(role) and role not in roles:
                roles.append(role)
    return roles


def _cmd_perturb(args) -> int:
    corpus = _load_corpus(args.corpus)
    try:
        program = parse_program(args.ops)
    except ProgramParseError as exc:
        raise ConfigError(f"bad --ops program: {exc}")
    generator = None
    if not args.mock:
        cfg = _backend_config(args)
        if not cfg.gen_url:
            raise ConfigError("perturb needs --mock or a generator URL")
        generator = GeneratorClient(cfg)

    def one(i: int, sentence: SrlSentence) -> dict:
        seed = _record_seed(args.seed, i)
        frame_idx = args.frame
        if not (0 <= frame_idx < len(sentence.frames)):
            return {"sent_id": sentence.sent_id, "error": f"sentence has no frame {frame_idx}"}
        mask = _mask_for_program(program, sentence, frame_idx)
        prompt = compile_prompt(sentence, frame_idx, mask=mask, seed=seed)
        perturbed = apply(prompt, program, seed=seed)
        row = {
            "sent_id": sentence.sent_id,
            "frame_idx": frame_idx,
            "prompt": serialize(perturbed),
            "program": program.render(),
        }
        if args.mock:
            tagged = mock_generate(perturbed)
            row["tagged"] = tagged
            row["generation"] = untag(tagged)
        elif generator is not None:
            candidates = generator.generate(GenerateRequest(prompt=row["prompt"]))
            if candidates:
                row["generation"] = candidates[0]
        return row

    rows = _fan_out(corpus, _guarded(one), args.jobs)
    failures = sum(1 for r in rows if "error" in r)
    _write_rows(_open_out(args.out), rows)
    _summary({"subcommand": "perturb", "inputs": len(corpus),
              "outputs": len(rows) - failures, "failures": failures})
    return 1 if failures else 0


def _cmd_gen_data(args) -> int:
    corpus = _load_corpus(args.corpus)
    out = _open_out(args.out)
    summary = gen_dataset(corpus, args.seed, out)
    if out is not sys.stdout:
        out.close()
    payload = {"subcommand": "gen-data", "inputs": len(corpus)}
    payload.update(summary.to_json())
    _summary(payload)
    return 0


def _cmd_recipe(args) -> int:
    corpus = _load_corpus(args.corpus)
    params = {}
    for item in args.param or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        params[key] = value

    def one(i: int, sentence: SrlSentence) -> dict:
        seed = _record_seed(args.seed, i)
        candidates = recipe_candidates(sentence, args.name, params, seed=seed)
        records = []
        for cand in candidates:
            rec = candidate_record(cand)
            if args.mock:
                perturbed = cand.apply(seed=seed)
                tagged = mock_generate(perturbed)
                rec["perturbed"] = serialize(perturbed)
                rec["tagged"] = tagged
                rec["generation"] = untag(tagged)
            records.append(rec)
        return {"sent_id": sentence.sent_id, "candidates": records}

    packed = _fan_out(corpus, _guarded(one), args.jobs)
    rows, skipped, failures = [], 0, 0
    for pack in packed:
        if "error" in pack:
            failures += 1
            rows.append(pack)
            continue
        if not pack["candidates"]:
            skipped += 1
            continue
        for rec in pack["candidates"]:
            rows.append({"sent_id": pack["sent_id"], **rec})
    _write_rows(_open_out(args.out), rows)
    _summary({"subcommand": "recipe", "recipe": args.name, "inputs": len(corpus),
              "outputs": len(rows) - failures, "skipped": skipped, "failures": failures})
    return 1 if failures else 0


def _flatten_checks(ctrl) -> dict:
    per_arg = ctrl.per_arg
    return {
        "lemma": ctrl.verb.lemma_ok,
        "tense": ctrl.verb.tense_ok,
        "voice": ctrl.verb.voice_ok,
        "role": all(a.role_ok for a in per_arg),
        "content": all(a.content_ok for a in per_arg),
        "spec": all(a.spec_ok for a in per_arg),
    }


def _cmd_eval(args) -> int:
    corpus = _load_corpus(args.corpus)
    by_id = {s.sent_id: s for s in corpus}
    candidates = _read_jsonl(args.candidates)
    srl_client = score_client = None
    if not args.mock:
        cfg = _backend_config(args)
        if not cfg.srl_url or not cfg.score_url:
            raise ConfigError("eval needs --mock or role-labeler and scoring URLs")
        srl_client, score_client = SrlClient(cfg), ScoreClient(cfg)

    def one(i: int, rec: dict) -> dict:
        sid = str(rec.get("sent_id"))
        sentence = by_id.get(sid)
        if sentence is None:
            return {"sent_id": sid, "error": "candidate references an unknown sentence"}
        frame_idx = int(rec.get("frame_idx", 0))
        prompt = parse_prompt(rec["prompt"])
        tagged = rec.get("tagged")
        plain = rec.get("generation")
        if tagged is None and plain is None:
            if not args.mock:
                return {"sent_id": sid, "error": "candidate has no generation to evaluate"}
            tagged = mock_generate(prompt)
        if plain is None:
            plain = untag(tagged)

        if tagged is not None:
            observed = parse_tagged_output(tagged)
        elif args.mock:
            observed = mock_predict_srl(plain)
        else:
            observed = srl_client.predict(plain)
        ctrl = cycle_consistency(prompt, observed)

        program = rec.get("program")
        expected = expected_changes(sentence, frame_idx, program) if program else frozenset()
        close = closeness(sentence, plain, expected)

        original_text = sentence.text()
        if args.mock:
            losses = [mock_score(original_text).loss, mock_score(plain).loss]
        else:
            losses = [r.loss for r in score_client.score_many([original_text, plain])]
        fluency = fluency_ratio(losses[0], losses[1])

        return {
            "sent_id": sid,
            "frame_idx": frame_idx,
            "fluency_ratio": fluency.ratio,
            "closeness": {
                "precision": close.precision,
                "recall": close.recall,
                "f1": close.f1,
            },
            "checks": _flatten_checks(ctrl),
            "controllable": ctrl.all_ok(),
        }

    rows = _fan_out(candidates, _guarded(one), args.jobs)
    failures = sum(1 for r in rows if "error" in r)
    good = [r for r in rows if "error" not in r]
    _write_rows(_open_out(args.out), rows)

    figures_dir = args.figures
    if figures_dir is None and args.out != "-":
        figures_dir = str(Path(args.out).parent)
    figure_paths = []
    if figures_dir is not None:
        figure_paths = [str(p) for p in report_mod.render_report(good, figures_dir)]

    n = len(good)
    _summary({
        "subcommand": "eval",
        "inputs": len(candidates),
        "outputs": n,
        "failures": failures,
        "mean_f1": sum(r["closeness"]["f1"] for r in good) / n if n else None,
        "mean_fluency_ratio": sum(r["fluency_ratio"] for r in good) / n if n else None,
        "controllable_rate": sum(r["controllable"] for r in good) / n if n else None,
        "figures": figure_paths,
    })
    return 1 if failures else 0


def _cmd_filter(args) -> int:
    rows = _read_jsonl(args.input)
    if not (0.0 < args.keep <= 1.0):
        raise ConfigError("--keep must be in (0, 1]")
    score_client = None
    if not args.mock and any("loss" not in r for r in rows):
        cfg = _backend_config(args)
        if not cfg.score_url:
            raise ConfigError("filter needs --mock, per-row loss fields, or a scoring URL")
        score_client = ScoreClient(cfg)

    scored: list[tuple[dict, float]] = []
    failures = 0
    out_rows: list[dict] = []
    for i, row in enumerate(rows):
        try:
            if "loss" in row:
                loss = float(row["loss"])
            else:
                text = row.get("text") or row.get("generation")
                if not text:
                    raise ContractError("row has neither loss nor text")
                loss = (mock_score(text) if args.mock else score_client.score(text)).loss
            scored.append(({**row, "loss": loss}, loss))
        except (PromptstitchError, ValueError) as exc:
            failures += 1
            out_rows.append({"index": i, "error": str(exc)})
    kept = perplexity_filter(scored, args.keep)
    out_rows.extend(kept)
    _write_rows(_open_out(args.out), out_rows)
    _summary({"subcommand": "filter", "inputs": len(rows), "outputs": len(kept),
              "failures": failures, "keep_fraction": args.keep})
    return 1 if failures else 0


# --- argument parsing ---------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="promptstitch",
        description="Compile role-annotated sentences into control-coded prompts, "
                    "perturb them, and build or evaluate training data.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("compile", help="compile prompts and infill targets")
    _add_io_flags(p)
    p.add_argument("--mask", default="all",
                   help="'all', 'none', or comma-separated role names")
    p.add_argument("--extra-blanks", type=int, default=0)
    p.add_argument("--frame", default="all", help="frame index, or 'all'")
    p.set_defaults(handler=_cmd_compile)

    p = sub.add_parser("perturb", help="apply a perturbation program to each sentence")
    _add_io_flags(p)
    p.add_argument("--ops", required=True, help="perturbation program")
    p.add_argument("--frame", type=int, default=0)
    _add_backend_flags(p)
    _add_jobs_flag(p)
    p.set_defaults(handler=_cmd_perturb)

    p = sub.add_parser("gen-data", help="emit likelihood/unlikelihood training examples")
    p.add_argument("--corpus", required=True)
    p.add_argument("--seed", type=int, required=True,
                   help="master seed; required so runs are reproducible")
    p.add_argument("--out", default="-")
    p.set_defaults(handler=_cmd_gen_data)

    p = sub.add_parser("recipe", help="run a named perturbation recipe")
    _add_io_flags(p)
    p.add_argument("--name", required=True,
                   help="namespaced recipe, e.g. nli/swap_core or style/to_past")
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="recipe parameter; repeatable")
    _add_backend_flags(p)
    _add_jobs_flag(p)
    p.set_defaults(handler=_cmd_recipe)

    p = sub.add_parser("eval", help="score generations for fluency, closeness, control")
    _add_io_flags(p)
    p.add_argument("--candidates", required=True,
                   help="JSON Lines of perturbed prompts and generations")
    p.add_argument("--figures", help="directory for rendered figures "
                                     "(default: alongside --out)")
    _add_backend_flags(p)
    _add_jobs_flag(p)
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("filter", help="keep the most fluent fraction of candidates")
    p.add_argument("--in", dest="input", required=True, help="scored candidates (JSON Lines)")
    p.add_argument("--keep", type=float, default=0.75, help="fraction to keep")
    p.add_argument("--out", default="-")
    _add_backend_flags(p)
    p.set_defaults(handler=_cmd_filter)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except ConfigError as exc:
        _summary({"error": str(exc)})
        return 2
    except (ProgramParseError, RecipeParameterError) as exc:
        _summary({"error": str(exc)})
        return 2


if __name__ == "__main__":
    sys.exit(main())
