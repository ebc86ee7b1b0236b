"""End-to-end checks of the batch command-line interface."""
import json

import pytest

from promptstitch import cli

from helpers import OPERATION_REC, QA_REC, WATCH_REC, corpus_lines, hundred_frame_records


@pytest.fixture
def corpus_path(tmp_path):
    path = tmp_path / "corpus.jsonl"
    path.write_text(corpus_lines([OPERATION_REC, WATCH_REC, QA_REC]), encoding="utf-8")
    return path


def _rows(path):
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


def _summary(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    return json.loads(err[-1])


# --- compile -------------------------------------------------------------------------

def test_compile_writes_prompt_target_rows(corpus_path, tmp_path, capsys):
    out = tmp_path / "prompts.jsonl"
    code = cli.main(["compile", "--corpus", str(corpus_path), "--out", str(out),
                     "--mask", "all"])
    assert code == 0
    rows = _rows(out)
    assert [r["sent_id"] for r in rows] == ["canonical", "watch", "qa"]
    first = rows[0]
    assert set(first) == {"sent_id", "frame_idx", "prompt", "target"}
    assert first["prompt"].startswith("[VERB+active+past: comfort | AGENT+")
    assert "<extra_id_0>" in first["prompt"]
    assert first["target"].startswith("[LOCATIVE: In the operation room]")
    summary = _summary(capsys)
    assert summary["subcommand"] == "compile"
    assert summary["outputs"] == 3 and summary["failures"] == 0


def test_compile_mask_and_frame_flags(corpus_path, tmp_path, capsys):
    out = tmp_path / "prompts.jsonl"
    code = cli.main(["compile", "--corpus", str(corpus_path), "--out", str(out),
                     "--mask", "AGENT,PATIENT", "--frame", "0"])
    assert code == 0
    row = _rows(out)[0]
    assert "LOCATIVE" not in row["prompt"]
    assert "AGENT+complete: the doctor" in row["prompt"]


def test_compile_bad_mask_is_a_config_error(corpus_path, capsys):
    # a malformed role name fails the whole run; a well-formed name the
    # frames simply lack fails record by record
    assert cli.main(["compile", "--corpus", str(corpus_path),
                     "--mask", "agent"]) == 2
    assert "error" in _summary(capsys)
    assert cli.main(["compile", "--corpus", str(corpus_path),
                     "--mask", "GOAL"]) == 1


def test_compile_missing_frame_is_a_record_failure(corpus_path, tmp_path, capsys):
    out = tmp_path / "prompts.jsonl"
    code = cli.main(["compile", "--corpus", str(corpus_path), "--out", str(out),
                     "--frame", "3"])
    assert code == 1
    rows = _rows(out)
    assert all("error" in r for r in rows)
    assert _summary(capsys)["failures"] == 3


def test_compile_seed_changes_adjunct_shuffle(corpus_path, tmp_path, capsys):
    out_a, out_b, out_c = (tmp_path / n for n in ("a.jsonl", "b.jsonl", "c.jsonl"))
    cli.main(["compile", "--corpus", str(corpus_path), "--out", str(out_a),
              "--seed", "0", "--extra-blanks", "2"])
    cli.main(["compile", "--corpus", str(corpus_path), "--out", str(out_b),
              "--seed", "0", "--extra-blanks", "2"])
    cli.main(["compile", "--corpus", str(corpus_path), "--out", str(out_c),
              "--seed", "7", "--extra-blanks", "2"])
    assert out_a.read_bytes() == out_b.read_bytes()
    assert out_a.read_bytes() != out_c.read_bytes()


# --- perturb --------------------------------------------------------------------------

def test_perturb_applies_one_program_per_sentence(corpus_path, tmp_path, capsys):
    out = tmp_path / "perturbed.jsonl"
    code = cli.main(["perturb", "--corpus", str(corpus_path), "--out", str(out),
                     "--ops", "CHANGE_VTENSE(future)", "--mock"])
    assert code == 0
    rows = _rows(out)
    assert len(rows) == 3
    for row in rows:
        assert set(row) == {"sent_id", "frame_idx", "prompt", "program",
                            "tagged", "generation"}
        assert row["program"] == "CHANGE_VTENSE(future)"
        assert "+future:" in row["prompt"]
    assert rows[0]["generation"] == (
        "In the operation room , the doctor will comfort the athlete .")


def test_perturb_masks_the_roles_the_program_touches(corpus_path, tmp_path, capsys):
    out = tmp_path / "perturbed.jsonl"
    cli.main(["perturb", "--corpus", str(corpus_path), "--out", str(out),
              "--ops", "CORE(SWAP_CORE)", "--mock"])
    row = _rows(out)[0]
    assert "AGENT+complete: the athlete" in row["prompt"]
    assert "PATIENT+complete: the doctor" in row["prompt"]
    assert row["generation"] == (
        "In the operation room , the athlete comforted the doctor .")


def test_perturb_jobs_do_not_change_output_order(corpus_path, tmp_path, capsys):
    one, four = tmp_path / "j1.jsonl", tmp_path / "j4.jsonl"
    cli.main(["perturb", "--corpus", str(corpus_path), "--out", str(one),
              "--ops", "CHANGE_VTENSE(present)", "--mock", "--jobs", "1"])
    cli.main(["perturb", "--corpus", str(corpus_path), "--out", str(four),
              "--ops", "CHANGE_VTENSE(present)", "--mock", "--jobs", "4"])
    assert one.read_bytes() == four.read_bytes()


def test_perturb_bad_program_is_a_config_error(corpus_path, capsys):
    assert cli.main(["perturb", "--corpus", str(corpus_path),
                     "--ops", "NOSUCHOP(x)", "--mock"]) == 2


def test_perturb_without_backend_or_mock_is_a_config_error(corpus_path, capsys, monkeypatch):
    monkeypatch.delenv("TAILOR_GEN_URL", raising=False)
    assert cli.main(["perturb", "--corpus", str(corpus_path),
                     "--ops", "CHANGE_VTENSE(past)"]) == 2


def test_perturb_inapplicable_records_fail_without_aborting(tmp_path, capsys):
    # WATCH has no LOCATIVE: CHANGE_SPEC on it fails; the others succeed
    path = tmp_path / "corpus.jsonl"
    path.write_text(corpus_lines([OPERATION_REC, WATCH_REC]), encoding="utf-8")
    out = tmp_path / "out.jsonl"
    code = cli.main(["perturb", "--corpus", str(path), "--out", str(out),
                     "--ops", "LOCATIVE:CHANGE_SPEC(sparse)", "--mock"])
    assert code == 1
    rows = _rows(out)
    assert "prompt" in rows[0] and "error" in rows[1]
    summary = _summary(capsys)
    assert summary["outputs"] == 1 and summary["failures"] == 1


# --- gen-data -------------------------------------------------------------------------

def test_gen_data_streams_examples_and_reruns_identically(tmp_path, capsys):
    path = tmp_path / "corpus.jsonl"
    path.write_text(corpus_lines(hundred_frame_records()[:10]), encoding="utf-8")
    out_a, out_b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert cli.main(["gen-data", "--corpus", str(path), "--seed", "48",
                     "--out", str(out_a)]) == 0
    summary = _summary(capsys)
    assert summary["positives"] == 10
    assert summary["positives"] + summary["negatives"] == len(_rows(out_a))
    assert cli.main(["gen-data", "--corpus", str(path), "--seed", "48",
                     "--out", str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    rewards = {r["reward"] for r in _rows(out_a)}
    assert rewards == {1, -1}


def test_gen_data_requires_a_seed(tmp_path, capsys):
    path = tmp_path / "corpus.jsonl"
    path.write_text(corpus_lines([OPERATION_REC]), encoding="utf-8")
    assert cli.main(["gen-data", "--corpus", str(path)]) == 2


# --- recipe ---------------------------------------------------------------------------

def test_recipe_flattens_candidates_and_counts_skips(tmp_path, capsys):
    path = tmp_path / "corpus.jsonl"
    # one sentence with an adjunct to move, one without
    path.write_text(corpus_lines([OPERATION_REC, WATCH_REC]), encoding="utf-8")
    out = tmp_path / "style.jsonl"
    code = cli.main(["recipe", "--corpus", str(path), "--out", str(out),
                     "--name", "style/pp_removal", "--mock"])
    assert code == 0
    rows = _rows(out)
    assert len(rows) == 1
    row = rows[0]
    assert set(row) == {"sent_id", "prompt", "program", "metadata",
                        "perturbed", "tagged", "generation"}
    assert row["sent_id"] == "canonical"
    assert row["generation"] == "the doctor comforted the athlete ."
    summary = _summary(capsys)
    assert summary["skipped"] == 1 and summary["failures"] == 0


def test_recipe_accepts_repeatable_params(tmp_path, capsys):
    path = tmp_path / "corpus.jsonl"
    path.write_text(corpus_lines([QA_REC]), encoding="utf-8")
    out = tmp_path / "qa.jsonl"
    code = cli.main(["recipe", "--corpus", str(path), "--out", str(out),
                     "--name", "contrast/qa_swap_answer_to_agent",
                     "--param", "answer=their own militia", "--mock"])
    assert code == 0
    row = _rows(out)[0]
    assert "AGENT+complete: who" in row["perturbed"]


def test_recipe_unknown_name_is_a_config_error(tmp_path, capsys):
    path = tmp_path / "corpus.jsonl"
    path.write_text(corpus_lines([OPERATION_REC]), encoding="utf-8")
    assert cli.main(["recipe", "--corpus", str(path),
                     "--name", "nli/nosuchstrategy", "--mock"]) == 2
    assert cli.main(["recipe", "--corpus", str(path),
                     "--name", "style/pp_removal", "--param", "oops"]) == 2


# --- eval -----------------------------------------------------------------------------

def _perturb_then_eval(tmp_path, capsys, extra_eval_flags=()):
    path = tmp_path / "corpus.jsonl"
    path.write_text(corpus_lines([OPERATION_REC, WATCH_REC]), encoding="utf-8")
    cands = tmp_path / "cands.jsonl"
    cli.main(["perturb", "--corpus", str(path), "--out", str(cands),
              "--ops", "CHANGE_VTENSE(future)", "--mock"])
    capsys.readouterr()
    out = tmp_path / "report" / "eval.jsonl"
    out.parent.mkdir()
    code = cli.main(["eval", "--corpus", str(path), "--candidates", str(cands),
                     "--out", str(out), "--mock", *extra_eval_flags])
    return code, out


def test_eval_scores_fluency_closeness_and_control(tmp_path, capsys):
    code, out = _perturb_then_eval(tmp_path, capsys)
    assert code == 0
    rows = _rows(out)
    assert len(rows) == 2
    for row in rows:
        assert set(row) == {"sent_id", "frame_idx", "fluency_ratio",
                            "closeness", "checks", "controllable"}
        assert row["controllable"] is True
        assert row["closeness"]["f1"] == 1.0
        assert row["fluency_ratio"] > 0
        assert set(row["checks"]) == {"lemma", "tense", "voice",
                                      "role", "content", "spec"}
    summary = _summary(capsys)
    assert summary["controllable_rate"] == 1.0
    assert summary["mean_f1"] == 1.0


def test_eval_renders_figures_next_to_the_output(tmp_path, capsys):
    code, out = _perturb_then_eval(tmp_path, capsys)
    assert code == 0
    report_dir = out.parent
    for name in ("closeness_f1_hist.png", "fluency_ratio_hist.png",
                 "controllability_bars.png"):
        assert (report_dir / name).stat().st_size > 0
    assert sorted(_summary_figures(capsys)) == sorted(
        str(report_dir / n) for n in ("closeness_f1_hist.png",
                                      "fluency_ratio_hist.png",
                                      "controllability_bars.png"))


def _summary_figures(capsys):
    return _summary(capsys)["figures"]


def test_eval_honors_an_explicit_figures_directory(tmp_path, capsys):
    figs = tmp_path / "figs"
    code, out = _perturb_then_eval(tmp_path, capsys,
                                   extra_eval_flags=("--figures", str(figs)))
    assert code == 0
    assert (figs / "closeness_f1_hist.png").exists()
    assert not (out.parent / "closeness_f1_hist.png").exists()


def test_eval_flags_unknown_sentences_as_failures(tmp_path, capsys):
    path = tmp_path / "corpus.jsonl"
    path.write_text(corpus_lines([OPERATION_REC]), encoding="utf-8")
    cands = tmp_path / "cands.jsonl"
    cands.write_text(json.dumps({"sent_id": "ghost", "prompt": "x"}) + "\n",
                     encoding="utf-8")
    out = tmp_path / "eval.jsonl"
    assert cli.main(["eval", "--corpus", str(path), "--candidates", str(cands),
                     "--out", str(out), "--mock"]) == 1
    assert "error" in _rows(out)[0]


# --- filter ---------------------------------------------------------------------------

def test_filter_keeps_the_lowest_loss_fraction(tmp_path, capsys):
    rows = [{"id": i, "loss": float(10 - i)} for i in range(10)]
    inp = tmp_path / "scored.jsonl"
    inp.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    out = tmp_path / "kept.jsonl"
    code = cli.main(["filter", "--in", str(inp), "--out", str(out), "--keep", "0.3"])
    assert code == 0
    kept = _rows(out)
    assert [r["id"] for r in kept] == [7, 8, 9]  # lowest losses, input order
    assert _summary(capsys)["outputs"] == 3


def test_filter_scores_text_rows_with_the_mock(tmp_path, capsys):
    rows = [{"text": f"sentence number {i} ."} for i in range(4)]
    inp = tmp_path / "plain.jsonl"
    inp.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    out = tmp_path / "kept.jsonl"
    code = cli.main(["filter", "--in", str(inp), "--out", str(out),
                     "--keep", "0.5", "--mock"])
    assert code == 0
    kept = _rows(out)
    assert len(kept) == 2
    assert all("loss" in r for r in kept)


def test_filter_validates_keep_and_reports_bad_rows(tmp_path, capsys):
    inp = tmp_path / "rows.jsonl"
    inp.write_text(json.dumps({"loss": 1.0}) + "\n" + json.dumps({"id": 1}) + "\n",
                   encoding="utf-8")
    assert cli.main(["filter", "--in", str(inp), "--keep", "0"]) == 2
    out = tmp_path / "kept.jsonl"
    assert cli.main(["filter", "--in", str(inp), "--out", str(out),
                     "--mock", "--keep", "1.0"]) == 1
    rows = _rows(out)
    assert any("error" in r for r in rows)


def test_missing_input_files_are_config_errors(tmp_path, capsys):
    assert cli.main(["compile", "--corpus", str(tmp_path / "nope.jsonl")]) == 2
    assert cli.main(["filter", "--in", str(tmp_path / "nope.jsonl")]) == 2
