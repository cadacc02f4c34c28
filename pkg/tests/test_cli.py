import json
import subprocess
import sys

import pytest

from aesop_eval.cli import main
from aesop_eval.corpus import Sample, write_corpus
from aesop_eval.entities import EntityRecord, EntitySet

from conftest import write_jsonl
from test_adapters import REBEL_LINE
from test_perturbation import synthetic_corpus


@pytest.fixture
def corpora(tmp_path):
    gold = [
        Sample("a", EntitySet((EntityRecord("Microsoft", "corporation", {"headquarter": "Redmond"}),)), "Microsoft is in Redmond."),
        Sample("b", EntitySet((EntityRecord("Nile", None, {"continent": "Africa"}),))),
    ]
    pred = [gold[0]]
    write_corpus(gold, tmp_path / "gold.jsonl")
    write_corpus(pred, tmp_path / "pred.jsonl")
    return tmp_path


def test_evaluate_writes_report_and_csv(corpora, capsys):
    rc = main(["evaluate", "--gold", str(corpora / "gold.jsonl"), "--pred", str(corpora / "pred.jsonl"),
               "--metric", "aesop-exactname-recall", "--report", str(corpora / "r.json"), "--csv", str(corpora / "r.csv")])
    assert rc == 0
    report = json.loads((corpora / "r.json").read_text())
    assert report["aggregate"]["aesop-multiprop-max"] == 0.5
    assert report["aggregate"]["aesop-exactname-recall"] == 0.5
    assert report["config"]["name_weight"] == 0.9
    assert "50.00" in capsys.readouterr().out
    assert (corpora / "r.csv").read_text().count("\n") == 4


def test_evaluate_flags(corpora):
    rc = main(["evaluate", "--gold", str(corpora / "gold.jsonl"), "--pred", str(corpora / "pred.jsonl"),
               "--assignment", "approxname", "--norm", "precision", "--name-weight", "0.7",
               "--no-lowercase", "--keep-punctuation", "--report", str(corpora / "r.json")])
    assert rc == 0
    report = json.loads((corpora / "r.json").read_text())
    assert report["config"]["primary_metric"] == "aesop-approxname-precision"
    assert report["config"]["lowercase"] is False
    assert report["config"]["other_weight"] == pytest.approx(0.3)


def test_exit_codes(corpora, tmp_path):
    gold = str(corpora / "gold.jsonl")
    assert main(["evaluate", "--gold", gold, "--pred", gold, "--name-weight", "1.5"]) == 1
    assert main(["evaluate", "--gold", gold, "--pred", gold, "--metric", "bogus"]) == 1
    with pytest.raises(SystemExit) as info:
        main(["evaluate", "--gold", gold])
    assert info.value.code == 1
    assert main(["evaluate", "--gold", gold, "--pred", str(tmp_path / "missing.jsonl")]) == 2
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "a", "entities": {"0": {"type": "x"}}}\n')
    assert main(["evaluate", "--gold", gold, "--pred", str(bad)]) == 2
    assert main(["perturb", "--in", gold, "--out", str(tmp_path / "o"), "--seed", "1", "--rate", "2"]) == 1
    badt = write_jsonl(tmp_path / "t.jsonl", [{"text": "x", "triples": [{"subject": "a"}]}])
    assert main(["convert", "--format", "rebel", "--in", str(badt), "--out", str(tmp_path / "o")]) == 2


def test_convert(tmp_path):
    src = write_jsonl(tmp_path / "rebel.jsonl", [REBEL_LINE])
    assert main(["convert", "--format", "rebel", "--in", str(src), "--out", str(tmp_path / "out.jsonl")]) == 0
    row = json.loads((tmp_path / "out.jsonl").read_text())
    assert row["entities"]["0"] == {"entity name": "France", "type": "unknown", "capital": "Paris"}


def test_perturb_rate_zero_byte_identical(tmp_path):
    src = tmp_path / "in.jsonl"
    write_corpus(synthetic_corpus(1), src)
    src.write_bytes(src.read_bytes().replace(b'", "', b'","'))  # non-canonical spacing
    out = tmp_path / "out.jsonl"
    assert main(["perturb", "--in", str(src), "--out", str(out), "--seed", "3", "--rate", "0"]) == 0
    assert out.read_bytes() == src.read_bytes()
    assert (tmp_path / "out.jsonl.changes.jsonl").read_text() == ""


def test_perturb_reproducible(tmp_path):
    src = tmp_path / "in.jsonl"
    write_corpus(synthetic_corpus(1), src)
    runs = []
    for k in range(2):
        out = tmp_path / f"out{k}.jsonl"
        assert main(["perturb", "--in", str(src), "--out", str(out), "--seed", "7", "--rate", "0.5"]) == 0
        runs.append((out.read_bytes(), (tmp_path / f"out{k}.jsonl.changes.jsonl").read_bytes()))
    assert runs[0] == runs[1]
    assert runs[0][1]


def test_correlate_and_compare(corpora):
    gold, pred = str(corpora / "gold.jsonl"), str(corpora / "pred.jsonl")
    assert main(["evaluate", "--gold", gold, "--pred", pred, "--report", str(corpora / "r.json")]) == 0
    assert main(["correlate", "--report", str(corpora / "r.json"), "--out", str(corpora / "c.json"),
                 "--scatter-csv", str(corpora / "s.csv")]) == 0
    corr = json.loads((corpora / "c.json").read_text())
    diag = [p for p in corr["pairs"] if p["a"] == p["b"] == "aesop-multiprop-max"]
    assert diag[0]["pearson"] == 1.0
    assert main(["compare", "--gold", gold, "--pred-a", gold, "--pred-b", pred, "--report", str(corpora / "cmp.json")]) == 0
    cmp = json.loads((corpora / "cmp.json").read_text())
    assert cmp["summary"]["aesop-multiprop-max"]["a_preferred_pct"] == 100.0


def test_module_entry_point(corpora):
    proc = subprocess.run([sys.executable, "-m", "aesop_eval", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for cmd in ("evaluate", "convert", "perturb", "correlate", "compare"):
        assert cmd in proc.stdout
