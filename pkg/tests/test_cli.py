import json

import pandas as pd
import pytest
from conftest import make_graph

import arcol
from lib.io import parse_layout, serialize_graph
from lib.layout import PipelineError


@pytest.fixture
def graph_file(tmp_path):
    path = tmp_path / "tadpole.json"
    graph = make_graph(6, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 4), (4, 5)])
    path.write_bytes(serialize_graph(graph, "json"))
    return path


def test_layout_writes_every_artifact(graph_file, tmp_path, capsys):
    out = tmp_path / "layout.json"
    code = arcol.main(
        [
            "layout",
            "--input", str(graph_file),
            "--ar", "16:9",
            "--restarts", "2",
            "--out", str(out),
            "--svg", str(tmp_path / "layout.svg"),
            "--dump-decomposition", str(tmp_path / "decomposition.json"),
            "--dump-grid", str(tmp_path / "grid.json"),
            "--dump-placements", str(tmp_path / "placements.json"),
            "--trace-stress", str(tmp_path / "trace-{restart}.csv"),
        ]
    )  # fmt: skip
    assert code == 0
    document = parse_layout(out.read_bytes())
    assert set(document.to_state().positions) == set(range(6))
    assert json.loads(capsys.readouterr().out)["ar"] > 0
    assert b'class="frame"' in (tmp_path / "layout.svg").read_bytes()
    assert json.loads((tmp_path / "decomposition.json").read_text())["trees"]
    placements = json.loads((tmp_path / "placements.json").read_text())
    assert [p["root"] for p in placements if p["chosen"]] == [0]
    assert all({"orientation", "flip", "c_final", "lam"} <= set(p) for p in placements)
    assert (tmp_path / "trace-0.csv").exists() and (tmp_path / "trace-1.csv").exists()


def test_metrics_of_a_written_layout(graph_file, tmp_path, capsys):
    out = tmp_path / "layout.json"
    assert arcol.main(["layout", "--input", str(graph_file), "--restarts", "2", "--out", str(out)]) == 0
    capsys.readouterr()
    csv = tmp_path / "metrics.csv"
    for _ in range(2):
        assert arcol.main(["metrics", "--input", str(out), "--graph", str(graph_file), "--csv", str(csv)]) == 0
    assert set(json.loads(capsys.readouterr().out.split("}\n")[0] + "}")) >= {"ar", "ksm", "ec"}
    assert len(pd.read_csv(csv)) == 2


def test_metrics_rejects_a_foreign_graph(graph_file, tmp_path):
    out = tmp_path / "layout.json"
    assert arcol.main(["layout", "--input", str(graph_file), "--restarts", "2", "--out", str(out)]) == 0
    other = tmp_path / "other.json"
    other.write_bytes(serialize_graph(make_graph(3, [(0, 1), (1, 2)]), "json"))
    assert arcol.main(["metrics", "--input", str(out), "--graph", str(other)]) == 1


def test_bad_input_exits_with_one(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text('{"nodes": [', encoding="utf-8")
    assert arcol.main(["layout", "--input", str(broken)]) == 1
    assert arcol.main(["layout", "--input", str(tmp_path / "missing.json")]) == 1
    assert arcol.main(["layout", "--input", str(broken), "--ar", "0:1"]) == 1


def test_pipeline_failure_exits_with_two(graph_file, monkeypatch):
    def broken(*args, **kwargs):
        raise PipelineError("attach", "no room")

    monkeypatch.setattr(arcol, "run_pipeline", broken)
    assert arcol.main(["layout", "--input", str(graph_file)]) == 2


def test_compare_writes_reports(graph_file, tmp_path, capsys):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    graph_file.rename(corpus / graph_file.name)
    (corpus / "notes.txt").write_text("ignored", encoding="utf-8")
    out = tmp_path / "report"
    code = arcol.main(
        ["compare", "--corpus", str(corpus), "--ars", "1:1,16:9", "--restarts", "2", "--out", str(out)]
    )
    assert code == 0
    assert len(pd.read_csv(out / "metrics.csv")) == 6
    assert len(list((out / "gallery").glob("*.svg"))) == 2
    assert "avg" in capsys.readouterr().out
