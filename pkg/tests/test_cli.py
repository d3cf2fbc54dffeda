import csv
import json
import subprocess
import sys

import pytest

from sqltemplate.cli import main

from conftest import FIXTURES
from test_templatizer import GOLDEN

CATALOGS = str(FIXTURES / "catalogs.json")
FIVE = [
    {"db_id": "hr", "sql": "SELECT name FROM employees WHERE salary > 50000"},
    {"db_id": "hr", "sql": "SELECT name FROM employees WHERE salary > 1"},
    {"db_id": "hr", "sql": "SELECT T1.name FROM employees AS T1 JOIN departments AS T2 ON T1.dept_id = T2.id"},
    {"db_id": "cachet", "sql": "SELECT COUNT(*) FROM subscribers;"},
    {"db_id": "cachet", "sql": "SELECT class_name, COUNT(*) FROM actions GROUP BY class_name"},
]


def cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write_records(path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))
    return path


@pytest.fixture
def five(tmp_path):
    return write_records(tmp_path / "five.jsonl", FIVE)


def test_templatize_golden(capsys, tmp_path):
    sql, hard, soft = GOLDEN["customer_orders"]
    f = tmp_path / "q.sql"
    f.write_text(sql)
    code, out, _ = cli(capsys, "templatize", "--file", f, "--catalog", CATALOGS, "--db", "hr")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2
    assert "".join(lines[0].split()) == "".join(hard.split())
    assert "".join(lines[1].split()) == "".join(soft.split())


def test_templatize_soft_line(capsys):
    code, out, _ = cli(capsys, "templatize", GOLDEN["simple_selection"][0], "--catalog", CATALOGS, "--db", "hr",
                       "--level", "soft")
    assert (code, out) == (0, "SELECT variable FROM variable WHERE variable > num\n")


def test_templatize_ddl_catalog(capsys, tmp_path):
    ddl = tmp_path / "hr.sql"
    ddl.write_text("CREATE TABLE employees (id INT, name TEXT, salary REAL);")
    code, out, _ = cli(capsys, "templatize", "SELECT name FROM employees", "--catalog", ddl)
    assert out.splitlines()[0] == "SELECT col_name FROM table_name"


@pytest.mark.parametrize(
    "argv",
    [
        ["templatize", "SELECT 1"],  # no catalog
        ["templatize", "SELECT 1", "--catalog", CATALOGS],  # two catalogs, no --db
        ["frobnicate"],
        ["analyze", "--window", "0"],
        ["fit", "--inventory", "x.json", "--resamples", "50"],
        ["coverage", "--targets", "0,50"],
        ["templatize", "--catalog", CATALOGS, "--db", "hr"],  # no query
    ],
)
def test_usage_errors(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    capsys.readouterr()
    assert code == 1


def test_data_errors(capsys, tmp_path):
    code, _, err = cli(capsys, "templatize", "SELECT 'x", "--catalog", CATALOGS, "--db", "hr")
    assert code == 2 and "UnterminatedString" in err
    code, _, _ = cli(capsys, "templatize", "SELECT 1", "--catalog", tmp_path / "missing.json")
    assert code == 2
    code, _, _ = cli(capsys, "templatize", "SELECT 1", "--catalog", CATALOGS, "--db", "nope")
    assert code == 2


def test_profile(capsys):
    code, out, _ = cli(capsys, "profile", "SELECT COUNT(*) FROM t GROUP BY a")
    assert code == 0
    assert json.loads(out)["num_aggs_plus_group_by"] == 2


ARTIFACTS = ["spectrum.csv", "coverage.csv", "loglog.csv", "fit.json", "spearman.csv", "proxy_by_group.csv",
             "summary.json", "failures.jsonl"]


def analyze(capsys, records, out, *extra):
    return cli(capsys, "analyze", "--records", records, "--catalog", CATALOGS, "--out", out,
               "--resamples", 100, *extra)


def test_analyze_smoke(capsys, tmp_path, five):
    code, _, _ = analyze(capsys, five, tmp_path / "out")
    assert code == 0
    out = tmp_path / "out"
    for name in ARTIFACTS:
        assert (out / name).exists(), name
    for name in [p.name for p in out.glob("*.csv")]:
        with open(out / name) as fh:
            rows = list(csv.reader(fh))
        assert len(rows) > 1
    assert len(list(out.glob("moving_avg_*.csv"))) == 6
    summary = json.loads((out / "summary.json").read_text())
    assert summary["layout_version"] == 1
    assert summary["records"] == {"processed": 5, "failed": 0}
    with open(out / "spectrum.csv") as fh:
        header = next(csv.reader(fh))
    assert header == summary["csv_headers"]["spectrum.csv"]
    json.loads((out / "fit.json").read_text())


def test_analyze_byte_identical(capsys, tmp_path, five):
    analyze(capsys, five, tmp_path / "a", "--seed", 3)
    analyze(capsys, five, tmp_path / "b", "--seed", 3)
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name


def test_analyze_with_bad_row(capsys, caplog, tmp_path):
    records = write_records(tmp_path / "r.jsonl", FIVE + [{"db_id": "hr", "sql": "SELECT 'broken"}])
    code, _, _ = analyze(capsys, records, tmp_path / "out")
    assert code == 0 and "skipped" in caplog.text
    failures = [json.loads(l) for l in (tmp_path / "out" / "failures.jsonl").read_text().splitlines()]
    assert [(f["line"], f["error"]) for f in failures] == [(6, "UnterminatedString")]


def test_analyze_failure_leaves_nothing(capsys, tmp_path):
    records = write_records(tmp_path / "r.jsonl", [{"db_id": "hr", "sql": "SELECT 'broken"}])
    code, _, _ = analyze(capsys, records, tmp_path / "out")
    assert code == 2
    assert not (tmp_path / "out").exists()
    assert [p.name for p in tmp_path.iterdir()] == ["r.jsonl"]


def test_ingest_match_coverage_fit(capsys, tmp_path, five):
    code, out, _ = cli(capsys, "ingest", "--records", five, "--catalog", CATALOGS, "--out", tmp_path / "inv")
    assert code == 0 and json.loads(out)["processed"] == 5
    soft = tmp_path / "inv" / "soft_inventory.json"

    code, out, _ = cli(capsys, "match", "SELECT location FROM departments WHERE id > 7", "--catalog", CATALOGS,
                       "--db", "hr", "--inventory", soft)
    assert json.loads(out) == {"hit": True, "rank": 1, "frequency": 2,
                               "template": "SELECT variable FROM variable WHERE variable > num"}
    code, out, _ = cli(capsys, "match", "SELECT name FROM employees ORDER BY name", "--catalog", CATALOGS,
                       "--db", "hr", "--inventory", soft)
    assert json.loads(out) == {"hit": False}
    code, _, err = cli(capsys, "match", "SELECT 'x", "--catalog", CATALOGS, "--db", "hr", "--inventory", soft)
    assert code == 2 and "offset" in err

    code, out, _ = cli(capsys, "coverage", "--inventory", soft, "--targets", "50,100")
    assert out.splitlines() == ["target,templates_needed,template_percentage", "50.0,2,50.0", "100.0,4,100.0"]

    code, out, _ = cli(capsys, "fit", "--inventory", soft, "--resamples", 0)
    fit = json.loads(out)
    assert code == 0 and fit["alpha"] > 0 and fit["gof_p_value"] is None


def test_env_overrides(capsys, tmp_path, five, monkeypatch):
    monkeypatch.setenv("SQLTMPL_CATALOG", CATALOGS)
    monkeypatch.setenv("SQLTMPL_DB", "hr")
    code, out, _ = cli(capsys, "templatize", "SELECT 1", "--level", "hard")
    assert (code, out) == (0, "SELECT num\n")
    monkeypatch.setenv("SQLTMPL_RECORDS", str(five))
    monkeypatch.setenv("SQLTMPL_TARGETS", "25,75")
    monkeypatch.setenv("SQLTMPL_RESAMPLES", "0")
    monkeypatch.setenv("SQLTMPL_DEDUP", "yes")
    code, _, _ = cli(capsys, "analyze", "--out", tmp_path / "o")
    assert code == 0
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["config"]["targets"] == [25, 75] and summary["config"]["resamples"] == 0
    # the command line still wins
    code, _, _ = cli(capsys, "analyze", "--out", tmp_path / "p", "--targets", "40")
    assert json.loads((tmp_path / "p" / "summary.json").read_text())["config"]["targets"] == [40]


def test_convert(capsys, tmp_path):
    tables = [{
        "db_id": "music",
        "table_names_original": ["Song", "Artist"],
        "column_names_original": [[-1, "*"], [0, "id"], [0, "title"], [1, "id"], [1, "name"]],
    }]
    (tmp_path / "tables.json").write_text(json.dumps(tables))
    train = [{"db_id": "music", "question": "All titles?", "query": "SELECT title FROM Song"}]
    bird = [{"db_id": "music", "question": "Names?", "SQL": "SELECT name FROM Artist", "difficulty": "moderate"}]
    (tmp_path / "train.json").write_text(json.dumps(train))
    (tmp_path / "bird_dev.json").write_text(json.dumps(bird))
    code, out, _ = cli(capsys, "convert", tmp_path / "train.json", tmp_path / "bird_dev.json",
                       "--tables", tmp_path / "tables.json", "--out", tmp_path / "conv")
    assert json.loads(out) == {"catalogs": 1, "records": 2}
    recs = [json.loads(l) for l in (tmp_path / "conv" / "records.jsonl").read_text().splitlines()]
    assert recs[1]["difficulty"] == "medium" and recs[0]["source"] == "train"
    code, out, _ = cli(capsys, "ingest", "--records", tmp_path / "conv" / "records.jsonl",
                       "--catalog", tmp_path / "conv" / "catalogs.json", "--out", tmp_path / "inv")
    assert json.loads(out)["processed"] == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "sqltemplate", "templatize", "SELECT COUNT(*) FROM subscribers",
         "--catalog", CATALOGS, "--db", "cachet"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines() == ["SELECT COUNT(*) FROM table_name", "SELECT COUNT(*) FROM variable"]
