import json

import pytest

from bkmod import cli
from bkmod.errors import PrecisionError, SchemaError

TWIST = {"command": "validate", "P": [2, 1], "A": [[[2, 1]]]}


def write(tmp_path, data, name="job.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(path)


def test_parse_round_trip():
    job = cli.parse(json.dumps(dict(TWIST, options={"budget": 3}, params={"p": 2, "N": 5})))
    assert cli.parse(cli.serialize(job)) == job


def test_missing_P_names_the_field():
    with pytest.raises(SchemaError) as err:
        cli.parse(json.dumps({"command": "validate", "A": [[[1]]]}))
    assert err.value.field == "P"


def test_unknown_fields_warn():
    job = cli.parse(json.dumps(dict(TWIST, colour="blue")))
    assert job.warnings == ["unknown field 'colour' ignored"]


def test_bad_coefficients_rejected():
    with pytest.raises(SchemaError) as err:
        cli.parse(json.dumps({"command": "validate", "P": [2, 1], "A": [[["x"]]]}))
    assert err.value.field == "A"


def test_defaults_applied():
    job = cli.parse(json.dumps({"command": "demo-2adic"}))
    assert job.params == {"p": 2, "r": 1, "N": 6, "M": 64}
    assert job.P == [2, 1]


def test_validate_tate_twist(tmp_path):
    out = tmp_path / "out.json"
    code = cli.main(["--input", write(tmp_path, TWIST), "--output", str(out)])
    report = json.loads(out.read_text())
    assert code == 0
    assert report["result"]["V"] == [[[[1]]]]
    assert report["eff_N_used"] <= report["params"]["N"]


def test_validate_P_squared_fails(tmp_path, capsys):
    code = cli.main(["--input", write(tmp_path, {"command": "validate", "P": [2, 1], "A": [[[4, 4, 1]]]})])
    report = json.loads(capsys.readouterr().out)
    assert code == 2
    assert report["result"]["witness"] == "det"


def test_malformed_json(tmp_path, capsys):
    code = cli.main(["--input", write(tmp_path, '{"command": ')])
    assert code == 4
    assert json.loads(capsys.readouterr().out)["status"] == "schema"


def test_demo_needs_enough_precision():
    report, code = cli.run_text(json.dumps({"command": "demo-2adic", "P": [2, 0, 1], "params": {"M": 4}}))
    assert code == 4 and report["error"]["field"] == "params.M"


def test_precision_errors_map_to_three(monkeypatch):
    def boom(job, ring, P):
        raise PrecisionError("undecided")

    monkeypatch.setitem(cli.HANDLERS, "classify", boom)
    report, code = cli.run_text(json.dumps(dict(TWIST, command="classify")))
    assert code == 3 and report["error"]["kind"] == "PrecisionError"


def test_reports_are_deterministic():
    job = {"command": "breuil", "P": [2, 1], "A": [[[1], [0, 1]], [[0], [2, 1]]], "params": {"M": 32}}
    a = cli.dumps(cli.run_text(json.dumps(job))[0])
    b = cli.dumps(cli.run_text(json.dumps(job))[0])
    assert a == b


@pytest.mark.parametrize(
    "job,code",
    [
        ({"command": "classify", "P": [2, 1], "A": [[[2, 1]]]}, 0),
        ({"command": "dual", "P": [2, 1], "A": [[[2, 1]]]}, 0),
        ({"command": "conn-et", "P": [2, 1], "A": [[[1], [0, 1]], [[0], [2, 1]]], "params": {"M": 32}}, 0),
        ({"command": "mult-unip", "P": [2, 1], "A": [[[2, 1], [0, 1]], [[0], [1]]], "params": {"M": 32}}, 0),
        ({"command": "trivialize", "P": [2, 1], "A": [[[0], [1]], [[1], [0]]], "params": {"M": 32}}, 0),
        ({"command": "galois-etale", "P": [2, 1], "A": [[[0], [1]], [[1], [0]]], "params": {"M": 32}}, 0),
        ({"command": "galois-mult", "P": [2, 1], "A": [[[2, 1]]], "params": {"M": 32}}, 0),
        ({"command": "galois-etale", "P": [2, 1], "A": [[[2, 1]]], "params": {"M": 32}}, 2),
        ({"command": "homcount", "P": [3, 1], "A": [[[2]]], "params": {"p": 3, "N": 3, "M": 32}}, 0),
        ({"command": "demo-2adic", "P": [2, 0, 0, 1]}, 0),
        (
            {
                "command": "transport-exact",
                "P": [2, 1],
                "sub": [[[1]]],
                "A": [[[1], [0, 1]], [[0], [2, 1]]],
                "quotient": [[[2, 1]]],
                "inclusion": [[[2]], [[0]]],
                "projection": [[[0], [1]]],
            },
            2,
        ),
    ],
)
def test_commands(job, code):
    report, got = cli.run_text(json.dumps(job))
    assert got == code, report


def test_homcount_reports_deficiency():
    job = {"command": "homcount", "P": [3, 1], "A": [[[2]]], "params": {"p": 3, "N": 3, "M": 32}}
    report, _ = cli.run_text(json.dumps(job))
    assert report["result"]["count"] == 1 and report["result"]["deficient"]


def test_batch_with_jobs(tmp_path):
    jobs = [TWIST, dict(TWIST, A=[[[4, 4, 1]]]), {"command": "demo-2adic"}]
    out = tmp_path / "batch.json"
    code = cli.main(["--input", write(tmp_path, jobs), "--output", str(out), "--jobs", "2", "--seed", "7"])
    reports = json.loads(out.read_text())
    assert [r["exit_code"] for r in reports] == [0, 2, 0]
    assert code == 2


def test_seeded_breuil_checks_monodromy_uniqueness():
    job = {"command": "breuil", "P": [2, 1], "A": [[[1], [0, 1]], [[0], [2, 1]]], "params": {"M": 32}, "seed": 5}
    report, code = cli.run_text(json.dumps(job))
    assert code == 0 and report["result"]["seed_agreement"] and report["seed"] == 5
