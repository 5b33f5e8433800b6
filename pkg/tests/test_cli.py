import io
import json
import sys

import pytest

from latdisc import cli


def run_cli(argv, tmp_path=None):
    buf = io.StringIO()
    old = sys.stdout
    sys.stdout = buf
    try:
        code = cli.main(argv)
    finally:
        sys.stdout = old
    return code, buf.getvalue()


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_order_p3_example(tmp_path):
    path = write(tmp_path, "g.json", {"p": 3, "rows": [[3, 0, 0], [0, 9, 0], [0, 0, 9]]})
    code, out = run_cli(["order", path, "--n", "2"])
    assert code == 0
    doc = json.loads(out)
    assert doc["order"] == "3888"


def test_order_verify_attaches_closure(tmp_path):
    path = write(tmp_path, "g.json", {"p": 3, "rows": [[3, 0, 0], [0, 9, 0], [0, 0, 9]]})
    code, out = run_cli(["order", path, "--n", "2", "--verify"])
    doc = json.loads(out)
    assert code == 0 and doc["verified"] is True and doc["closure_order"] == "3888"


def test_disc_order_intro(tmp_path):
    path = write(tmp_path, "g.json", {"rows": [[8, -4, 0], [-4, 8, 0], [0, 0, 8]]})
    code, out = run_cli(["disc-order", path])
    assert code == 0
    doc = json.loads(out)
    assert doc["primes"] == {"2": "96", "3": "2"}
    assert doc["order"] == "192"


def test_byte_stability(tmp_path):
    path = write(tmp_path, "g.json", {"p": 2, "rows": [[1, 0], [0, 2]]})
    outs = {run_cli(["gens", path, "--n", "2"])[1] for _ in range(3)}
    assert len(outs) == 1


def test_gens_counts(tmp_path):
    path = write(
        tmp_path,
        "g.json",
        {"p": 2, "rows": [[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 4]]},
    )
    code, out = run_cli(["gens", path, "--n", "2", "--verify"])
    assert code == 0
    doc = json.loads(out)
    assert len(doc["generators"]) == 12
    assert doc["closure_order"] == "2048"


def test_jordan_report(tmp_path):
    path = write(tmp_path, "g.json", {"p": 2, "rows": [[8, -4], [-4, 8]]})
    code, out = run_cli(["jordan", path])
    doc = json.loads(out)
    assert code == 0
    assert [b["scale"] for b in doc["blocks"]] == [2]
    assert doc["blocks"][0]["parity"] == "even"


def test_mass_report(tmp_path):
    path = write(tmp_path, "g.json", {"p": 2, "rows": [[1, 0], [0, 4]]})
    code, out = run_cli(["mass", path])
    doc = json.loads(out)
    assert code == 0
    assert doc["n"] == 4
    assert int(doc["p_mass"]["den"]) >= 1


def test_lift_roundtrip(tmp_path):
    path = write(
        tmp_path,
        "l.json",
        {
            "p": 3,
            "F": [[1, 1, 0], [-3, 1, 0], [0, 0, 1]],
            "G": [[3, 0, 0], [0, 9, 0], [0, 0, 9]],
            "Z": [[3, 0, 0], [0, 9, 0], [0, 0, 9]],
        },
    )
    code, out = run_cli(["lift", path, "--a", "1", "--b", "3"])
    assert code == 0
    doc = json.loads(out)
    assert doc["a"] == 1 and doc["b"] == 3 and len(doc["rows"]) == 3


def test_lift_rejects_bad_input(tmp_path):
    path = write(
        tmp_path,
        "l.json",
        {"p": 3, "F": [[1, 1], [0, 1]], "G": [[1, 0], [0, 9]], "Z": [[1, 0], [0, 9]]},
    )
    code, out = run_cli(["lift", path, "--a", "1", "--b", "3"])
    assert code == 1
    assert json.loads(out)["error"]["kind"] == "NotApproximate"


def test_usage_errors(tmp_path):
    empty = write(tmp_path, "e.json", {"rows": []})
    code, out = run_cli(["order", empty, "--p", "2"])
    assert code == 2
    assert json.loads(out)["error"]["kind"] == "usage"
    code, _ = run_cli([])
    assert code == 2
    missing_p = write(tmp_path, "m.json", {"rows": [[1]]})
    code, out = run_cli(["order", missing_p])
    assert code == 2


def test_degenerate_is_domain_error(tmp_path):
    path = write(tmp_path, "g.json", {"p": 2, "rows": [[1, 1], [1, 1]]})
    code, out = run_cli(["order", path])
    assert code == 1


def test_verify_command_dispatch(tmp_path):
    z = write(tmp_path, "z.json", {"rows": [[8, -4, 0], [-4, 8, 0], [0, 0, 8]]})
    code, out = run_cli(["verify", z])
    doc = json.loads(out)
    assert code == 0 and doc["verified"] is True
