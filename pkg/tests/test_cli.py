import json

from cuspidal.classgroup import ClassGroupResult
from cuspidal.cli import main, table_row
from cuspidal.reference import reference_order, reference_table


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_order_plain(capsys):
    code, out, _ = run(capsys, "order", "-p", "5")
    assert code == 0 and out.strip() == "1"


def test_order_factored(capsys):
    code, out, _ = run(capsys, "order", "-p", "13", "--factor")
    assert code == 0 and out.strip() == "7 * 13^2"


def test_order_rejects_composite(capsys):
    code, _, err = run(capsys, "order", "-p", "4")
    assert code == 2 and "prime >= 5" in err


def test_order_rejects_small_k(capsys):
    code, _, err = run(capsys, "order", "-p", "5", "-k", "0")
    assert code == 2


def test_size_guard_and_force(capsys):
    code, _, err = run(capsys, "order", "-p", "101", "-k", "2")
    assert code == 2 and "--force" in err
    # forcing is possible but would be slow; just check the guard message


def test_order_json_round_trip(capsys):
    code, out, _ = run(capsys, "order", "-p", "17", "--json")
    assert code == 0
    data = json.loads(out)
    res = ClassGroupResult.from_json_dict(data)
    assert res.order == 2**4 * 3 * 17**3
    assert res.to_json_dict() == data


def test_usage_error_exit_code(capsys):
    assert main(["order"]) == 2  # missing -p
    assert main(["nonsense"]) == 2
    assert main(["--help"]) == 0
    capsys.readouterr()


def test_genus_output(capsys):
    code, out, _ = run(capsys, "genus", "-p", "5")
    assert code == 0
    assert out.splitlines() == ["genus 0", "cusps 2"]
    code, out, _ = run(capsys, "genus", "-p", "7")
    assert out.splitlines() == ["genus 0", "cusps 3"]
    code, out, _ = run(capsys, "genus", "-p", "11")
    assert out.splitlines() == ["genus 1", "cusps 5"]


def test_table_matches_reference_prefix(capsys):
    code, out, _ = run(capsys, "table", "--pmax", "23")
    assert code == 0
    table = reference_table()
    expected = []
    for p in (5, 7, 11, 13, 17, 19, 23):
        expected.append(f"{p}\t{reference_order(p)}\t{table[p]}")
    assert out.splitlines() == expected


def test_table_parallel_deterministic(capsys):
    code1, out1, _ = run(capsys, "table", "--pmax", "19")
    code2, out2, _ = run(capsys, "table", "--pmax", "19", "--parallel", "4")
    assert code1 == code2 == 0
    assert out1 == out2


def test_table_guard(capsys):
    code, _, err = run(capsys, "table", "--pmax", "103")
    assert code == 2 and "--force" in err


def test_table_json(capsys):
    code, out, _ = run(capsys, "table", "--pmax", "11", "--json")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert [r["p"] for r in rows] == [5, 7, 11]
    assert rows[2]["order"] == "11"


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "-p", "11")
    assert code == 0
    assert "FAIL" not in out and "PASS" in out


def test_verify_analytic_p5(capsys):
    code, out, _ = run(capsys, "verify", "-p", "5", "--analytic")
    assert code == 0
    assert "dihedral sign" in out and "FAIL" not in out


def test_verify_eps_independence_p13(capsys):
    code, out, _ = run(capsys, "verify", "-p", "13", "--eps-independence")
    assert code == 0 and "theta independent of eps" in out


def test_crosscheck_bundled(capsys):
    code, out, _ = run(capsys, "crosscheck")
    assert code == 0
    assert "p=11: order 11" in out
    assert "ratio 4" in out and "ratio 1" in out


def test_crosscheck_single_level(capsys):
    code, out, _ = run(capsys, "crosscheck", "-p", "31")
    assert code == 0
    assert "newform gcd product" in out


def test_crosscheck_missing_file(capsys):
    code, _, err = run(capsys, "crosscheck", "/no/such/file.csv")
    assert code == 2


def test_crosscheck_user_file_reports_bad_rows(capsys, tmp_path):
    f = tmp_path / "user.csv"
    f.write_text("p,q,label,value\n11,24,J,5\n11,23,J,33\n")
    code, out, err = run(capsys, "crosscheck", str(f))
    assert code == 0  # user data is reported, not judged
    assert "rejected row" in err
    assert "p=11" in out


def test_rho_budget_env(capsys, monkeypatch):
    monkeypatch.setenv("CUSPIDAL_RHO_BUDGET", "not-a-number")
    code, _, err = run(capsys, "order", "-p", "5")
    assert code == 2 and "CUSPIDAL_RHO_BUDGET" in err
    monkeypatch.setenv("CUSPIDAL_RHO_BUDGET", "1000")
    code, out, _ = run(capsys, "order", "-p", "13", "--factor")
    assert code == 0 and out.strip() == "7 * 13^2"


def test_table_row_format():
    res = ClassGroupResult(
        p=13, k=1, order=1183, cusps=6, epsilon=7, generator=2
    )
    assert table_row(res) == "13\t1183\t1183"


def test_failed_check_maps_to_exit_1(capsys, monkeypatch):
    from cuspidal import cli
    from cuspidal.verify import Check

    monkeypatch.setattr(
        cli, "algebraic_checks", lambda p, k: [Check("forced failure", False, "")]
    )
    code, out, _ = run(capsys, "verify", "-p", "11")
    assert code == 1 and "FAIL" in out


def test_internal_violation_maps_to_exit_3(capsys, monkeypatch):
    from cuspidal import cli
    from cuspidal.errors import InvariantViolation

    def boom(*args, **kwargs):
        raise InvariantViolation("forced")

    monkeypatch.setattr(cli, "compute_class_group", boom)
    code, _, err = run(capsys, "order", "-p", "5")
    assert code == 3 and "invariant violation" in err
