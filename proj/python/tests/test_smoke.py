import math

import pytest

import pacq

Q01 = (
    "SELECT l_returnflag, l_linestatus, sum(l_quantity) AS sum_qty, count(*) AS n "
    "FROM lineitem WHERE l_shipdate <= DATE '1998-09-02' "
    "GROUP BY l_returnflag, l_linestatus ORDER BY l_returnflag, l_linestatus"
)


@pytest.fixture(scope="module")
def db():
    return pacq.Database.mini_tpch(rows=3000, seed=1)


def test_tables(db):
    assert {"customer", "orders", "lineitem", "nation"} <= set(db.tables())


def test_run_matches_oracle(db):
    for seed in (1, 2):
        run = db.run(Q01, seed=seed)
        assert run["classification"] == "Rewritable"
        assert run["columns"] == ["l_returnflag", "l_linestatus", "sum_qty", "n"]
        assert run["rows"] == db.oracle(Q01, seed=seed)["rows"]


def test_seed_changes_noise(db):
    assert db.run(Q01, seed=1)["rows"] != db.run(Q01, seed=2)["rows"]


def test_rejection_is_a_value(db):
    out = db.run("SELECT c_name FROM customer")
    assert out["classification"] == "Rejected"
    assert out["reason"] == "ProtectedColumnRelease"
    assert out["rows"] == []


def test_passthrough_equals_exact(db):
    sql = "SELECT n_name FROM nation ORDER BY n_name"
    assert db.run(sql)["rows"] == db.exact(sql)["rows"]


def test_errors_carry_code(db):
    with pytest.raises(pacq.PacError) as e:
        db.run("SELECT FROM")
    assert e.value.code == "SyntaxError"


def test_explain_and_diff(db):
    assert "JoinAdded" in db.explain(Q01)
    d = db.diff(Q01, key_cols=2, seed=3)
    assert d["recall"] == 1.0 and d["precision"] == 1.0


def test_helpers():
    assert abs(pacq.mia_bound(0.5, 0.25) - 0.838) < 0.002
    assert pacq.mia_bound(0.3, 0.0) == pytest.approx(0.3, abs=1e-9)
    h = pacq.pac_hash(42, 7)
    assert bin(h).count("1") == 32
    assert len(pacq.gen_values("uniform_int", 100, 1)) == 100
    assert math.isclose(pacq.DEFAULT_MI, 1 / 128)
