from diffusion_bench import *


def make_row(**kwargs) -> ResultRow:
    fields = dict(
        experiment="figure1",
        scheme="EM",
        lam=10.0,
        h=0.1,
        N=100,
        n_traj=2000,
        seed=0,
        w2_dim1=0.1234567890123,
        w2_sliced=0.2,
        wall_ms=12.5,
        oracle_calls=200_000,
    )
    fields.update(kwargs)
    return ResultRow(**fields)


def test_csv_dict():
    record = make_row().to_csv_dict()

    assert list(record) == ResultRow.COLUMNS
    assert record["lambda"] == "10.0"
    assert record["N"] == "100"
    assert record["w2_dim1"] == "0.1234567890123"
    assert record["w2_gauss"] == ""
    assert "error" not in record


def test_columns():
    assert ResultRow.COLUMNS == [
        "experiment",
        "scheme",
        "lambda",
        "h",
        "N",
        "n_traj",
        "seed",
        "w2_dim1",
        "w2_sliced",
        "w2_gauss",
        "wall_ms",
        "oracle_calls",
    ]

    row = make_row(error="diverged", eps_sc=0.05)
    details = row.to_csv_dict(ResultRow.DETAIL_COLUMNS)
    assert details["error"] == "diverged"
    assert details["eps_sc"] == "0.05"


def test_csv_round_trip():
    for row in (make_row(), make_row(lam=None, w2_gauss=1 / 3), make_row(error="x")):
        record = row.to_csv_dict() | row.to_csv_dict(ResultRow.DETAIL_COLUMNS)
        assert ResultRow.from_csv_dict(record) == row


def test_failed():
    result = ExperimentResult("figure1", rows=[make_row(), make_row(error="boom")])

    assert not result.rows[0].failed
    assert result.rows[1].failed
    assert result.n_failed == 1


def test_bound_row():
    rc = RegularityConstants(m0=1.0, L0=1.0, M1=1.0)
    report = theorem_bound(SchemeKind.EM, rc, 2, 0.1, 10.0, eps_sc=1.0)
    row = BoundRow.from_report("figure1", report, lam=10.0)

    assert row.scheme == "EM"
    assert row.C1 == 5.0
    assert row.total == report.total
    assert row.N_for_eps is None

    record = row.to_csv_dict()
    assert list(record) == BoundRow.COLUMNS
    assert record["N_for_eps"] == ""
