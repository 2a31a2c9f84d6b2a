import logging
import math

from pytest import mark, raises

from diffusion_bench import *

UNIT = RegularityConstants(m0=1.0, L0=1.0, M1=1.0, M2=1.0)


def test_first_order_constants():
    assert scheme_constants(SchemeKind.EM, UNIT, 2, 0.1) == (5.0, 2.0)
    assert scheme_constants(SchemeKind.EI, UNIT, 2, 0.1) == (4.0, 2.0)

    C1, C2 = scheme_constants(SchemeKind.REI, UNIT, 2, 0.1)
    assert math.isclose(C1, 4.0 / math.sqrt(3.0))
    assert C2 == 6.0

    C1, _ = scheme_constants(SchemeKind.REM, UNIT, 3, 0.1)
    # (√(d/3)·L_max + 1/(2√3)) / (m_min - 1/2) with d = 3
    assert math.isclose(C1, 4.0 + 1.0 / math.sqrt(3.0))


def test_so_constants():
    C1, C2 = scheme_constants(SchemeKind.SO, UNIT, 2, 0.1)
    growth = math.exp(1.5 * 0.1)

    # √d·L_max^{3/2} = √2·2√2 = 4
    assert math.isclose(C1, 8.0 * growth)
    assert math.isclose(C2, 2.0 * growth)


def test_weak_convexity_rejected():
    rc = RegularityConstants(m0=0.4, L0=1.0)

    with raises(BoundError):
        scheme_constants(SchemeKind.EM, rc, 2, 0.1)

    with raises(BoundError):
        theorem_bound(SchemeKind.EI, rc, 2, 0.1, 10.0)


def test_terms():
    report = theorem_bound(SchemeKind.EM, UNIT, 2, 0.1, 10.0, eps_sc=0.01, X0_norm=3.0)

    assert report.C1 == 5.0
    assert math.isclose(report.init_term, 3.0 * math.exp(-10.0))
    assert math.isclose(report.disc_term, 5.0 * math.sqrt(0.2))
    assert math.isclose(report.score_term, 0.02)
    assert math.isclose(
        report.total, report.init_term + report.disc_term + report.score_term
    )


def test_so_score_term():
    report = theorem_bound(
        SchemeKind.SO, UNIT, 2, 0.09, 10.0, eps_sc=0.1, eps_L=0.3, eps_M=0.2
    )

    expected = report.C2 * (0.1 + (2.0 / 3.0) * 0.3 * 0.3 + 0.5 * 0.09 * 0.2)
    assert math.isclose(report.score_term, expected)
    assert math.isclose(report.disc_term, report.C1 * 0.09)


def test_steps_for_eps():
    em = theorem_bound(SchemeKind.EM, UNIT, 2, 0.1, 10.0, eps_target=0.1)
    em_fine = theorem_bound(SchemeKind.EM, UNIT, 2, 0.1, 10.0, eps_target=0.05)
    so = theorem_bound(SchemeKind.SO, UNIT, 2, 0.1, 10.0, eps_target=0.1)

    assert em.N_for_eps is not None and so.N_for_eps is not None
    assert em_fine.N_for_eps > em.N_for_eps
    assert so.N_for_eps < em.N_for_eps


def test_score_error_exceeds_budget(caplog):
    with caplog.at_level(logging.WARNING):
        report = theorem_bound(
            SchemeKind.EI, UNIT, 2, 0.1, 10.0, eps_sc=0.1, eps_target=0.1
        )

    assert report.N_for_eps is None
    assert "score error alone" in caplog.text


@mark.parametrize(
    "scheme, missing", [(SchemeKind.EM, "M1"), (SchemeKind.SO, "M2")]
)
def test_missing_time_constants(scheme: SchemeKind, missing: str, caplog):
    rc = RegularityConstants(m0=1.0, L0=1.0)

    with caplog.at_level(logging.WARNING):
        theorem_bound(scheme, rc, 2, 0.1, 10.0)

    assert f"{missing} not supplied" in caplog.text
