from fractions import Fraction

import pytest

from windingseries.cycles import L0, admissible_d, cycle_integral, generating_series, trace, winding_index
from windingseries.modfun import JLOG, ThirdKindForm
from windingseries.qforms import PreconditionError, QuadForm
from windingseries.verify import class_number, unit_count


@pytest.mark.parametrize("Delta", [-3, -4, -7, -8, -11, -15, -20, -23, -24, -47, -71])
def test_L0_class_number_oracle(Delta):
    assert L0(Delta) == Fraction(2 * class_number(Delta), unit_count(Delta))


def test_L0_rejects_non_fundamental():
    with pytest.raises(PreconditionError):
        L0(-12)


def test_admissible_indices():
    assert admissible_d(-3, 1, 20) == [3, 4, 7, 8, 11, 12, 15, 16, 19, 20]
    assert all(d % 4 in (0, 3) for d in admissible_d(-4, 1, 30))


@pytest.mark.parametrize("f", [QuadForm(1, 1, -1), QuadForm(1, 0, -1), QuadForm(1, 0, -3), QuadForm(0, 3, 1),
                               QuadForm(1, 3, 2), QuadForm(2, 1, -1)])
def test_quadrature_matches_argument_tracking(f):
    q = cycle_integral(JLOG, f).index
    w = winding_index(f)
    assert abs(q - w) < 1e-8


def test_index_is_half_integral_on_closed_cycles():
    for f in (QuadForm(1, 0, -3), QuadForm(1, 1, -1), QuadForm(1, 0, -1)):
        x = 2 * cycle_integral(JLOG, f).index
        assert abs(x - round(x.real)) < 1e-8


def test_pole_on_cycle_is_recorded():
    # [1, 0, -1] is the unit circle through i
    r = cycle_integral(JLOG, QuadForm(1, 0, -1))
    assert len(r.pv_corrections) == 1


def test_sign_flips_index():
    f = QuadForm(1, 0, -3)
    assert abs(cycle_integral(ThirdKindForm(-1), f).index + cycle_integral(JLOG, f).index) < 1e-9


def test_trace_values_delta_minus_three():
    # reference values reproduced by both the quadrature and the argument-tracking routes
    expected = {3: Fraction(-10, 3), 4: -6, 7: -8, 8: -8, 11: -4, 12: Fraction(-16, 3)}
    for d, val in expected.items():
        assert abs(trace(-3, 1, 1, d, JLOG, 1e-9).trace - float(val)) < 1e-7


def test_generating_series_table():
    tab = generating_series(-4, 0, 1, JLOG, d_max=8)
    assert tab.constant == Fraction(1, 2)
    assert set(tab.entries) <= set(admissible_d(-4, 1, 8))
    for e in tab.entries.values():
        assert abs(e.trace - e.trace_winding) < 1e-7
    js = tab.to_json()
    assert js["constant"] == "1/2" and [row["d"] for row in js["entries"]] == sorted(tab.entries)


def test_trace_requires_positive_discriminant():
    with pytest.raises(PreconditionError):
        cycle_integral(JLOG, QuadForm(1, 0, 1))
