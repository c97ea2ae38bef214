import json
import math

import numpy as np
import pytest

from normlab.coeffs import Coeffs
from normlab import spaces as sp
from normlab import operators as op
from normlab import opnorm
from normlab import pseudospectrum as ps

INF = math.inf
ZERO = op.ScalarMul(0.0)


# -- resolvent norms -----------------------------------------------------------

def test_zero_operator_resolvent():
    assert ps.resolvent_norm(ZERO, sp.Lp(2), 2.0, 8) == \
        pytest.approx(0.5, abs=1e-12)


def test_singular_section_is_infinite():
    D = op.Diagonal("explicit", (1.0, 2.0))
    assert ps.resolvent_norm(D, sp.Lp(2), 1.0, 2) == INF


def test_tc0_resolvent_law():
    for z in (-1.0, 2.0, 0.5 + 1.0j):
        val = ps.resolvent_norm(op.Tc0(), sp.C0(), z, 30)
        assert val == pytest.approx(ps.rank_one_resolvent_law(z), rel=1e-4)


def test_tl1_resolvent_law():
    val = ps.resolvent_norm(op.Tl1(), sp.L1(), 3.0, 30)
    assert val == pytest.approx(4.0 / 9.0, rel=1e-4)


def test_truncated_tc0_resolvent_exact_section_value():
    # on the N-section the law picks up the finite tail sum 1 - 2^{1-N}
    N, z = 12, -1.0
    val = ps.resolvent_norm(op.Tc0(), sp.C0(), z, N)
    expected = 1.0 + (1.0 - 2.0 ** (1 - N))
    assert val == pytest.approx(expected, abs=1e-12)


# -- classification ------------------------------------------------------------

def test_classify_level_on_rank_one_boundary():
    # at eps = 1/2 the law gives 1 + 1 = 2 = 1/eps exactly on |z| = 1
    assert ps.classify_point(op.Tc0(), sp.C0(), 1.0, 0.5, 40,
                             band=1e-6) == "level"
    assert ps.classify_point(op.Tc0(), sp.C0(), -1.5, 0.5, 40) == "outside"
    assert ps.classify_point(op.Tc0(), sp.C0(), 0.5, 0.5, 40) == "strict"


def test_classify_zero_operator():
    assert ps.classify_point(ZERO, sp.Lp(2), 3.0, 1.0, 4) == "outside"
    assert ps.classify_point(ZERO, sp.Lp(2), 0.5, 1.0, 4) == "strict"
    with pytest.raises(ValueError):
        ps.classify_point(ZERO, sp.Lp(2), 1.0, -1.0, 4)


# -- grids ---------------------------------------------------------------------

def test_grid_scan_zero_operator_disc():
    grid = ps.grid_scan(ZERO, sp.Lp(2), (-2, 2, -2, 2), 41, 1.0, 4)
    cell = 4.0 / 40
    assert abs(ps.strict_radius(grid) - 1.0) <= cell
    # inclusion: strict cells stay strict when eps grows
    bigger = ps.grid_scan(ZERO, sp.Lp(2), (-2, 2, -2, 2), 41, 1.5, 4)
    for (z1, _, c1), (z2, _, c2) in zip(grid.cells(), bigger.cells()):
        if c1 == "strict":
            assert c2 in ("strict", "level")


def test_grid_rejects_res_one():
    with pytest.raises(ValueError):
        ps.grid_scan(ZERO, sp.Lp(2), (-1, 1, -1, 1), 1, 1.0, 4)


def test_grid_csv_layout():
    grid = ps.grid_scan(ZERO, sp.Lp(2), (-1, 1, -1, 1), 3, 1.0, 4)
    lines = grid.to_csv().strip().split("\n")
    assert lines[0] == "re,im,resnorm,class"
    assert len(lines) == 10
    # row-major from (re_min, im_min)
    first = lines[1].split(",")
    assert float(first[0]) == -1.0 and float(first[1]) == -1.0
    second = lines[2].split(",")
    assert float(second[0]) == 0.0 and float(second[1]) == -1.0


def test_grid_json_schema():
    grid = ps.grid_scan(ZERO, sp.Lp(2), (-1, 1, -1, 1), 3, 1.0, 4)
    obj = json.loads(grid.to_json())
    assert obj["schema_version"] == 1
    assert len(obj["cells"]) == 9
    assert all(len(c) == 4 for c in obj["cells"])


def test_diag_d_grid_spot_checks():
    D = op.catalog_build("diag_d")
    grid = ps.grid_scan(D, sp.Lp(2), (0, 1.2, -0.3, 0.3), 13, 0.1, 12)
    cells = list(grid.cells())
    for z, r, cls in cells[::17]:
        direct = ps.resolvent_norm(D, sp.Lp(2), z, 12)
        if direct == INF:
            assert r == INF
        else:
            assert r == pytest.approx(direct, rel=1e-10)
        # diagonal resolvent norm is 1/dist(z, entries)
        if direct != INF:
            dist = min(abs(z - D.entry(n)) for n in range(12))
            assert r == pytest.approx(1.0 / dist, rel=1e-9)


# -- planting certificates -----------------------------------------------------

def test_att1_zero_operator():
    cert = ps.att1_perturbation(ZERO, sp.Lp(2), 0.5, 1.0, 8)
    assert cert.residual < 1e-12
    assert cert.norm_A == pytest.approx(0.5, abs=1e-12)
    chk = ps.verify_cert(ZERO, sp.Lp(2), cert)
    assert chk["ok"]


def test_att1_tc0():
    cert = ps.att1_perturbation(op.Tc0(), sp.C0(), -1.0, 0.51, 20)
    assert cert.residual < 1e-10
    assert cert.norm_A <= 0.51 + 1e-10
    assert ps.verify_cert(op.Tc0(), sp.C0(), cert)["ok"]


def test_att1_eps_too_small_rejected():
    with pytest.raises(ValueError):
        ps.att1_perturbation(op.Tc0(), sp.C0(), 3.0, 0.1, 20)


def test_att1_simple_s_shifted():
    T = op.Sum((op.SimpleS(2.0, 4.0), op.ScalarMul(-1.0)))
    space = sp.QSumLp(4.0, 2.0)
    z = -1.0 + 0.3
    cert = ps.att1_perturbation(T, space, z, 5.0, 10)
    assert cert.residual < 1e-10
    assert ps.verify_cert(T, space, cert)["ok"]


def test_cert_json_round_trip():
    cert = ps.att1_perturbation(ZERO, sp.Lp(2), 0.3, 1.0, 6)
    obj = json.loads(cert.to_json())
    assert obj["schema_version"] == 1
    A = op.operator_from_json_obj(obj["A"])
    assert np.allclose(op.truncate_matrix(A, 6),
                       op.truncate_matrix(cert.A, 6))


# -- singularizing perturbations ----------------------------------------------

def test_lp111_scalar():
    res = ps.lp111_perturbation(op.ScalarMul(2.0), sp.Lp(2.0), 16)
    assert res.case == "fixed"
    assert res.c == pytest.approx(2.0, abs=1e-10)
    assert res.new_inf < 1e-10
    normS = opnorm.operator_norm(res.S, sp.Lp(2.0), sp.Lp(2.0), 16).value
    assert normS <= res.c + 1e-8


def test_lp111_simple_s():
    space = sp.QSumLp(4.0, 2.0)
    res = ps.lp111_perturbation(op.SimpleS(2.0, 4.0), space, 24)
    assert res.case == "fixed"
    assert res.new_inf < 1e-6
    normS = opnorm.operator_norm(res.S, space, space, 24).value
    assert normS <= res.c + 1e-8


def test_lp111_escaping_diagonal():
    res = ps.lp111_perturbation(op.Diagonal("one_plus_inv"), sp.Lp(2.0), 32)
    assert res.case == "escaping"
    assert res.new_inf < 1e-10
    normS = opnorm.operator_norm(res.S, sp.Lp(2.0), sp.Lp(2.0), 32).value
    assert normS <= res.c + 1e-8
    # trace of bottom-of-sphere values decreases toward the infimum 1
    values = [v for _, v in res.trace]
    assert values == sorted(values, reverse=True)


# -- strict vs closure ---------------------------------------------------------

def test_sigma0_zero_operator_levels_certified():
    report = ps.sigma0_vs_sigma_check(ZERO, sp.Lp(2), 1.0, (-1.5, 1.5, -1.5,
                                                            1.5), 13, 6)
    assert not report.level_uncertified
    for _, norm_A in report.level_certified:
        assert norm_A <= 1.0 + 1e-10
    obj = report.to_json_obj()
    assert obj["schema_version"] == 1


def test_sigma0_inclusion_counts():
    report = ps.sigma0_vs_sigma_check(op.Tc0(), sp.C0(), 0.5,
                                      (-2.5, 2.5, -2.5, 2.5), 11, 16)
    total = (report.strict_count + report.outside_count
             + len(report.level_certified) + len(report.level_uncertified))
    assert total == 121
