"""Acceptance gate: every criterion runs at its stated tolerance and prints
one pass/fail line.  The checks themselves live in normlab.verify so the CLI
`verify` subcommand exercises the identical code paths."""

import pytest

from normlab.coeffs import Coeffs
from normlab import verify


def _gate(result):
    print("\n%s: %s" % (result.check_id, "PASS" if result.ok else "FAIL"))
    if not result.ok:
        rows = result.details.get("rows", [])
        bad = [r for r in rows if not r.get("ok", True)]
        pytest.fail("%s failed: %s" % (result.check_id,
                                       bad[:3] or result.details))


def test_ac1_swap_operator_constants():
    _gate(verify.check_ac1())


def test_ac2_constrained_max():
    _gate(verify.check_ac2())


def test_ac3_rank_one_resolvent_law():
    _gate(verify.check_ac3())


def test_ac4_pseudospectrum_radii():
    _gate(verify.check_ac4())


def test_ac5_minkowski_identities():
    _gate(verify.check_ac5())


def test_ac5_cone_form_cross_check():
    # independent second-order-cone route for the same identities at N <= 16
    cvxpy = pytest.importorskip("cvxpy")
    from test_convex import cone_oracle
    from normlab import convex

    for n in (1, 4, 9):
        for u in (Coeffs.basis(2) + Coeffs.basis(n + 2),
                  Coeffs.basis(1) + Coeffs.basis(2) + Coeffs.basis(n + 2)):
            v, _ = convex.minkowski_norm(u, 13)
            assert v == pytest.approx(cone_oracle(u, 13), abs=1e-5)
    print("\nAC5-cone-oracle: PASS")


def test_ac6_norm_squeeze():
    _gate(verify.check_ac6())


def test_ac7_planting_certificates():
    _gate(verify.check_ac7())


def test_ac8_oracle_equivalence():
    _gate(verify.check_ac8())


def test_ac9_p_space_defect():
    _gate(verify.check_ac9())


def test_ac10_singularizing_perturbation():
    _gate(verify.check_ac10())
