import pytest

from wmds.errors import WMDSError
from wmds.exact_algebra import LaurentPoly, RatFunc, rat_equals
from wmds.residues import (
    orthogonal_zeta_eval,
    residue_at,
    residue_function,
    residue_invariant_report,
    all_checks_pass,
    verify_theorem_A,
    verify_theorem_A_g2,
)
from wmds.root_system import build_root_system


def test_residue_of_simple_pole():
    # (1 - u x)^-1 (1 + x): residue at x = 1/u is 1 + 1/u
    f = RatFunc.from_factors(LaurentPoly.from_terms(1, {(0, 0): 1, (0, 1): 1}), [(1, (1, 1))])
    res = residue_at(f, 0)
    assert rat_equals(res, RatFunc.from_poly(LaurentPoly.from_terms(1, {(0, 0): 1, (-1, 0): 1})))


@pytest.mark.parametrize("label,node", [("A2", 0), ("A3", 1), ("B3", 2), ("C3", 0), ("D4", 1)])
def test_theorem_A(label, node):
    assert verify_theorem_A(build_root_system(label), node).equal


@pytest.mark.parametrize("node", [0, 1])
def test_theorem_A_g2(node):
    assert verify_theorem_A_g2(node).equal


def test_g2_twist_is_needed():
    rs = build_root_system("G2")
    plain = orthogonal_zeta_eval(rs, 0, u_power=1)
    assert not rat_equals(residue_function(rs, 0), plain)


def test_long_node_rejected():
    with pytest.raises(WMDSError):
        verify_theorem_A(build_root_system("B3"), 0)


@pytest.mark.parametrize("label,node", [("A3", 0), ("C3", 1), ("D4", 0)])
def test_residue_invariants(label, node):
    assert all_checks_pass(residue_invariant_report(build_root_system(label), node))
