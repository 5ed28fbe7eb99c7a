"""Built-in regression cases, written in the problem-file grammar.

Irrational inputs (the approach points and the derived tau) are computed
here and printed with ``repr`` so the text parses back to the same floats.
"""
import numpy as np

from ..batteries import remark31_epsilon, remark31_point

RATIO_KS = (4, 16, 64, 100)


def _vec(v):
    return "[" + ", ".join(repr(float(x)) for x in v) + "]"


def _mat(rows):
    return "[" + ", ".join(_vec(r) for r in rows) + "]"


def remark31_text():
    pts = [remark31_point(k) for k in RATIO_KS]
    expected = [np.sqrt(2.0 * k) for k in RATIO_KS]
    curve = [remark31_point(k) for k in np.geomspace(60, 20000, 40)]
    tau = 1.0 / remark31_epsilon()
    return f"""\
# Two planar sets whose distance functions admit no common local error bound at 0
set remark31_A1 = union(halfspaces([[1, 0], [0, -1]], [0, 0]), halfspaces([[1, 1], [-1, -1], [-1, 0]], [0, 0, 0]))
set remark31_A2 = intersect(halfspaces([[-1, 0], [0, -1]], [0, 0]), ball([1, 0], 1), ball([0, 1], 1))
func remark31_f = max(dist(remark31_A1), dist(remark31_A2))
analyze ratios with objective=remark31_f points={_mat(pts)} labels={_vec(RATIO_KS)} expected={_vec(expected)}
analyze modulus with objective=remark31_f xbar=[0, 0]
analyze certify31 with objective=remark31_f xbar=[0, 0]
analyze certify33 with objective=remark31_f xbar=[0, 0] tau={tau!r}
analyze ineq411 with objective=remark31_f xbar=[0, 0] tau=10 delta0=0.2 samples=1000 points={_mat(curve)}
"""


def lemma25_text():
    return """\
# x for x <= 0 and 1 for x > 0: the limiting epigraph inclusion fails at (0, 1)
func lemma25_step = step(1, 0, 1)
analyze lemma25 with objective=lemma25_step z=[0] r=1 probe=[0, -1]
analyze lemma25 with objective=lemma25_step z=[0] r=0.5 probe=[0, -1]
"""


def hoffman_demo_text():
    return """\
# Linear systems: sampled modulus against the exact Hoffman constant
func hoffman_wedge = max(affine([1, 1], 0), affine([-1, 0], 0))
func hoffman_orthant = max(affine([1, 0], 0), affine([0, 1], 0))
analyze hoffman with objective=hoffman_wedge
analyze modulus with objective=hoffman_wedge xbar=[0, 0]
analyze certify32 with objective=hoffman_orthant xbar=[-1, -1] tau=1
analyze certify32 with objective=hoffman_orthant xbar=[0, -1] tau=1
"""


def composite_demo_text():
    return """\
# max(y1, y2) composed with an invertible shear
func composite_g = max(affine([1, 0], 0), affine([0, 1], 0))
map composite_psi = components(affine([1, 1], 0), affine([0, 1], 0))
analyze certify34 with g=composite_g map=composite_psi xbar=[0, 0] tau=1.5
analyze certify34 with g=composite_g map=composite_psi xbar=[0, 0] tau=0.5
analyze equiv35 with g=composite_g map=composite_psi xbar=[0, 0]
"""


BUILTIN_CASES = {
    "remark31": remark31_text,
    "lemma25": lemma25_text,
    "hoffman-demo": hoffman_demo_text,
    "composite-demo": composite_demo_text,
}
