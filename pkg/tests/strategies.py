"""Hypothesis strategies for random model parameters."""

from hypothesis import strategies as st

from covigov import GameParams, OpinionParams
from covigov.game import BASELINE

_money = st.floats(0.0, 5000.0, allow_nan=False, allow_infinity=False)
_unit = st.floats(0.0, 1.0, allow_nan=False, allow_infinity=False)


@st.composite
def game_params(draw):
    vals = {k: draw(_unit if k in ("phi", "beta") else _money) for k in BASELINE}
    # strict orderings required by the parameter record
    vals["Cm1"] = vals["Cm2"] + draw(st.floats(1.0, 3000.0))
    vals["Cg1"] = vals["Cg2"] + draw(st.floats(1.0, 3000.0))
    return GameParams(**vals)


states = st.tuples(_unit, _unit, _unit, _unit)
interior = st.tuples(*[st.floats(0.05, 0.95)] * 4)


@st.composite
def opinion_params(draw):
    z1, m1 = draw(_unit), draw(_unit)
    n1 = draw(st.floats(0.05, 1.0))
    return OpinionParams(
        A=draw(st.floats(0.1, 5.0)),
        sigma=draw(_unit),
        theta=draw(st.floats(0.01, 1.0)),
        z1=z1,
        z2=1.0 - z1,
        m1=m1,
        m2=1.0 - m1,
        a1=draw(_unit),
        a2=draw(_unit),
        k=draw(st.floats(0.01, 1.0)),
        n1=n1,
        n2=draw(st.floats(0.0, 0.99)) * n1,
    )


compartments = st.tuples(*[st.floats(0.0, 2000.0)] * 5)
