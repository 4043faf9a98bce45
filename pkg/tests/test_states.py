import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ductflow.eos import EosParams, mixture_params, sound_speed
from ductflow.errors import InadmissibleStateError, NoRootError
from ductflow.states import (
    ConservativeState,
    FlowRegime,
    PrimitiveState,
    StationaryInvariants,
    cons_to_prim,
    cons_to_prim_arrays,
    flow_regime,
    prim_to_cons,
    prim_to_cons_arrays,
    prim_to_stationary,
    sonic_density,
    stationary_residuals,
    stationary_to_prim,
)

EOS = EosParams(1.4, 0.0, 1.6, 2.0)
LEFT = PrimitiveState(2.0, 0.5, 1.0, 1.0, 1.5)
RIGHT = PrimitiveState(3.230672602, -0.44425659, 12.0, 0.0, 1.0)


def test_cons_to_prim_examples():
    y = cons_to_prim(ConservativeState(3.0, 1.5, 4.125, 3.0, 1.5), EOS)
    assert y.as_array() == pytest.approx([2.0, 0.5, 1.0, 1.0, 1.5], rel=1e-15)
    y = cons_to_prim(ConservativeState(3.0, 0.0, 3.75, 3.0, 1.5), EOS)
    assert y.as_array() == pytest.approx([2.0, 0.0, 1.0, 1.0, 1.5], rel=1e-15)


def test_prim_to_cons_examples():
    assert prim_to_cons(LEFT, EOS).as_array() == pytest.approx([3.0, 1.5, 4.125, 3.0, 1.5], rel=1e-15)
    # e = 1 for p = 0.4 in the ideal fluid
    assert prim_to_cons(PrimitiveState(1.0, 0.0, 0.4, 1.0, 1.0), EOS).as_array() == pytest.approx([1, 0, 1, 1, 1])
    w = prim_to_cons(RIGHT, EOS)
    assert w.a_rho == pytest.approx(3.230673, abs=1e-6)
    assert w.a_rho_u == pytest.approx(RIGHT.rho * RIGHT.u, rel=1e-15)
    assert w.a_rho_u == pytest.approx(-1.435247, abs=1e-6)
    assert w.a_rho_phi == 0.0


def test_prim_to_stationary_examples():
    z = prim_to_stationary(LEFT, EOS)
    assert (z.a, z.phi) == (1.5, 1.0)
    assert z.s == pytest.approx(2**-1.4, rel=1e-15)
    assert z.q == pytest.approx(1.5, rel=1e-15)
    assert z.h_total == pytest.approx(1.875, rel=1e-15)

    z = prim_to_stationary(RIGHT, EOS)
    rho, u = RIGHT.rho, RIGHT.u
    h = 1.6 * 14.0 / (0.6 * rho)
    assert z.s == pytest.approx(14.0 * rho**-1.6, rel=1e-14)
    assert z.q == pytest.approx(rho * u, rel=1e-15)
    assert z.h_total == pytest.approx(h + 0.5 * u * u, rel=1e-14)

    z = prim_to_stationary(LEFT.replace(u=0.0), EOS)
    assert z.q == 0.0 and z.h_total == pytest.approx(1.75, rel=1e-15)


def test_invalid_states_rejected():
    with pytest.raises(InadmissibleStateError):
        PrimitiveState(-1.0, 0.0, 1.0, 1.0, 1.0)
    with pytest.raises(InadmissibleStateError):
        PrimitiveState(1.0, 0.0, 1.0, 1.2, 1.0)
    with pytest.raises(InadmissibleStateError):
        ConservativeState(1.0, 0.0, 1.0, 1.5, 1.0)
    with pytest.raises(InadmissibleStateError):
        prim_to_cons(PrimitiveState(1.0, 0.0, -3.0, 0.0, 1.0), EOS)
    with pytest.raises(InadmissibleStateError) as info:
        cons_to_prim_arrays(np.array([[1.0, 0.0, 1.0, 1.0, 1.0], [1.0, 0.0, -5.0, 0.0, 1.0]]), EOS)
    assert info.value.index == 1


def test_stationary_round_trip_left_state():
    y = stationary_to_prim(prim_to_stationary(LEFT, EOS), FlowRegime.SUBSONIC, EOS)
    assert y.as_array() == pytest.approx(LEFT.as_array(), rel=1e-10)


def test_rest_state_closed_form():
    z = StationaryInvariants(1.7, 0.0, 0.25, 0.0, 4.0)
    # h = gamma / (gamma - 1) s rho**(gamma - 1) = H
    rho = (4.0 / (1.6 / 0.6 * 0.25)) ** (1 / 0.6)
    for regime in FlowRegime:
        y = stationary_to_prim(z, regime, EOS)
        assert y.u == 0.0
        assert y.rho == pytest.approx(rho, rel=1e-14)


def test_sonic_density_closed_form():
    z = prim_to_stationary(LEFT, EOS)
    rho_s = sonic_density(z, EOS)
    q = z.q / z.a
    c = sound_speed(rho_s, 2**-1.4 * rho_s**1.4, 1.0, EOS)
    assert q / rho_s == pytest.approx(float(c), rel=1e-13)


def test_transport_of_table1_left_state_to_narrow_area_chokes():
    # the left-state invariants need more total enthalpy than H = 1.875 to pass area 1
    z = prim_to_stationary(LEFT, EOS)
    z1 = StationaryInvariants(1.0, z.phi, z.s, z.q, z.h_total)
    gamma = 1.4
    rho_s = (z.q**2 / (gamma * z.s)) ** (1 / (gamma + 1))
    g_sonic = gamma / (gamma - 1) * z.s * rho_s ** (gamma - 1) + 0.5 * (z.q / rho_s) ** 2 - z.h_total
    assert g_sonic > 0.0
    with pytest.raises(NoRootError):
        stationary_to_prim(z1, FlowRegime.SUBSONIC, EOS)


def test_transport_to_wider_area_has_both_roots():
    z = prim_to_stationary(LEFT, EOS)
    z2 = StationaryInvariants(2.5, z.phi, z.s, z.q, z.h_total)
    sub = stationary_to_prim(z2, FlowRegime.SUBSONIC, EOS)
    sup = stationary_to_prim(z2, FlowRegime.SUPERSONIC, EOS)
    assert flow_regime(sub, EOS) is FlowRegime.SUBSONIC
    assert flow_regime(sup, EOS) is FlowRegime.SUPERSONIC
    for y in (sub, sup):
        res = stationary_residuals(y, z2, EOS)
        assert res["h_total"] <= 1e-12 * z.h_total
        assert res["q"] <= 1e-12 * abs(z.q)
        assert res["s"] <= 1e-12 * z.s


def test_sonic_state_has_no_regime():
    c = math.sqrt(0.7)
    with pytest.raises(NoRootError):
        flow_regime(LEFT.replace(u=c), EOS)


def test_array_round_trip_random():
    rng = np.random.default_rng(3)
    n = 10_000
    phi = rng.choice([0.0, 1.0], size=n)
    _, pi = mixture_params(phi, EOS)
    rho = 10 ** rng.uniform(-2, 2, n)
    u = rng.uniform(-5, 5, n)
    p = 10 ** rng.uniform(-2, 2, n) - pi * rng.uniform(0, 0.99, n)
    a = rng.uniform(0.1, 3.0, n)
    back = cons_to_prim_arrays(prim_to_cons_arrays(rho, u, p, phi, a, EOS), EOS)
    assert np.allclose(back[0], rho, rtol=1e-14, atol=0)
    assert np.all(np.abs(back[1] - u) <= 1e-14 * (np.abs(u) + 1e-300) + 1e-14 * np.sqrt(np.abs(p) + pi))
    assert np.all(np.abs(back[2] - p) <= 1e-13 * (np.abs(p) + pi + rho * u * u))
    assert np.array_equal(back[3], phi)


states = st.builds(
    lambda rho, big_p, mach, phi, a: (rho, big_p, mach, phi, a),
    st.floats(0.05, 20.0),
    st.floats(0.05, 50.0),
    st.one_of(st.floats(-0.95, 0.95), st.floats(1.05, 3.0), st.floats(-3.0, -1.05)),
    st.sampled_from([0.0, 1.0]),
    st.floats(0.2, 5.0),
)


@settings(max_examples=300, deadline=None)
@given(states)
def test_stationary_round_trip_property(args):
    rho, big_p, mach, phi, a = args
    _, pi = mixture_params(phi, EOS)
    c = float(sound_speed(rho, big_p - pi, phi, EOS))
    y = PrimitiveState(rho, mach * c, big_p - pi, phi, a)
    regime = FlowRegime.SUBSONIC if abs(mach) < 1 else FlowRegime.SUPERSONIC
    z = prim_to_stationary(y, EOS)
    back = stationary_to_prim(z, regime, EOS)
    assert back.rho == pytest.approx(rho, rel=1e-9)
    assert back.u == pytest.approx(y.u, rel=1e-9, abs=1e-12 * c)
    assert back.p + pi == pytest.approx(big_p, rel=1e-9)
    res = stationary_residuals(back, z, EOS)
    assert res["h_total"] <= 1e-12 * z.h_total
    assert res["q"] <= 1e-12 * max(abs(z.q), 1e-300) + 1e-300
