import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tiltbench.algebra import cartan_matrix
from tiltbench.homotopy import (
    CapExceeded,
    Complex,
    ProjMap,
    cartan_of_tilt,
    duality_check,
    generation_certificate,
    hom_complex_dims,
    hom_dim,
    or_summand,
    or_tilting,
    random_complex,
    stalk,
    verify_tilting,
)


def _random_map(a, X, Y, rng):
    return ProjMap.from_vector(a, X, Y, a.F.random(rng, hom_dim(a, X, Y)))


def test_random_complexes_square_to_zero(ex1):
    rng = np.random.default_rng(0)
    for _ in range(20):
        c = random_complex(ex1, rng)
        assert c.check_d2() == []
        for d in range(c.bottom, c.top - 1):
            D1, D2 = c.diff(d).realize(), c.diff(d + 1).realize()
            assert not ex1.F.matmul(D1, D2).any()


def test_realisation_is_a_functor(ex1, a4):
    rng = np.random.default_rng(1)
    for a in (ex1, a4):
        F, r = a.F, len(a.idem)
        for _ in range(15):
            X, Y, Z = (tuple(int(v) for v in rng.integers(0, 3, size=r)) for _ in range(3))
            f, g = _random_map(a, X, Y, rng), _random_map(a, Y, Z, rng)
            # g o f is realised as F @ G with row vectors
            assert np.array_equal(f.then(g).realize(), F.matmul(f.realize(), g.realize()))
            f2 = _random_map(a, X, Y, rng)
            assert np.array_equal((f + f2).realize(), F.add(f.realize(), f2.realize()))
            assert np.array_equal(f.scale(2).realize(), F.mul(2, f.realize()))
            assert np.array_equal(ProjMap.from_vector(a, X, Y, f.vector()).realize(), f.realize())


def test_composition_is_associative(ex1):
    rng = np.random.default_rng(2)
    X, Y, Z, W = (1, 1), (0, 2), (2, 0), (1, 1)
    f, g, h = _random_map(ex1, X, Y, rng), _random_map(ex1, Y, Z, rng), _random_map(ex1, Z, W, rng)
    assert np.array_equal(f.then(g).then(h).vector(), f.then(g.then(h)).vector())


def test_stalk_homs(ex1):
    C = cartan_matrix(ex1)
    for i in range(2):
        for j in range(2):
            x, y = stalk(ex1, i), stalk(ex1, j)
            assert hom_complex_dims(x, y, 0).hom == C[i, j]
            assert hom_complex_dims(x, y, 1).hom == 0
            assert hom_complex_dims(x, y, -1).hom == 0


def test_cone_of_identity_is_contractible(ex1):
    X = (1, 1)
    ident = ProjMap.from_vector(ex1, X, X, np.zeros(hom_dim(ex1, X, X), dtype=np.int64))
    # identity: coordinate 0 of each diagonal corner basis is e_i
    for i in range(2):
        ident.blocks[(i, i)][0, 0, 0] = 1
    cone = Complex(ex1, -1, [X, X], [ident], name="cone")
    assert cone.check_d2() == []
    for y in (stalk(ex1, 0), stalk(ex1, 1, -1), cone):
        for n in range(-2, 3):
            assert hom_complex_dims(cone, y, n).hom == 0
            assert hom_complex_dims(y, cone, n).hom == 0


def test_coefficient_and_realised_hom_dims_agree(ex1):
    rng = np.random.default_rng(3)
    for _ in range(12):
        x, y = random_complex(ex1, rng), random_complex(ex1, rng)
        for n in range(-2, 3):
            c = hom_complex_dims(x, y, n)
            r = hom_complex_dims(x, y, n, method="realized")
            assert (c.chain_maps, c.null_homotopic, c.hom) == (r.chain_maps, r.null_homotopic, r.hom)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.integers(-2, 2), st.integers(-2, 2))
def test_shift_invariance(seed, m, n):
    from tiltbench.data import load

    a = load("ex1").algebra
    rng = np.random.default_rng(seed)
    x, y = random_complex(a, rng), random_complex(a, rng)
    assert hom_complex_dims(x.shift(m), y.shift(m), n).hom == hom_complex_dims(x, y, n).hom
    assert hom_complex_dims(x, y.shift(m), n).hom == hom_complex_dims(x, y, n + m).hom


def test_duality_on_a_few_pairs(ex1):
    rng = np.random.default_rng(4)
    for _ in range(5):
        x, y = random_complex(ex1, rng), random_complex(ex1, rng)
        assert all(ok for *_, ok in duality_check(x, y, range(-3, 4)))


def test_or_summands_ex1(ex1, ex1_transport):
    T1 = or_tilting(ex1, ex1_transport, 1)
    assert T1[0].terms == [(1, 0)] and T1[0].bottom == -1
    assert T1[1].terms == [(2, 0), (0, 1)] and T1[1].bottom == -1
    T3 = or_summand(ex1, ex1_transport, 1, 3)
    assert T3.meta["resolution_mults"] == [[2, 0], [4, 0], [10, 0]]
    assert T3.check_d2() == []


def test_tilting_cartan_t0_is_base_cartan(ex1, ex1_transport):
    assert np.array_equal(cartan_of_tilt(or_tilting(ex1, ex1_transport, 0)), cartan_matrix(ex1))


def test_cap_is_enforced(ex1, ex1_transport):
    with pytest.raises(CapExceeded, match="cap 30"):
        or_summand(ex1, ex1_transport, 1, 3, cap=30)


def test_verify_tilting_detects_non_tilting(ex1):
    # P_k + P_k[1] has a nonzero shifted self-hom and does not generate
    bad = [stalk(ex1, 0), stalk(ex1, 0, -1)]
    bad[0].name, bad[1].name = "A", "B"
    rep = verify_tilting(bad, [0], 1)
    assert not rep.passed and rep.failures


def test_generation_certificate_shape(ex1_tilts):
    tri, ok = generation_certificate(ex1_tilts[2], [0], 2)
    assert ok and len(tri) == 1 + 2
