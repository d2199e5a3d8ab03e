"""Tests for the binary-secret hybrid generators."""

import math

import pytest

from lwekit.errors import ParameterError
from lwekit.hybrids import (
    HYBRID_NAMES,
    generate_hybrids,
    HybridParams,
    draw_components,
    gen_hybrid,
    hybrid_cell,
    hybrid_cell_count,
    hybrid_identity_check,
)
from lwekit.rng import SeedStream

S = SeedStream


def make_hp(**kw):
    n, q = kw.pop("n", 8), kw.pop("q", 4)
    eps = 2.0**-20
    beta = math.sqrt(2 * math.log(2 * n * (1 + 1 / eps)) / math.pi) / q
    defaults = dict(k=1, n=n, m=3, q=q, beta=beta, gamma=math.sqrt(n) * beta,
                    delta=0.25, eps=eps)
    defaults.update(kw)
    return HybridParams(**defaults)


def test_chain_dimension_check():
    make_hp().check_chain()  # (k+1) log2 q + 2 log2(1/delta) = 8 <= n = 8
    with pytest.raises(ParameterError):
        make_hp(n=6).check_chain()


def test_all_hybrids_generate():
    hp = make_hp()
    for name in HYBRID_NAMES:
        b = gen_hybrid(hp, name, S(1).child(name))
        assert b.params.n == hp.n and b.params.m == hp.m and b.params.q == hp.q
        assert b.provenance == name


def test_shared_seed_field_agreement():
    hp = make_hp()
    batches = {name: gen_hybrid(hp, name, S(2).child("shared")) for name in HYBRID_NAMES}
    # H0, H1, H5 share the uniform matrix A; H2, H3, H4 share A^
    assert batches["H0"].a_num == batches["H1"].a_num == batches["H5"].a_num
    assert batches["H2"].a_num == batches["H3"].a_num == batches["H4"].a_num
    assert batches["H0"].a_num != batches["H2"].a_num
    # H4 and H5 share the uniform b-part
    assert batches["H4"].b_fp == batches["H5"].b_fp
    # H1 and H2 differ only through the matrix swap: same e^ draw feeds both
    assert batches["H1"].b_fp != batches["H2"].b_fp


def test_h2_identity_algebra():
    # A^T z - N^T z = q B^T C z exactly when A = A^
    for i in range(20):
        assert hybrid_identity_check(make_hp(), S(3).child(i))


def test_h0_secret_is_z_and_transparent():
    hp = make_hp()
    b = gen_hybrid(hp, "H0", S(4).child("h0"))
    assert set(b.transparent.secret.s) <= {0, 1}
    assert len(b.transparent.secret.s) == hp.n


def test_hybrid_cell_is_deterministic_and_bounded():
    hp = make_hp()
    count = hybrid_cell_count(hp)
    for i in range(50):
        b = gen_hybrid(hp, "H3", S(5).child(i))
        c1 = hybrid_cell(b)
        c2 = hybrid_cell(b)
        assert c1 == c2
        assert 0 <= c1 < count


def test_components_deterministic():
    hp = make_hp()
    c1 = draw_components(hp, S(6).child("c"))
    c2 = draw_components(hp, S(6).child("c"))
    assert c1.z == c2.z and c1.A == c2.A and c1.N == c2.N and c1.u_fp == c2.u_fp


def test_bad_hybrid_name():
    with pytest.raises(ParameterError):
        gen_hybrid(make_hp(), "H9", S(7))


def test_generate_hybrids_labels_and_chain_check():
    hp = make_hp()
    batches = generate_hybrids(hp, S(8).child("all"))
    assert set(batches) == set(HYBRID_NAMES)
    with pytest.raises(ParameterError):
        generate_hybrids(make_hp(n=6), S(8))
