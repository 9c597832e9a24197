"""Cone/program data layer: svec packing and JSON schema."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lyacert.conic import (
    Cone,
    ConicProgram,
    SchemaError,
    smat,
    svec,
    svec_dim,
    svec_identity,
)


def sym(seed, k):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((k, k))
    return (M + M.T) / 2


@given(st.integers(0, 1000), st.integers(1, 8))
def test_svec_smat_round_trip(seed, k):
    M = sym(seed, k)
    v = svec(M)
    assert v.shape == (svec_dim(k),)
    np.testing.assert_allclose(smat(v), M, atol=1e-13)


@given(st.integers(0, 1000), st.integers(1, 8))
def test_svec_preserves_inner_product(seed, k):
    A = sym(seed, k)
    B = sym(seed + 1, k)
    assert svec(A) @ svec(B) == pytest.approx(float(np.sum(A * B)), rel=1e-12)


def test_svec_identity():
    for k in range(1, 6):
        np.testing.assert_allclose(smat(svec_identity(k)), np.eye(k),
                                   atol=1e-14)


def _small_program():
    rng = np.random.default_rng(0)
    cones = (Cone("zero", 1), Cone("nonneg", 2), Cone("psd", 3))
    m = sum(c.size for c in cones)
    return ConicProgram(rng.standard_normal(4), rng.standard_normal((m, 4)),
                        rng.standard_normal(m), cones)


def test_program_json_round_trip():
    prog = _small_program()
    back = ConicProgram.from_json(prog.to_json())
    np.testing.assert_allclose(back.c, prog.c, atol=1e-15)
    np.testing.assert_allclose(back.A, prog.A, atol=1e-15)
    np.testing.assert_allclose(back.b, prog.b, atol=1e-15)
    assert back.cones == prog.cones


def test_cone_validation():
    with pytest.raises(ValueError):
        Cone("bogus", 2)
    with pytest.raises(ValueError):
        Cone("nonneg", 0)
    assert Cone("psd", 3).size == 6
    assert Cone("nonneg", 3).size == 3


def test_program_shape_validation():
    prog = _small_program()
    with pytest.raises(ValueError):
        ConicProgram(prog.c, prog.A, prog.b[:-1], prog.cones)
    with pytest.raises(ValueError):
        ConicProgram(prog.c[:-1], prog.A, prog.b, prog.cones)


def test_bad_json_schema():
    with pytest.raises(SchemaError):
        ConicProgram.from_json("{\"c\": [1.0]}")
