import math
import os
import subprocess
import sys
from array import array

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nbestgec import kernels
from nbestgec.kernels import _pure, backends

token_ids = st.lists(st.integers(0, 4), max_size=12)


def test_backend_is_reported():
    assert kernels.BACKEND in backends()


def test_fallback_selected_by_environment():
    env = dict(os.environ, NBESTGEC_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import nbestgec.kernels as k; print(k.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


def test_align_ops_priorities(kernel):
    # a single differing token is a substitution, not delete + insert
    assert kernel.align_ops(array("i", [1, 2, 3]), array("i", [1, 9, 3])) == "MSM"
    assert kernel.align_ops(array("i", []), array("i", [1, 2])) == "II"
    assert kernel.align_ops(array("i", [1, 2]), array("i", [])) == "DD"


@pytest.mark.skipif("cython" not in backends(), reason="compiled core not built")
@settings(max_examples=300, deadline=None)
@given(token_ids, token_ids)
def test_align_backends_agree(a, b):
    a, b = array("i", a), array("i", b)
    assert backends()["cython"].align_ops(a, b) == _pure.align_ops(a, b)


def _sparse(draw_idx, draw_val):
    return array("i", draw_idx), array("d", draw_val)


@pytest.mark.skipif("cython" not in backends(), reason="compiled core not built")
@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 9), st.floats(-3, 3)), max_size=6, unique_by=lambda t: t[0]),
       st.sampled_from([-1.0, 1.0]),
       st.integers(0, 2**16))
def test_cw_update_backends_bit_identical(pairs, y, seed):
    rng = np.random.default_rng(seed)
    mu0 = rng.normal(size=10)
    sigma0 = rng.uniform(0.1, 2.0, size=10)
    idx = array("i", [p[0] for p in pairs])
    val = array("d", [p[1] for p in pairs])
    results = []
    for mod in (backends()["cython"], _pure):
        mu, sigma = mu0.copy(), sigma0.copy()
        alpha = mod.cw_update(mu, sigma, idx, val, y, 1.2815515655446004)
        results.append((alpha, mu.tobytes(), sigma.tobytes(), mod.sparse_dot(mu, idx, val)))
    assert results[0] == results[1]


def test_sparse_dot_empty(kernel):
    assert kernel.sparse_dot(np.ones(3), array("i"), array("d")) == 0.0


def test_cw_update_zero_vector_is_identity(kernel):
    mu, sigma = np.zeros(2), np.ones(2)
    assert kernel.cw_update(mu, sigma, array("i", [0]), array("d", [0.0]), 1.0, 1.28) == 0.0
    assert mu.tolist() == [0.0, 0.0] and sigma.tolist() == [1.0, 1.0]


def test_cw_update_worked_example(kernel):
    mu, sigma = np.zeros(1), np.ones(1)
    phi = 1.2815515655446004
    alpha = kernel.cw_update(mu, sigma, array("i", [0]), array("d", [1.0]), 1.0, phi)
    assert math.isclose(alpha, 0.5384, abs_tol=1e-3)
    assert math.isclose(mu[0], 0.5384, abs_tol=1e-3)
    assert math.isclose(sigma[0], 0.4202, abs_tol=1e-3)
