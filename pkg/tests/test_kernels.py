import importlib
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from minclones import _kernels_py, clone, group, kernels
from minclones.optable import OpTable

try:
    from minclones import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

needs_c = pytest.mark.skipif(_kernels_c is None, reason="compiled kernels not built")


@st.composite
def batches(draw):
    n = draw(st.integers(1, 4))
    k = draw(st.integers(1, 3))
    length = draw(st.integers(1, 20))
    rows = draw(st.integers(1, 6))
    f = np.array(draw(st.lists(st.integers(0, n - 1), min_size=n ** k, max_size=n ** k)), dtype=np.uint8)
    tables = np.array(draw(st.lists(st.lists(st.integers(0, n - 1), min_size=length, max_size=length),
                                    min_size=rows, max_size=rows)), dtype=np.uint8)
    m = draw(st.integers(0, 10))
    idx = np.array(draw(st.lists(st.lists(st.integers(0, rows - 1), min_size=k, max_size=k),
                                 min_size=m, max_size=m)), dtype=np.int64).reshape(m, k)
    return f, n, tables, idx


def reference(f, n, tables, idx):
    out = np.zeros((len(idx), tables.shape[1]), dtype=np.uint8)
    for t, combo in enumerate(idx):
        for p in range(tables.shape[1]):
            code = 0
            for c in combo:
                code = code * n + int(tables[c, p])
            out[t, p] = f[code]
    return out


@given(batches())
def test_fallback_matches_reference(batch):
    f, n, tables, idx = batch
    mult = kernels.hash_multipliers(tables.shape[1])
    out, h = _kernels_py.compose_batch(f, n, tables, idx, mult)
    assert np.array_equal(out, reference(f, n, tables, idx))
    assert np.array_equal(h, _kernels_py.row_hashes(out, mult))


@needs_c
@given(batches())
def test_compiled_matches_fallback(batch):
    f, n, tables, idx = batch
    mult = kernels.hash_multipliers(tables.shape[1])
    a, ha = _kernels_py.compose_batch(f, n, tables, idx, mult)
    b, hb = _kernels_c.compose_batch(f, n, tables, idx, mult)
    assert np.array_equal(np.asarray(a), np.asarray(b))
    assert np.array_equal(np.asarray(ha), np.asarray(hb))
    assert np.array_equal(np.asarray(_kernels_c.row_hashes(np.ascontiguousarray(a), mult)), ha)


def test_hash_multipliers_are_odd_and_fixed():
    m = kernels.hash_multipliers(50)
    assert (m % np.uint64(2) == 1).all()
    assert np.array_equal(m, kernels.hash_multipliers(50))


def test_zero_multipliers_force_collisions():
    # every row hashes to 0, so the store must fall back to exact comparison
    a = group.free_boolean_action(1, 1)
    xor3 = OpTable.from_function(2, 3, lambda x, y, z: x ^ y ^ z)
    normal = clone.generate_slice(a, [xor3], 3)
    zero = clone.generate_slice(a, [xor3], 3, mult=np.zeros(8, dtype=np.uint64))
    assert normal.tables == zero.tables


def test_pure_python_switch():
    code = "from minclones import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, MINCLONES_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"


def test_backends_give_same_slices():
    code = ("from minclones import clone, group, constructions as c;"
            "a = group.free_boolean_action(2, 1);"
            "print(clone.generate_slice(a, [c.odd_majority(a)], 3).fingerprint())")
    outs = set()
    for flag in ("", "1"):
        env = dict(os.environ)
        env.pop("MINCLONES_PURE_PYTHON", None)
        if flag:
            env["MINCLONES_PURE_PYTHON"] = flag
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
        assert res.returncode == 0, res.stderr
        outs.add(res.stdout.strip())
    assert len(outs) == 1
