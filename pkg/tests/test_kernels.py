import os
import subprocess
import sys

import numpy as np
import pytest

from flatleaves import _kernels_py, kernels
from flatleaves.klein import build_klein
from flatleaves.leaves import sweep_strata

compiled = pytest.importorskip("flatleaves._kernels", reason="compiled extension not built")


def test_backend_is_compiled_when_available():
    assert kernels.BACKEND == "cython"


def test_pure_env_forces_fallback():
    env = dict(os.environ, FLATLEAVES_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "from flatleaves import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("seed", range(10))
def test_orbit_ranks_agree(seed):
    r = np.random.default_rng(seed)
    k = int(r.integers(2, 6))
    mats = r.integers(-3, 4, size=(int(r.integers(1, 5)), k, k)).astype(np.int64)
    vecs = r.integers(-2, 3, size=(40, k)).astype(np.int64)
    vecs[0] = 0
    a = compiled.orbit_ranks(mats, vecs, kernels.MODULUS_PRIME)
    b = _kernels_py.orbit_ranks(mats, vecs, kernels.MODULUS_PRIME)
    assert np.array_equal(np.asarray(a), b)
    assert b[0] == 0


@pytest.mark.parametrize("seed", range(10))
def test_coset_masks_agree(seed):
    r = np.random.default_rng(100 + seed)
    h, mc, m, q = 4, 3, 3, int(r.integers(2, 30))
    rows = r.integers(-q, q, size=(h, mc, m)).astype(np.int64)
    offs = r.integers(-q, q, size=(h, mc)).astype(np.int64)
    pts = r.integers(0, q, size=(500, m)).astype(np.int64)
    rows[0] = 0
    offs[0] = 0
    a = np.asarray(compiled.coset_masks(rows, offs, pts, q))
    b = _kernels_py.coset_masks(rows, offs, pts, q)
    assert a.dtype == np.uint8 and np.array_equal(a, b)
    assert b[:, 0].all()


def test_sweep_identical_under_both_backends(monkeypatch):
    fx = build_klein(6)
    fast = sweep_strata(fx.vprime, fx.group, 6)
    monkeypatch.setattr(kernels, "coset_masks", _kernels_py.coset_masks)
    slow = sweep_strata(fx.vprime, fx.group, 6)
    assert [(s.elements, s.count) for s in fast.strata] == [(s.elements, s.count) for s in slow.strata]
    assert fast.nongeneric_leaves == slow.nongeneric_leaves
