import json
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reeb_steady import _kernels as K

needs_numba = pytest.mark.skipif(not K.USING_NUMBA, reason="numba disabled")


def random_triangles(rng, n):
    fs = np.sort(rng.normal(size=(n, 3)), axis=1)
    # a few flat bottoms and tops exercise the degenerate branches
    flat = rng.random(n) < 0.1
    fs[flat, 1] = fs[flat, 0]
    area = rng.random(n) + 0.01
    lo = fs[:, 0] + rng.random(n) * (fs[:, 2] - fs[:, 0]) * 0.3
    hi = fs[:, 2] - rng.random(n) * (fs[:, 2] - fs[:, 0]) * 0.3
    return fs, area, lo, hi


def area_below_by_sampling(f0, f1, f2, area, t, n=400):
    # barycentric midpoint grid of the reference triangle
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    keep = i + j < n
    a = (i[keep] + 1 / 3) / n
    b = (j[keep] + 1 / 3) / n
    lower = (i + j < n - 1)[keep]
    vals = (1 - a - b) * f0 + a * f1 + b * f2
    # upper-left cells are split into two triangles; sample both centroids
    a2 = (i[keep] + 2 / 3) / n
    b2 = (j[keep] + 2 / 3) / n
    vals2 = (1 - a2 - b2) * f0 + a2 * f1 + b2 * f2
    count = np.sum(vals < t) + np.sum((vals2 < t) & lower)
    return area * count / (n * n)


@given(st.floats(-2, 2), st.floats(0, 2), st.floats(0, 2), st.floats(-3, 3))
def test_area_below_matches_sampling(f0, d1, d2, t):
    f1, f2 = f0 + d1, f0 + d1 + d2
    if f2 == f0:
        return
    exact = float(K.area_below(np.array([f0]), np.array([f1]), np.array([f2]), np.array([1.0]), np.array([t]))[0])
    assert 0 <= exact <= 1
    assert exact == pytest.approx(area_below_by_sampling(f0, f1, f2, 1.0, t), abs=0.01)


def test_cumulative_area_is_monotone_and_reaches_the_clipped_total():
    rng = np.random.default_rng(0)
    fs, area, lo, hi = random_triangles(rng, 300)
    levels = np.linspace(-4, 4, 101)
    cum = K.cumulative_area(levels, fs, area, lo, hi)
    assert np.all(np.diff(cum) >= -1e-12)
    total = K.area_below(fs[:, 0], fs[:, 1], fs[:, 2], area, hi) - K.area_below(fs[:, 0], fs[:, 1], fs[:, 2], area, lo)
    assert cum[-1] == pytest.approx(total.sum(), rel=1e-12)
    assert cum[0] == 0


@needs_numba
@pytest.mark.parametrize("seed", range(5))
def test_cumulative_area_numba_matches_numpy(seed):
    rng = np.random.default_rng(seed)
    fs, area, lo, hi = random_triangles(rng, 500)
    levels = np.sort(rng.normal(size=200) * 1.5)
    a = K._cumulative_area_np(levels, fs, area, lo, hi)
    b = K._cumulative_area_nb(levels, fs, area, lo, hi)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def random_links(rng, n, max_len=9):
    lengths = rng.integers(0, max_len, size=n)
    ptr = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
    nbr = rng.integers(0, 3 * n, size=int(ptr[-1])).astype(np.int64)
    rank = rng.permutation(3 * n).astype(np.int64)
    center = rng.integers(0, 3 * n, size=n).astype(np.int64)
    return rank, center, ptr, nbr


def runs_by_loop(rank, center, ptr, nbr):
    out = []
    for v in range(len(ptr) - 1):
        link = nbr[ptr[v] : ptr[v + 1]]
        low = [rank[x] < rank[center[v]] for x in link]
        runs = sum(1 for k in range(len(low)) if low[k] and not low[(k + 1) % len(low)])
        out.append((runs, sum(low), len(low)))
    return out


def test_link_runs_match_a_plain_loop():
    rng = np.random.default_rng(7)
    args = random_links(rng, 400)
    runs, n_lower, lengths = K.link_lower_runs(*args)
    assert list(zip(runs.tolist(), n_lower.tolist(), lengths.tolist())) == runs_by_loop(*args)


@needs_numba
def test_link_runs_numba_matches_numpy():
    rng = np.random.default_rng(11)
    args = random_links(rng, 2000)
    for x, y in zip(K._link_lower_runs_np(*args), K._link_lower_runs_nb(*args)):
        assert np.array_equal(x, y)


def test_env_flag_selects_numpy_path():
    env = dict(os.environ, REEB_STEADY_NUMBA="0")
    code = "from reeb_steady import _kernels as K; print(K.USING_NUMBA)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    assert out.strip() == "False"


def test_thread_count_reads_the_environment(monkeypatch):
    monkeypatch.setenv("REEB_STEADY_THREADS", "3")
    assert K.thread_count() == 3
    monkeypatch.setenv("REEB_STEADY_THREADS", "junk")
    assert K.thread_count() >= 1


def test_extraction_is_identical_under_both_paths():
    script = (
        "import json; from reeb_steady.mesh import extract_reeb; from reeb_steady.mesh.generators import torus_grid;"
        "print(json.dumps(extract_reeb(torus_grid(24, 24)).graph.to_json(), sort_keys=True))"
    )
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, REEB_STEADY_NUMBA=flag)
        outs.append(subprocess.run([sys.executable, "-c", script], env=env, capture_output=True, text=True, check=True).stdout)
    a, b = (json.loads(o) for o in outs)
    assert a["vertices"] == b["vertices"]
    for ea, eb in zip(a["edges"], b["edges"]):
        assert (ea["id"], ea["tail"], ea["head"]) == (eb["id"], eb["tail"], eb["head"])
        np.testing.assert_allclose(ea["measure"]["cumulative"], eb["measure"]["cumulative"], rtol=1e-10, atol=1e-12)
