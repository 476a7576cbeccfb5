"""Time the mesh kernels and the full extraction with numba on and off.

Each configuration runs in its own interpreter because the kernel path is
chosen at import time from ``REEB_STEADY_NUMBA``.

    python3 benchmarks/bench_kernels.py [--sizes 50 100 200] [--repeat 3]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from reeb_steady import _kernels as K
from reeb_steady.mesh import extract_reeb
from reeb_steady.mesh.generators import torus_grid

n, repeat = int(sys.argv[1]), int(sys.argv[2])
mesh = torus_grid(n, n)
rng = np.random.default_rng(0)
m = len(mesh.triangles)
fs = np.sort(mesh.F[mesh.triangles], axis=1)
levels = np.sort(rng.uniform(mesh.F.min(), mesh.F.max(), 64))
rank, ptr, nbr = mesh.rank, mesh.link_ptr, mesh.link_nbr
center = np.arange(mesh.n_vertices)

def best(fn):
    fn()  # warm-up, includes compilation on the numba path
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)

out = {
    "numba": K.USING_NUMBA,
    "n": n,
    "triangles": m,
    "cumulative_area": best(lambda: K.cumulative_area(levels, fs, mesh.areas, fs[:, 0], fs[:, 2])),
    "link_lower_runs": best(lambda: K.link_lower_runs(rank, center, ptr, nbr)),
    "extract_reeb": best(lambda: extract_reeb(mesh)),
}
print(json.dumps(out))
"""


def run(flag: str, n: int, repeat: int) -> dict:
    env = dict(os.environ, REEB_STEADY_NUMBA=flag)
    proc = subprocess.run([sys.executable, "-c", WORKER, str(n), str(repeat)], env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    cols = ("cumulative_area", "link_lower_runs", "extract_reeb")
    print(f"{'grid':>6} {'tris':>7} {'kernel':>16} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for n in args.sizes:
        a, b = run("0", n, args.repeat), run("1", n, args.repeat)
        for c in cols:
            print(f"{n:>6} {a['triangles']:>7} {c:>16} {a[c]:>10.4f} {b[c]:>10.4f} {a[c] / b[c]:>8.1f}")


if __name__ == "__main__":
    main()
