"""Time the hot kernels with numba enabled and with the numpy fallback.

Each backend runs in its own interpreter because the flag is read at import.
The numba run is warmed up first so compilation is excluded.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from nhqubits import _accel, linalg, spectrum
from nhqubits.dynamics import evolve_master, evolve_pure, pure_density, time_grid
from nhqubits.model import basis_state, build_jump_ops, build_total_h, reference_params

repeat = int(sys.argv[1])
rng = np.random.default_rng(0)
a16 = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
h = build_total_h(reference_params(1.5))
p = reference_params(0.5, alpha=0.1)
ff = basis_state("ff")
t = time_grid()

workloads = {
    "eig 4x4 x1000": lambda: [linalg.eig(build_total_h(reference_params(g))) for g in np.linspace(0, 3, 1000)],
    "eig 16x16 x100": lambda: [linalg.eig(a16) for _ in range(100)],
    "expm 16x16 x1000": lambda: [linalg.expm(a16, 0.01 * k) for k in range(1000)],
    "pure exact 2001 samples": lambda: evolve_pure(h, ff, t, "exact"),
    "pure rk 2001 samples": lambda: evolve_pure(h, ff, t, "rk"),
    "master exact 2001 samples": lambda: evolve_master(build_total_h(p), build_jump_ops(p), pure_density(ff), t),
    "phase diagram 40x40": lambda: spectrum.sweep_phase_diagram(resolution=(40, 40)),
}
for fn in workloads.values():
    fn()  # warm-up / JIT compile
out = {"backend": _accel.backend()}
for name, fn in workloads.items():
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out[name] = best
print(json.dumps(out))
"""


def run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ, NHQUBITS_DISABLE_NUMBA="1" if disable else "0")
    proc = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3, help="best-of-N timing")
    args = ap.parse_args()
    fast, slow = run(False, args.repeat), run(True, args.repeat)
    print(f"{'workload':<28}{fast['backend'] + ' [s]':>14}{slow['backend'] + ' [s]':>14}{'speedup':>10}")
    for name in fast:
        if name == "backend":
            continue
        print(f"{name:<28}{fast[name]:>14.4f}{slow[name]:>14.4f}{slow[name] / fast[name]:>9.1f}x")


if __name__ == "__main__":
    main()
