"""Compare the compiled walk kernels against the pure-Python fallback.

Both backends implement bit-identical algorithms (the parity is asserted
here before timing), so this measures implementation speed only.

Usage: python benchmarks/bench_kernels.py [--steps 20000] [--replicas 20]
"""
import argparse
import time

import numpy as np

from rwde import kernels


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--steps", type=int, default=20000)
    parser.add_argument("--replicas", type=int, default=20)
    args = parser.parse_args()

    backends = {}
    for name in ("compiled", "python"):
        try:
            backends[name] = kernels.get_backend(name)
        except Exception as exc:  # pragma: no cover
            print(f"{name}: unavailable ({exc})")
    if "compiled" not in backends:
        print("compiled backend missing; build with `pip install -e .`")

    cps = np.array([args.steps], dtype=np.int64)
    rows = []

    results = {}
    for name, mod in backends.items():
        out, dt = timed(mod.walk1d_checkpoints, 3.0, 1.0, 11, 22, 0,
                        args.replicas, cps)
        results[name] = out
        rows.append(("walk on Z", name, args.replicas * args.steps, dt))
    if len(results) == 2:
        assert np.array_equal(results["compiled"], results["python"])

    alphas = np.array([2.0, 1.0, 1.0, 1.0])
    results = {}
    for name, mod in backends.items():
        out, dt = timed(mod.lattice_checkpoints, alphas, 7, 8, 0,
                        max(2, args.replicas // 4), cps)
        results[name] = out
        rows.append(("walk on Z^2", name,
                     max(2, args.replicas // 4) * args.steps, dt))
    if len(results) == 2:
        assert np.array_equal(results["compiled"], results["python"])

    shapes = np.full(200000, 0.7)
    results = {}
    for name, mod in backends.items():
        out, dt = timed(mod.gamma_variates, 5, shapes)
        results[name] = out
        rows.append(("gamma sampling", name, shapes.size, dt))
    if len(results) == 2:
        assert np.array_equal(results["compiled"], results["python"])

    print(f"{'kernel':16s} {'backend':9s} {'ops':>12s} {'seconds':>9s} {'ops/s':>12s}")
    speed = {}
    for kernel, name, ops, dt in rows:
        print(f"{kernel:16s} {name:9s} {ops:12d} {dt:9.3f} {ops / dt:12.0f}")
        speed.setdefault(kernel, {})[name] = ops / dt
    for kernel, per in speed.items():
        if len(per) == 2:
            print(f"{kernel}: compiled is {per['compiled'] / per['python']:.0f}x "
                  f"the python fallback")


if __name__ == "__main__":
    main()
