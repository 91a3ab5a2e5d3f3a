"""Compare the compiled and numpy layer kernels on the bundled cones.

    python benchmarks/bench_kernels.py [--layers M] [--repeat R] [--threads T]

Both backends enumerate the same points; the script checks that point counts agree
and that the enclosures intersect, then reports wall time and points per second.
"""
import argparse
import statistics
import time

from conezeta import data_path, load_fan, load_lattice, summation
from conezeta.formula import cone_for
from conezeta.shintani import decompose_quadratic


def cases(layers):
    q = load_lattice(data_path("sqrt5.json"))
    c = load_lattice(data_path("cubic.json"))
    cfan = load_fan(c, data_path("cubic_fan.json"))
    yield "sqrt5 C[0] (3,1)+(2,2)", cone_for(q, decompose_quadratic(q), 0), [(3, 1), (2, 2)], layers
    yield "cubic C[3] 10 indices", cone_for(c, cfan, 3), [
        (4, 1, 1), (3, 2, 1), (3, 1, 2), (2, 3, 1), (2, 2, 2),
        (2, 1, 3), (1, 4, 1), (1, 3, 2), (1, 2, 3), (1, 1, 4)], max(50, int(layers**0.5 * 8))


def bench(cone, idx, M, backend, repeat, threads):
    times, enc = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        enc = summation.evaluate_many(cone, idx, 1, layers=M, threads=threads, backend=backend)
        times.append(time.perf_counter() - t0)
    return statistics.median(times), enc


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--layers", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    backends = sorted(summation._BACKENDS)
    if "cython" not in backends:
        print("compiled kernel not built; only the numpy backend is available")
    print(f"{'case':28s} {'layers':>7s} {'backend':>8s} {'points':>11s} {'time s':>8s} {'Mpts/s':>8s}")
    for name, cone, idx, M in cases(args.layers):
        res = {}
        for b in backends:
            t, enc = bench(cone, idx, M, b, args.repeat, args.threads)
            res[b] = (t, enc)
            print(f"{name:28s} {M:7d} {b:>8s} {enc[0].points:11d} {t:8.3f} {enc[0].points / t / 1e6:8.2f}")
        if len(res) == 2:
            (ta, ea), (tb, eb) = res["cython"], res["numpy"]
            assert ea[0].points == eb[0].points
            assert all(x.intersects(y) for x, y in zip(ea, eb))
            print(f"{'':28s} speedup cython/numpy: {tb / ta:.1f}x")


if __name__ == "__main__":
    main()
