"""Time the compiled kernels against the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel with the best-of-N time for each backend and the
speedup.  Both backends are imported directly, so the environment switch
``DISMAGICK_PURE_PYTHON`` does not matter here.
"""
import argparse
import timeit

import numpy as np

from dismagick import _kernels_py
from dismagick.sre import _letter_masks

try:
    from dismagick import _kernels as compiled
except ImportError:
    compiled = None


def _state(n, rng):
    v = rng.standard_normal(2 ** n) + 1j * rng.standard_normal(2 ** n)
    return v / np.linalg.norm(v)


def cases(rng):
    psi8 = _state(8, rng)
    psi10 = _state(10, rng)
    gate = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))[0]
    shots = 10_000
    u = rng.random(shots)

    def site(chi, d):
        env = np.broadcast_to(np.eye(chi, dtype=complex), (shots, chi, chi)).copy()
        a = rng.standard_normal((chi, d, chi)) + 1j * rng.standard_normal((chi, d, chi))
        xs, zs = _letter_masks(d)
        return env, a, xs, zs, u

    return {
        "pauli_moment4 n=8": ("pauli_moment4", (psi8,)),
        "pauli_moment4 n=10": ("pauli_moment4", (psi10,)),
        "pauli_expectation_table n=8": ("pauli_expectation_table", (psi8,)),
        "apply_two_qubit n=10": ("apply_two_qubit_inplace", (psi10.copy(), gate, 10, 3, 4)),
        "sample_site chi=4 d=2": ("pauli_sample_site", site(4, 2)),
        "sample_site chi=4 d=4": ("pauli_sample_site", site(4, 4)),
        "sample_site chi=8 d=2": ("pauli_sample_site", site(8, 2)),
    }


def best(fn, args, repeat):
    number = 1
    while timeit.timeit(lambda: fn(*args), number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':32s} {'python':>12s} {'cython':>12s} {'speedup':>8s}")
    for label, (name, fargs) in cases(rng).items():
        t_py = best(getattr(_kernels_py, name), fargs, args.repeat)
        if compiled is None:
            print(f"{label:32s} {t_py * 1e3:10.3f}ms {'n/a':>12s}")
            continue
        t_c = best(getattr(compiled, name), fargs, args.repeat)
        print(f"{label:32s} {t_py * 1e3:10.3f}ms {t_c * 1e3:10.3f}ms {t_py / t_c:7.1f}x")


if __name__ == "__main__":
    main()
