"""Compare the compiled and pure-Python coordinate-ascent kernels.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5]

Times a single ``update_column`` sweep and a full ``design_phase_shifters``
call with each backend, and checks that both produce identical phases.
"""

import argparse
import timeit
from unittest import mock

import numpy as np

from hybridamp import PhaseShifterDesignParams, design_phase_shifters, kernels
from hybridamp import _pykernels

try:
    from hybridamp import _ckernels
except ImportError:
    _ckernels = None


def _gram(n, rng):
    a = (rng.standard_normal((8, n)) + 1j * rng.standard_normal((8, n))) / np.sqrt(2)
    return a.conj().T @ a


def _time(stmt, repeat, number):
    return min(timeit.repeat(stmt, repeat=repeat, number=number)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    print(f"import-time backend: {kernels.BACKEND}")
    print(f"{'kernel':<28}{'N':>4}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")

    params = PhaseShifterDesignParams(coupling_scalar=0.5)
    for n in (8, 16, 39, 128):
        rng = np.random.default_rng(n)
        gram = _gram(n, rng)
        x0 = np.exp(1j * rng.uniform(0, 2 * np.pi, n))

        column_times, design_times, designs = {}, {}, {}
        for name, impl in backends.items():
            column_times[name] = _time(lambda: impl.update_column(gram, x0.copy()), args.repeat, 2000)
            with mock.patch.object(kernels, "update_column", impl.update_column):
                designs[name] = design_phase_shifters(gram, 2, params, np.random.default_rng(0))
                design_times[name] = _time(
                    lambda: design_phase_shifters(gram, 2, params, np.random.default_rng(0)),
                    args.repeat, 20,
                )
        if len(designs) == 2:
            gap = np.max(np.abs(designs["python"] - designs["cython"]))
            assert gap < 1e-10, f"backends disagree by {gap:.2e} at N={n}"
        for label, times in (("update_column", column_times), ("design_phase_shifters", design_times)):
            row = f"{label:<28}{n:>4}" + "".join(f"{times[b] * 1e6:>12.1f}us" for b in backends)
            if len(times) == 2:
                row += f"{times['python'] / times['cython']:>9.1f}x"
            print(row)


if __name__ == "__main__":
    main()
