"""Compare the compiled kernels with the pure-Python fallback.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.
"""

import argparse
import timeit

import numpy as np

from quncertainty import _pykernels
from quncertainty.states import NoiseModel, apply_white_noise, bell_state, random_mixed_state
from quncertainty.tomography import outcome_probabilities, overcomplete_settings

try:
    from quncertainty import _kernels
except ImportError:
    _kernels = None


def cases():
    rng = np.random.default_rng(0)
    m4 = random_mixed_state(rng)
    m2 = random_mixed_state(rng, 2)
    settings = overcomplete_settings()
    proj = np.concatenate([s.projectors() for s in settings])
    rho = apply_white_noise(bell_state(), NoiseModel.from_fidelity(0.97))
    freqs = np.concatenate([outcome_probabilities(rho, s) for s in settings])
    freqs /= freqs.sum()
    rho0 = np.eye(4, dtype=complex) / 4
    return {
        "jacobi_eigh 2x2": lambda k: k.jacobi_eigh(m2, 1e-12),
        "jacobi_eigh 4x4": lambda k: k.jacobi_eigh(m4, 1e-12),
        "mle 144 projectors x 200 it": lambda k: k.mle_iterate(proj, freqs, rho0, 200, -np.inf, 1e-12),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = [("python", _pykernels)] + ([("compiled", _kernels)] if _kernels else [])
    print(f"{'kernel':<30}" + "".join(f"{name:>14}" for name, _ in backends) + f"{'speedup':>10}")
    for label, fn in cases().items():
        times = []
        for _, mod in backends:
            t = timeit.Timer(lambda: fn(mod))
            n, _ = t.autorange()
            times.append(min(t.repeat(args.repeat, n)) / n)
        cells = "".join(f"{t * 1e6:>11.1f} us" for t in times)
        speed = f"{times[0] / times[1]:>9.1f}x" if len(times) == 2 else ""
        print(f"{label:<30}{cells}{speed}")


if __name__ == "__main__":
    main()
