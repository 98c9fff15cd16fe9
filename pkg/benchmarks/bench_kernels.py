"""Compare the compiled and numpy kernel backends.

Times the three hot kernels on random slice spectra and a full objective
evaluation, and checks that both backends agree.

    python benchmarks/bench_kernels.py [--dims 2,4,8,16,32] [--M 100] [--repeats 200]
"""
import argparse
import timeit

import numpy as np

from adiabatic_pathways import kernels, qcore


def random_spectra(rng, M, N, dt=0.03):
    hs = np.array([qcore.random_hermitian(N, rng) for _ in range(M)])
    evals, evecs = qcore.eigh_stack(hs, fix=False)
    return np.ascontiguousarray(evecs), np.ascontiguousarray(np.exp(-1j * dt * evals))


def _parts(out):
    return out if isinstance(out, tuple) else (out,)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", default="2,4,8,16,32")
    ap.add_argument("--M", type=int, default=100)
    ap.add_argument("--repeats", type=int, default=200)
    args = ap.parse_args()

    impls = kernels.backends()
    if "cython" not in impls:
        print("compiled extension not built; only the numpy fallback is available")
    rng = np.random.default_rng(0)
    print(f"{'N':>4} {'kernel':>10} " + " ".join(f"{name + ' [us]':>14}" for name in impls) + "   speedup")
    for N in (int(d) for d in args.dims.split(",")):
        V, ph = random_spectra(rng, args.M, N)
        psi0 = qcore.random_state(N, rng)
        seeds = np.ascontiguousarray(rng.normal(size=(args.M + 1, N)) + 0j)
        hi, hp = qcore.random_hermitian(N, rng), qcore.random_hermitian(N, rng)
        u1, u2 = rng.random(args.M + 1), rng.random(args.M + 1)
        states = kernels.propagate(V, ph, psi0)
        calls = {
            "propagate": lambda k: k.propagate(V, ph, psi0),
            "costates": lambda k: k.costates(V, ph, seeds),
            "energies": lambda k: k.energies(states, hi, hp, u1, u2),
        }
        for name, call in calls.items():
            ref = _parts(call(impls["python"]))
            for b, k in impls.items():
                assert all(np.allclose(x, y, atol=1e-12) for x, y in zip(ref, _parts(call(k)))), (b, name, N)
            t = {b: min(timeit.repeat(lambda k=k: call(k), number=args.repeats, repeat=3)) / args.repeats * 1e6
                 for b, k in impls.items()}
            speed = f"{t['python'] / t['cython']:9.1f}x" if "cython" in t else ""
            print(f"{N:>4} {name:>10} " + " ".join(f"{t[b]:14.1f}" for b in impls) + "  " + speed)


if __name__ == "__main__":
    main()
