"""Compare the compiled and numpy kernel backends.

Times each kernel at the production size (8 qubits) and one full
probabilistic-hybrid gradient step per backend, after checking that the
backends agree. Usage: python benchmarks/bench_kernels.py [--repeat N] [--batch B]
"""

import argparse
import timeit

import numpy as np

from sbqe import kernels
from sbqe.circuit import CircuitCache, CircuitSpec
from sbqe.model import PROBABILISTIC_HYBRID, ModelSpec, build_model
from sbqe.train import grad_params


def best_of(fn, repeat):
    number = max(1, int(0.2 / max(timeit.timeit(fn, number=1), 1e-6)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def kernel_cases(rng, n=8):
    dim = 1 << n
    gate = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    mat = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    ms = rng.normal(size=(4, dim, dim)) + 1j * rng.normal(size=(4, dim, dim))
    weights = rng.normal(size=(dim, dim))
    ms8 = np.ascontiguousarray(ms[:, :, :8])
    coupling = rng.normal(size=(dim, 8, 8))
    return {
        "apply_gate_rows": lambda impl: kernels.apply_gate_rows(mat.copy(), gate, 3, n, impl=impl),
        "apply_gate_cols": lambda impl: kernels.apply_gate_cols(mat.copy(), gate, 3, n, impl=impl),
        "gram_diag": lambda impl: kernels.gram_diag(ms, weights, impl=impl),
        "gram_dense": lambda impl: kernels.gram_dense(ms8, coupling, impl=impl),
    }


def with_backend(name, fn):
    old = kernels._impl
    kernels._impl = kernels.backends()[name]
    try:
        return fn()
    finally:
        kernels._impl = old


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--batch", type=int, default=7000)
    args = ap.parse_args()
    names = sorted(kernels.backends())
    print(f"backends: {', '.join(names)} (active: {kernels.BACKEND})")
    rng = np.random.default_rng(0)

    cases = kernel_cases(rng)
    print(f"\n{'kernel':<18}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases.items():
        outs = [fn(n) for n in names]
        assert all(np.allclose(outs[0], o, atol=1e-9) for o in outs), f"{label}: backends disagree"
        times = [best_of(lambda n=n: fn(n), args.repeat) for n in names]
        row = f"{label:<18}" + "".join(f"{t * 1e3:>10.3f}ms" for t in times)
        if len(names) > 1:
            row += f"{times[names.index('python')] / times[names.index('cython')]:>11.2f}x"
        print(row)

    spec = ModelSpec(PROBABILISTIC_HYBRID)
    model = build_model(spec)
    params = model.init_params(0)
    X, y = rng.normal(size=(args.batch, 8)), rng.integers(0, 10, size=args.batch)
    print(f"\nfull gradient step, 8 qubits x 4 layers, batch {args.batch}")
    results = {}
    for n in names:
        step = lambda: grad_params(model, params, X, y, model.prepare(params, grad=True))
        results[n] = with_backend(n, step)[1]["theta"]
        t = min(timeit.repeat(lambda: with_backend(n, step), number=1, repeat=max(2, args.repeat // 2)))
        print(f"  {n:<8} {t:.3f} s/step")
    if len(names) > 1:
        diff = np.abs(results["cython"] - results["python"]).max()
        print(f"  max |grad_cython - grad_python| = {diff:.1e}")
    cache = CircuitCache(CircuitSpec(8, 4), params["theta"])
    print(f"  (unitary check: {np.abs(cache.unitary.conj().T @ cache.unitary - np.eye(256)).max():.1e})")


if __name__ == "__main__":
    main()
