"""Benchmark the numba kernels against the pure-numpy fallbacks.

Run: python benchmarks/bench_kernels.py [--rows N] [--pairs N]
The same inputs go through both paths; the table reports best-of-3 wall
times and the speedup. FAULTLINE_NUMBA only controls which path the
package uses at runtime; this script always times both.
"""

import argparse
import math
import time

import numpy as np

from faultline import _kernels


def build_corpus(rng, n_rows, vocab, avg_nnz):
    indptr = [0]
    indices, data = [], []
    for _ in range(n_rows):
        nnz = max(1, int(rng.normal(avg_nnz, avg_nnz / 4)))
        cols = np.sort(rng.choice(vocab, size=min(nnz, vocab), replace=False))
        indices.extend(cols.tolist())
        data.extend(rng.uniform(0.1, 6.0, size=len(cols)).tolist())
        indptr.append(len(indices))
    indptr = np.array(indptr, dtype=np.int64)
    indices = np.array(indices, dtype=np.int64)
    data = np.array(data, dtype=np.float64)
    norms = np.array([math.sqrt(float(np.dot(data[s:e], data[s:e])))
                      for s, e in zip(indptr[:-1], indptr[1:])])
    return indptr, indices, data, norms


def best_of(fn, repeats=3):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=5000,
                        help="corpus files for the cosine benchmark")
    parser.add_argument("--vocab", type=int, default=40_000)
    parser.add_argument("--nnz", type=int, default=200,
                        help="average nonzeros per file vector")
    parser.add_argument("--queries", type=int, default=50)
    parser.add_argument("--pairs", type=int, default=60_000,
                        help="difference vectors for the SGD benchmark")
    parser.add_argument("--epochs", type=int, default=20)
    args = parser.parse_args()

    if _kernels.flavor() != "numba":
        print("note: numba unavailable or disabled; timing numpy against itself")
    numba_cosine = _kernels.cosine_batch
    numba_sgd = _kernels.sgd_hinge

    rng = np.random.default_rng(1234)
    print(f"cosine: {args.rows} files x ~{args.nnz} nnz, "
          f"vocab {args.vocab}, {args.queries} queries")
    indptr, indices, data, norms = build_corpus(rng, args.rows, args.vocab,
                                                args.nnz)
    q_dense = np.zeros(args.vocab)
    q_cols = rng.choice(args.vocab, size=30, replace=False)
    q_dense[q_cols] = rng.uniform(0.5, 4.0, size=30)
    q_norm = math.sqrt(float(q_dense @ q_dense))

    def run_cosine(fn):
        for _ in range(args.queries):
            fn(indptr, indices, data, norms, q_dense, q_norm)

    numba_cosine(indptr, indices, data, norms, q_dense, q_norm)  # compile
    t_numba = best_of(lambda: run_cosine(numba_cosine))
    t_numpy = best_of(lambda: run_cosine(_kernels._cosine_batch_numpy))
    check = np.allclose(
        numba_cosine(indptr, indices, data, norms, q_dense, q_norm),
        _kernels._cosine_batch_numpy(indptr, indices, data, norms, q_dense,
                                     q_norm), atol=1e-12)

    print(f"  numba  {t_numba * 1e3:9.1f} ms")
    print(f"  numpy  {t_numpy * 1e3:9.1f} ms")
    print(f"  speedup x{t_numpy / t_numba:.1f}  (outputs agree: {check})")

    print(f"sgd: {args.pairs} pairs x 7 features, {args.epochs} epochs")
    diffs = rng.normal(size=(args.pairs, 7))
    order = np.concatenate([rng.permutation(args.pairs)
                            for _ in range(args.epochs)]).astype(np.int64)
    numba_sgd(diffs[:10], 0.01, 0.1, order[:10])  # compile
    t_numba = best_of(lambda: numba_sgd(diffs, 0.01, 0.1, order))
    t_numpy = best_of(lambda: _kernels._sgd_hinge_numpy(diffs, 0.01, 0.1, order))
    check = np.allclose(numba_sgd(diffs, 0.01, 0.1, order),
                        _kernels._sgd_hinge_numpy(diffs, 0.01, 0.1, order),
                        atol=1e-10)
    print(f"  numba  {t_numba * 1e3:9.1f} ms")
    print(f"  numpy  {t_numpy * 1e3:9.1f} ms")
    print(f"  speedup x{t_numpy / t_numba:.1f}  (outputs agree: {check})")


if __name__ == "__main__":
    main()
