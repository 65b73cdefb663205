import numpy as np
import pytest

from topomata import _kernels
from topomata.machine import verdict_vector
from topomata.randgen import random_nta, random_topology


def _dta_arrays(rng, n, m_sym):
    tables = np.array([[rng.randrange(n) for _ in range(n)]
                       for _ in range(m_sym)], dtype=np.int64)
    lend = np.array([rng.randrange(n) for _ in range(n)], dtype=np.int64)
    rend = np.array([rng.randrange(n) for _ in range(n)], dtype=np.int64)
    klass = np.array([rng.randrange(3) for _ in range(n)], dtype=np.uint8)
    return tables, lend, rend, klass


def _nta_arrays(rng, n, m_sym):
    full = (1 << n) - 1
    img = np.array([[rng.randrange(full + 1) for _ in range(n)]
                    for _ in range(m_sym)], dtype=np.int64)
    lend = np.array([1 << v for v in range(n)], dtype=np.int64)
    rend = np.array([rng.randrange(full + 1) for _ in range(n)],
                    dtype=np.int64)
    acc = rng.randrange(full + 1)
    rej = rng.randrange(full + 1) & ~acc
    return img, lend, rend, acc, rej


class TestBackendsAgree:
    def test_dta_sweep(self, rng, warm_kernels):
        for _ in range(10):
            n, m_sym, depth = rng.randrange(1, 9), rng.randrange(1, 4), 6
            tables, lend, rend, klass = _dta_arrays(rng, n, m_sym)
            init = rng.randrange(n)
            results = []
            for backend in ("numpy", "numba"):
                impl = _kernels.get_impl("dta_sweep", backend)
                out = np.empty(_kernels.sweep_size(m_sym, depth),
                               dtype=np.uint8)
                results.append(impl(tables, lend, rend, np.int64(init),
                                    klass, depth, out))
            assert np.array_equal(results[0], results[1])

    def test_nta_sweep(self, rng, warm_kernels):
        for _ in range(10):
            n, m_sym, depth = rng.randrange(1, 7), rng.randrange(1, 4), 5
            img, lend, rend, acc, rej = _nta_arrays(rng, n, m_sym)
            init = 1 << rng.randrange(n)
            for subset_mode in (True, False):
                results = []
                for backend in ("numpy", "numba"):
                    impl = _kernels.get_impl("nta_sweep", backend)
                    out = np.empty(_kernels.sweep_size(m_sym, depth),
                                   dtype=np.uint8)
                    results.append(impl(img, lend, rend, np.int64(init),
                                        np.int64(acc), np.int64(rej),
                                        subset_mode, depth, out))
                assert np.array_equal(results[0], results[1])

    def test_open_flags(self, rng, warm_kernels):
        for _ in range(10):
            t = random_topology(rng.randrange(1, 9), rng)
            mins = np.array(t.mins, dtype=np.int64)
            a = _kernels.get_impl("open_flags", "numpy")(mins)
            b = _kernels.get_impl("open_flags", "numba")(mins)
            assert np.array_equal(a, b)
            # cross-check against the definitional scan
            for mask in range(1 << t.n_points):
                assert bool(a[mask]) == t.is_open(mask)


class TestSweepContracts:
    def test_bigint_fallback_matches_kernel(self, rng):
        # the pure-python multi sweep and the bitmask kernel agree
        from topomata.machine import _nta_sweep_bigint
        for _ in range(5):
            m = random_nta(rng.randrange(1, 5), ("a", "b"), rng, total=False)
            if m is None:
                continue
            kernel = verdict_vector(m, 5)
            py = _nta_sweep_bigint(m, sorted(m.alphabet), 5)
            assert np.array_equal(kernel, py)

    def test_sweep_size(self):
        assert _kernels.sweep_size(2, 3) == 1 + 2 + 4 + 8
        assert _kernels.sweep_size(1, 4) == 5

    def test_nta_point_limit(self):
        big = np.zeros((1, 63), dtype=np.int64)
        with pytest.raises(ValueError):
            _kernels.nta_sweep(big, big[0], big[0], 1, 1, 0, True, 1)

    def test_backend_reported(self, warm_kernels):
        assert _kernels.active_backend() in ("numba", "numpy")
