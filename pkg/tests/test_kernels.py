"""The three kernel backends must agree element-for-element."""

import random

import pytest

from gabtop import kernels


def _random_cases():
    rng = random.Random(7)
    cases = []
    for p in (2, 3, 5):
        for m, n in ((3, 5), (5, 3), (4, 4), (1, 6), (6, 2)):
            A = [[rng.randrange(p) for _ in range(n)] for _ in range(m)]
            cases.append((A, p))
    cases.append(([[0, 0], [0, 0]], 3))
    cases.append(([[1, 2, 3]], 5))
    cases.append(([[1, 0], [0, 1]], 2))
    return cases


@pytest.mark.parametrize("A,p", _random_cases())
def test_nullspace_backends_agree(A, p):
    results = [
        kernels.modp_nullspace_python([list(r) for r in A], p),
        kernels.modp_nullspace_numpy(A, p),
        kernels.modp_nullspace_numba(A, p),
    ]
    n = len(A[0])
    rank0, basis0 = results[0]
    for rank, basis in results:
        assert rank == rank0
        assert len(basis) == n - rank
        for v in basis:
            for row in A:
                assert sum(x * y for x, y in zip(row, v)) % p == 0
    # same dimension and contained in the same nullspace, so spans agree
    # exactly when stacking them does not raise the rank
    for _, basis in results[1:]:
        stacked = [list(v) for v in basis0] + [list(v) for v in basis]
        if stacked:
            _, pivots = kernels._modp_rref_python(stacked, p)
            assert len(pivots) == n - rank0


def test_nullspace_known_value():
    # x + 2y = 0 mod 5 has the line through (3, 1): x = -2y
    rank, basis = kernels.modp_nullspace([[1, 2]], 5)
    assert rank == 1
    assert len(basis) == 1
    x, y = basis[0]
    assert (x + 2 * y) % 5 == 0 and (x, y) != (0, 0)


def test_fill_by_provenance_small():
    # Z/4 with elements indexed 0..3: zero, then the generator 1, then sums
    add = [[(i + j) % 4 for j in range(4)] for i in range(4)]
    kind = [2, 0, 1, 1]
    pa = [0, 0, 1, 2]
    pb = [0, 0, 1, 1]
    out = kernels.fill_by_provenance_python(kind, pa, pb, [1], add, 0)
    assert out == [0, 1, 2, 3]
    assert kernels.fill_by_provenance(kind, pa, pb, [1], add, 0) == out
    # sending the generator to 2 folds everything onto {0, 2}
    assert kernels.fill_by_provenance_python(kind, pa, pb, [2], add, 0) == [0, 2, 0, 2]


def _map_check_fixture():
    # A = Z/4, B = Z/2, action = multiplication by 3 on each
    add_A = [[(i + j) % 4 for j in range(4)] for i in range(4)]
    add_B = [[(i + j) % 2 for j in range(2)] for i in range(2)]
    acts_A = [[(3 * i) % 4 for i in range(4)]]
    acts_B = [[(3 * i) % 2 for i in range(2)]]
    good = [0, 1, 0, 1]  # reduction mod 2
    bad = [0, 1, 1, 0]  # not additive: f(1+1) != f(1)+f(1)
    return add_A, add_B, acts_A, acts_B, good, bad


def test_is_module_map_backends_agree():
    add_A, add_B, acts_A, acts_B, good, bad = _map_check_fixture()
    for f, expect in ((good, True), (bad, False)):
        assert kernels.is_module_map_python(f, add_A, add_B, acts_A, acts_B) is expect
        assert bool(kernels.is_module_map_numpy(f, add_A, add_B, acts_A, acts_B)) is expect
        assert kernels.is_module_map(f, add_A, add_B, acts_A, acts_B) is expect


def test_action_violation_detected():
    add_A, add_B, acts_A, acts_B, good, _ = _map_check_fixture()
    # additive but twists the action: constant-0 map is fine, so corrupt
    # the action table instead of the map
    acts_B_bad = [[0, 0]]
    assert not kernels.is_module_map_python(good, add_A, add_B, acts_A, acts_B_bad)
    assert not kernels.is_module_map_numpy(good, add_A, add_B, acts_A, acts_B_bad)


def test_dispatch_respects_mode(monkeypatch):
    A = [[1, 2], [2, 4]]
    expected = kernels.modp_nullspace_python([list(r) for r in A], 5)
    for mode in ("python", "numpy", "numba"):
        monkeypatch.setattr(kernels, "_MODE", mode)
        assert kernels.backend() == mode
        rank, basis = kernels.modp_nullspace(A, 5)
        assert rank == expected[0]
        assert len(basis) == len(expected[1])


def test_backend_reports_selected():
    assert kernels.backend() in ("python", "numpy", "numba")
