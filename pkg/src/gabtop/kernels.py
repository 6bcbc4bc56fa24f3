"""Hot loops for finite-ring computations, with selectable backends.

Three implementations of each kernel: a numba-compiled one, a vectorized
numpy one, and a plain-python reference. GABTOP_KERNELS=numba|numpy|python
picks the backend (default numba, falling back to numpy when numba is
unavailable).

Kernels:
  * modp_nullspace: right null space of an integer matrix mod a prime
  * fill_by_provenance: rebuild a map from generator images along the
    expression tree of a finite module enumeration
  * is_module_map: verify additivity and ring-linearity against tables
"""

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


_MODE = os.environ.get("GABTOP_KERNELS", "numba" if HAS_NUMBA else "numpy")
if _MODE == "numba" and not HAS_NUMBA:
    _MODE = "numpy"


def backend():
    return _MODE


# ---------------------------------------------------------------- nullspace


def _modp_rref_python(A, p):
    A = [[x % p for x in row] for row in A]
    m = len(A)
    n = len(A[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, m):
            if A[i][c] % p:
                piv = i
                break
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [(x * inv) % p for x in A[r]]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(A[i][j] - f * A[r][j]) % p for j in range(n)]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return A, pivots


def modp_nullspace_python(A, p):
    m = len(A)
    n = len(A[0]) if m else 0
    if n == 0:
        return 0, []
    R, pivots = _modp_rref_python(A, p)
    rank = len(pivots)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for r, pc in enumerate(pivots):
            v[pc] = (-R[r][fc]) % p
        basis.append(v)
    return rank, basis


def _modp_rref_numpy(A, p):
    A = np.array(A, dtype=np.int64) % p
    m, n = A.shape
    pivots = []
    r = 0
    for c in range(n):
        rows = np.nonzero(A[r:, c])[0]
        if rows.size == 0:
            continue
        piv = r + rows[0]
        A[[r, piv]] = A[[piv, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r] = (A[r] * inv) % p
        mask = np.nonzero(A[:, c])[0]
        mask = mask[mask != r]
        A[mask] = (A[mask] - np.outer(A[mask, c], A[r])) % p
        pivots.append(c)
        r += 1
        if r == m:
            break
    return A, pivots


def modp_nullspace_numpy(A, p):
    A = np.atleast_2d(np.array(A, dtype=np.int64))
    m, n = A.shape if A.size else (0, 0)
    if n == 0:
        return 0, []
    R, pivots = _modp_rref_numpy(A, p)
    rank = len(pivots)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = np.zeros(n, dtype=np.int64)
        v[fc] = 1
        for r, pc in enumerate(pivots):
            v[pc] = (-R[r][fc]) % p
        basis.append([int(x) for x in v])
    return rank, basis


@njit(cache=True)
def _modp_rref_numba(A, p):  # pragma: no cover - exercised via dispatch
    m, n = A.shape
    npv = 0
    pivots = np.empty(n, dtype=np.int64)
    r = 0
    for c in range(n):
        piv = -1
        for i in range(r, m):
            if A[i, c] % p != 0:
                piv = i
                break
        if piv < 0:
            continue
        for j in range(n):
            t = A[r, j]
            A[r, j] = A[piv, j]
            A[piv, j] = t
        # modular inverse by Fermat needs p prime; use extended Euclid
        a0, b0 = A[r, c] % p, p
        x0, x1 = 1, 0
        while b0:
            q = a0 // b0
            a0, b0 = b0, a0 - q * b0
            x0, x1 = x1, x0 - q * x1
        inv = x0 % p
        for j in range(n):
            A[r, j] = (A[r, j] * inv) % p
        for i in range(m):
            if i != r and A[i, c] != 0:
                f = A[i, c]
                for j in range(n):
                    A[i, j] = (A[i, j] - f * A[r, j]) % p
        pivots[npv] = c
        npv += 1
        r += 1
        if r == m:
            break
    return A, pivots[:npv]


def modp_nullspace_numba(A, p):
    A = np.atleast_2d(np.array(A, dtype=np.int64)) % p
    m, n = A.shape if A.size else (0, 0)
    if n == 0:
        return 0, []
    R, pivots = _modp_rref_numba(A.copy(), p)
    pivots = [int(c) for c in pivots]
    rank = len(pivots)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for r, pc in enumerate(pivots):
            v[pc] = int((-R[r][fc]) % p)
        basis.append(v)
    return rank, basis


def modp_nullspace(A, p):
    """(rank, basis rows of {x : A @ x = 0 mod p}). A is row-major."""
    if _MODE == "python":
        return modp_nullspace_python([list(r) for r in A], p)
    if _MODE == "numba":
        return modp_nullspace_numba(A, p)
    return modp_nullspace_numpy(A, p)


# ------------------------------------------------------------- provenance

# provenance kinds: 0 = generator (a = generator index),
# 1 = sum (a, b = earlier element indices), 2 = zero


def fill_by_provenance_python(kind, pa, pb, gen_images, add_B, zero_B):
    n = len(kind)
    out = [0] * n
    for i in range(n):
        k = kind[i]
        if k == 2:
            out[i] = zero_B
        elif k == 0:
            out[i] = gen_images[pa[i]]
        else:
            out[i] = add_B[out[pa[i]]][out[pb[i]]]
    return out


@njit(cache=True)
def _fill_numba(kind, pa, pb, gen_images, add_B, zero_B):  # pragma: no cover
    n = kind.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        k = kind[i]
        if k == 2:
            out[i] = zero_B
        elif k == 0:
            out[i] = gen_images[pa[i]]
        else:
            out[i] = add_B[out[pa[i]], out[pb[i]]]
    return out


def fill_by_provenance(kind, pa, pb, gen_images, add_B, zero_B):
    """Extend generator images to the whole module along its build order."""
    if _MODE == "numba":
        return [
            int(x)
            for x in _fill_numba(
                np.asarray(kind, dtype=np.int64),
                np.asarray(pa, dtype=np.int64),
                np.asarray(pb, dtype=np.int64),
                np.asarray(gen_images, dtype=np.int64),
                np.asarray(add_B, dtype=np.int64),
                zero_B,
            )
        ]
    # numpy offers no win here (sequential dependency); share the reference
    return fill_by_provenance_python(kind, pa, pb, gen_images, add_B, zero_B)


# ------------------------------------------------------------ map checking


def is_module_map_python(f, add_A, add_B, acts_A, acts_B):
    n = len(f)
    for a in range(n):
        for b in range(n):
            if f[add_A[a][b]] != add_B[f[a]][f[b]]:
                return False
    for t in range(len(acts_A)):
        Aa, Ab = acts_A[t], acts_B[t]
        for a in range(n):
            if f[Aa[a]] != Ab[f[a]]:
                return False
    return True


def is_module_map_numpy(f, add_A, add_B, acts_A, acts_B):
    f = np.asarray(f, dtype=np.int64)
    add_A = np.asarray(add_A, dtype=np.int64)
    add_B = np.asarray(add_B, dtype=np.int64)
    if not np.array_equal(f[add_A], add_B[np.ix_(f, f)]):
        return False
    for Aa, Ab in zip(acts_A, acts_B):
        Aa = np.asarray(Aa, dtype=np.int64)
        Ab = np.asarray(Ab, dtype=np.int64)
        if not np.array_equal(f[Aa], Ab[f]):
            return False
    return True


@njit(cache=True)
def _is_map_numba(f, add_A, add_B, acts_A, acts_B):  # pragma: no cover
    n = f.shape[0]
    for a in range(n):
        for b in range(n):
            if f[add_A[a, b]] != add_B[f[a], f[b]]:
                return False
    for t in range(acts_A.shape[0]):
        for a in range(n):
            if f[acts_A[t, a]] != acts_B[t, f[a]]:
                return False
    return True


def is_module_map(f, add_A, add_B, acts_A, acts_B):
    """Check f (index vector) is additive and commutes with the actions.

    acts_A / acts_B are lists of permutation-style action vectors, one per
    ring basis element (acts_A[t][a] = index of a·b_t in A, same for B).
    """
    if _MODE == "numba":
        return bool(
            _is_map_numba(
                np.asarray(f, dtype=np.int64),
                np.asarray(add_A, dtype=np.int64),
                np.asarray(add_B, dtype=np.int64),
                np.asarray(acts_A, dtype=np.int64).reshape(len(acts_A), -1),
                np.asarray(acts_B, dtype=np.int64).reshape(len(acts_B), -1),
            )
        )
    if _MODE == "numpy":
        return is_module_map_numpy(f, add_A, add_B, acts_A, acts_B)
    return is_module_map_python(f, add_A, add_B, acts_A, acts_B)


# ----------------------------------------------------------- lattice closure


def hnf_mod_q_python(rows, ncols, q):
    W = []
    for r in rows:
        w = [x % q for x in r]
        if any(w):
            W.append(w)
    for j in range(ncols):
        w = [0] * ncols
        w[j] = q
        W.append(w)
    H = []
    for j in range(ncols):
        while True:
            live = [i for i, w in enumerate(W) if w[j]]
            if len(live) == 1:
                break
            b = min(live, key=lambda i: W[i][j])
            base = W[b]
            for i in live:
                if i == b:
                    continue
                k = W[i][j] // base[j]
                W[i] = [(x - k * y) % q for x, y in zip(W[i], base)]
            W = [w for w in W if any(w)]
        H.append(W[live[0]])
        del W[live[0]]
        for i in range(j):
            k = H[i][j] // H[j][j]
            if k:
                H[i] = [x - k * y for x, y in zip(H[i], H[j])]
    return H


def hnf_mod_q_numpy(rows, ncols, q):
    W = np.asarray(list(rows), dtype=np.int64).reshape(-1, ncols) % q
    W = np.vstack([W, q * np.eye(ncols, dtype=np.int64)])
    W = W[np.any(W != 0, axis=1)]
    H = np.zeros((ncols, ncols), dtype=np.int64)
    for j in range(ncols):
        while True:
            live = np.flatnonzero(W[:, j])
            if live.size == 1:
                break
            b = live[np.argmin(W[live, j])]
            base = W[b]
            sel = live[live != b]
            k = W[sel, j] // base[j]
            W[sel] = (W[sel] - k[:, None] * base[None, :]) % q
            W = W[np.any(W != 0, axis=1)]
        i0 = live[0]
        H[j] = W[i0]
        W = np.delete(W, i0, axis=0)
        if j:
            k = H[:j, j] // H[j, j]
            H[:j] -= k[:, None] * H[j][None, :]
    return [[int(x) for x in r] for r in H]


def hnf_mod_q(rows, ncols, q):
    """Hermite form (ncols x ncols, upper triangular) of span(rows) + q*Z^n.

    The q*identity rows take part in the elimination, so entries never grow
    past 2*q*ncols and pivots divide q. Rows of q*I that survive untouched
    become the pivots of columns the input never reaches.
    """
    if _MODE == "python":
        return hnf_mod_q_python(rows, ncols, q)
    # the numpy sweep is already vectorised; numba adds nothing here
    return hnf_mod_q_numpy(rows, ncols, q)
