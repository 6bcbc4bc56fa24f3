"""Exact integer matrix routines: Hermite and Smith forms, kernels, solving.

Matrices are lists of row lists of Python ints; vectors are rows, and maps
act on the right (x @ A), so a lattice is the row span of its matrix.
Everything returns fresh lists and never mutates arguments.
"""


def xgcd(a, b):
    # Invariants:  x*a + y*b == g  and  nx*a + ny*b == ng
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def identity_matrix(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    if not A:
        return []
    n = len(B[0]) if B else 0
    out = []
    for row in A:
        acc = [0] * n
        for a, brow in zip(row, B):
            if a:
                for j, b in enumerate(brow):
                    if b:
                        acc[j] += a * b
        out.append(acc)
    return out


def vec_mat(v, A):
    n = len(A[0]) if A else 0
    acc = [0] * n
    for a, row in zip(v, A):
        if a:
            for j, b in enumerate(row):
                if b:
                    acc[j] += a * b
    return acc


def mat_transpose(A):
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def hnf_with_transform(A, ncols):
    """Row Hermite form of A.

    Returns (H, U, pivots) with U unimodular, U @ A == H + zero rows,
    H the nonzero echelon rows (positive pivots, entries above each pivot
    reduced into [0, pivot)), pivots the list of pivot column indices.
    U has len(A) rows; rows of U beyond len(H) span the left kernel of A.
    """
    m = len(A)
    W = [list(row) + [0] * (ncols - len(row)) for row in A]
    U = identity_matrix(m)
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, m):
            if W[i][c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            W[r], W[piv] = W[piv], W[r]
            U[r], U[piv] = U[piv], U[r]
        for i in range(r + 1, m):
            b = W[i][c]
            if b == 0:
                continue
            a = W[r][c]
            if b % a == 0:
                q = -(b // a)
                for jj in range(ncols):
                    W[i][jj] += q * W[r][jj]
                for jj in range(m):
                    U[i][jj] += q * U[r][jj]
            else:
                x, y, g = xgcd(a, b)
                mbg, ag = -(b // g), a // g
                for jj in range(ncols):
                    aa, bb = W[r][jj], W[i][jj]
                    W[r][jj] = x * aa + y * bb
                    W[i][jj] = mbg * aa + ag * bb
                for jj in range(m):
                    aa, bb = U[r][jj], U[i][jj]
                    U[r][jj] = x * aa + y * bb
                    U[i][jj] = mbg * aa + ag * bb
        if W[r][c] < 0:
            W[r] = [-t for t in W[r]]
            U[r] = [-t for t in U[r]]
        for i in range(r):
            q = W[i][c] // W[r][c]
            if q:
                for jj in range(ncols):
                    W[i][jj] -= q * W[r][jj]
                for jj in range(m):
                    U[i][jj] -= q * U[r][jj]
        r += 1
        if r == m:
            break
    H = [row for row in W[:r]]
    pivots = []
    for row in H:
        for j, t in enumerate(row):
            if t:
                pivots.append(j)
                break
    return H, U, pivots


def hnf(A, ncols):
    H, _, _ = hnf_with_transform(A, ncols)
    return H


def reduce_against_hnf(v, H, pivots):
    """Echelon-reduce v by the HNF rows; returns (residue, coeffs)."""
    w = list(v)
    coeffs = [0] * len(H)
    for i, c in enumerate(pivots):
        q = w[c] // H[i][c]
        if q:
            coeffs[i] = q
            for jj in range(len(w)):
                w[jj] -= q * H[i][jj]
    return w, coeffs


def in_row_span(v, H, pivots):
    res, _ = reduce_against_hnf(v, H, pivots)
    return all(t == 0 for t in res)


def solve_in_rows(v, A, ncols):
    """Find integer x with x @ A == v, or None."""
    H, U, pivots = hnf_with_transform(A, ncols)
    res, coeffs = reduce_against_hnf(list(v) + [0] * (ncols - len(v)), H, pivots)
    if any(res):
        return None
    x = [0] * len(A)
    for ci, urow in zip(coeffs, U):
        if ci:
            for j, u in enumerate(urow):
                x[j] += ci * u
    return x


def left_kernel_basis(A, ncols):
    """Basis rows for {x : x @ A == 0}."""
    H, U, _ = hnf_with_transform(A, ncols)
    return [row[:] for row in U[len(H):]]


def smith_with_transforms(A, ncols):
    """Smith form: returns (D, S, T) with S @ A @ T == D.

    D is len(A) x ncols, zero off the main diagonal, diagonal entries
    nonnegative with d1 | d2 | ... ; S and T are unimodular.
    """
    m = len(A)
    n = ncols
    D = [list(row) + [0] * (n - len(row)) for row in A]
    S = identity_matrix(m)
    T = identity_matrix(n)

    def row_combine(i1, i2, c):
        a, b = D[i1][c], D[i2][c]
        if b == 0:
            return
        if a == 0:
            D[i1], D[i2] = D[i2], D[i1]
            S[i1], S[i2] = S[i2], S[i1]
            return
        if b % a == 0:
            q = -(b // a)
            for jj in range(n):
                D[i2][jj] += q * D[i1][jj]
            for jj in range(m):
                S[i2][jj] += q * S[i1][jj]
            return
        x, y, g = xgcd(a, b)
        mbg, ag = -(b // g), a // g
        for jj in range(n):
            aa, bb = D[i1][jj], D[i2][jj]
            D[i1][jj] = x * aa + y * bb
            D[i2][jj] = mbg * aa + ag * bb
        for jj in range(m):
            aa, bb = S[i1][jj], S[i2][jj]
            S[i1][jj] = x * aa + y * bb
            S[i2][jj] = mbg * aa + ag * bb

    def col_combine(j1, j2, r):
        a, b = D[r][j1], D[r][j2]
        if b == 0:
            return
        if a == 0:
            for Di in D:
                Di[j1], Di[j2] = Di[j2], Di[j1]
            for Ti in T:
                Ti[j1], Ti[j2] = Ti[j2], Ti[j1]
            return
        if b % a == 0:
            q = -(b // a)
            for Di in D:
                Di[j2] += q * Di[j1]
            for Ti in T:
                Ti[j2] += q * Ti[j1]
            return
        x, y, g = xgcd(a, b)
        mbg, ag = -(b // g), a // g
        for Di in D:
            aa, bb = Di[j1], Di[j2]
            Di[j1] = x * aa + y * bb
            Di[j2] = mbg * aa + ag * bb
        for Ti in T:
            aa, bb = Ti[j1], Ti[j2]
            Ti[j1] = x * aa + y * bb
            Ti[j2] = mbg * aa + ag * bb

    k = 0
    while k < min(m, n):
        # move a nonzero entry into (k, k)
        piv = None
        for i in range(k, m):
            for j in range(k, n):
                if D[i][j]:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        i0, j0 = piv
        if i0 != k:
            D[k], D[i0] = D[i0], D[k]
            S[k], S[i0] = S[i0], S[k]
        if j0 != k:
            for Di in D:
                Di[k], Di[j0] = Di[j0], Di[k]
            for Ti in T:
                Ti[k], Ti[j0] = Ti[j0], Ti[k]
        while True:
            for i in range(k + 1, m):
                row_combine(k, i, k)
            for j in range(k + 1, n):
                col_combine(k, j, k)
            if all(D[i][k] == 0 for i in range(k + 1, m)) and all(
                D[k][j] == 0 for j in range(k + 1, n)
            ):
                break
        if D[k][k] < 0:
            D[k] = [-t for t in D[k]]
            S[k] = [-t for t in S[k]]
        k += 1

    # enforce the divisibility chain
    changed = True
    while changed:
        changed = False
        for i in range(k - 1):
            a, b = D[i][i], D[i + 1][i + 1]
            if a and b % a != 0:
                # fold b into a's position and re-clear
                for Di in D:
                    Di[i] += Di[i + 1]
                for Ti in T:
                    Ti[i] += Ti[i + 1]
                row_combine(i, i + 1, i)
                while True:
                    for j in range(i + 1, n):
                        col_combine(i, j, i)
                    for r2 in range(i + 1, m):
                        row_combine(i, r2, i)
                    if all(D[i][j] == 0 for j in range(i + 1, n)) and all(
                        D[r2][i] == 0 for r2 in range(i + 1, m)
                    ):
                        break
                if D[i][i] < 0:
                    D[i] = [-t for t in D[i]]
                    S[i] = [-t for t in S[i]]
                if D[i + 1][i + 1] < 0:
                    D[i + 1] = [-t for t in D[i + 1]]
                    S[i + 1] = [-t for t in S[i + 1]]
                changed = True
    return D, S, T


def smith_diagonal(A, ncols):
    D, _, _ = smith_with_transforms(A, ncols)
    out = []
    for i in range(min(len(D), ncols)):
        out.append(D[i][i])
    return out
