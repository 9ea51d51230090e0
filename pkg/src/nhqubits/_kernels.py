"""Hot numeric kernels for small dense complex matrices.

Every function here is written in the subset of numpy that numba supports in
nopython mode, and is wrapped by :func:`nhqubits._accel.jit`.  Public callers
should go through :mod:`nhqubits.linalg` and :mod:`nhqubits.dynamics`, which
validate inputs and turn status codes into exceptions.
"""

import numpy as np

from ._accel import jit

EPS = 2.220446049250313e-16

# status codes shared with the python wrappers
OK = 0
NOT_CONVERGED = 1
STEP_UNDERFLOW = 2
MAX_STEPS = 3


@jit
def norm1(a):
    """Maximum absolute column sum."""
    n = a.shape[0]
    best = 0.0
    for j in range(n):
        s = 0.0
        for i in range(n):
            s += abs(a[i, j])
        if s > best:
            best = s
    return best


@jit
def frobenius(a):
    s = 0.0
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            s += a[i, j].real ** 2 + a[i, j].imag ** 2
    return np.sqrt(s)


@jit
def vec_norm(x):
    s = 0.0
    for i in range(x.shape[0]):
        s += x[i].real ** 2 + x[i].imag ** 2
    return np.sqrt(s)


# ---------------------------------------------------------------------------
# eigenvalues: Householder Hessenberg reduction + shifted complex QR
# ---------------------------------------------------------------------------


@jit
def hessenberg(a):
    """Return an upper Hessenberg matrix unitarily similar to ``a``."""
    n = a.shape[0]
    h = a.copy()
    v = np.zeros(n, dtype=np.complex128)
    for k in range(n - 2):
        alpha = 0.0
        for i in range(k + 1, n):
            alpha += h[i, k].real ** 2 + h[i, k].imag ** 2
        alpha = np.sqrt(alpha)
        if alpha == 0.0:
            continue
        x0 = h[k + 1, k]
        if abs(x0) > 0.0:
            phase = x0 / abs(x0)
        else:
            phase = 1.0 + 0.0j
        for i in range(n):
            v[i] = 0.0
        for i in range(k + 1, n):
            v[i] = h[i, k]
        v[k + 1] += phase * alpha
        vn = vec_norm(v)
        for i in range(k + 1, n):
            v[i] /= vn
        # left: h <- (I - 2 v v^H) h
        for j in range(n):
            s = 0.0j
            for i in range(k + 1, n):
                s += np.conj(v[i]) * h[i, j]
            for i in range(k + 1, n):
                h[i, j] -= 2.0 * v[i] * s
        # right: h <- h (I - 2 v v^H)
        for i in range(n):
            s = 0.0j
            for j in range(k + 1, n):
                s += h[i, j] * v[j]
            for j in range(k + 1, n):
                h[i, j] -= 2.0 * s * np.conj(v[j])
        for i in range(k + 2, n):
            h[i, k] = 0.0
    return h


@jit
def _givens(x, y):
    """(c, s) with c real such that [[c, s], [-conj(s), c]] @ [x, y] = [r, 0]."""
    ax = abs(x)
    ay = abs(y)
    if ay == 0.0:
        return 1.0, 0.0j
    if ax == 0.0:
        return 0.0, 1.0 + 0.0j
    rho = np.sqrt(ax * ax + ay * ay)
    c = ax / rho
    s = (x / ax) * np.conj(y) / rho
    return c, s


@jit
def hessenberg_eigvals(h0, max_iter_per_eig):
    """Eigenvalues of an upper Hessenberg matrix by single-shift QR.

    Returns ``(w, status, subdiag)`` where ``subdiag`` is the magnitude of the
    sub-diagonal entry that failed to deflate when ``status`` is not ``OK``.
    """
    n = h0.shape[0]
    h = h0.copy()
    w = np.zeros(n, dtype=np.complex128)
    cs = np.zeros(n, dtype=np.float64)
    sn = np.zeros(n, dtype=np.complex128)
    scale = norm1(h)
    if scale == 0.0:
        return w, OK, 0.0
    hi = n - 1
    its = 0
    while hi >= 0:
        if hi == 0:
            w[0] = h[0, 0]
            break
        lo = hi
        while lo > 0:
            s = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if s == 0.0:
                s = scale
            if abs(h[lo, lo - 1]) <= EPS * s:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            w[hi] = h[hi, hi]
            hi -= 1
            its = 0
            continue
        if its >= max_iter_per_eig:
            return w, NOT_CONVERGED, abs(h[hi, hi - 1])

        a = h[hi - 1, hi - 1]
        b = h[hi - 1, hi]
        c = h[hi, hi - 1]
        d = h[hi, hi]
        if its > 0 and its % 10 == 0:
            # exceptional shift to break cycles
            mu = d + 0.75 * abs(c) + 0.0j
        else:
            half = 0.5 * (a - d)
            disc = np.sqrt(half * half + b * c)
            mu1 = 0.5 * (a + d) + disc
            mu2 = 0.5 * (a + d) - disc
            mu = mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2

        for k in range(lo, hi + 1):
            h[k, k] -= mu
        for k in range(lo, hi):
            gc, gs = _givens(h[k, k], h[k + 1, k])
            cs[k] = gc
            sn[k] = gs
            for j in range(k, hi + 1):
                t1 = h[k, j]
                t2 = h[k + 1, j]
                h[k, j] = gc * t1 + gs * t2
                h[k + 1, j] = -np.conj(gs) * t1 + gc * t2
        for k in range(lo, hi):
            gc = cs[k]
            gs = sn[k]
            for i in range(lo, min(k + 2, hi) + 1):
                t1 = h[i, k]
                t2 = h[i, k + 1]
                h[i, k] = gc * t1 + np.conj(gs) * t2
                h[i, k + 1] = -gs * t1 + gc * t2
        for k in range(lo, hi + 1):
            h[k, k] += mu
        its += 1
    return w, OK, 0.0


# ---------------------------------------------------------------------------
# linear solves and inverse iteration
# ---------------------------------------------------------------------------


@jit
def lu_factor(a, pivot_floor):
    """LU with partial pivoting; pivots smaller than ``pivot_floor`` are
    replaced by ``pivot_floor`` so that exactly singular shifts still solve."""
    n = a.shape[0]
    lu = a.copy()
    piv = np.arange(n)
    for k in range(n):
        p = k
        best = abs(lu[k, k])
        for i in range(k + 1, n):
            if abs(lu[i, k]) > best:
                best = abs(lu[i, k])
                p = i
        if p != k:
            for j in range(n):
                tmp = lu[k, j]
                lu[k, j] = lu[p, j]
                lu[p, j] = tmp
            tmp_i = piv[k]
            piv[k] = piv[p]
            piv[p] = tmp_i
        if abs(lu[k, k]) < pivot_floor:
            lu[k, k] = pivot_floor + 0.0j
        for i in range(k + 1, n):
            lu[i, k] /= lu[k, k]
            f = lu[i, k]
            for j in range(k + 1, n):
                lu[i, j] -= f * lu[k, j]
    return lu, piv


@jit
def lu_solve(lu, piv, b):
    n = lu.shape[0]
    x = np.empty(n, dtype=np.complex128)
    for i in range(n):
        x[i] = b[piv[i]]
    for i in range(n):
        for j in range(i):
            x[i] -= lu[i, j] * x[j]
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            x[i] -= lu[i, j] * x[j]
        x[i] /= lu[i, i]
    return x


@jit
def residual(a, lam, v):
    n = a.shape[0]
    s = 0.0
    for i in range(n):
        r = -lam * v[i]
        for j in range(n):
            r += a[i, j] * v[j]
        s += r.real ** 2 + r.imag ** 2
    return np.sqrt(s)


@jit
def _start_vector(n, seed):
    # deterministic, generic (no zero components, no special structure)
    x = np.empty(n, dtype=np.complex128)
    for i in range(n):
        phi = 0.7548776662466927 * (i + 1) + 0.5698402909980532 * (seed + 1)
        x[i] = np.cos(2.0 * np.pi * phi) + 1j * np.sin(2.0 * np.pi * phi * 1.3)
        x[i] *= 1.0 + 0.1 * i
    return x / vec_norm(x)


@jit
def inverse_iteration(a, lam, basis, n_basis, seed, n_iter):
    """Right eigenvector for ``lam`` by inverse iteration.

    Components along the first ``n_basis`` columns of ``basis`` are projected
    out each sweep (used for degenerate clusters).  Returns ``(v, residual)``.
    """
    n = a.shape[0]
    scale = max(norm1(a), 1e-300)
    shifted = a.copy()
    for i in range(n):
        shifted[i, i] -= lam
    lu, piv = lu_factor(shifted, EPS * scale)
    x = _start_vector(n, seed)
    for _ in range(n_iter):
        x = lu_solve(lu, piv, x)
        for m in range(n_basis):
            proj = 0.0j
            for i in range(n):
                proj += np.conj(basis[i, m]) * x[i]
            for i in range(n):
                x[i] -= proj * basis[i, m]
        nx = vec_norm(x)
        if nx == 0.0 or not np.isfinite(nx):
            x = _start_vector(n, seed + 7)
            continue
        x /= nx
    # fix the phase: largest component real and positive
    k = 0
    for i in range(n):
        if abs(x[i]) > abs(x[k]) * (1.0 + 1e-12):
            k = i
    x *= np.conj(x[k]) / abs(x[k])
    return x, residual(a, lam, x)


@jit
def eig_kernel(a, max_iter_per_eig, cluster_tol, accept_tol):
    """Eigenvalues, unit right eigenvectors and residuals of a square matrix.

    ``status`` is ``NOT_CONVERGED`` when QR fails; ``qr_res`` is then the
    undeflated sub-diagonal magnitude.
    """
    n = a.shape[0]
    w, status, qr_res = hessenberg_eigvals(hessenberg(a), max_iter_per_eig)
    vecs = np.zeros((n, n), dtype=np.complex128)
    res = np.zeros(n, dtype=np.float64)
    if status != OK:
        return w, vecs, res, status, qr_res
    basis = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        n_basis = 0
        for j in range(i):
            if abs(w[j] - w[i]) <= cluster_tol:
                for r in range(n):
                    basis[r, n_basis] = vecs[r, j]
                n_basis += 1
        v, r_i = inverse_iteration(a, w[i], basis, n_basis, i, 3)
        if n_basis > 0 and r_i > accept_tol:
            # defective cluster: no independent vector exists, keep the best one
            v2, r2 = inverse_iteration(a, w[i], basis, 0, i, 3)
            if r2 < r_i:
                v = v2
                r_i = r2
        for r in range(n):
            vecs[r, i] = v[r]
        res[i] = r_i
    return w, vecs, res, OK, 0.0


# ---------------------------------------------------------------------------
# matrix exponential: scaling and squaring with diagonal Pade approximants
# ---------------------------------------------------------------------------

_B3 = np.array([120.0, 60.0, 12.0, 1.0])
_B5 = np.array([30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0])
_B7 = np.array([17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0])
_B9 = np.array([
    17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
    2162160.0, 110880.0, 3960.0, 90.0, 1.0,
])
_B13 = np.array([
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
])
_THETA = np.array([
    1.495585217958292e-2, 2.539398330063230e-1, 9.504178996162932e-1,
    2.097847961257068e0, 5.371920351148152e0,
])


@jit
def _pade_low(a, b, ident):
    # degrees 3..9: u = a * sum odd terms, v = sum even terms
    m = b.shape[0] - 1
    a2 = np.dot(a, a)
    pw = ident.copy()
    u_in = b[1] * ident
    v = b[0] * ident
    for k in range(1, m // 2 + 1):
        pw = np.dot(pw, a2)
        v = v + b[2 * k] * pw
        u_in = u_in + b[2 * k + 1] * pw
    return np.dot(a, u_in), v


@jit
def _pade13(a, ident):
    b = _B13
    a2 = np.dot(a, a)
    a4 = np.dot(a2, a2)
    a6 = np.dot(a2, a4)
    u = np.dot(a, np.dot(a6, b[13] * a6 + b[11] * a4 + b[9] * a2)
               + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = (np.dot(a6, b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
    return u, v


@jit
def expm_kernel(a):
    """exp(a) for a square complex matrix (Higham 2005 degree selection)."""
    n = a.shape[0]
    ident = np.eye(n, dtype=np.complex128)
    nrm = norm1(a)
    if nrm <= _THETA[0]:
        u, v = _pade_low(a, _B3, ident)
        return np.ascontiguousarray(np.linalg.solve(v - u, v + u))
    if nrm <= _THETA[1]:
        u, v = _pade_low(a, _B5, ident)
        return np.ascontiguousarray(np.linalg.solve(v - u, v + u))
    if nrm <= _THETA[2]:
        u, v = _pade_low(a, _B7, ident)
        return np.ascontiguousarray(np.linalg.solve(v - u, v + u))
    if nrm <= _THETA[3]:
        u, v = _pade_low(a, _B9, ident)
        return np.ascontiguousarray(np.linalg.solve(v - u, v + u))
    s = max(0, int(np.ceil(np.log2(nrm / _THETA[4]))))
    scaled = a / (2.0 ** s)
    u, v = _pade13(scaled, ident)
    r = np.ascontiguousarray(np.linalg.solve(v - u, v + u))
    for _ in range(s):
        r = np.dot(r, r)
    return r


@jit
def propagate_exact(m, y0, times):
    """Rows ``exp(m * t_k) @ y0`` for each sample time."""
    out = np.empty((times.shape[0], y0.shape[0]), dtype=np.complex128)
    for k in range(times.shape[0]):
        out[k, :] = np.dot(expm_kernel(m * times[k]), y0)
    return out


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) for the linear system y' = m y
# ---------------------------------------------------------------------------

_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0,
)
_B1, _B3_, _B4, _B5_, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0,
)


@jit
def dopri_linear(m, y0, times, rtol, atol, max_steps):
    """Integrate y' = m y from ``times[0]`` and record y at every sample time.

    Returns ``(out, n_done, status, t_reached)``; rows past ``n_done`` are
    unset when integration stops early.
    """
    n_t = times.shape[0]
    dim = y0.shape[0]
    out = np.zeros((n_t, dim), dtype=np.complex128)
    y = y0.copy()
    out[0, :] = y
    t = times[0]
    scale = max(norm1(m), 1e-12)
    h = 0.01 / scale
    k1 = np.dot(m, y)
    steps = 0
    for idx in range(1, n_t):
        t_end = times[idx]
        while t < t_end:
            if steps >= max_steps:
                return out, idx, MAX_STEPS, t
            h_step = min(h, t_end - t)
            if h_step < 1e-14 * max(1.0, abs(t)):
                return out, idx, STEP_UNDERFLOW, t
            k2 = np.dot(m, y + h_step * (_A21 * k1))
            k3 = np.dot(m, y + h_step * (_A31 * k1 + _A32 * k2))
            k4 = np.dot(m, y + h_step * (_A41 * k1 + _A42 * k2 + _A43 * k3))
            k5 = np.dot(m, y + h_step * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
            k6 = np.dot(m, y + h_step * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5))
            y_new = y + h_step * (_B1 * k1 + _B3_ * k3 + _B4 * k4 + _B5_ * k5 + _B6 * k6)
            k7 = np.dot(m, y_new)
            err_vec = h_step * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
            err = 0.0
            for i in range(dim):
                tol = atol + rtol * max(abs(y[i]), abs(y_new[i]))
                e = abs(err_vec[i]) / tol
                if e > err:
                    err = e
            steps += 1
            if err <= 1.0:
                t = t + h_step if h_step < t_end - t else t_end
                y = y_new
                k1 = k7
                fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
                h_new = h_step * fac
                h = max(h, h_new) if h_step < h else h_new
            else:
                h = h_step * max(0.2, 0.9 * err ** -0.2)
        out[idx, :] = y
    return out, n_t, OK, t
