"""Hot numeric kernels.

Every function here is written as a plain numpy function and wrapped with
``accel.maybe_jit``: with numba present (and PENSIG_NO_NUMBA unset) these
compile to machine code, otherwise the same source runs as pure numpy.

Graded flat layout used for signature coefficients: the level-k block has
2**k entries and starts at offset 2**k - 2; words are indexed with the
first letter most significant and letter order (x=0, y=1). A kernel never
validates its arguments; wrappers in the public modules do.
"""

import numpy as np

from .accel import maybe_jit


def flat_dim(level_max: int) -> int:
    """Total number of coefficients for levels 1..level_max of a 2-D path."""
    return 2 ** (level_max + 1) - 2


def block_slice(level: int) -> slice:
    """Slice of the level-k block inside the graded flat layout."""
    return slice(2**level - 2, 2 ** (level + 1) - 2)


def _path_signature_flat(xy, m):
    """Signature of the piecewise-linear path through `xy`, levels 1..m.

    Each segment contributes its tensor exponential (level-k term is the
    k-fold self tensor power of the displacement divided by k!); segments
    are combined with the truncated tensor concatenation product.
    """
    dim = 2 ** (m + 1) - 2
    sig = np.zeros(dim)
    seg = np.empty(dim)
    for s in range(xy.shape[0] - 1):
        dx = xy[s + 1, 0] - xy[s, 0]
        dy = xy[s + 1, 1] - xy[s, 1]
        if dx == 0.0 and dy == 0.0:
            continue
        seg[0] = dx
        seg[1] = dy
        for j in range(2, m + 1):
            off = 2**j - 2
            poff = 2 ** (j - 1) - 2
            inv = 1.0 / j
            for a in range(2 ** (j - 1)):
                seg[off + 2 * a] = seg[poff + a] * dx * inv
                seg[off + 2 * a + 1] = seg[poff + a] * dy * inv
        # concatenate: update high levels first so lower ones are still
        # the pre-segment values they multiply against
        for k in range(m, 0, -1):
            off_k = 2**k - 2
            for j in range(1, k):
                uoff = 2**j - 2
                vsize = 2 ** (k - j)
                voff = vsize - 2
                for a in range(2**j):
                    ua = sig[uoff + a]
                    if ua == 0.0:
                        continue
                    base = off_k + a * vsize
                    for b in range(vsize):
                        sig[base + b] += ua * seg[voff + b]
            for q in range(2**k):
                sig[off_k + q] += seg[off_k + q]
    return sig


path_signature_flat = maybe_jit(_path_signature_flat)


def _window_signature_rows(xy, ws, m):
    """Per-point sliding-window signatures.

    Row n holds the flat signature of the sub-path at indices
    max(0, n-ws)..min(N-1, n+ws); windows are truncated at the ends.
    Also returns each window's arc length. Windows with zero arc length
    (single point or no motion) yield an all-zero row.
    """
    n_pts = xy.shape[0]
    dim = 2 ** (m + 1) - 2
    rows = np.zeros((n_pts, dim))
    lengths = np.zeros(n_pts)
    for n in range(n_pts):
        lo = n - ws
        if lo < 0:
            lo = 0
        hi = n + ws
        if hi > n_pts - 1:
            hi = n_pts - 1
        arc = 0.0
        for s in range(lo, hi):
            dx = xy[s + 1, 0] - xy[s, 0]
            dy = xy[s + 1, 1] - xy[s, 1]
            arc += np.sqrt(dx * dx + dy * dy)
        lengths[n] = arc
        if arc > 0.0:
            rows[n] = path_signature_flat(xy[lo : hi + 1], m)
    return rows, lengths


window_signature_rows = maybe_jit(_window_signature_rows)


def _dtw_accumulate(a, b, band):
    """DTW over two feature sequences with Euclidean local cost.

    Steps (1,0), (0,1), (1,1); `band` < 0 means unconstrained, otherwise a
    Sakoe-Chiba band |i - j| <= band. Returns the accumulated cost of the
    cheapest monotone path and that path's cell count (ties broken
    diagonal, then vertical, then horizontal); cost is inf when the band
    admits no path.
    """
    na = a.shape[0]
    nb = b.shape[0]
    nf = a.shape[1]
    acc = np.full((na + 1, nb + 1), np.inf)
    steps = np.zeros((na + 1, nb + 1), np.int64)
    acc[0, 0] = 0.0
    for i in range(1, na + 1):
        if band >= 0:
            jlo = i - band
            if jlo < 1:
                jlo = 1
            jhi = i + band
            if jhi > nb:
                jhi = nb
        else:
            jlo = 1
            jhi = nb
        for j in range(jlo, jhi + 1):
            c = 0.0
            for q in range(nf):
                d = a[i - 1, q] - b[j - 1, q]
                c += d * d
            c = np.sqrt(c)
            best = acc[i - 1, j - 1]
            nsteps = steps[i - 1, j - 1]
            if acc[i - 1, j] < best:
                best = acc[i - 1, j]
                nsteps = steps[i - 1, j]
            if acc[i, j - 1] < best:
                best = acc[i, j - 1]
                nsteps = steps[i, j - 1]
            acc[i, j] = c + best
            steps[i, j] = nsteps + 1
    return acc[na, nb], steps[na, nb]


dtw_accumulate = maybe_jit(_dtw_accumulate)


def _gru_forward_pass(x, w_r, w_z, w_c, u_r, u_z, u_c, b_r, b_z, b_c, y0):
    """Run a gated recurrent layer over a sequence.

    x is (T, input); returns the hidden states y (T, hidden) together with
    the per-step reset gate, update gate and candidate activations needed
    by the backward pass.
    """
    T = x.shape[0]
    h = b_r.shape[0]
    y = np.empty((T, h))
    r = np.empty((T, h))
    z = np.empty((T, h))
    c = np.empty((T, h))
    yprev = y0.copy()
    for t in range(T):
        xt = x[t]
        rt = 1.0 / (1.0 + np.exp(-(w_r @ xt + u_r @ yprev + b_r)))
        zt = 1.0 / (1.0 + np.exp(-(w_z @ xt + u_z @ yprev + b_z)))
        ct = np.tanh(w_c @ xt + u_c @ (rt * yprev) + b_c)
        yt = zt * yprev + (1.0 - zt) * ct
        r[t] = rt
        z[t] = zt
        c[t] = ct
        y[t] = yt
        yprev = yt
    return y, r, z, c


gru_forward_pass = maybe_jit(_gru_forward_pass)


def _gru_backward_pass(x, y0, y, r, z, c, gy, w_r, w_z, w_c, u_r, u_z, u_c):
    """Backpropagate through a gated recurrent layer.

    gy is (T, hidden): the loss gradient arriving at each hidden state
    from outside the recurrence. Returns gradients for the nine layer
    parameters plus the gradient with respect to the input sequence.
    """
    T = x.shape[0]
    nf = x.shape[1]
    h = y.shape[1]
    d_wr = np.zeros((h, nf))
    d_wz = np.zeros((h, nf))
    d_wc = np.zeros((h, nf))
    d_ur = np.zeros((h, h))
    d_uz = np.zeros((h, h))
    d_uc = np.zeros((h, h))
    d_br = np.zeros(h)
    d_bz = np.zeros(h)
    d_bc = np.zeros(h)
    dx = np.zeros((T, nf))
    carry = np.zeros(h)
    for t in range(T - 1, -1, -1):
        if t > 0:
            yprev = y[t - 1]
        else:
            yprev = y0
        g = gy[t] + carry
        dz = g * (yprev - c[t])
        daz = dz * z[t] * (1.0 - z[t])
        dc = g * (1.0 - z[t])
        dac = dc * (1.0 - c[t] * c[t])
        uc_dac = u_c.T @ dac
        dr = uc_dac * yprev
        dar = dr * r[t] * (1.0 - r[t])
        carry = g * z[t] + u_r.T @ dar + u_z.T @ daz + uc_dac * r[t]
        d_wr += np.outer(dar, x[t])
        d_ur += np.outer(dar, yprev)
        d_br += dar
        d_wz += np.outer(daz, x[t])
        d_uz += np.outer(daz, yprev)
        d_bz += daz
        d_wc += np.outer(dac, x[t])
        d_uc += np.outer(dac, r[t] * yprev)
        d_bc += dac
        dx[t] = w_r.T @ dar + w_z.T @ daz + w_c.T @ dac
    return d_wr, d_wz, d_wc, d_ur, d_uz, d_uc, d_br, d_bz, d_bc, dx


gru_backward_pass = maybe_jit(_gru_backward_pass)
