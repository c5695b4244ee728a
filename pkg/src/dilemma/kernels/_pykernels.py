"""Pure-Python linear-model kernels.

Operation order matches _ckernels.pyx exactly so both backends produce
identical floating-point results.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"


def _forward(L, x):
    d = len(L)
    y = [0.0] * d
    for i in range(d):
        row = L[i]
        s = x[i]
        for j in range(i):
            yj = y[j]
            if yj != 0.0:
                s = s - row[j] * yj
        y[i] = s / row[i]
    return y


def forward_solve(L, x):
    return np.array(_forward(np.asarray(L).tolist(), np.asarray(x).tolist()))


def chol_update(L, x):
    """In place: L L^T <- L L^T + x x^T for lower-triangular L."""
    d = L.shape[0]
    M = L.tolist()
    w = np.asarray(x, dtype=np.float64).tolist()
    for k in range(d):
        xk = w[k]
        if xk == 0.0:
            continue
        lkk = M[k][k]
        r = math.sqrt(lkk * lkk + xk * xk)
        c = r / lkk
        s = xk / lkk
        M[k][k] = r
        for i in range(k + 1, d):
            lik = (M[i][k] + s * w[i]) / c
            M[i][k] = lik
            w[i] = c * w[i] - s * lik
    L[...] = M


def linear_scores(Ls, bs, x, alpha):
    xs = np.asarray(x).tolist()
    out = np.empty(len(Ls))
    for k in range(len(Ls)):
        M = Ls[k].tolist()
        u = _forward(M, bs[k].tolist())
        y = _forward(M, xs)
        mu = 0.0
        q = 0.0
        for ui, yi in zip(u, y):
            mu = mu + ui * yi
            q = q + yi * yi
        out[k] = mu + alpha * math.sqrt(q)
    return out


def sampled_scores(Ls, bs, x, v, Z):
    xs = np.asarray(x).tolist()
    out = np.empty(len(Ls))
    for k in range(len(Ls)):
        M = Ls[k].tolist()
        u = _forward(M, bs[k].tolist())
        y = _forward(M, xs)
        z = Z[k].tolist()
        acc = 0.0
        for ui, zi, yi in zip(u, z, y):
            acc = acc + (ui + v * zi) * yi
        out[k] = acc
    return out
