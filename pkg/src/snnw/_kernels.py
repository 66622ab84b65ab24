# Fused elementwise kernels for the dense+tanh jet layer.
#
# Arrays are "stacked jets" flattened to (R, P): row 0 is the value, rows
# 1..d the gradient, rows d+1..2d the Hessian diagonal (absent when order 1).
import numpy as np
from numba import njit


@njit(cache=True)
def tanh_jet_forward(Z, d, order, out, T):
    # T must already hold tanh(Z[0]); numpy's vectorized tanh is much faster than libm's
    P = Z.shape[1]
    for p in range(P):
        t = T[p]
        s = 1.0 - t * t
        q = -2.0 * t * s
        out[0, p] = t
        for i in range(d):
            g = Z[1 + i, p]
            out[1 + i, p] = s * g
            if order == 2:
                out[1 + d + i, p] = s * Z[1 + d + i, p] + q * g * g


@njit(cache=True)
def tanh_jet_backward(Ybar, Z, T, d, order, Zbar):
    P = Z.shape[1]
    for p in range(P):
        t = T[p]
        s = 1.0 - t * t
        q = -2.0 * t * s
        sbar = 0.0
        qbar = 0.0
        for i in range(d):
            g = Z[1 + i, p]
            yg = Ybar[1 + i, p]
            sbar += yg * g
            zg = yg * s
            if order == 2:
                yh = Ybar[1 + d + i, p]
                sbar += yh * Z[1 + d + i, p]
                qbar += yh * g * g
                zg += 2.0 * yh * q * g
                Zbar[1 + d + i, p] = yh * s
            Zbar[1 + i, p] = zg
        tbar = Ybar[0, p] - 2.0 * t * sbar + qbar * (6.0 * t * t - 2.0)
        Zbar[0, p] = tbar * s
