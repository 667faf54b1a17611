#!/usr/bin/env python3
"""Generate the embedded Tracy-Widom (beta = 1) CDF table.

F1(s) is evaluated as the Fredholm determinant

    F1(s) = det(I - B_s) on L^2(0, inf),  B_s(x, y) = Ai(x + y + s),

discretised with Gauss-Legendre quadrature on [0, U(s)] (Nystrom method).
U(s) is chosen so that Ai(s + U) is below double-precision noise. For
s >= -6 the determinant is computed in double precision with scipy; for
s < -6 the values are tiny and are computed with mpmath at 30 digits.

Outputs (relative to the repository root):
  crates/core/assets/tw1_v1.csv          s,F1 on [-10, 6] with step 0.02
  crates/core/tests/data/tw1_heldout.csv  s,F1 at the grid midpoints

Usage: python3 scripts/gen_tw1.py
"""

import os

import mpmath
import numpy as np
from scipy.special import airy

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
STEP = 0.02
S_MIN, S_MAX = -10.0, 6.0


def upper_limit(s):
    return max(16.0 - s, 8.0)


def f1_double(s, m):
    x, w = np.polynomial.legendre.leggauss(m)
    u = upper_limit(s)
    x = 0.5 * u * (x + 1.0)
    w = 0.5 * u * w
    sw = np.sqrt(w)
    arg = x[:, None] + x[None, :] + s
    k = airy(arg)[0]
    mat = np.eye(m) - sw[:, None] * k * sw[None, :]
    return float(np.linalg.det(mat))


def f1_mp(s, m):
    mpmath.mp.dps = 30
    xs, ws = gauss_legendre_mp(m)
    u = mpmath.mpf(upper_limit(s))
    xs = [u * (x + 1) / 2 for x in xs]
    ws = [u * w / 2 for w in ws]
    sw = [mpmath.sqrt(w) for w in ws]
    mat = mpmath.matrix(m, m)
    for i in range(m):
        for j in range(i, m):
            a = mpmath.airyai(xs[i] + xs[j] + s)
            v = -sw[i] * a * sw[j]
            if i == j:
                v += 1
            mat[i, j] = v
            mat[j, i] = v
    return float(mpmath.det(mat))


_GL_CACHE = {}


def gauss_legendre_mp(m):
    if m not in _GL_CACHE:
        xs, ws = [], []
        for k in range(1, m + 1):
            x = mpmath.cos(mpmath.pi * (k - mpmath.mpf(1) / 4) / (m + mpmath.mpf(1) / 2))
            for _ in range(100):
                p0, p1 = mpmath.mpf(1), x
                for n in range(2, m + 1):
                    p0, p1 = p1, ((2 * n - 1) * x * p1 - (n - 1) * p0) / n
                dp = m * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mpmath.mpf(10) ** (-mpmath.mp.dps + 2):
                    break
            p0, p1 = mpmath.mpf(1), x
            for n in range(2, m + 1):
                p0, p1 = p1, ((2 * n - 1) * x * p1 - (n - 1) * p0) / n
            dp = m * (x * p1 - p0) / (x * x - 1)
            xs.append(x)
            ws.append(2 / ((1 - x * x) * dp * dp))
        _GL_CACHE[m] = (xs, ws)
    return _GL_CACHE[m]


def f1(s):
    if s >= -6.0:
        a = f1_double(s, 120)
        b = f1_double(s, 160)
        assert abs(a - b) < 1e-13, (s, a, b)
        return min(max(b, 0.0), 1.0)
    return f1_mp(s, 70)


def main():
    n = int(round((S_MAX - S_MIN) / STEP))
    grid = [S_MIN + STEP * k for k in range(n + 1)]
    mids = [S_MIN + STEP * (k + 0.5) for k in range(n)]

    assets = os.path.join(ROOT, "crates", "core", "assets")
    data = os.path.join(ROOT, "crates", "core", "tests", "data")
    os.makedirs(assets, exist_ok=True)
    os.makedirs(data, exist_ok=True)

    with open(os.path.join(assets, "tw1_v1.csv"), "w") as fh:
        fh.write("# Tracy-Widom beta=1 CDF; Fredholm determinant det(I - Ai(x+y+s)) on L2(0,inf)\n")
        fh.write("# Gauss-Legendre Nystrom discretisation; generated by scripts/gen_tw1.py\n")
        fh.write("s,F1\n")
        for s in grid:
            fh.write("%.2f,%.17e\n" % (s, f1(s)))

    with open(os.path.join(data, "tw1_heldout.csv"), "w") as fh:
        fh.write("s,F1\n")
        for s in mids:
            fh.write("%.2f,%.17e\n" % (s, f1(s)))


if __name__ == "__main__":
    main()
