from math import sqrt

INV_PHI = (sqrt(5.0) - 1.0) / 2.0


def golden_section_minimize(f, lo, hi, xtol=1e-6, max_iter=200):
    """Minimize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``.

    Stops once the bracket is narrower than ``xtol``.  Both endpoints are
    compared against the interior minimum, so minima sitting on the boundary
    are returned exactly.
    """
    if hi < lo:
        lo, hi = hi, lo
    f_lo, f_hi = f(lo), f(hi)
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= xtol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    x, fx = (x1, f1) if f1 <= f2 else (x2, f2)
    if f_lo <= fx:
        x, fx = lo, f_lo
    if f_hi < fx:
        x, fx = hi, f_hi
    return x, fx


def golden_section_maximize(f, lo, hi, xtol=1e-6, max_iter=200):
    x, fx = golden_section_minimize(lambda t: -f(t), lo, hi, xtol, max_iter)
    return x, -fx
