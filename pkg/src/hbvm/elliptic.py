"""Complete elliptic integral K(m) and Jacobi sn/cn/dn via the arithmetic-geometric
mean (parameter convention: ``m = k^2``)."""

from __future__ import annotations

import numpy as np

_EPS = np.finfo(float).eps
_MAXIT = 64


def _check_m(m: float) -> float:
    m = float(m)
    if not 0.0 <= m < 1.0:
        raise ValueError(f"parameter m must lie in [0, 1), got {m}")
    return m


def _agm_sequence(m: float):
    a, b, c = 1.0, np.sqrt(1.0 - m), np.sqrt(m)
    seq = [(a, b, c)]
    for _ in range(_MAXIT):
        if abs(c) <= _EPS * a:
            break
        a, b, c = 0.5 * (a + b), np.sqrt(a * b), 0.5 * (a - b)
        seq.append((a, b, c))
    return seq


def elliptic_k(m: float) -> float:
    """``K(m) = pi / (2 AGM(1, sqrt(1 - m)))``."""
    m = _check_m(m)
    return float(np.pi / (2.0 * _agm_sequence(m)[-1][0]))


def jacobi_ellipj(z, m: float):
    """``(sn, cn, dn)`` at ``z`` by the descending Landen (AGM) recursion."""
    m = _check_m(m)
    z = np.asarray(z, dtype=float)
    if m == 0.0:
        return np.sin(z), np.cos(z), np.ones_like(z)
    seq = _agm_sequence(m)
    K = np.pi / (2.0 * seq[-1][0])
    z = z - 4.0 * K * np.round(z / (4.0 * K))  # sn, cn have period 4K
    n = len(seq) - 1
    phi = (2.0 ** n) * seq[-1][0] * z
    phi_next = phi
    for a, _, c in reversed(seq[1:]):
        phi_next = phi
        phi = 0.5 * (phi + np.arcsin(np.clip(c / a * np.sin(phi), -1.0, 1.0)))
    sn, cn = np.sin(phi), np.cos(phi)
    dn = cn / np.cos(phi_next - phi) if n > 0 else np.ones_like(z)
    return sn, cn, dn


def jacobi_cn(z, m: float):
    cn = jacobi_ellipj(z, m)[1]
    return float(cn) if np.ndim(cn) == 0 else cn


def jacobi_sn(z, m: float):
    sn = jacobi_ellipj(z, m)[0]
    return float(sn) if np.ndim(sn) == 0 else sn
