"""Smooth cutoff suite built from the standard exp(-1/t) bump quotient.

chi is identically 1 on |z| <= 1, identically 0 on |z| >= 2, and C-infinity
across both seams (all one-sided derivatives vanish there). The derived shapes

    omega(s) = chi(s) * s
    gamma(s) = chi(s) * (2 s^3 - 3 s^2)
    eta(s)   = chi(s) * (2 s^2 - s^3)
    mu(s)    = -(1 - chi(s)) * s
    w        = omega

agree with their polynomial cores exactly on the plateau |s| <= 1 and vanish
(mu(s) = -s) for |s| >= 2. omega, gamma, eta and all five first derivatives
are globally bounded; mu itself tracks -s in the far field, which is exactly
the linear pull that keeps s + f bounded at large amplitude. w is the ramp
that multiplies the derivative argument in the nonlinearity; it needs
w(0) = 0 and w'(0) = 1, both satisfied by omega.

All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "psi",
    "psi_prime",
    "chi",
    "chi_prime",
    "omega",
    "omega_prime",
    "gamma",
    "gamma_prime",
    "eta",
    "eta_prime",
    "mu",
    "mu_prime",
    "w",
    "w_prime",
    "sup_abs_w",
]


def psi(t):
    """exp(-1/t) for t > 0, else 0; the flat-at-zero mollifier seed."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out if out.ndim else float(out)


def psi_prime(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos]) / t[pos] ** 2
    return out if out.ndim else float(out)


def chi(z):
    """Smooth plateau blend: 1 on |z| <= 1, 0 on |z| >= 2."""
    az = np.abs(np.asarray(z, dtype=float))
    up = psi(2.0 - az)
    down = psi(az - 1.0)
    den = np.asarray(up + down)
    out = np.divide(up, den, out=np.zeros_like(den), where=den > 0)
    # den == 0 happens only for az >= 2 where the value is 0 already
    return out if out.ndim else float(out)


def chi_prime(z):
    z = np.asarray(z, dtype=float)
    az = np.abs(z)
    up = psi(2.0 - az)
    down = psi(az - 1.0)
    dup = -psi_prime(2.0 - az)
    ddown = psi_prime(az - 1.0)
    den = np.asarray((up + down) ** 2)
    core = np.divide(dup * down - up * ddown, den, out=np.zeros_like(den), where=den > 0)
    out = np.sign(z) * core
    return out if out.ndim else float(out)


def omega(s):
    """Bounded smooth ramp: s on |s| <= 1, 0 for |s| >= 2."""
    s = np.asarray(s, dtype=float)
    out = chi(s) * s
    return out if np.ndim(out) else float(out)


def omega_prime(s):
    s = np.asarray(s, dtype=float)
    out = chi_prime(s) * s + chi(s)
    return out if np.ndim(out) else float(out)


def gamma(s):
    """chi-localized cubic with gamma(1) = -1, gamma'(1) = 0."""
    s = np.asarray(s, dtype=float)
    out = chi(s) * (2.0 * s**3 - 3.0 * s**2)
    return out if np.ndim(out) else float(out)


def gamma_prime(s):
    s = np.asarray(s, dtype=float)
    out = chi_prime(s) * (2.0 * s**3 - 3.0 * s**2) + chi(s) * (6.0 * s**2 - 6.0 * s)
    return out if np.ndim(out) else float(out)


def eta(s):
    """chi-localized cubic with eta(1) = 1, eta'(1) = 1."""
    s = np.asarray(s, dtype=float)
    out = chi(s) * (2.0 * s**2 - s**3)
    return out if np.ndim(out) else float(out)


def eta_prime(s):
    s = np.asarray(s, dtype=float)
    out = chi_prime(s) * (2.0 * s**2 - s**3) + chi(s) * (4.0 * s - 3.0 * s**2)
    return out if np.ndim(out) else float(out)


def mu(s):
    """Far-field linear pull: 0 on |s| <= 1, exactly -s for |s| >= 2."""
    s = np.asarray(s, dtype=float)
    out = -(1.0 - chi(s)) * s
    return out if np.ndim(out) else float(out)


def mu_prime(s):
    s = np.asarray(s, dtype=float)
    out = chi_prime(s) * s + chi(s) - 1.0
    return out if np.ndim(out) else float(out)


w = omega
w_prime = omega_prime

_SUP_ABS_W = None


def sup_abs_w() -> float:
    """Numeric sup of |w| over its support, used by the CFL guard."""
    global _SUP_ABS_W
    if _SUP_ABS_W is None:
        s = np.linspace(-2.0, 2.0, 40001)
        _SUP_ABS_W = float(np.max(np.abs(w(s))))
    return _SUP_ABS_W
