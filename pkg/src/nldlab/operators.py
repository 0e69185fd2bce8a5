"""Linear operators of the construction, in spectral form and as dense matrices.

Every operator is defined by its exact action on basis modes:

    A            cos nx -> (1+n^2) cos nx          sin mx -> (1+m^2) sin mx
    B            1 -> -2 ln 2,  cos nx -> -(1/n) cos nx,  sin mx -> (1/m) sin mx
    J            1 -> 0,  cos nx <-> sin nx  (swap, n >= 1)
    G (Hilbert)  1 -> 0,  cos nx -> -sin nx,  sin mx -> cos mx
    K            cos nx -> eps_n sin (n+1)x,  sin (n+1)x -> -eps_n cos nx
    Q            cos nx -> -(n^2+n) cos nx,  sin mx -> -(m^2-m) sin mx
    Q_kappa      Q + kappa * d/dx
    A - J d/dx   cos nx -> (1+n+n^2) cos nx,  sin mx -> (1-m+m^2) sin mx

Q and A - J d/dx are assembled from these closed-form diagonals rather than by
composing matrices: the matrix composition loses the top sine mode (the
differentiation image cos (N+1)x is outside the layout) and would corrupt the
diagonal there. Where an operator's true image leaves the layout (J, G, d/dx on
the top sine) the overflow is dropped and logged on the result vector.

K is exact on the layout by construction: the block pairs {cos nx, sin (n+1)x}
close under it, which is the point of the block-aligned truncation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisLayout, TrigVector, analyze, differentiate, synth

__all__ = [
    "EpsilonSequence",
    "OperatorMatrix",
    "apply_A",
    "apply_B",
    "apply_J",
    "apply_G",
    "apply_K",
    "apply_Q",
    "apply_Qkappa",
    "apply_A_minus_Jdx",
    "mult_operator",
    "assemble",
    "l2_operator_norm",
]

B_CONSTANT_VALUE = -2.0 * np.log(2.0)


@dataclass(frozen=True)
class EpsilonSequence:
    """Geometric coupling strengths eps_n = eps0 * rho^n.

    eps0 = 0 is admitted so the pipeline can probe the degenerate no-coupling
    configuration (it must run and report, not crash); everywhere the
    mathematics needs eps_n != 0 that is checked as evidence, not assumed.
    """

    eps0: float = 0.05
    rho: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.eps0 < 1.0:
            raise ValueError(f"eps0 must lie in [0, 1), got {self.eps0}")
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")

    def value(self, n: int) -> float:
        return self.eps0 * self.rho**n

    def values(self, count: int) -> np.ndarray:
        out = self.eps0 * self.rho ** np.arange(count, dtype=float)
        if self.eps0 > 0.0 and np.any(out == 0.0):
            raise ValueError("eps_n underflowed to zero; reduce N or raise eps0/rho")
        return out

    @property
    def degenerate(self) -> bool:
        return self.eps0 == 0.0


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense matrix of an operator in the layout's enumeration."""

    layout: BasisLayout
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if e.shape != (self.layout.dim, self.layout.dim):
            raise ValueError("matrix shape does not match the layout dimension")
        object.__setattr__(self, "entries", e)

    def apply(self, v: TrigVector) -> TrigVector:
        return TrigVector.from_coeffs(self.layout, self.entries @ v.coeffs(),
                                      v.truncation_loss)


def _diag_apply(v: TrigVector, cos_scale: np.ndarray, sin_scale: np.ndarray) -> TrigVector:
    return TrigVector(v.layout, cos_scale * v.a, sin_scale * v.b, v.truncation_loss)


def _a_diagonals(layout: BasisLayout):
    n = layout.cos_orders.astype(float)
    m = layout.sin_orders.astype(float)
    return 1.0 + n**2, 1.0 + m**2


def _b_diagonals(layout: BasisLayout):
    n = layout.cos_orders.astype(float)
    m = layout.sin_orders.astype(float)
    cos_scale = np.empty_like(n)
    cos_scale[0] = B_CONSTANT_VALUE
    cos_scale[1:] = -1.0 / n[1:]
    return cos_scale, 1.0 / m


def _q_diagonals(layout: BasisLayout):
    n = layout.cos_orders.astype(float)
    m = layout.sin_orders.astype(float)
    return -(n**2 + n), -(m**2 - m)


def _a_minus_jdx_diagonals(layout: BasisLayout):
    n = layout.cos_orders.astype(float)
    m = layout.sin_orders.astype(float)
    return 1.0 + n + n**2, 1.0 - m + m**2


def apply_A(v: TrigVector) -> TrigVector:
    """A = I - d2/dx2, mode-wise multiplication by 1+n^2."""
    return _diag_apply(v, *_a_diagonals(v.layout))


def apply_B(v: TrigVector) -> TrigVector:
    """Log-kernel integral operator, diagonal in this basis."""
    return _diag_apply(v, *_b_diagonals(v.layout))


def apply_Q(v: TrigVector) -> TrigVector:
    """Q = d2/dx2 + J d/dx by its closed-form diagonal."""
    return _diag_apply(v, *_q_diagonals(v.layout))


def apply_A_minus_Jdx(v: TrigVector) -> TrigVector:
    """A - J d/dx by its closed-form diagonal; minimum eigenvalue 1."""
    return _diag_apply(v, *_a_minus_jdx_diagonals(v.layout))


def apply_J(v: TrigVector) -> TrigVector:
    """Reflected Hilbert operator: swaps cos nx and sin nx, kills the mean.

    The top sine mode would map to cos (N+1)x, outside the layout: dropped
    and logged.
    """
    lay = v.layout
    a_new = np.zeros(lay.N + 1)
    b_new = np.zeros(lay.N + 1)
    a_new[1:] = v.b[:-1]
    b_new[:-1] = v.a[1:]
    dropped = abs(v.b[-1]) * np.sqrt(np.pi)
    return TrigVector(lay, a_new, b_new, v.truncation_loss + dropped)


def apply_G(v: TrigVector) -> TrigVector:
    """Hilbert operator: cos nx -> -sin nx, sin mx -> cos mx, mean -> 0.

    J is its reflection: (Jh)(x) = (Gh)(-x). Top sine overflow handled as in
    apply_J.
    """
    lay = v.layout
    a_new = np.zeros(lay.N + 1)
    b_new = np.zeros(lay.N + 1)
    a_new[1:] = v.b[:-1]
    b_new[:-1] = -v.a[1:]
    dropped = abs(v.b[-1]) * np.sqrt(np.pi)
    return TrigVector(lay, a_new, b_new, v.truncation_loss + dropped)


def apply_K(v: TrigVector, eps: EpsilonSequence) -> TrigVector:
    """Block coupling cos nx -> eps_n sin (n+1)x, sin (n+1)x -> -eps_n cos nx.

    An exact endomorphism of the layout: every block {cos nx, sin (n+1)x},
    0 <= n <= N, closes under K.
    """
    lay = v.layout
    eps_n = eps.values(lay.N + 1)
    # b slot m = n+1 holds the image of cos n; a slot n holds -eps_n * b_{n+1}
    return TrigVector(lay, -eps_n * v.b, eps_n * v.a, v.truncation_loss)


def apply_Qkappa(v: TrigVector, kappa: float) -> TrigVector:
    """Q + kappa d/dx; on each pair {cos nx, sin nx} the 2x2 block
    [[-n^2-n, kappa n], [-kappa n, -n^2+n]] with eigenvalues -n^2 +- i n d,
    d = sqrt(kappa^2 - 1)."""
    _require_supercritical(kappa)
    return apply_Q(v) + kappa * differentiate(v)


def _require_supercritical(kappa: float):
    if abs(kappa) <= 1.0:
        raise ValueError(f"|kappa| must exceed 1, got {kappa}")


def _diff_matrix(layout: BasisLayout) -> np.ndarray:
    N = layout.N
    d = np.zeros((layout.dim, layout.dim))
    for n in range(1, N + 1):
        d[N + n, n] = -float(n)   # cos n -> -n sin n
        d[n, N + n] = float(n)    # sin n -> n cos n
    # sin (N+1) -> (N+1) cos (N+1)x is outside the layout: column stays zero
    return d


def _swap_matrix(layout: BasisLayout, cos_to_sin: float) -> np.ndarray:
    N = layout.N
    m = np.zeros((layout.dim, layout.dim))
    for n in range(1, N + 1):
        m[N + n, n] = cos_to_sin   # cos n -> +-sin n
        m[n, N + n] = 1.0          # sin n -> cos n
    return m


def mult_operator(g: TrigVector) -> OperatorMatrix:
    """Matrix of h -> g*h via the dealiased pointwise product."""
    lay = g.layout
    gv = synth(g).values
    S = lay.synthesis_matrix()
    P = lay.analysis_matrix()
    return OperatorMatrix(lay, P @ (gv[:, None] * S))


def assemble(layout: BasisLayout, opname: str, *, eps: EpsilonSequence | None = None,
             kappa: float | None = None, g: TrigVector | None = None) -> OperatorMatrix:
    """Dense matrix whose columns are the operator applied to each basis vector."""
    N = layout.N
    if opname == "A":
        entries = np.diag(np.concatenate(_a_diagonals(layout)))
    elif opname == "B":
        entries = np.diag(np.concatenate(_b_diagonals(layout)))
    elif opname == "Q":
        entries = np.diag(np.concatenate(_q_diagonals(layout)))
    elif opname == "A_minus_Jdx":
        entries = np.diag(np.concatenate(_a_minus_jdx_diagonals(layout)))
    elif opname == "J":
        entries = _swap_matrix(layout, cos_to_sin=1.0)
    elif opname == "G":
        entries = _swap_matrix(layout, cos_to_sin=-1.0)
    elif opname == "reflect":
        entries = np.diag(np.concatenate([np.ones(N + 1), -np.ones(N + 1)]))
    elif opname == "D":
        entries = _diff_matrix(layout)
    elif opname == "K":
        if eps is None:
            raise ValueError("assemble('K') needs an EpsilonSequence")
        entries = np.zeros((layout.dim, layout.dim))
        eps_n = eps.values(N + 1)
        for n in range(N + 1):
            entries[N + n + 1, n] = eps_n[n]    # cos n -> eps_n sin (n+1)
            entries[n, N + n + 1] = -eps_n[n]   # sin (n+1) -> -eps_n cos n
    elif opname == "Qkappa":
        if kappa is None:
            raise ValueError("assemble('Qkappa') needs kappa")
        _require_supercritical(kappa)
        entries = np.diag(np.concatenate(_q_diagonals(layout))) + kappa * _diff_matrix(layout)
    elif opname == "mult":
        if g is None:
            raise ValueError("assemble('mult') needs a multiplier g")
        return mult_operator(g)
    else:
        raise ValueError(f"unknown operator name {opname!r}")
    return OperatorMatrix(layout, entries)


def l2_operator_norm(m: OperatorMatrix) -> float:
    """Operator norm induced by the L2(Gamma) inner product.

    The coefficient enumeration is orthogonal but not orthonormal in L2 (the
    constant has squared norm 2*pi, every other mode pi), so the L2 operator
    norm is the 2-norm of W^(1/2) M W^(-1/2). The plain matrix 2-norm of the
    raw entries is a different metric; it is the right one for K (where it
    equals eps0 exactly) but overshoots for multiplication operators.
    """
    root_w = np.sqrt(m.layout.l2_weights())
    return float(np.linalg.norm(root_w[:, None] * m.entries / root_w[None, :], 2))
