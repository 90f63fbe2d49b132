"""Symmetric Dicke ladder of N two-level particles.

Basis index k = m + N/2 counts excited particles, i.e. the Schwinger
occupation n_e = k with n_g = N - k. Under the Holstein-Primakoff map the
single bosonic mode is the excited-state mode, so Fock level n <-> k = n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sparse
from scipy.linalg import expm
from scipy.special import gammaln

from .errors import (DegenerateDenominator, DegenerateMeanSpin, DimensionError,
                     GeometryError, InvalidSpec, SupportError)
from .fock import SingleModeState

NORM_TOL = 1e-12
SUPPORT_TOL = 1e-14


@dataclass(frozen=True)
class DickeState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size < 2:
            raise DimensionError("a Dicke state needs N >= 1, i.e. at least 2 amplitudes")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidSpec(f"Dicke state not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def N(self) -> int:
        return self.amplitudes.size - 1

    @classmethod
    def from_unnormalized(cls, amps) -> "DickeState":
        amps = np.asarray(amps, dtype=complex)
        return cls(amps / np.linalg.norm(amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class SpinOperators:
    """Collective spin matrices (scipy sparse, CSR) for S = N/2."""

    N: int
    s_plus: sparse.csr_matrix
    s_minus: sparse.csr_matrix
    s_z: sparse.csr_matrix
    s_x: sparse.csr_matrix
    s_y: sparse.csr_matrix

    def vector(self):
        return (self.s_x, self.s_y, self.s_z)


def _raising_elements(N: int) -> np.ndarray:
    # <k+1|S+|k> = sqrt((S - m)(S + m + 1)) = sqrt((N - k)(k + 1))
    k = np.arange(N)
    return np.sqrt((N - k) * (k + 1.0))


@lru_cache(maxsize=64)
def spin_matrices(N: int) -> SpinOperators:
    if N < 1:
        raise DimensionError("N must be >= 1")
    sp = sparse.diags(_raising_elements(N).astype(complex), -1, format="csr")
    sm = sp.conj().T.tocsr()
    sz = sparse.diags(np.arange(N + 1) - N / 2.0, 0, format="csr", dtype=complex)
    sx = ((sp + sm) / 2).tocsr()
    sy = ((sp - sm) / 2j).tocsr()
    return SpinOperators(N, sp, sm, sz, sx, sy)


def _log_binom(N: int, k: np.ndarray) -> np.ndarray:
    return gammaln(N + 1.0) - gammaln(k + 1.0) - gammaln(N - k + 1.0)


def atomic_coherent_state(N: int, z: complex) -> DickeState:
    """|S, z> = (1 + |z|^2)^{-N/2} sum_k sqrt(C(N, k)) z^k |k>.

    Equivalently the product of N copies of (|g> + z|e>)/sqrt(1 + |z|^2).
    """
    if N < 1:
        raise DimensionError("N must be >= 1")
    z = complex(z)
    k = np.arange(N + 1)
    amps = np.zeros(N + 1, dtype=complex)
    if z == 0:
        amps[0] = 1.0
        return DickeState(amps)
    log_mod = 0.5 * _log_binom(N, k) + k * math.log(abs(z)) - 0.5 * N * math.log1p(abs(z) ** 2)
    amps = np.exp(log_mod) * np.exp(1j * k * np.angle(z))
    return DickeState.from_unnormalized(amps)


def acs_from_displacement(N: int, xi: complex) -> DickeState:
    """exp(xi S+ - xi* S-)|S, -S> by dense matrix exponential (small N only)."""
    if N > 30:
        raise DimensionError("dense displacement route is limited to N <= 30")
    ops = spin_matrices(N)
    gen = (xi * ops.s_plus - np.conj(xi) * ops.s_minus).toarray()
    ground = np.zeros(N + 1, dtype=complex)
    ground[0] = 1.0
    return DickeState.from_unnormalized(expm(gen) @ ground)


def hp_embed(state: SingleModeState, N: int) -> DickeState:
    """Place Fock amplitude c_n on Dicke level k = n."""
    c = state.amplitudes
    if c.size > N + 1 and np.max(np.abs(c[N + 1:])) > SUPPORT_TOL:
        raise SupportError(f"state has amplitude above Fock level {N}")
    amps = np.zeros(N + 1, dtype=complex)
    keep = min(c.size, N + 1)
    amps[:keep] = c[:keep]
    return DickeState.from_unnormalized(amps)


def hp_readout(state: DickeState) -> SingleModeState:
    """Inverse of :func:`hp_embed`: Dicke level k read as Fock level n = k."""
    return SingleModeState(state.amplitudes)


def _falling(x: np.ndarray, m: int) -> np.ndarray:
    out = np.ones_like(x, dtype=float)
    for j in range(m):
        out = out * (x - j)
    return np.clip(out, 0.0, None)


def dicke_mandel_violation(state: DickeState) -> float:
    """(|<S+ S->|^2 - <S+^2 S-^2>) / N^2."""
    N = state.N
    p = state.probabilities()
    k = np.arange(N + 1, dtype=float)
    # S+S-|k> = k(N-k+1)|k>;  S+^2 S-^2|k> = k(k-1)(N-k+1)(N-k+2)|k>
    pm = np.dot(p, k * (N - k + 1))
    pm2 = np.dot(p, _falling(k, 2) * _falling(N - k + 2, 2))
    return float((pm**2 - pm2) / N**2)


def _raise_power_expectation(state: DickeState, m: int) -> complex:
    """<S+^m> via the m-step ladder coefficient."""
    N = state.N
    c = state.amplitudes
    if m == 0:
        return complex(np.vdot(c, c))
    if m > N:
        return 0j
    k = np.arange(N + 1 - m, dtype=float)
    log_coef = 0.5 * (gammaln(N - k + 1) - gammaln(N - k - m + 1)
                      + gammaln(k + m + 1) - gammaln(k + 1))
    return complex(np.sum(np.conj(c[m:]) * np.exp(log_coef) * c[:N + 1 - m]))


def hz_schwinger_violation(state: DickeState, m: int, n: int) -> float:
    """|<c_g^m c_e^dag^n>|^2 - <c_g^dag^m c_g^m c_e^dag^n c_e^n> on the Dicke basis.

    c_g^m c_e^dag^n changes the particle number by n - m, so for m != n its
    expectation on a fixed-N state is identically zero. For m == n it is
    <S+^m>.
    """
    N = state.N
    if not (0 <= m <= N and 0 <= n <= N):
        raise DimensionError(f"orders (m={m}, n={n}) must lie in [0, N={N}]")
    k = np.arange(N + 1, dtype=float)
    rhs = float(np.dot(state.probabilities(), _falling(N - k, m) * _falling(k, n)))
    lhs = abs(_raise_power_expectation(state, m)) ** 2 if m == n else 0.0
    return float(lhs - rhs)


def _scaled_ladder(dim: int) -> tuple[np.ndarray, np.ndarray]:
    # In the basis |n>' = sqrt(n!)|n>: a^dag|n>' = |n+1>', a|n>' = n|n-1>'.
    # Integer entries, so identities among polynomials in a, a^dag are exact.
    up = np.zeros((dim, dim), dtype=np.int64)
    down = np.zeros((dim, dim), dtype=np.int64)
    idx = np.arange(dim - 1)
    up[idx + 1, idx] = 1
    down[idx, idx + 1] = idx + 1
    return up, down


def number_ordering_identity_deviation(n_max: int) -> float:
    """Max deviation of
    cg^dag^2 cg^2 ce^dag^2 ce^2 = cg^2 cg^dag^2 ce^dag^2 ce^2 - 4 cg cg^dag ce^dag^2 ce^2 + 2 ce^dag^2 ce^2
    on states with n_g + n_e <= n_max.

    Each mode carries two spare levels so that cg^2 cg^dag^2 never meets the
    cutoff on the checked subspace. Arithmetic is in the integer-scaled basis
    (a similarity transform), hence exact.
    """
    dim = n_max + 3
    up, down = _scaled_ladder(dim)
    eye = np.eye(dim, dtype=np.int64)
    e_part = up @ up @ down @ down
    lhs = np.kron(up @ up @ down @ down, e_part)
    rhs = (np.kron(down @ down @ up @ up, e_part)
           - 4 * np.kron(down @ up, e_part)
           + 2 * np.kron(eye, e_part))
    ng, ne = np.divmod(np.arange(dim * dim), dim)
    keep = np.nonzero(ng + ne <= n_max)[0]
    diff = (lhs - rhs)[np.ix_(keep, keep)]
    return float(np.abs(diff).max())


def raising_square_deviation(n_max: int) -> float:
    """Max deviation of S+^2 from ce^dag^2 cg^2 over every sector 2 <= N <= n_max."""
    dim = n_max + 1
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)
    ad = a.T
    # kron(g, e): index = n_g * dim + n_e
    schwinger = np.kron(a @ a, ad @ ad)
    worst = 0.0
    for N in range(2, n_max + 1):
        k = np.arange(N + 1)
        idx = (N - k) * dim + k
        sector = schwinger[np.ix_(idx, idx)]
        sp = spin_matrices(N).s_plus.toarray()
        worst = max(worst, float(np.abs(sector - sp @ sp).max()))
    return worst


def schwinger_identity_check(n_max: int) -> float:
    if n_max < 4:
        raise DimensionError("n_max must be >= 4")
    return max(number_ordering_identity_deviation(n_max), raising_square_deviation(n_max))


def spin_moments(state: DickeState) -> tuple[np.ndarray, np.ndarray]:
    """Mean spin vector and symmetrized covariance matrix (3x3, real)."""
    ops = spin_matrices(state.N)
    psi = state.amplitudes
    vecs = [op @ psi for op in ops.vector()]
    mean = np.array([np.vdot(psi, v).real for v in vecs])
    second = np.array([[np.vdot(vi, vj).real for vj in vecs] for vi in vecs])
    cov = 0.5 * (second + second.T) - np.outer(mean, mean)
    return mean, cov


def _as_direction(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(3)
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise GeometryError(f"direction {v} is not a unit vector")
    return v


def spin_squeezing_xi2(state: DickeState, n1, n2, n3) -> float:
    """N (Delta S_n1)^2 / (<S_n2>^2 + <S_n3>^2)."""
    n1, n2, n3 = (_as_direction(v) for v in (n1, n2, n3))
    for u, v in ((n1, n2), (n1, n3), (n2, n3)):
        if abs(np.dot(u, v)) > 1e-10:
            raise GeometryError("spin directions must be mutually orthogonal")
    mean, cov = spin_moments(state)
    denom = np.dot(n2, mean) ** 2 + np.dot(n3, mean) ** 2
    if denom < 1e-12:
        raise DegenerateDenominator("mean spin has no component along n2 or n3")
    return float(state.N * (n1 @ cov @ n1) / denom)


def mean_spin_frame(mean: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(n0, e1, e2): mean direction plus a right-handed orthonormal plane basis."""
    n0 = mean / np.linalg.norm(mean)
    ref = np.array([1.0, 0.0, 0.0]) if abs(n0[2]) > 0.9 else np.array([0.0, 0.0, 1.0])
    e1 = np.cross(n0, ref)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n0, e1)
    return n0, e1, e2


def optimal_spin_squeezing(state: DickeState) -> tuple[float, np.ndarray]:
    """Minimal xi^2 over directions orthogonal to the mean spin.

    n2 is the mean-spin direction, so the denominator is |<S>|^2.
    """
    mean, cov = spin_moments(state)
    length = np.linalg.norm(mean)
    if length <= 1e-10:
        raise DegenerateMeanSpin("mean spin vector vanishes")
    _, e1, e2 = mean_spin_frame(mean)
    basis = np.stack([e1, e2], axis=1)
    w, v = np.linalg.eigh(basis.T @ cov @ basis)
    n1 = basis @ v[:, 0]
    return float(state.N * w[0] / length**2), n1 / np.linalg.norm(n1)


def spin_algebra_residuals(N: int) -> dict[str, float]:
    """Residuals of [S+,S-] = 2Sz, [Sz,S+] = S+ and the Casimir."""
    ops = spin_matrices(N)
    sp, sm, sz = ops.s_plus, ops.s_minus, ops.s_z
    s = N / 2.0

    def worst(m):
        m = m.tocoo()
        return float(np.abs(m.data).max()) if m.nnz else 0.0

    casimir = ops.s_x @ ops.s_x + ops.s_y @ ops.s_y + sz @ sz
    ident = sparse.identity(N + 1, dtype=complex, format="csr")
    return {
        "adjoint": worst(sp - sm.conj().T),
        "plus_minus": worst(sp @ sm - sm @ sp - 2 * sz),
        "z_plus": worst(sz @ sp - sp @ sz - sp),
        "casimir": worst(casimir - s * (s + 1) * ident),
    }
