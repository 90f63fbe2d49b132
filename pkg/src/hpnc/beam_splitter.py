"""Two-mode beam splitter, Schmidt analysis and two-mode Hillery-Zubairy margins.

Mode convention (Heisenberg picture, U the beam-splitter unitary)::

    U^dag a1 U =  t e^{i phi} a1 + r a2
    U^dag a2 U = -r a1 + t e^{-i phi} a2

U = exp(sum_ij K_ij a_i^dag a_j) with K = log M, M the 2x2 mode matrix above.
The generator conserves n1 + n2, so U is assembled from one small matrix
exponential per total-number block; inside a block nothing is truncated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.linalg import expm, schur

from ._parallel import pmap
from .errors import (BlockOverflow, DegenerateBS, DimensionError, InvalidSpec,
                     TruncationError)
from .fock import (DEFAULT_TAIL_THRESHOLD, DensityOperator, SingleModeState, State,
                   lower, tail_mass)

NORM_TOL = 1e-12
DEFAULT_SCHMIDT_THRESHOLD = 1e-6


@dataclass(frozen=True)
class BSParams:
    """Amplitude transmission ``t``, reflection ``r`` and phase ``phi``.

    ``r`` may be negative so that every beam splitter has an inverse of the
    same form (see :meth:`inverse`).
    """

    t: float
    r: float
    phi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.t <= 1.0) or not (-1.0 <= self.r <= 1.0):
            raise InvalidSpec(f"t must lie in [0,1] and r in [-1,1] (got {self.t}, {self.r})")
        if abs(self.t**2 + self.r**2 - 1.0) > 1e-12:
            raise InvalidSpec("t^2 + r^2 must equal 1")

    @classmethod
    def from_t(cls, t: float, phi: float = 0.0) -> "BSParams":
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise InvalidSpec(f"t must lie in [0,1], got {t}")
        return cls(t, math.sqrt(max(0.0, 1.0 - t * t)), float(phi))

    @classmethod
    def from_transmission(cls, t2: float, phi: float = 0.0) -> "BSParams":
        """From the intensity transmission t^2."""
        t2 = min(max(float(t2), 0.0), 1.0)
        return cls(math.sqrt(t2), math.sqrt(1.0 - t2), float(phi))

    @classmethod
    def balanced(cls, phi: float = 0.0) -> "BSParams":
        return cls.from_transmission(0.5, phi)

    def mode_matrix(self) -> np.ndarray:
        e = np.exp(1j * self.phi)
        return np.array([[self.t * e, self.r], [-self.r, self.t / e]], dtype=complex)

    def inverse(self) -> "BSParams":
        # M^dag = [[t e^{-i phi}, -r], [r, t e^{i phi}]]
        return BSParams(self.t, -self.r, -self.phi)


@dataclass(frozen=True)
class TwoModeState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 2 or min(amps.shape) < 1:
            raise DimensionError("two-mode amplitudes must be a non-empty 2-D array")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidSpec(f"two-mode state not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim1(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def dim2(self) -> int:
        return self.amplitudes.shape[1]

    def total_number_distribution(self) -> np.ndarray:
        p = np.abs(self.amplitudes) ** 2
        n = np.add.outer(np.arange(self.dim1), np.arange(self.dim2))
        return np.bincount(n.ravel(), weights=p.ravel(), minlength=self.dim1 + self.dim2 - 1)


@dataclass(frozen=True)
class TwoModeMixture:
    """Convex combination of pure two-mode states (mixed BS inputs)."""

    weights: tuple
    states: tuple

    def __post_init__(self):
        if len(self.weights) != len(self.states) or not self.states:
            raise InvalidSpec("mixture needs matching, non-empty weights and states")
        if abs(sum(self.weights) - 1.0) > NORM_TOL or min(self.weights) < 0:
            raise InvalidSpec("mixture weights must be a probability vector")


TwoMode = Union[TwoModeState, TwoModeMixture]


@dataclass(frozen=True)
class SchmidtResult:
    singular_values: np.ndarray
    rank: int
    entropy_bits: float
    threshold: float


def embed_with_vacuum(state: State, dim2: Optional[int] = None) -> TwoMode:
    """|psi> (x) |0>. A density operator becomes a mixture over its eigenvectors."""
    if isinstance(state, DensityOperator):
        w, v = np.linalg.eigh(state.matrix)
        keep = w > 1e-15
        w = w[keep] / w[keep].sum()
        states = tuple(embed_with_vacuum(SingleModeState.from_unnormalized(v[:, i]), dim2)
                       for i in np.nonzero(keep)[0])
        return TwoModeMixture(tuple(float(x) for x in w), states)
    dim2 = state.dim if dim2 is None else int(dim2)
    if dim2 < 1:
        raise DimensionError("dim2 must be positive")
    amps = np.zeros((state.dim, dim2), dtype=complex)
    amps[:, 0] = state.amplitudes
    return TwoModeState(amps)


def generator_matrix(params: BSParams) -> np.ndarray:
    """Anti-Hermitian K with exp(K) equal to the mode matrix."""
    m = params.mode_matrix()
    tri, z = schur(m, output="complex")
    phases = np.angle(np.diag(tri))
    return z @ np.diag(1j * phases) @ z.conj().T


def block_generator(k_mat: np.ndarray, n: int) -> np.ndarray:
    """sum_ij K_ij a_i^dag a_j on the block n1 + n2 = n, basis index n1."""
    k = np.arange(n + 1)
    g = np.diag(k_mat[0, 0] * k + k_mat[1, 1] * (n - k)).astype(complex)
    if n > 0:
        hop = np.sqrt((k[:-1] + 1.0) * (n - k[:-1]))
        g[k[1:], k[:-1]] = k_mat[0, 1] * hop   # a1^dag a2: n1 -> n1 + 1
        g[k[:-1], k[1:]] = k_mat[1, 0] * hop   # a2^dag a1: n1 -> n1 - 1
    return g


def block_unitaries(params: BSParams, n_max: int) -> list[np.ndarray]:
    k_mat = generator_matrix(params)
    return [expm(block_generator(k_mat, n)) for n in range(n_max + 1)]


def _populated_blocks(amps: np.ndarray) -> int:
    nz = np.nonzero(amps)
    if nz[0].size == 0:
        return -1
    return int((nz[0] + nz[1]).max())


def apply_bs(state: TwoMode, params: BSParams) -> TwoMode:
    if isinstance(state, TwoModeMixture):
        return TwoModeMixture(state.weights, tuple(apply_bs(s, params) for s in state.states))
    amps = state.amplitudes
    d1, d2 = amps.shape
    top = _populated_blocks(amps)
    if top > min(d1, d2) - 1:
        raise BlockOverflow(
            f"total-number block {top} exceeds min(dim1, dim2) - 1 = {min(d1, d2) - 1}"
        )
    out = np.zeros_like(amps)
    for n, u in enumerate(block_unitaries(params, top)):
        n1 = np.arange(n + 1)
        out[n1, n - n1] = u @ amps[n1, n - n1]
    # renormalize away roundoff only; the map is unitary
    out /= np.linalg.norm(out)
    return TwoModeState(out)


def verify_mode_transform(params: BSParams, dim: int) -> float:
    """Largest elementwise deviation from the Heisenberg mode transforms.

    Checked on the span of |n1, n2> with n1 + n2 <= dim - 1, which U maps
    into itself and on which both annihilators act without truncation.
    """
    if dim < 2:
        raise DimensionError("dim must be >= 2")
    n_max = dim - 1
    pairs = [(n - k, k) for n in range(n_max + 1) for k in range(n + 1)]
    index = {p: i for i, p in enumerate(pairs)}
    size = len(pairs)
    a1 = np.zeros((size, size), dtype=complex)
    a2 = np.zeros((size, size), dtype=complex)
    for (n1, n2), i in index.items():
        if n1 > 0:
            a1[index[(n1 - 1, n2)], i] = math.sqrt(n1)
        if n2 > 0:
            a2[index[(n1, n2 - 1)], i] = math.sqrt(n2)
    u = np.zeros((size, size), dtype=complex)
    for n, blk in enumerate(block_unitaries(params, n_max)):
        idx = [index[(k, n - k)] for k in range(n + 1)]
        u[np.ix_(idx, idx)] = blk
    m = params.mode_matrix()
    dev1 = u.conj().T @ a1 @ u - (m[0, 0] * a1 + m[0, 1] * a2)
    dev2 = u.conj().T @ a2 @ u - (m[1, 0] * a1 + m[1, 1] * a2)
    return float(max(np.abs(dev1).max(), np.abs(dev2).max()))


def schmidt_analysis(state: TwoModeState, threshold: float = DEFAULT_SCHMIDT_THRESHOLD
                     ) -> SchmidtResult:
    sv = np.linalg.svd(state.amplitudes, compute_uv=False)
    kept = sv[sv > threshold]
    p = kept**2
    entropy = float(-np.sum(p * np.log2(p))) if p.size else 0.0
    # -0.0 from a single unit singular value
    entropy = abs(entropy) if entropy == 0 else entropy
    return SchmidtResult(sv, int(kept.size), entropy, float(threshold))


def _two_mode_terms(state: TwoModeState, m: int, n: int) -> tuple[complex, float]:
    psi = state.amplitudes
    cross = np.vdot(lower(psi, n, axis=1), lower(psi, m, axis=0))
    both = lower(lower(psi, m, axis=0), n, axis=1)
    return complex(cross), float(np.vdot(both, both).real)


def hz_two_mode_violation(state: TwoMode, m: int, n: int) -> float:
    """|<a1^m a2^dag^n>|^2 - <a1^dag^m a1^m a2^dag^n a2^n>.

    Positive implies the two modes are entangled.
    """
    members = state.states if isinstance(state, TwoModeMixture) else (state,)
    weights = state.weights if isinstance(state, TwoModeMixture) else (1.0,)
    first = members[0]
    if not (0 <= m < first.dim1 and 0 <= n < first.dim2):
        raise DimensionError(f"orders (m={m}, n={n}) must be below dims {first.amplitudes.shape}")
    cross, both = 0j, 0.0
    for w, s in zip(weights, members):
        c, b = _two_mode_terms(s, m, n)
        cross += w * c
        both += w * b
    return float(abs(cross) ** 2 - both)


def bs_route_mandel(state: State, params: BSParams) -> float:
    """Mandel margin recovered from the first-order two-mode condition.

    For vacuum in the second port, <a1 a2^dag> = -r t e^{i phi} <a^dag a> and
    <n1 n2> = t^2 r^2 <a^dag^2 a^2>, so dividing by t^2 r^2 gives the
    single-mode margin.
    """
    tr = params.t * abs(params.r)
    if tr < 1e-6:
        raise DegenerateBS(f"t*r = {tr:.3e} is too small")
    out = apply_bs(embed_with_vacuum(state), params)
    return hz_two_mode_violation(out, 1, 1) / tr**2


@dataclass(frozen=True)
class SearchConfig:
    """Grid plus coordinate-descent settings for :func:`entanglement_potential`.

    Setting ``fixed`` skips the search and evaluates that beam splitter only.
    """

    t2_points: int = 33
    phi_points: int = 16
    tol: float = 1e-4
    threshold: float = DEFAULT_SCHMIDT_THRESHOLD
    tail_threshold: float = DEFAULT_TAIL_THRESHOLD
    fixed: Optional[BSParams] = None
    max_iter: int = 10_000


def output_entropy(state: SingleModeState, params: BSParams,
                   threshold: float = DEFAULT_SCHMIDT_THRESHOLD) -> float:
    return schmidt_analysis(apply_bs(embed_with_vacuum(state), params), threshold).entropy_bits


def entanglement_potential(state: SingleModeState, search: SearchConfig = SearchConfig()
                           ) -> tuple[float, BSParams]:
    """Largest Schmidt entropy (bits) of the output over beam-splitter settings."""
    if not isinstance(state, SingleModeState):
        raise InvalidSpec("entanglement potential needs a pure state")
    tail = tail_mass(state)
    if not tail < search.tail_threshold:
        raise TruncationError(f"tail mass {tail:.3e} too large for entanglement potential")

    def entropy(t2: float, phi: float) -> float:
        return output_entropy(state, BSParams.from_transmission(t2, phi), search.threshold)

    if search.fixed is not None:
        return output_entropy(state, search.fixed, search.threshold), search.fixed

    t2_grid = [(i + 1) / (search.t2_points + 1) for i in range(search.t2_points)]
    phi_grid = [2 * math.pi * j / search.phi_points for j in range(search.phi_points)]
    points = [(a, b) for a in t2_grid for b in phi_grid]
    values = pmap(lambda pt: entropy(*pt), points)
    best_i = int(np.argmax(values))
    (t2, phi), best = points[best_i], values[best_i]

    steps = [1.0 / (search.t2_points + 1), 2 * math.pi / search.phi_points]
    for _ in range(search.max_iter):
        if max(steps) < search.tol:
            break
        moved = False
        for coord in (0, 1):
            for sign in (1.0, -1.0):
                cand = [t2, phi]
                cand[coord] += sign * steps[coord]
                if coord == 0:
                    cand[0] = min(max(cand[0], 0.0), 1.0)
                val = entropy(*cand)
                if val > best + 1e-15:
                    (t2, phi), best, moved = cand, val, True
                    break
        if not moved:
            steps = [s / 2 for s in steps]
    return best, BSParams.from_transmission(t2, phi % (2 * math.pi))
