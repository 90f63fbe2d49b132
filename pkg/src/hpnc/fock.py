"""Truncated single-mode Fock space.

States live in the span of |0>, ..., |D-1>. Every moment here is evaluated
with lowering operations only, so ``<(a^dag)^p a^q>`` is exact for the
truncated vector (the cutoff never clips an annihilation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.special import gammaln

from .errors import DimensionError, InvalidSpec, TruncationError

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
EIG_TOL = 1e-10
DEFAULT_TAIL_THRESHOLD = 1e-10
TAIL_FRACTION = 0.1

KINDS = ("fock", "coherent", "squeezed_vacuum", "cat", "thermal")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SingleModeState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1 or amps.size < 1:
            raise DimensionError("amplitudes must be a non-empty vector")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidSpec(f"state not normalized (norm^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def from_unnormalized(cls, amps) -> "SingleModeState":
        amps = np.asarray(amps, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0.0 or not np.isfinite(norm):
            raise InvalidSpec("amplitude vector has zero or non-finite norm")
        return cls(amps / norm)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        rho = _frozen(self.matrix)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 1:
            raise DimensionError("density matrix must be square and non-empty")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise InvalidSpec("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > NORM_TOL:
            raise InvalidSpec("density matrix trace differs from 1")
        if np.linalg.eigvalsh(rho).min() < -EIG_TOL:
            raise InvalidSpec("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", rho)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def probabilities(self) -> np.ndarray:
        return np.real(np.diag(self.matrix)).copy()


State = Union[SingleModeState, DensityOperator]


@dataclass(frozen=True)
class StateSpec:
    """Declarative description of a single-mode state.

    ``params`` keys by kind:

    * fock: ``n``
    * coherent: ``alpha``
    * squeezed_vacuum: ``r`` and optional ``phase``
    * cat: ``components``, a list of ``(weight, alpha)`` pairs
    * thermal: ``nbar``
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown state kind {self.kind!r}")
        p = self.params
        try:
            if self.kind == "fock":
                n = p["n"]
                if isinstance(n, bool) or int(n) != n or n < 0:
                    raise InvalidSpec("fock level n must be a nonnegative integer")
            elif self.kind == "coherent":
                complex(p["alpha"])
            elif self.kind == "squeezed_vacuum":
                r = p["r"]
                if isinstance(r, complex) or not np.isfinite(float(r)):
                    raise InvalidSpec("squeezing r must be a finite real")
                float(p.get("phase", 0.0))
            elif self.kind == "cat":
                comps = p["components"]
                if len(comps) == 0:
                    raise InvalidSpec("cat needs at least one component")
                for w, a in comps:
                    complex(w), complex(a)
            elif self.kind == "thermal":
                nbar = float(p["nbar"])
                if not (nbar >= 0.0 and np.isfinite(nbar)):
                    raise InvalidSpec("thermal nbar must be finite and >= 0")
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"bad parameters for {self.kind}: {exc}") from exc


def _log_factorial(n: np.ndarray) -> np.ndarray:
    return gammaln(np.asarray(n, dtype=float) + 1.0)


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Exact (unrenormalized) coefficients <n|alpha> for n < dim."""
    alpha = complex(alpha)
    n = np.arange(dim)
    out = np.zeros(dim, dtype=complex)
    if alpha == 0:
        out[0] = 1.0
        return out
    log_mod = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * _log_factorial(n)
    return np.exp(log_mod) * np.exp(1j * n * np.angle(alpha))


def coherent_overlap(alpha: complex, beta: complex) -> complex:
    """<alpha|beta> in the untruncated space."""
    alpha, beta = complex(alpha), complex(beta)
    return np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * abs(beta) ** 2 + alpha.conjugate() * beta)


def squeezed_vacuum_amplitudes(r: float, phase: float, dim: int) -> np.ndarray:
    # S(zeta)|0> with zeta = r e^{i phase}; x_theta is squeezed at theta = phase/2.
    if r < 0:
        r, phase = -r, phase + math.pi
    out = np.zeros(dim, dtype=complex)
    if r == 0:
        out[0] = 1.0
        return out
    m = np.arange((dim + 1) // 2)
    log_mod = (
        0.5 * _log_factorial(2 * m)
        - m * math.log(2.0)
        - _log_factorial(m)
        + m * math.log(math.tanh(r))
        - 0.5 * math.log(math.cosh(r))
    )
    out[2 * m] = np.exp(log_mod) * (-np.exp(1j * phase)) ** m
    return out


def thermal_weights(nbar: float, dim: int) -> np.ndarray:
    n = np.arange(dim)
    if nbar == 0:
        w = np.zeros(dim)
        w[0] = 1.0
        return w
    return np.exp(n * math.log(nbar) - (n + 1) * math.log1p(nbar))


def _tail_of_probs(probs: np.ndarray) -> float:
    dim = probs.size
    k = max(1, math.ceil(TAIL_FRACTION * dim))
    total = probs.sum()
    return float(probs[dim - k:].sum() / total)


def tail_mass(state: State) -> float:
    """Probability in the top 10% of Fock levels (at least one level)."""
    return _tail_of_probs(state.probabilities())


def state_from_spec(
    spec: StateSpec, dim: int, tail_threshold: float = DEFAULT_TAIL_THRESHOLD
) -> State:
    if int(dim) != dim or dim < 1:
        raise DimensionError(f"dim must be a positive integer, got {dim!r}")
    dim = int(dim)
    p = spec.params
    if spec.kind == "thermal":
        w = thermal_weights(float(p["nbar"]), dim)
        _check_tail(w, spec, dim, tail_threshold)
        return DensityOperator(np.diag(w / w.sum()))

    if spec.kind == "fock":
        n = int(p["n"])
        if n >= dim:
            raise TruncationError(f"fock level {n} does not fit dim {dim}")
        amps = np.zeros(dim, dtype=complex)
        amps[n] = 1.0
    elif spec.kind == "coherent":
        amps = coherent_amplitudes(complex(p["alpha"]), dim)
    elif spec.kind == "squeezed_vacuum":
        amps = squeezed_vacuum_amplitudes(float(p["r"]), float(p.get("phase", 0.0)), dim)
    else:
        amps = np.zeros(dim, dtype=complex)
        for w, a in p["components"]:
            amps = amps + complex(w) * coherent_amplitudes(complex(a), dim)
        if np.linalg.norm(amps) < 1e-12:
            raise InvalidSpec("cat components cancel to the zero vector")
    _check_tail(np.abs(amps) ** 2, spec, dim, tail_threshold)
    return SingleModeState.from_unnormalized(amps)


def _check_tail(probs, spec, dim, threshold):
    tail = _tail_of_probs(np.asarray(probs, dtype=float))
    if not tail < threshold:
        raise TruncationError(
            f"{spec.kind} state: tail mass {tail:.3e} >= {threshold:.1e} at dim {dim}"
        )


def to_density(state: State) -> DensityOperator:
    if isinstance(state, DensityOperator):
        return state
    psi = state.amplitudes
    return DensityOperator(np.outer(psi, psi.conj()))


def lower(amps: np.ndarray, k: int, axis: int = 0) -> np.ndarray:
    """Apply a^k along ``axis`` of an amplitude array, keeping its shape.

    (a^k psi)_n = sqrt((n+k)!/n!) psi_{n+k}; levels that would need n+k >= D
    are zero, which is exact because the input has no amplitude there.
    """
    amps = np.asarray(amps)
    if k == 0:
        return amps
    dim = amps.shape[axis]
    out = np.zeros_like(amps, dtype=complex)
    if k >= dim:
        return out
    n = np.arange(dim - k)
    coeff = np.exp(0.5 * (_log_factorial(n + k) - _log_factorial(n)))
    shape = [1] * amps.ndim
    shape[axis] = dim - k
    src = [slice(None)] * amps.ndim
    dst = [slice(None)] * amps.ndim
    src[axis] = slice(k, dim)
    dst[axis] = slice(0, dim - k)
    out[tuple(dst)] = coeff.reshape(shape) * amps[tuple(src)]
    return out


def lowering_matrix(dim: int, k: int = 1) -> np.ndarray:
    """Matrix of a^k on the truncated space."""
    return lower(np.eye(dim, dtype=complex), k, axis=0)


def expectation_moment(state: State, p: int, q: int) -> complex:
    """<(a^dag)^p a^q>."""
    if p < 0 or q < 0:
        raise DimensionError("moment orders must be nonnegative")
    if p >= state.dim or q >= state.dim:
        raise DimensionError(f"moment order ({p}, {q}) needs dim > {max(p, q)}")
    if isinstance(state, SingleModeState):
        psi = state.amplitudes
        return complex(np.vdot(lower(psi, p), lower(psi, q)))
    rho = state.matrix
    # Tr(rho (a^dag)^p a^q) = Tr(a^q rho (a^p)^dag)
    aq = lowering_matrix(state.dim, q)
    ap = lowering_matrix(state.dim, p)
    return complex(np.trace(aq @ rho @ ap.conj().T))


def quadrature_variance(state: State, theta: float) -> float:
    """Variance of x_theta = (a^dag e^{i theta} + a e^{-i theta}) / sqrt(2).

    Vacuum gives 1/2. [a, a^dag] = 1 is used analytically, so the result
    does not depend on the cutoff.
    """
    a1, a2, n = quadrature_moments(state)
    return _variance_from_moments(a1, a2, n, theta)


def _variance_from_moments(a1: complex, a2: complex, n: float, theta) -> float:
    # <x^2> = Re(e^{-2i theta} <a^2>) + <n> + 1/2 ; <x> = sqrt(2) Re(e^{-i theta} <a>)
    rot = np.exp(-1j * np.asarray(theta))
    mean_sq = 2.0 * np.real(rot * a1) ** 2
    second = np.real(rot**2 * a2) + n + 0.5
    out = second - mean_sq
    return float(out) if np.ndim(out) == 0 else out


def quadrature_moments(state: State) -> tuple[complex, complex, float]:
    """(<a>, <a^2>, <a^dag a>) with zeros where the cutoff forbids the order."""
    a1 = expectation_moment(state, 0, 1) if state.dim > 1 else 0j
    a2 = expectation_moment(state, 0, 2) if state.dim > 2 else 0j
    n = expectation_moment(state, 1, 1).real if state.dim > 1 else 0.0
    return a1, a2, n


def mean_photon_number(state: State) -> float:
    return float(np.dot(np.arange(state.dim), state.probabilities()))


def max_support(state: State, tol: float = 1e-14) -> int:
    """Highest Fock level whose amplitude (or diagonal weight) exceeds ``tol``."""
    if isinstance(state, SingleModeState):
        mags = np.abs(state.amplitudes)
    else:
        mags = np.sqrt(np.abs(np.diag(state.matrix)))
    idx = np.nonzero(mags > tol)[0]
    return int(idx[-1]) if idx.size else 0


def random_pure_state(rng: np.random.Generator, dim: int, scale: Sequence[float] | None = None
                      ) -> SingleModeState:
    """Gaussian random amplitudes, optionally damped per level by ``scale``."""
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    if scale is not None:
        amps = amps * np.asarray(scale)
    return SingleModeState.from_unnormalized(amps)
