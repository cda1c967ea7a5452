"""One- and two-qubit states and the witnesses evaluated on them."""

from dataclasses import dataclass

import numpy as np

from .qmat import (
    ANCILLA,
    HERMITIAN_TOL,
    I2,
    PAULIS,
    SY,
    SYSTEM,
    as_matrix,
    eigvalsh,
    partial_trace,
    trace_norm,
)

STATE_TOL = 1e-10

_SYSY = np.kron(SY, SY)
_SIGMAS = PAULIS[1:]


def check_density(rho, tol=STATE_TOL):
    """Validate a density matrix and return it as a complex array.

    Raises ``ValueError`` if ``rho`` is not Hermitian, not unit trace or has an
    eigenvalue below ``-tol``.
    """
    rho = as_matrix(rho)
    if rho.shape not in ((2, 2), (4, 4)):
        raise ValueError(f"unsupported dimension {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"density matrix has trace {np.trace(rho).real:.3g}")
    if eigvalsh(rho)[0] < -tol:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QubitState:
    """Single-qubit density matrix."""

    rho: np.ndarray

    def __post_init__(self):
        rho = check_density(as_matrix(self.rho, (2, 2)))
        object.__setattr__(self, "rho", _frozen(rho))

    @classmethod
    def from_bloch(cls, r):
        r = np.asarray(r, dtype=float)
        if np.linalg.norm(r) > 1 + STATE_TOL:
            raise ValueError("Bloch vector outside the unit ball")
        rho = 0.5 * (I2 + sum(ri * s for ri, s in zip(r, _SIGMAS)))
        return cls(rho)

    @property
    def bloch(self):
        return np.array([np.trace(self.rho @ s).real for s in _SIGMAS])


@dataclass(frozen=True)
class CorrelationData:
    """Pauli expansion of a two-qubit state.

    ``a`` is the ancilla Bloch vector, ``b`` the system Bloch vector and
    ``T[i, j] = Tr(rho sigma_i (x) sigma_j)``.
    """

    a: np.ndarray
    b: np.ndarray
    T: np.ndarray

    def to_matrix(self):
        """Rebuild the 4x4 operator from its Pauli expansion."""
        rho = np.kron(I2, I2).astype(complex)
        for i, si in enumerate(_SIGMAS):
            rho = rho + self.a[i] * np.kron(si, I2) + self.b[i] * np.kron(I2, si)
            for j, sj in enumerate(_SIGMAS):
                rho = rho + self.T[i, j] * np.kron(si, sj)
        return rho / 4


@dataclass(frozen=True)
class TwoQubitState:
    """Density matrix on ancilla (x) system."""

    rho: np.ndarray

    def __post_init__(self):
        rho = check_density(as_matrix(self.rho, (4, 4)))
        object.__setattr__(self, "rho", _frozen(rho))

    def reduced(self, keep=SYSTEM):
        return QubitState(partial_trace(self.rho, keep))

    @property
    def system(self):
        return self.reduced(SYSTEM)

    @property
    def ancilla(self):
        return self.reduced(ANCILLA)


def visibility_for_concurrence(c):
    """Werner visibility ``v`` whose state has concurrence ``c`` (``(3v-1)/2 = c``)."""
    if not 0 < c <= 1:
        raise ValueError("target concurrence must lie in (0, 1]")
    return (2 * c + 1) / 3


def bell_state(alpha=0.0, visibility=1.0):
    """Werner mixture of ``(|HV> + e^{i alpha}|VH>)/sqrt 2`` with white noise.

    ``|H>`` is basis state 0 and ``|V>`` basis state 1, ancilla first.
    """
    if not 0 <= visibility <= 1:
        raise ValueError(f"visibility must lie in [0, 1], got {visibility}")
    psi = np.zeros(4, dtype=complex)
    psi[1] = 1 / np.sqrt(2)
    psi[2] = np.exp(1j * alpha) / np.sqrt(2)
    rho = visibility * np.outer(psi, psi.conj()) + (1 - visibility) * np.eye(4) / 4
    return TwoQubitState(rho)


def _rho(state):
    if isinstance(state, (TwoQubitState, QubitState)):
        return state.rho
    return check_density(state)


def concurrence(state):
    """Wootters concurrence of a two-qubit state.

    The square roots of the eigenvalues of ``rho (sy sy) rho* (sy sy)`` are
    obtained as singular values of ``W^T (sy sy) W`` with ``rho = W W^dag``,
    which avoids taking square roots of round-off sized eigenvalues.
    """
    rho = _rho(state)
    if rho.shape != (4, 4):
        raise ValueError("concurrence needs a two-qubit state")
    p, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    p = np.where(p > 1e-14, p, 0.0)
    w = v * np.sqrt(p)
    s = np.linalg.svd(w.T @ _SYSY @ w, compute_uv=False)
    s = np.sort(s)[::-1]
    return float(max(0.0, s[0] - s[1] - s[2] - s[3]))


def trace_distance(rho, sigma):
    """Half the trace norm of ``rho - sigma``."""
    r, s = _rho(rho), _rho(sigma)
    if r.shape != s.shape:
        raise ValueError(f"dimension mismatch {r.shape} vs {s.shape}")
    return 0.5 * trace_norm(r - s)


def von_neumann_entropy(state):
    """Entropy in bits; eigenvalues in [-1e-10, 0) count as zero."""
    lam = eigvalsh(_rho(state))
    lam = lam[lam > 0]
    return float(max(0.0, -np.sum(lam * np.log2(lam))))


def fidelity(rho, sigma):
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``."""
    r, s = _rho(rho), _rho(sigma)
    p, v = np.linalg.eigh(r)
    sq = (v * np.sqrt(np.clip(p, 0, None))) @ v.conj().T
    inner = eigvalsh(sq @ s @ sq, tol=HERMITIAN_TOL * 10)
    return float(np.sum(np.sqrt(np.clip(inner, 0, None))) ** 2)


def correlation_data(state):
    """Local Bloch vectors and correlation matrix of a two-qubit state."""
    rho = _rho(state)
    if rho.shape != (4, 4):
        raise ValueError("correlation data needs a two-qubit state")
    a = np.array([np.trace(rho @ np.kron(s, I2)).real for s in _SIGMAS])
    b = np.array([np.trace(rho @ np.kron(I2, s)).real for s in _SIGMAS])
    T = np.array([[np.trace(rho @ np.kron(si, sj)).real for sj in _SIGMAS] for si in _SIGMAS])
    return CorrelationData(a, b, T)
