"""Small dense complex matrices (2x2 and 4x4).

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Two-qubit
operators use the ordering ancilla (first slot) x system (second slot).
"""

import numpy as np

HERMITIAN_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

#: Pauli basis in the order {I, X, Y, Z}.
PAULIS = (I2, SX, SY, SZ)

ANCILLA = "ancilla"
SYSTEM = "system"

for _m in PAULIS:
    _m.setflags(write=False)


def as_matrix(a, shape=None):
    """Coerce ``a`` to a complex square array, optionally checking its shape."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if shape is not None and m.shape != shape:
        raise ValueError(f"expected shape {shape}, got {m.shape}")
    return m


def is_hermitian(a, tol=HERMITIAN_TOL):
    m = np.asarray(a)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def tensor(a, b):
    """Kronecker product ``a (x) b`` of two 2x2 matrices.

    ``a`` acts on the first (ancilla) slot, ``b`` on the second (system) slot.
    """
    a = as_matrix(a, (2, 2))
    b = as_matrix(b, (2, 2))
    return np.kron(a, b)


def partial_trace(rho, keep):
    """Reduce a 4x4 two-qubit operator to the ``keep`` subsystem.

    Parameters
    ----------
    rho : array_like
        4x4 operator on ancilla (x) system.
    keep : {"ancilla", "system"}
        Subsystem retained after tracing out the other one.
    """
    rho = as_matrix(rho, (4, 4))
    r = rho.reshape(2, 2, 2, 2)
    if keep == ANCILLA:
        return np.einsum("ijkj->ik", r)
    if keep == SYSTEM:
        return np.einsum("jijk->ik", r)
    raise ValueError(f"keep must be {ANCILLA!r} or {SYSTEM!r}, got {keep!r}")


def _phase_normalise(v, tol=1e-12):
    # first component with non-negligible modulus made real positive
    idx = np.flatnonzero(np.abs(v) > tol)
    if idx.size == 0:
        return v
    c = v[idx[0]]
    return v * (abs(c) / c)


def hermitian_eigensystem(h, tol=HERMITIAN_TOL):
    """Eigen-decomposition of a Hermitian matrix.

    Returns eigenvalues in ascending order and the matching orthonormal
    eigenvectors as columns.  Each eigenvector is phase-fixed so that its
    first non-negligible component is real and positive; eigenvalues that
    agree to 1e-12 are ordered by the lexicographic order of their
    eigenvectors so the output is deterministic.

    Raises
    ------
    ValueError
        If ``h`` deviates from Hermiticity by more than ``tol``.
    """
    h = as_matrix(h)
    if not is_hermitian(h, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    hs = 0.5 * (h + h.conj().T)
    w, v = np.linalg.eigh(hs)
    v = np.column_stack([_phase_normalise(v[:, k]) for k in range(v.shape[1])])

    # group near-degenerate eigenvalues, then sort within groups
    order = list(range(len(w)))
    groups, start = [], 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k] - w[k - 1] > 1e-12:
            groups.append(order[start:k])
            start = k
    final = []
    for g in groups:
        key = lambda j: tuple(x for c in v[:, j] for x in (round(c.real, 12), round(c.imag, 12)))
        final.extend(sorted(g, key=key))
    return w[final], v[:, final]


def eigvalsh(h, tol=HERMITIAN_TOL):
    """Ascending eigenvalues of a Hermitian matrix."""
    h = as_matrix(h)
    if not is_hermitian(h, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    return np.linalg.eigvalsh(0.5 * (h + h.conj().T))


def trace_norm(a):
    """Sum of singular values of a square matrix."""
    a = as_matrix(a)
    if is_hermitian(a, 1e-14):
        return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (a + a.conj().T)))))
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))
