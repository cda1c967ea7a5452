"""Collision model: joint flip tables, noisy flips, Pauli channels, Bloch maps.

Every map in the model is a Pauli channel ``rho -> sum_k q_k s_k rho s_k``
with weights over ``{I, X, Y, Z}``.  Composition of Pauli channels is a
convolution over the Pauli group (phases drop out under conjugation), so
all channel arithmetic here is exact.

Composition order: ``compose(second, first)`` applies ``first`` first.
"""

from dataclasses import dataclass

import numpy as np

from .qmat import I2, PAULIS
from .states import QubitState, TwoQubitState

PROB_TOL = 1e-12
SINGULAR_TOL = 1e-9

#: Collision operators indexing the rows/columns of a joint table.
COLLISION_OPS = ("0", "x", "z")

PAULI_LABELS = ("I", "X", "Y", "Z")

# Pauli index (I, X, Y, Z) <-> symplectic code x + 2z; the map is an involution
_CODE = (0, 1, 3, 2)
PAULI_PRODUCT = np.array([[_CODE[_CODE[i] ^ _CODE[j]] for j in range(4)] for i in range(4)])


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class JointCollisionTable:
    """Joint probabilities ``p[m, n]`` of operator ``m`` in collision 1 and ``n`` in collision 2.

    Rows and columns are indexed by :data:`COLLISION_OPS` = ``("0", "x", "z")``.
    """

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (3, 3):
            raise ValueError(f"joint table must be 3x3, got {p.shape}")
        if np.any(p < -PROB_TOL) or np.any(p > 1 + PROB_TOL):
            raise ValueError("joint probabilities must lie in [0, 1]")
        if abs(p.sum() - 1) > PROB_TOL:
            raise ValueError(f"joint probabilities sum to {p.sum()!r}, not 1")
        object.__setattr__(self, "p", _frozen(np.clip(p, 0, 1)))

    def __getitem__(self, key):
        m, n = key
        return float(self.p[COLLISION_OPS.index(m), COLLISION_OPS.index(n)])

    @classmethod
    def from_dict(cls, entries):
        """Build a table from ``{"xx": 0.5, "zz": 0.5}``-style entries; missing pairs are 0."""
        p = np.zeros((3, 3))
        for key, value in entries.items():
            m, n = key
            p[COLLISION_OPS.index(m), COLLISION_OPS.index(n)] = value
        return cls(p)

    def first_marginal(self):
        return self.p.sum(axis=1)

    def second_marginal(self):
        return self.p.sum(axis=0)


@dataclass(frozen=True, eq=False)
class PauliProbabilities:
    """Weights of a Pauli channel over ``(I, X, Y, Z)``."""

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.shape != (4,):
            raise ValueError(f"Pauli weights must have 4 entries, got {q.shape}")
        if np.any(q < -PROB_TOL) or np.any(q > 1 + PROB_TOL):
            raise ValueError("Pauli weights must lie in [0, 1]")
        if abs(q.sum() - 1) > PROB_TOL:
            raise ValueError(f"Pauli weights sum to {q.sum()!r}, not 1")
        object.__setattr__(self, "q", _frozen(np.clip(q, 0, 1)))

    def __iter__(self):
        return iter(self.q.tolist())

    def __repr__(self):
        return "PauliProbabilities(" + ", ".join(f"{l}={w:.6g}" for l, w in zip(PAULI_LABELS, self.q)) + ")"

    def allclose(self, other, atol=PROB_TOL):
        other = other.q if isinstance(other, PauliProbabilities) else np.asarray(other)
        return bool(np.allclose(self.q, other, rtol=0, atol=atol))


IDENTITY_CHANNEL = PauliProbabilities([1.0, 0.0, 0.0, 0.0])


@dataclass(frozen=True, eq=False)
class BlochAffineMap:
    """Affine action ``r -> M r + t`` of a qubit map on Bloch vectors.

    ``singular_directions`` lists unit vectors along which a pseudo-inverse
    discarded a (near) zero contraction.
    """

    M: np.ndarray
    t: np.ndarray = None
    singular_directions: tuple = ()

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float)
        if M.shape != (3, 3):
            raise ValueError(f"M must be 3x3, got {M.shape}")
        t = np.zeros(3) if self.t is None else np.asarray(self.t, dtype=float)
        if t.shape != (3,):
            raise ValueError(f"t must have 3 entries, got {t.shape}")
        object.__setattr__(self, "M", _frozen(M))
        object.__setattr__(self, "t", _frozen(t))
        object.__setattr__(self, "singular_directions", tuple(tuple(map(float, d)) for d in self.singular_directions))

    @classmethod
    def identity(cls):
        return cls(np.eye(3))

    def __call__(self, r):
        return self.M @ np.asarray(r, dtype=float) + self.t

    @property
    def is_diagonal(self):
        return bool(np.all(self.M == np.diag(np.diag(self.M))))

    def unital_part(self):
        """Same map with the shift dropped."""
        return BlochAffineMap(self.M, np.zeros(3), self.singular_directions)

    def singular_axes(self):
        """Names of the coordinate axes among ``singular_directions``."""
        names = []
        for d in self.singular_directions:
            k = int(np.argmax(np.abs(d)))
            names.append("xyz"[k] if abs(abs(d[k]) - 1) < 1e-12 else str(d))
        return names


def collision_table(epsilon):
    """Joint table of the experiment: only perfectly correlated double flips.

    ``p00 = (1-2e)^2``, every single flip ``(1-2e)e``, ``pxx = pzz = 2e^2`` and
    ``pxz = pzx = 0``.
    """
    if not 0 <= epsilon <= 0.5:
        raise ValueError(f"epsilon must lie in [0, 0.5], got {epsilon}")
    s = (1 - 2 * epsilon) * epsilon
    d = 2 * epsilon**2
    p = [
        [(1 - 2 * epsilon) ** 2, s, s],
        [s, d, 0.0],
        [s, 0.0, d],
    ]
    return JointCollisionTable(p)


def product_table(px, pz):
    """Uncorrelated table ``p[m, n] = p_m p_n`` with ``p_0 = 1 - px - pz``."""
    p = np.array([1 - px - pz, px, pz])
    if np.any(p < 0):
        raise ValueError("single-collision probabilities must be non-negative")
    return JointCollisionTable(np.outer(p, p))


def correlation_factor(table):
    """``Q = (pxx + pzz - pxz - pzx) / (pxx + pzz + pxz + pzx)``."""
    same = table["x", "x"] + table["z", "z"]
    cross = table["x", "z"] + table["z", "x"]
    if same + cross <= 0:
        raise ValueError("Q undefined: no double flips in the table")
    return (same - cross) / (same + cross)


def noisy_flip(op, fidelity):
    """Imperfect flip: intended Pauli with weight F, the two others share 1 - F."""
    if not 0 <= fidelity <= 1:
        raise ValueError(f"fidelity must lie in [0, 1], got {fidelity}")
    err = (1 - fidelity) / 2
    if op in ("X", "x"):
        return PauliProbabilities([0.0, fidelity, err, err])
    if op in ("Z", "z"):
        return PauliProbabilities([0.0, err, err, fidelity])
    raise ValueError(f"flip must be 'X' or 'Z', got {op!r}")


def _noisy(op, fidelity):
    return IDENTITY_CHANNEL if op == "0" else noisy_flip(op, fidelity)


def convolve(first, second):
    """Pauli channel equal to applying ``first`` then ``second``."""
    out = np.zeros(4)
    for i, qi in enumerate(first.q):
        for j, qj in enumerate(second.q):
            out[PAULI_PRODUCT[i, j]] += qi * qj
    return PauliProbabilities(out)


def mix(weights, channels):
    """Convex combination of Pauli channels."""
    q = sum(w * c.q for w, c in zip(weights, channels))
    return PauliProbabilities(q)


def channel_after_one(table, fidelity=1.0):
    """Effective channel after the first collision (second collision marginalised)."""
    marg = table.first_marginal()
    return mix(marg, [_noisy(op, fidelity) for op in COLLISION_OPS])


def channel_after_two(table, fidelity=1.0):
    weights, channels = [], []
    for a, m in enumerate(COLLISION_OPS):
        for b, n in enumerate(COLLISION_OPS):
            weights.append(table.p[a, b])
            channels.append(convolve(_noisy(m, fidelity), _noisy(n, fidelity)))
    return mix(weights, channels)


def repeat_uncorrelated(channel, n):
    """``n``-fold self-composition; ``n = 0`` gives the identity channel."""
    if n < 0:
        raise ValueError("n must be non-negative")
    out = IDENTITY_CHANNEL
    for _ in range(n):
        out = convolve(out, channel)
    return out


def apply_to_system(state, channel):
    """Act with ``channel`` on the system slot of a two-qubit state."""
    rho = state.rho if isinstance(state, TwoQubitState) else np.asarray(state, dtype=complex)
    out = np.zeros((4, 4), dtype=complex)
    for qk, s in zip(channel.q, PAULIS):
        if qk:
            u = np.kron(I2, s)
            out += qk * (u @ rho @ u)
    return TwoQubitState(out)


def apply_to_qubit(rho, channel):
    """Act with ``channel`` on a single-qubit density matrix (or :class:`QubitState`)."""
    rho = rho.rho if isinstance(rho, QubitState) else np.asarray(rho, dtype=complex)
    return sum(qk * (s @ rho @ s) for qk, s in zip(channel.q, PAULIS))


def bloch_map(channel):
    q0, qx, qy, qz = channel.q
    return BlochAffineMap(np.diag([q0 + qx - qy - qz, q0 - qx + qy - qz, q0 - qx - qy + qz]))


def compose(second, first):
    """Map applying ``first`` then ``second``: ``M = M2 M1``, ``t = M2 t1 + t2``."""
    dirs = first.singular_directions + second.singular_directions
    return BlochAffineMap(second.M @ first.M, second.M @ first.t + second.t, dirs)


def invert(bmap, tol=SINGULAR_TOL):
    """Pseudo-inverse of a unital Bloch map.

    Contractions with modulus ``<= tol`` are mapped to 0 rather than inverted
    and reported in ``singular_directions``.  Diagonal maps are inverted entry
    by entry; general maps through an SVD.
    """
    if np.linalg.norm(bmap.t) > tol:
        raise ValueError("only unital maps can be inverted here")
    if bmap.is_diagonal:
        d = np.diag(bmap.M)
        keep = np.abs(d) > tol
        inv = np.where(keep, 1 / np.where(keep, d, 1), 0.0)
        dirs = [np.eye(3)[k] for k in np.flatnonzero(~keep)]
        return BlochAffineMap(np.diag(inv), None, dirs)
    u, s, vh = np.linalg.svd(bmap.M)
    keep = s > tol
    s_inv = np.where(keep, 1 / np.where(keep, s, 1), 0.0)
    dirs = [u[:, k] for k in np.flatnonzero(~keep)]
    return BlochAffineMap(vh.T @ np.diag(s_inv) @ u.T, None, dirs)
