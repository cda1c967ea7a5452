"""Simulated two-qubit Pauli tomography with multinomial count noise.

Each of the 9 local settings ``(i, j)`` measures ``sigma_i`` on the ancilla
and ``sigma_j`` on the system; ``N`` coincidences per setting are split
over the outcomes ``(++, +-, -+, --)`` (ancilla sign first).
"""

from dataclasses import dataclass

import numpy as np

from .channels import BlochAffineMap
from .nmk import dynamical_matrix, intermediate_map
from .states import CorrelationData, TwoQubitState, concurrence, correlation_data

AXES = "xyz"
SETTINGS = tuple((i, j) for i in AXES for j in AXES)

# fixed odd 64-bit multiplier for per-repetition seed derivation
SEED_MULTIPLIER = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1

_SIGNS = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]])


def derive_seed(seed, k):
    """Seed of repetition ``k``: ``seed XOR (k * C mod 2^64)``."""
    return (int(seed) ^ ((int(k) * SEED_MULTIPLIER) & _MASK64)) & _MASK64


@dataclass(frozen=True, eq=False)
class CountsRecord:
    """Coincidence counts for the 9 Pauli settings, ``counts[s] = (n_pp, n_pm, n_mp, n_mm)``."""

    N: int
    seed: int
    counts: np.ndarray
    settings: tuple = SETTINGS

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.shape != (9, 4):
            raise ValueError(f"counts must have shape (9, 4), got {c.shape}")
        if np.any(c < 0) or np.any(c.sum(axis=1) != self.N):
            raise ValueError(f"every setting must hold {self.N} non-negative counts")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    def __eq__(self, other):
        return (
            isinstance(other, CountsRecord)
            and self.N == other.N
            and self.seed == other.seed
            and np.array_equal(self.counts, other.counts)
        )

    def frequencies(self):
        return self.counts / self.N

    def dumps(self):
        lines = [f"N={self.N} seed={self.seed}"]
        for (i, j), row in zip(self.settings, self.counts):
            lines.append(f"{i}{j} " + " ".join(str(int(n)) for n in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = dict(tok.split("=", 1) for tok in lines[0].split())
        rows = {}
        for ln in lines[1:]:
            label, *vals = ln.split()
            if len(label) != 2 or len(vals) != 4:
                raise ValueError(f"malformed counts line: {ln!r}")
            rows[(label[0], label[1])] = [int(v) for v in vals]
        if set(rows) != set(SETTINGS):
            raise ValueError("counts file must list all 9 settings exactly once")
        return cls(int(head["N"]), int(head["seed"]), [rows[s] for s in SETTINGS])


@dataclass(frozen=True, eq=False)
class ReconstructedState:
    state: TwoQubitState
    raw_linear: np.ndarray
    projection_distance: float


def outcome_probabilities(state):
    """``(9, 4)`` outcome probabilities ``(1 + s a_i + t b_j + s t T_ij) / 4``."""
    cd = correlation_data(state)
    probs = np.empty((9, 4))
    for k, (i, j) in enumerate(SETTINGS):
        ai, bj = cd.a[AXES.index(i)], cd.b[AXES.index(j)]
        tij = cd.T[AXES.index(i), AXES.index(j)]
        s, t = _SIGNS[:, 0], _SIGNS[:, 1]
        probs[k] = (1 + s * ai + t * bj + s * t * tij) / 4
    probs = np.clip(probs, 0, None)
    return probs / probs.sum(axis=1, keepdims=True)


def simulate_counts(state, N, seed):
    """One multinomial draw of size ``N`` per setting; deterministic in ``(state, N, seed)``."""
    if int(N) < 1:
        raise ValueError("N must be at least 1")
    rng = np.random.default_rng(int(seed))
    counts = rng.multinomial(int(N), outcome_probabilities(state))
    return CountsRecord(int(N), int(seed), counts)


def correlation_estimates(freqs):
    """Pauli expectations from a ``(9, 4)`` frequency table.

    Local components are averaged over the three settings that contain them.
    """
    f = np.asarray(freqs, dtype=float).reshape(3, 3, 4)
    T = f[..., 0] - f[..., 1] - f[..., 2] + f[..., 3]
    a = (f[..., 0] + f[..., 1] - f[..., 2] - f[..., 3]).mean(axis=1)
    b = (f[..., 0] - f[..., 1] + f[..., 2] - f[..., 3]).mean(axis=0)
    return CorrelationData(a, b, T)


def project_to_density(raw):
    """Closest density matrix in 2-norm: clip negative eigenvalues and spread the deficit.

    Returns the projected matrix and the Frobenius norm of the adjustment.
    """
    raw = 0.5 * (raw + raw.conj().T)
    lam, vec = np.linalg.eigh(raw)
    lam = lam[::-1].copy()  # descending
    vec = vec[:, ::-1]
    n = len(lam)
    acc = 0.0
    i = n - 1
    while i >= 0 and lam[i] + acc / (i + 1) < 0:
        acc += lam[i]
        lam[i] = 0.0
        i -= 1
    lam[: i + 1] += acc / (i + 1)
    rho = (vec * lam) @ vec.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho, float(np.linalg.norm(rho - raw))


def reconstruct_frequencies(freqs):
    """Linear inversion of outcome frequencies followed by physical projection."""
    raw = correlation_estimates(freqs).to_matrix()
    rho, dist = project_to_density(raw)
    return ReconstructedState(TwoQubitState(rho), raw, dist)


def reconstruct(counts):
    return reconstruct_frequencies(counts.frequencies())


def extract_bloch_map(inp, out, min_singular=1e-6):
    """Bloch map of the channel that took ``inp`` to ``out`` on the system qubit.

    Solves ``T_out = T_in M^T`` in least squares; the shift is
    ``b_out - M b_in``.
    """
    if isinstance(inp, TwoQubitState):
        inp = correlation_data(inp)
    if isinstance(out, TwoQubitState):
        out = correlation_data(out)
    sv = np.linalg.svd(inp.T, compute_uv=False)
    if sv.min() <= min_singular:
        raise ValueError("input state insufficient for process extraction")
    Mt, *_ = np.linalg.lstsq(inp.T, out.T, rcond=None)
    M = Mt.T
    return BlochAffineMap(M, out.b - M @ inp.b)


STATISTICS = ("concurrence", "lambda_min", "C_diff")


def _state_seed(rep_seed, j):
    # independent streams for the states measured inside one repetition
    ss = np.random.SeedSequence(entropy=rep_seed, spawn_key=(j,))
    return int(ss.generate_state(1, np.uint64)[0])


def lambda21_from_states(rho0, rho1, rho2):
    """Intermediate Bloch map from three two-qubit states.

    Shifts produced by finite statistics are dropped before inversion, since
    the model maps are unital.
    """
    l10 = extract_bloch_map(rho0, rho1).unital_part()
    l20 = extract_bloch_map(rho0, rho2).unital_part()
    return intermediate_map(l20, l10)


def tomographic_estimates(states, N, seed):
    """Reconstruct every state in ``states`` from simulated counts of one repetition."""
    return [reconstruct(simulate_counts(s, N, _state_seed(seed, j))).state for j, s in enumerate(states)]


def _statistic(name, recon):
    if name == "concurrence":
        return concurrence(recon[0])
    if name == "C_diff":
        r1, r2 = recon[-2], recon[-1]
        return concurrence(r2) - concurrence(r1)
    if name == "lambda_min":
        return dynamical_matrix(lambda21_from_states(*recon)).lambda_min
    raise ValueError(f"unknown statistic {name!r}; choose from {STATISTICS}")


def error_bars(true_state, N, repetitions, seed, statistic="concurrence"):
    """Monte Carlo spread of a statistic under simulated tomography.

    ``true_state`` is a single state for ``concurrence``, the pair
    ``(rho1, rho2)`` (or a triple) for ``C_diff`` and the triple
    ``(rho0, rho1, rho2)`` for ``lambda_min``.

    Returns ``{"mean", "std", "samples"}`` with the sample standard deviation.
    """
    if repetitions < 2:
        raise ValueError("repetitions must be at least 2")
    if statistic not in STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}; choose from {STATISTICS}")
    states = [true_state] if isinstance(true_state, TwoQubitState) else list(true_state)
    need = {"concurrence": 1, "C_diff": 2, "lambda_min": 3}[statistic]
    if len(states) < need:
        raise ValueError(f"{statistic} needs {need} state(s), got {len(states)}")
    samples = np.array(
        [_statistic(statistic, tomographic_estimates(states, N, derive_seed(seed, k))) for k in range(repetitions)]
    )
    return {"mean": float(samples.mean()), "std": float(samples.std(ddof=1)), "samples": samples}
