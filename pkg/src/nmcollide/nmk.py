"""Dynamical-matrix analysis of unital qubit maps.

For a unital map ``r -> M r`` the dynamical matrix is

    H = (1 + sum_{mu,nu} M[mu, nu] sigma_mu (x) conj(sigma_nu)) / 2

The map is completely positive iff ``H >= 0`` and positive iff ``H`` is
block positive (non-negative on product vectors).
"""

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .channels import SINGULAR_TOL, compose, invert
from .qmat import PAULIS, hermitian_eigensystem

CLASSIFY_TOL = 1e-7
UNITAL_TOL = 1e-9
PRODUCT_MIN_TOL = 1e-6

_SIGMAS = PAULIS[1:]
_BASIS = np.array([[np.kron(s, t.conj()) for t in _SIGMAS] for s in _SIGMAS])


class Verdict(str, enum.Enum):
    MARKOVIAN_CONSISTENT = "MARKOVIAN_CONSISTENT"
    WEAK_NON_MARKOVIAN = "WEAK_NON_MARKOVIAN"
    STRONG_NON_MARKOVIAN = "STRONG_NON_MARKOVIAN"

    def __str__(self):
        return self.value


class BlockPositivityMismatch(RuntimeWarning):
    """Pairwise-eigenvalue test and product-state search disagree."""


@dataclass(frozen=True, eq=False)
class DynamicalMatrix:
    H: np.ndarray
    eigenvalues: np.ndarray

    @property
    def lambda_min(self):
        return float(self.eigenvalues[0])

    def entries(self):
        """``(h1, h2, h3, h4)`` read off the X-shaped pattern of H."""
        H = self.H.real
        return float(H[0, 0]), float(H[1, 1]), float(H[1, 2]), float(H[0, 3])

    def is_x_pattern(self, tol=1e-12):
        mask = np.ones((4, 4), dtype=bool)
        for i, j in [(0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)]:
            mask[i, j] = False
        return bool(np.all(np.abs(self.H[mask]) <= tol))


@dataclass(frozen=True)
class NMClassification:
    verdict: Verdict
    lambda_min: float
    block_positive: bool
    tolerance: float


@dataclass(frozen=True)
class ClosedForms:
    h1: float
    h2: float
    h3: float
    h4: float
    lambda0: float
    lambda1: float
    lambda2: float
    lambda3: float
    C1: float
    C2: float

    @property
    def h(self):
        return (self.h1, self.h2, self.h3, self.h4)

    @property
    def eigenvalues(self):
        return (self.lambda0, self.lambda1, self.lambda2, self.lambda3)


def dynamical_matrix(bmap):
    """Dynamical matrix of a unital Bloch map together with its ascending spectrum."""
    if np.linalg.norm(bmap.t) > UNITAL_TOL:
        raise ValueError("dynamical matrix is only defined here for unital maps (t = 0)")
    H = 0.5 * (np.eye(4) + np.einsum("mn,mnij->ij", bmap.M, _BASIS))
    lam, _ = hermitian_eigensystem(H)
    lam.setflags(write=False)
    H.setflags(write=False)
    return DynamicalMatrix(H, lam)


def cp_defect(D):
    """Smallest eigenvalue of H; negative certifies a non-CP map."""
    return D.lambda_min


def min_pair_sum(D):
    lam = D.eigenvalues
    return float(min(lam[i] + lam[j] for i in range(4) for j in range(i + 1, 4)))


def _bloch_kets(n):
    theta = np.linspace(0, np.pi, n)
    phi = np.linspace(0, 2 * np.pi, n, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    return np.stack([np.cos(tt / 2), np.exp(1j * pp) * np.sin(tt / 2)], axis=-1).reshape(-1, 2), tt.ravel(), pp.ravel()


def _ket(theta, phi):
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def _product_value(H4, x):
    a, b = _ket(x[0], x[1]), _ket(x[2], x[3])
    v = np.kron(a, b)
    return float(np.real(v.conj() @ H4 @ v))


def product_state_minimum(D, grid_density=32, refine_steps=50, polish_rounds=20):
    """Smallest ``<a (x) b|H|a (x) b>`` found over pure product states.

    A ``grid_density x grid_density`` grid of Bloch angles is searched on each
    sphere, then the best point is refined by coordinate descent over the four
    angles with step halving, and finally by alternating exact minimisation
    over one qubit at a time.  The result is an upper bound on the true
    minimum.
    """
    if grid_density < 8:
        raise ValueError("grid_density must be at least 8")
    H = np.asarray(D.H)
    kets, tt, pp = _bloch_kets(grid_density)
    H4 = H.reshape(2, 2, 2, 2)
    K = np.einsum("ai,ijkl,ak->ajl", kets.conj(), H4, kets)
    vals = np.einsum("bj,ajl,bl->ab", kets.conj(), K, kets).real
    ia, ib = np.unravel_index(np.argmin(vals), vals.shape)
    x = np.array([tt[ia], pp[ia], tt[ib], pp[ib]])
    best = _product_value(H, x)
    step = np.pi / (grid_density - 1)
    for _ in range(refine_steps):
        improved = False
        for k in range(4):
            for sgn in (1.0, -1.0):
                y = x.copy()
                y[k] += sgn * step
                val = _product_value(H, y)
                if val < best:
                    best, x, improved = val, y, True
        if not improved:
            step /= 2
    a, b = _ket(x[0], x[1]), _ket(x[2], x[3])
    for _ in range(polish_rounds):
        # exact minimisation over one qubit with the other held fixed
        b = np.linalg.eigh(np.einsum("i,ijkl,k->jl", a.conj(), H4, a))[1][:, 0]
        a = np.linalg.eigh(np.einsum("j,ijkl,l->ik", b.conj(), H4, b))[1][:, 0]
    v = np.kron(a, b)
    polished = float(np.real(v.conj() @ H @ v))
    return min(best, polished, float(vals[ia, ib]))


def block_positivity(D, tolerance=CLASSIFY_TOL, cross_check=True, grid_density=32):
    """Whether H is block positive, i.e. the map is positive.

    For the X-shaped H of Pauli maps, the pairwise condition
    ``lambda_i + lambda_j >= 0`` is exact.  Otherwise it is only necessary and
    the product-state search decides.  With ``cross_check`` the two routes are
    compared and a :class:`BlockPositivityMismatch` warning is emitted when
    they disagree.
    """
    pairwise = min_pair_sum(D) >= -tolerance
    need_search = cross_check or not D.is_x_pattern()
    if not need_search:
        return pairwise
    pmin = product_state_minimum(D, grid_density)
    if D.is_x_pattern():
        if (pairwise and pmin < -PRODUCT_MIN_TOL) or (not pairwise and pmin > PRODUCT_MIN_TOL):
            warnings.warn(
                f"pairwise test says {pairwise} but product-state minimum is {pmin:.3g}",
                BlockPositivityMismatch,
                stacklevel=2,
            )
        return pairwise
    return pairwise and pmin >= -max(tolerance, PRODUCT_MIN_TOL)


def intermediate_map(lambda20, lambda10, tol=SINGULAR_TOL):
    """``Lambda21 = Lambda20 o pinv(Lambda10)``; singular directions are propagated."""
    return compose(lambda20, invert(lambda10, tol))


def classify(D, tolerance=CLASSIFY_TOL, cross_check=False):
    """Markovian-consistent / weak / strong verdict from the spectrum of H."""
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    lam_min = D.lambda_min
    if lam_min >= -tolerance:
        # H >= 0 (within tolerance) implies block positivity
        return NMClassification(Verdict.MARKOVIAN_CONSISTENT, lam_min, True, tolerance)
    bp = block_positivity(D, tolerance, cross_check=cross_check)
    verdict = Verdict.WEAK_NON_MARKOVIAN if bp else Verdict.STRONG_NON_MARKOVIAN
    return NMClassification(verdict, lam_min, bp, tolerance)


def methods_closed_forms(epsilon, fidelity):
    """Closed-form H entries, spectrum and concurrences of the intermediate map.

    Valid for the experiment's joint table with imperfect flips of fidelity F
    and an ideal maximally entangled input.
    """
    e, F = epsilon, fidelity
    den = 2 * (F - 3) * e + 2
    if den == 0:
        raise ValueError("closed forms undefined: 2(F-3)e + 2 = 0")
    h1 = (2 * (F * (5 * F - 6) + 5) * e**2 + 3 * (F - 3) * e + 2) / den
    h2 = -(e * (2 * (F * (5 * F - 6) + 5) * e + F - 3)) / den
    h3 = (3 * F - 1) * e * (4 * (F - 1) * e + 1) / den
    h4 = (e * (8 * ((F - 1) * F + 2) * e + F - 11) + 2) / den
    lam01 = (F + 1) * e
    lam2 = -(e * (11 * F**2 * e - 14 * F * e + 2 * F + 7 * e - 2)) / (F * e - 3 * e + 1)
    lam3 = (9 * F**2 * e**2 - 10 * F * e**2 + 2 * F * e + 13 * e**2 - 10 * e + 2) / (F * e - 3 * e + 1)
    c1 = max(0.0, 1 - 4 * e)
    c2 = max(0.0, 1 + 4 * e * ((F * (3 * F - 2) + 3) * e - 2))
    return ClosedForms(h1, h2, h3, h4, lam01, lam01, lam2, lam3, c1, c2)


def closed_form_residual(D, forms):
    """Largest absolute deviation of ``D`` from the closed-form entries and spectrum."""
    h_res = max(abs(a - b) for a, b in zip(D.entries(), forms.h))
    lam_res = max(abs(a - b) for a, b in zip(D.eigenvalues, sorted(forms.eigenvalues)))
    return max(h_res, lam_res)


def trace_check(D):
    return abs(float(np.trace(D.H).real) - 2)


__all__ = [
    "BlockPositivityMismatch",
    "ClosedForms",
    "DynamicalMatrix",
    "NMClassification",
    "Verdict",
    "block_positivity",
    "classify",
    "closed_form_residual",
    "cp_defect",
    "dynamical_matrix",
    "intermediate_map",
    "methods_closed_forms",
    "min_pair_sum",
    "product_state_minimum",
]
