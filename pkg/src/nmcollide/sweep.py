"""Epsilon sweeps of the collision model and their CSV/JSON emission."""

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from . import channels as ch
from .config import SweepConfig, fmt
from .nmk import (
    CLASSIFY_TOL,
    Verdict,
    classify,
    closed_form_residual,
    dynamical_matrix,
    intermediate_map,
    methods_closed_forms,
    min_pair_sum,
    product_state_minimum,
    trace_check,
)
from .states import bell_state, concurrence
from .tomo import derive_seed, lambda21_from_states, tomographic_estimates

ORACLE_TOL = 1e-10


class OracleMismatch(RuntimeError):
    """Simulated pipeline disagrees with the closed forms."""


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    lambda_min: float
    block_positive: bool
    verdict: Verdict
    C1: float
    C2: float
    C_diff: float
    std_lambda_min: float = None
    std_C1: float = None
    std_C2: float = None


@dataclass(frozen=True)
class _Evolution:
    table: ch.JointCollisionTable
    one: ch.PauliProbabilities
    two: ch.PauliProbabilities
    states: tuple


def _evolve(epsilon, fidelity, visibility):
    table = ch.collision_table(epsilon)
    one = ch.channel_after_one(table, fidelity)
    two = ch.channel_after_two(table, fidelity)
    rho0 = bell_state(0.0, visibility)
    states = (rho0, ch.apply_to_system(rho0, one), ch.apply_to_system(rho0, two))
    return _Evolution(table, one, two, states)


def _closed_forms_defined(epsilon, fidelity):
    # Lambda10 loses its x/z contraction where 2(F-3)e + 2 = 0
    return abs(2 * (fidelity - 3) * epsilon + 2) > 1e-12


def _analytic_row(epsilon, config, check_oracle=True):
    ev = _evolve(epsilon, config.fidelity, config.visibility)
    lam21 = intermediate_map(ch.bloch_map(ev.two), ch.bloch_map(ev.one))
    D = dynamical_matrix(lam21)
    if check_oracle and _closed_forms_defined(epsilon, config.fidelity):
        res = max(closed_form_residual(D, methods_closed_forms(epsilon, config.fidelity)), trace_check(D))
        if res > ORACLE_TOL:
            raise OracleMismatch(f"closed-form residual {res:.3g} at epsilon={epsilon}")
    cls = classify(D)
    c1, c2 = concurrence(ev.states[1]), concurrence(ev.states[2])
    return SweepRow(epsilon, D.lambda_min, cls.block_positive, cls.verdict, c1, c2, c2 - c1)


def _grid_seed(seed, index):
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def tomographic_point(states, counts, reps, seed):
    """Repeated simulated tomography of ``(rho0, rho1, rho2)``.

    Returns per-repetition Bloch matrices of the intermediate map and the
    concurrences of the reconstructed ``rho1`` and ``rho2``.
    """
    mats, lam, c1, c2 = [], [], [], []
    for k in range(reps):
        r0, r1, r2 = tomographic_estimates(states, counts, derive_seed(seed, k))
        l21 = lambda21_from_states(r0, r1, r2)
        mats.append(l21.M)
        lam.append(dynamical_matrix(l21).lambda_min)
        c1.append(concurrence(r1))
        c2.append(concurrence(r2))
    return np.array(mats), np.array(lam), np.array(c1), np.array(c2)


def _tomographic_row(index, epsilon, config):
    ev = _evolve(epsilon, config.fidelity, config.visibility)
    mats, lam, c1, c2 = tomographic_point(ev.states, config.counts, config.reps, _grid_seed(config.seed, index))
    # H is linear in M, so the mean map carries the mean dynamical matrix
    D = dynamical_matrix(ch.BlochAffineMap(mats.mean(axis=0)))
    std_lam = float(lam.std(ddof=1))
    cls = classify(D, tolerance=max(3 * std_lam, CLASSIFY_TOL))
    m1, m2 = float(c1.mean()), float(c2.mean())
    return SweepRow(
        epsilon,
        D.lambda_min,
        cls.block_positive,
        cls.verdict,
        m1,
        m2,
        m2 - m1,
        std_lam,
        float(c1.std(ddof=1)),
        float(c2.std(ddof=1)),
    )


def _row(index, epsilon, config, check_oracle):
    if config.mode == "analytic":
        return _analytic_row(epsilon, config, check_oracle)
    return _tomographic_row(index, epsilon, config)


def run_sweep(config=None, check_oracle=True, workers=1):
    """Evaluate every epsilon of ``config.epsilon_grid``.

    With ``workers > 1`` grid points run in separate processes; rows are
    always returned in grid order and do not depend on ``workers``, since
    every grid point draws from its own seed.
    """
    config = config or SweepConfig()
    n = len(config.epsilon_grid)
    args = (range(n), config.epsilon_grid, [config] * n, [check_oracle] * n)
    if workers <= 1 or n < 2:
        return list(map(_row, *args))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_row, *args))


def run_single(epsilon, fidelity=1.0, visibility=1.0, mode="analytic", counts=10_000, reps=200, seed=2024):
    """Full diagnostic record for one epsilon."""
    config = SweepConfig(
        epsilon_grid=(epsilon,), fidelity=fidelity, visibility=visibility, mode=mode, counts=counts, reps=reps, seed=seed
    )
    ev = _evolve(epsilon, fidelity, visibility)
    b1, b2 = ch.bloch_map(ev.one), ch.bloch_map(ev.two)
    lam21 = intermediate_map(b2, b1)
    D = dynamical_matrix(lam21)
    forms = methods_closed_forms(epsilon, fidelity) if _closed_forms_defined(epsilon, fidelity) else None
    cls = classify(D, cross_check=True)
    try:
        q = ch.correlation_factor(ev.table)
    except ValueError:
        q = None
    report = {
        "epsilon": epsilon,
        "fidelity": fidelity,
        "visibility": visibility,
        "table": {f"{m}{n}": ev.table[m, n] for m in ch.COLLISION_OPS for n in ch.COLLISION_OPS},
        "Q": q,
        "channel_after_one": dict(zip(ch.PAULI_LABELS, ev.one.q.tolist())),
        "channel_after_two": dict(zip(ch.PAULI_LABELS, ev.two.q.tolist())),
        "bloch_lambda10": np.diag(b1.M).tolist(),
        "bloch_lambda20": np.diag(b2.M).tolist(),
        "bloch_lambda21": np.diag(lam21.M).tolist(),
        "singular_directions": lam21.singular_axes(),
        "H": {"h1": D.entries()[0], "h2": D.entries()[1], "h3": D.entries()[2], "h4": D.entries()[3]},
        "eigenvalues": D.eigenvalues.tolist(),
        "trace_H": float(np.trace(D.H).real),
        "min_pair_sum": min_pair_sum(D),
        "product_state_minimum": product_state_minimum(D),
        "closed_forms": None
        if forms is None
        else {"h": list(forms.h), "eigenvalues": list(forms.eigenvalues), "C1": forms.C1, "C2": forms.C2},
        "closed_form_residual": None if forms is None else closed_form_residual(D, forms),
        "lambda_min": D.lambda_min,
        "block_positive": cls.block_positive,
        "verdict": cls.verdict,
        "C0": concurrence(ev.states[0]),
        "C1": concurrence(ev.states[1]),
        "C2": concurrence(ev.states[2]),
    }
    if mode == "tomographic":
        row = run_sweep(config)[0]
        report["tomographic"] = {f.name: getattr(row, f.name) for f in fields(row)}
    return report


def _columns(rows):
    names = [f.name for f in fields(SweepRow)]
    if rows and rows[0].std_lambda_min is None:
        names = names[:7]
    return names


def to_csv(rows, config):
    cols = _columns(rows)
    lines = [f"# {config.header()}", ",".join(cols)]
    for r in rows:
        lines.append(",".join(fmt(getattr(r, c)) for c in cols))
    return "\n".join(lines) + "\n"


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Verdict):
        return x.value
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(fmt(x))
    return x


def to_json(rows, config):
    cols = _columns(rows)
    doc = {"config": config.as_dict(), "rows": [{c: getattr(r, c) for c in cols} for r in rows]}
    return json.dumps(_jsonable(doc), indent=2) + "\n"


def report_to_text(report, format="json"):
    if format == "json":
        return json.dumps(_jsonable(report), indent=2) + "\n"
    lines = ["key,value"]

    def walk(prefix, v):
        if isinstance(v, dict):
            for k, x in v.items():
                walk(f"{prefix}.{k}" if prefix else k, x)
        elif isinstance(v, (list, tuple)):
            lines.append(f"{prefix}," + " ".join(fmt(x) for x in v))
        else:
            lines.append(f"{prefix},{'' if v is None else fmt(v)}")

    walk("", report)
    return "\n".join(lines) + "\n"


def oracle_grid(epsilons=None, fidelities=(0.9, 0.97, 1.0)):
    """Max residual of pipeline vs closed forms (H, spectrum, trace, C1, C2) over a grid."""
    if epsilons is None:
        epsilons = [round(0.025 * k, 12) for k in range(19)]
    worst = 0.0
    for F in fidelities:
        for e in epsilons:
            ev = _evolve(e, F, 1.0)
            D = dynamical_matrix(intermediate_map(ch.bloch_map(ev.two), ch.bloch_map(ev.one)))
            forms = methods_closed_forms(e, F)
            worst = max(
                worst,
                closed_form_residual(D, forms),
                trace_check(D),
                abs(concurrence(ev.states[1]) - forms.C1),
                abs(concurrence(ev.states[2]) - forms.C2),
            )
    return worst
