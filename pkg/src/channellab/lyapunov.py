"""Orbit engine and functional convergence criteria.

The orbit of a state under a channel is the sequence rho, tau(rho),
tau^2(rho), ...  A (generalized) Lyapunov functional changes monotonically
along every orbit and strictly for every non-fixed initial state; the
existence of such a functional certifies mixing.  This module evaluates
three concrete functionals (trace-norm distance to the fixed point,
relative entropy to the fixed point, von Neumann entropy), collects
empirical monotonicity/strictness evidence, estimates asymptotic
deformation of state pairs, checks weak contractivity, computes Cesaro
time averages, and provides a brute-force orbit oracle used to
cross-validate the spectral classifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import opalg
from . import tolerances as tol
from .channel import DensityMatrix, KrausChannel, apply, is_unital, power, to_superoperator, unvec, vec
from .errors import HypothesisViolation
from .spectral import VERDICT_NOT_ERGODIC, analyze

FUNCTIONAL_TRIVIAL = "trivial"
FUNCTIONAL_RELATIVE_ENTROPY = "relative_entropy"
FUNCTIONAL_VON_NEUMANN = "von_neumann"
FUNCTIONALS = (FUNCTIONAL_TRIVIAL, FUNCTIONAL_RELATIVE_ENTROPY, FUNCTIONAL_VON_NEUMANN)

ORACLE_MIXING = "mixing"
ORACLE_NOT_MIXING = "not_mixing_within_horizon"


def trivial_lyapunov(rho: DensityMatrix, fixed_point: DensityMatrix) -> float:
    """Trace-norm distance ``||rho - fixed_point||_1``."""
    if rho.dim != fixed_point.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {fixed_point.dim}")
    return opalg.trace_norm(rho.matrix - fixed_point.matrix)


def relative_entropy(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    *,
    support_tol: float = tol.SUPPORT_TOL,
    leak_tol: float = tol.REL_ENTROPY_LEAK_TOL,
) -> float:
    """Quantum relative entropy ``Tr rho (log rho - log sigma)`` in nats.

    Returns ``math.inf`` when the support of `rho` leaks outside the
    support of `sigma` by more than `leak_tol` (the quantity is infinite
    unless supp(rho) is contained in supp(sigma)).
    """
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    q, v = np.linalg.eigh(sigma.matrix)
    kernel = v[:, q <= support_tol]
    if kernel.shape[1]:
        leak = float(np.real(np.trace(kernel.conj().T @ rho.matrix @ kernel)))
        if leak > leak_tol:
            return math.inf
    p = np.linalg.eigvalsh(rho.matrix)
    p = p[p > support_tol]
    tr_rho_log_rho = float(np.sum(p * np.log(p)))
    on_support = q > support_tol
    log_sigma = (v[:, on_support] * np.log(q[on_support])) @ v[:, on_support].conj().T
    tr_rho_log_sigma = float(np.real(np.trace(rho.matrix @ log_sigma)))
    return max(0.0, tr_rho_log_rho - tr_rho_log_sigma)


def von_neumann_entropy(rho: DensityMatrix, *, support_tol: float = tol.SUPPORT_TOL) -> float:
    """``-sum p log p`` over eigenvalues above `support_tol`, in nats."""
    p = np.linalg.eigvalsh(rho.matrix)
    p = p[p > support_tol]
    return float(max(0.0, -np.sum(p * np.log(p))))


def probe_states(dim: int, seed: int = 0, n_random: int = 10) -> list[DensityMatrix]:
    """Deterministic probe set: basis states, Haar-random pure states, I/dim.

    Random directions are normalized complex Gaussian vectors from a
    seeded generator, so the set is reproducible.
    """
    states = [DensityMatrix.basis_state(dim, k) for k in range(dim)]
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        states.append(DensityMatrix.pure(v))
    states.append(DensityMatrix.maximally_mixed(dim))
    return states


@dataclass(frozen=True)
class OrbitTrace:
    """States ``rho, tau(rho), ..., tau^n(rho)`` plus requested functionals.

    `functional_values` maps each requested functional name to the raw
    (unoriented) value at every step; lengths are ``n_steps + 1``.
    """

    states: tuple
    functional_values: dict
    n_steps: int


def _evaluate_functional(name: str, state: DensityMatrix, fixed_point: DensityMatrix | None) -> float:
    if name == FUNCTIONAL_TRIVIAL:
        return trivial_lyapunov(state, fixed_point)
    if name == FUNCTIONAL_RELATIVE_ENTROPY:
        return relative_entropy(state, fixed_point)
    if name == FUNCTIONAL_VON_NEUMANN:
        return von_neumann_entropy(state)
    raise ValueError(f"unknown functional {name!r}; expected one of {FUNCTIONALS}")


def _unique_fixed_point(c: KrausChannel, purpose: str) -> DensityMatrix:
    report = analyze(to_superoperator(c))
    if report.verdict == VERDICT_NOT_ERGODIC:
        raise HypothesisViolation(
            f"{purpose} requires a unique fixed point; the fixed-point set is "
            f"{report.eigenvalue_one_multiplicity}-dimensional (verdict {report.verdict})"
        )
    return report.fixed_points[0]


def orbit(c: KrausChannel, rho0: DensityMatrix, n: int, functionals: tuple = ()) -> OrbitTrace:
    """Iterate the channel `n` times from `rho0`, evaluating `functionals`.

    Functionals that compare against the fixed point (trivial, relative
    entropy) require the channel to have a unique fixed point.
    """
    if n < 1:
        raise ValueError("orbit length n must be >= 1")
    if rho0.dim != c.dim:
        raise ValueError(f"state dimension {rho0.dim} does not match channel dimension {c.dim}")
    names = tuple(functionals)
    for name in names:
        if name not in FUNCTIONALS:
            raise ValueError(f"unknown functional {name!r}; expected one of {FUNCTIONALS}")
    fixed_point = None
    if any(name in (FUNCTIONAL_TRIVIAL, FUNCTIONAL_RELATIVE_ENTROPY) for name in names):
        fixed_point = _unique_fixed_point(c, "a fixed-point-relative functional")
    states = [rho0]
    for _ in range(n):
        states.append(apply(c, states[-1]))
    values = {
        name: tuple(_evaluate_functional(name, state, fixed_point) for state in states)
        for name in names
    }
    return OrbitTrace(states=tuple(states), functional_values=values, n_steps=n)


@dataclass(frozen=True)
class TrialRecord:
    """Monotonicity/strictness evidence from one trial state.

    Values are reported in the raw (unoriented) scale of the functional;
    `monotone_defect` and `n_strict` refer to the oriented functional,
    whose monotone direction is non-decreasing.
    """

    state_index: int
    matches_fixed_point: bool
    monotone_defect: float
    limit_gap: float
    n_strict: int | None
    raw_initial: float
    raw_final: float


@dataclass(frozen=True)
class LyapunovVerdict:
    """Aggregated empirical evidence that a functional is a strict monotone.

    `is_generalized_lyapunov_evidence` is true only when every trial state
    that differs from the fixed point moved by more than the evidence gap
    while never violating monotonicity beyond the defect tolerance.
    """

    functional: str
    monotone_defect: float
    limit_gap: float
    n_strict: int | None
    is_generalized_lyapunov_evidence: bool
    per_state: tuple = field(repr=False)
    notes: tuple = ()


def verify_generalized_lyapunov(
    c: KrausChannel, functional: str, trial_states: list, n: int
) -> LyapunovVerdict:
    """Empirically test one functional for monotone + strict behaviour.

    The functional is oriented so its monotone direction is non-decreasing
    (distance and relative entropy enter negated).  Raises
    `HypothesisViolation` when the functional's hypotheses fail: the
    trivial and relative-entropy functionals need a unique fixed point,
    and relative entropy additionally needs that fixed point faithful
    (full rank).
    """
    if functional not in FUNCTIONALS:
        raise ValueError(f"unknown functional {functional!r}; expected one of {FUNCTIONALS}")
    if n < 1:
        raise ValueError("horizon n must be >= 1")
    if not trial_states:
        raise ValueError("at least one trial state is required")
    for state in trial_states:
        if state.dim != c.dim:
            raise ValueError(f"trial state dimension {state.dim} does not match channel dimension {c.dim}")

    notes: list[str] = []
    fixed_point = None
    report = analyze(to_superoperator(c))
    if functional in (FUNCTIONAL_TRIVIAL, FUNCTIONAL_RELATIVE_ENTROPY):
        if report.verdict == VERDICT_NOT_ERGODIC:
            raise HypothesisViolation(
                f"functional {functional!r} is defined relative to a unique fixed point; "
                f"the fixed-point set is {report.eigenvalue_one_multiplicity}-dimensional"
            )
        fixed_point = report.fixed_points[0]
        if functional == FUNCTIONAL_RELATIVE_ENTROPY:
            min_eig = float(np.linalg.eigvalsh(fixed_point.matrix).min())
            if min_eig <= tol.SUPPORT_TOL:
                raise HypothesisViolation(
                    "the relative-entropy criterion requires a faithful (full-rank) fixed point; "
                    f"smallest fixed-point eigenvalue is {min_eig:.3e}"
                )
    else:
        if not is_unital(c):
            notes.append(
                "channel is not unital: von Neumann entropy is not guaranteed to be monotone"
            )
        if report.verdict == VERDICT_NOT_ERGODIC:
            notes.append(
                "channel has multiple fixed points: strict increase cannot hold for every "
                "non-fixed state, so the evidence flag cannot certify mixing"
            )

    sign = 1.0 if functional == FUNCTIONAL_VON_NEUMANN else -1.0
    records = []
    all_trials_fixed = True
    for idx, rho in enumerate(trial_states):
        raw = [_evaluate_functional(functional, rho, fixed_point)]
        state = rho
        for _ in range(n):
            state = apply(c, state)
            raw.append(_evaluate_functional(functional, state, fixed_point))
        oriented = [sign * value for value in raw]
        defect = 0.0
        for k in range(n):
            defect = max(defect, oriented[k] - oriented[k + 1])
        defect = max(0.0, defect)
        gap = abs(oriented[n] - oriented[0])
        n_strict = None
        for k in range(1, n + 1):
            if oriented[k] - oriented[0] > tol.MONOTONE_DEFECT_TOL:
                n_strict = k
                break
        if fixed_point is not None:
            matches = opalg.trace_norm(rho.matrix - fixed_point.matrix) <= tol.STATE_MATCH_TOL
        else:
            matches = False
        if opalg.trace_norm(apply(c, rho).matrix - rho.matrix) > tol.STATE_MATCH_TOL:
            all_trials_fixed = False
        records.append(
            TrialRecord(
                state_index=idx,
                matches_fixed_point=matches,
                monotone_defect=defect,
                limit_gap=gap,
                n_strict=n_strict,
                raw_initial=raw[0],
                raw_final=raw[n],
            )
        )

    moving = [r for r in records if not r.matches_fixed_point]
    overall_defect = max(r.monotone_defect for r in records)
    if all_trials_fixed:
        notes.append("every trial state is a fixed point of the channel; no strictness evidence available")
    if not moving:
        evidence = False
        overall_gap = 0.0
        overall_n_strict = None
    else:
        evidence = all(
            r.limit_gap > tol.EVIDENCE_GAP and r.monotone_defect <= tol.MONOTONE_DEFECT_TOL
            for r in moving
        )
        overall_gap = min(r.limit_gap for r in moving)
        strict_steps = [r.n_strict for r in moving]
        overall_n_strict = max(strict_steps) if all(s is not None for s in strict_steps) else None
    return LyapunovVerdict(
        functional=functional,
        monotone_defect=overall_defect,
        limit_gap=overall_gap,
        n_strict=overall_n_strict,
        is_generalized_lyapunov_evidence=evidence,
        per_state=tuple(records),
        notes=tuple(notes),
    )


def asymptotic_deformation_estimate(
    c: KrausChannel, pairs: list, n: int
) -> list[tuple[float, float]]:
    """``(d(rho, sigma), d(tau^n rho, tau^n sigma))`` for each pair.

    The channel asymptotically deforms the pair when the horizon distance
    differs from the initial one; mixing is equivalent to every distinct
    pair deforming (toward zero).
    """
    if n < 1:
        raise ValueError("horizon n must be >= 1")
    s_n = power(c, n).matrix
    results = []
    for rho, sigma in pairs:
        if rho.dim != c.dim or sigma.dim != c.dim:
            raise ValueError("pair dimension does not match channel dimension")
        diff = rho.matrix - sigma.matrix
        d0 = opalg.trace_norm(diff)
        if d0 <= tol.DISTINCT_PAIR_TOL:
            raise ValueError(
                f"pair is not distinct: initial trace distance {d0:.3e} <= {tol.DISTINCT_PAIR_TOL:g}"
            )
        results.append((d0, opalg.trace_norm(unvec(s_n @ vec(diff)))))
    return results


def deformation_evidence(results: list[tuple[float, float]]) -> bool:
    """True when every pair's horizon distance moved beyond the evidence gap."""
    return all(abs(d_limit - d0) > tol.EVIDENCE_GAP for d0, d_limit in results)


@dataclass(frozen=True)
class WeakContractionResult:
    """Outcome of searching for a pair whose distance fails to strictly shrink.

    `violated` means the channel is not a weak contraction on the sampled
    pairs; the witness pair and its before/after distances are kept for
    reporting.
    """

    violated: bool
    witness: tuple | None
    d_before: float | None
    d_after: float | None


def weak_contraction_check(c: KrausChannel, pairs: list) -> WeakContractionResult:
    """Search `pairs` for ``d(tau rho, tau sigma) >= d(rho, sigma) - tol``.

    A weak contraction strictly decreases every distinct pair's distance;
    the first pair found to violate that is returned as a witness.
    """
    for rho, sigma in pairs:
        if rho.dim != c.dim or sigma.dim != c.dim:
            raise ValueError("pair dimension does not match channel dimension")
        d0 = opalg.trace_norm(rho.matrix - sigma.matrix)
        if d0 <= tol.DISTINCT_PAIR_TOL:
            raise ValueError(
                f"pair is not distinct: initial trace distance {d0:.3e} <= {tol.DISTINCT_PAIR_TOL:g}"
            )
        d1 = opalg.trace_norm(apply(c, rho).matrix - apply(c, sigma).matrix)
        if d1 >= d0 - tol.WEAK_CONTRACTION_TOL:
            return WeakContractionResult(violated=True, witness=(rho, sigma), d_before=d0, d_after=d1)
    return WeakContractionResult(violated=False, witness=None, d_before=None, d_after=None)


def cesaro_average(c: KrausChannel, rho0: DensityMatrix, n: int) -> DensityMatrix:
    """Time average ``(1/(n+1)) sum_{l=0}^{n} tau^l(rho0)``.

    For ergodic channels the average converges to the unique fixed point
    at rate O(1/n) even when the orbit itself does not converge.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if rho0.dim != c.dim:
        raise ValueError(f"state dimension {rho0.dim} does not match channel dimension {c.dim}")
    s = to_superoperator(c)
    v = vec(rho0.matrix)
    acc = v.copy()
    for _ in range(n):
        v = s.matrix @ v
        acc += v
    avg = unvec(acc / (n + 1))
    avg = (avg + avg.conj().T) / 2.0
    return DensityMatrix(avg / avg.trace().real)


@dataclass(frozen=True)
class OracleResult:
    """Brute-force orbit verdict plus the distances that justify it."""

    verdict: str
    final_max_distance: float
    trailing_max_distance: float
    n_max: int
    tol: float
    n_probes: int
    trailing_window: int


def _max_pairwise_distance(columns: np.ndarray, dim: int, pair_index: tuple) -> float:
    mats = columns.T.reshape(-1, dim, dim).transpose(0, 2, 1)
    i_idx, j_idx = pair_index
    diffs = mats[i_idx] - mats[j_idx]
    diffs = (diffs + diffs.conj().transpose(0, 2, 1)) / 2.0
    eigs = np.linalg.eigvalsh(diffs)
    return float(np.abs(eigs).sum(axis=1).max())


def orbit_oracle(c: KrausChannel, n_max: int = 2000, tol_distance: float = 1e-8, seed: int = 0) -> OracleResult:
    """Brute-force mixing test by iterating a deterministic probe set.

    The channel counts as mixing when the maximum pairwise trace distance
    over all probes is below `tol_distance` at the horizon AND over the
    trailing 10% of steps (so a transient dip cannot fake convergence).
    Differences of Hermitian probes stay Hermitian, so distances use a
    batched Hermitian eigensolve.
    """
    if n_max < 100:
        raise ValueError("n_max must be >= 100 for a meaningful horizon")
    s = to_superoperator(c)
    probes = probe_states(c.dim, seed=seed)
    columns = np.stack([vec(p.matrix) for p in probes], axis=1)
    m = len(probes)
    i_idx, j_idx = np.triu_indices(m, k=1)
    pair_index = (i_idx, j_idx)
    window = max(1, n_max // 10)
    start = n_max - window + 1
    trailing: list[float] = []
    for step in range(1, n_max + 1):
        columns = s.matrix @ columns
        if step >= start:
            trailing.append(_max_pairwise_distance(columns, c.dim, pair_index))
    final = trailing[-1]
    trailing_max = max(trailing)
    verdict = ORACLE_MIXING if final < tol_distance and trailing_max < tol_distance else ORACLE_NOT_MIXING
    return OracleResult(
        verdict=verdict,
        final_max_distance=final,
        trailing_max_distance=trailing_max,
        n_max=n_max,
        tol=tol_distance,
        n_probes=m,
        trailing_window=window,
    )
