"""Channel representations and CPT validation.

A channel is held as its Kraus set ``tau(rho) = sum_n K_n rho K_n^dag``.
The matrix form acts on column-stacked vectorizations, ``vec(A X B) =
(B^T (x) A) vec(X)``, so the superoperator is ``S = sum_n conj(K_n) (x)
K_n``.  Stinespring dilations ``tau(rho) = Tr_B[U (rho (x) |phi><phi|)
U^dag]`` convert to Kraus sets by slicing the unitary along a bath basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import opalg
from . import tolerances as tol
from .jsonutil import json_to_matrix, json_to_vector, matrix_to_json, vector_to_json


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(m, dtype=complex).flatten(order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    """Inverse of `vec` for square matrices."""
    v = np.asarray(v, dtype=complex).ravel()
    d = round(len(v) ** 0.5)
    if d * d != len(v):
        raise ValueError(f"vector of length {len(v)} is not a vectorized square matrix")
    return v.reshape((d, d), order="F")


@dataclass(frozen=True)
class DensityMatrix:
    """A quantum state: Hermitian, PSD (within clip tolerance), unit trace."""

    matrix: np.ndarray

    def __post_init__(self):
        m = opalg.as_matrix(self.matrix, square=True, name="density matrix")
        defect = opalg.hermiticity_defect(m)
        if defect > tol.HERMITICITY_TOL:
            raise ValueError(f"density matrix not Hermitian: defect {defect:.3e}")
        m = (m + m.conj().T) / 2.0
        eigs = np.linalg.eigvalsh(m)
        if eigs.min() < -tol.PSD_CLIP:
            raise ValueError(f"density matrix not PSD: min eigenvalue {eigs.min():.3e}")
        trace_defect = abs(m.trace().real - 1.0)
        if trace_defect > tol.TRACE_TOL or abs(m.trace().imag) > tol.TRACE_TOL:
            raise ValueError(f"density matrix trace defect {trace_defect:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    @classmethod
    def pure(cls, state_vector) -> "DensityMatrix":
        v = np.asarray(state_vector, dtype=complex).ravel()
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            raise ValueError("state vector has (near-)zero norm")
        v = v / norm
        return cls(np.outer(v, v.conj()))

    @classmethod
    def basis_state(cls, dim: int, k: int) -> "DensityMatrix":
        if not 0 <= k < dim:
            raise ValueError(f"basis index {k} out of range for dim {dim}")
        v = np.zeros(dim, dtype=complex)
        v[k] = 1.0
        return cls.pure(v)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)


@dataclass(frozen=True)
class KrausChannel:
    """A channel held as a nonempty tuple of square Kraus operators.

    Construction checks shapes only; CPT membership is a separate,
    reported check (`validate_cpt`).
    """

    dim: int
    kraus_ops: tuple
    label: str | None = None

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError("dim must be positive")
        ops = tuple(opalg.as_matrix(k, square=True, name="Kraus operator") for k in self.kraus_ops)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        for k in ops:
            if k.shape != (self.dim, self.dim):
                raise ValueError(f"Kraus operator shape {k.shape} does not match dim {self.dim}")
            k.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)


@dataclass(frozen=True)
class Superoperator:
    """Matrix of a channel's linear extension on vectorized operators."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        m = opalg.as_matrix(self.matrix, square=True, name="superoperator")
        if m.shape[0] != self.dim * self.dim:
            raise ValueError(f"superoperator shape {m.shape} does not match dim {self.dim}")
        radius = float(np.abs(np.linalg.eigvals(m)).max())
        if radius > 1.0 + tol.SPECTRAL_RADIUS_TOL:
            raise ValueError(f"superoperator spectral radius {radius:.12f} exceeds 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class StinespringDilation:
    """Unitary system-bath evolution with a pure bath state."""

    dim_a: int
    dim_b: int
    unitary: np.ndarray
    bath_state: np.ndarray

    def __post_init__(self):
        if self.dim_a <= 0 or self.dim_b <= 0:
            raise ValueError("dilation dimensions must be positive")
        d = self.dim_a * self.dim_b
        u = opalg.as_matrix(self.unitary, square=True, name="dilation unitary")
        if u.shape != (d, d):
            raise ValueError(f"unitary shape {u.shape} does not match dimA*dimB = {d}")
        defect = float(np.abs(u.conj().T @ u - np.eye(d)).max())
        if defect > tol.UNITARITY_TOL:
            raise ValueError(f"dilation matrix is not unitary: defect {defect:.3e}")
        phi = np.asarray(self.bath_state, dtype=complex).ravel()
        if phi.shape != (self.dim_b,):
            raise ValueError(f"bath state length {phi.shape[0]} does not match dimB {self.dim_b}")
        norm_defect = abs(np.linalg.norm(phi) - 1.0)
        if norm_defect > tol.BATH_NORM_TOL:
            raise ValueError(f"bath state is not normalized: defect {norm_defect:.3e}")
        u.setflags(write=False)
        phi.setflags(write=False)
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "bath_state", phi)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the CPT membership checks for a Kraus set."""

    completeness_defect: float
    min_choi_eigenvalue: float
    checks: dict
    messages: tuple = field(default=())

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def choi_matrix(c: KrausChannel) -> np.ndarray:
    """Choi matrix ``sum_n vec(K_n) vec(K_n)^dag``; PSD iff completely positive."""
    d2 = c.dim * c.dim
    choi = np.zeros((d2, d2), dtype=complex)
    for k in c.kraus_ops:
        v = vec(k)
        choi += np.outer(v, v.conj())
    return choi


def validate_cpt(c: KrausChannel) -> ValidationReport:
    """Check trace preservation and complete positivity; failures are reported, not raised."""
    gram = sum(k.conj().T @ k for k in c.kraus_ops)
    completeness_defect = float(np.abs(gram - np.eye(c.dim)).max())
    choi = choi_matrix(c)
    min_choi = float(np.linalg.eigvalsh((choi + choi.conj().T) / 2.0).min())
    checks = {
        "completeness": completeness_defect <= tol.KRAUS_COMPLETENESS_TOL,
        "choi_psd": min_choi >= -tol.CHOI_PSD_TOL,
    }
    messages = []
    if not checks["completeness"]:
        messages.append(
            f"sum(K^dag K) deviates from identity by {completeness_defect:.6e} in max norm"
        )
    if not checks["choi_psd"]:
        messages.append(f"Choi matrix has eigenvalue {min_choi:.6e} below the PSD tolerance")
    return ValidationReport(completeness_defect, min_choi, checks, tuple(messages))


def apply_raw(c: KrausChannel, m: np.ndarray) -> np.ndarray:
    """The channel's action on an arbitrary operator (no state validation)."""
    return sum(k @ m @ k.conj().T for k in c.kraus_ops)


def apply(c: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """One channel step on a state.

    The output trace must stay within ``TRACE_TOL`` of 1 (anything worse
    signals a non-trace-preserving Kraus set and raises); the remaining
    sub-tolerance defect is renormalized away.
    """
    if rho.dim != c.dim:
        raise ValueError(f"state dim {rho.dim} does not match channel dim {c.dim}")
    out = apply_raw(c, rho.matrix)
    out = (out + out.conj().T) / 2.0
    trace = float(out.trace().real)
    if abs(trace - 1.0) > tol.TRACE_TOL:
        raise ValueError(f"channel output trace defect {abs(trace - 1.0):.3e}; Kraus set is not trace preserving")
    return DensityMatrix(out / trace)


def to_superoperator(c: KrausChannel) -> Superoperator:
    """Matrix form ``S = sum_n conj(K_n) (x) K_n`` (column-stacking convention).

    The construction is cross-checked against direct Kraus application on
    the full matrix-unit basis before the matrix is accepted.
    """
    d = c.dim
    s = np.zeros((d * d, d * d), dtype=complex)
    for k in c.kraus_ops:
        s += np.kron(k.conj(), k)
    worst = 0.0
    for col in range(d):
        for row in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[row, col] = 1.0
            dev = float(np.abs(s[:, col * d + row] - vec(apply_raw(c, unit))).max())
            worst = max(worst, dev)
    if worst > tol.SUPEROP_ACTION_TOL:
        raise ValueError(f"superoperator action deviates from Kraus application by {worst:.3e}")
    return Superoperator(d, s)


def from_stinespring(d: StinespringDilation, label: str | None = None) -> KrausChannel:
    """Kraus set ``K_n = (I_A (x) <n|_B) U (I_A (x) |phi>_B)`` over a bath basis."""
    ident = np.eye(d.dim_a, dtype=complex)
    ket_phi = np.kron(ident, d.bath_state.reshape(-1, 1))
    ops = []
    for n in range(d.dim_b):
        bra = np.zeros((1, d.dim_b), dtype=complex)
        bra[0, n] = 1.0
        ops.append(np.kron(ident, bra) @ d.unitary @ ket_phi)
    return KrausChannel(d.dim_a, tuple(ops), label=label)


def compose(c1: KrausChannel, c2: KrausChannel) -> KrausChannel:
    """The channel ``rho -> c1(c2(rho))`` with Kraus set ``{K_i L_j}``."""
    if c1.dim != c2.dim:
        raise ValueError(f"cannot compose channels of dims {c1.dim} and {c2.dim}")
    ops = tuple(k @ m for k in c1.kraus_ops for m in c2.kraus_ops)
    return KrausChannel(c1.dim, ops)


def power(c: KrausChannel, n: int) -> Superoperator:
    """`n`-fold iteration as a superoperator matrix power (no Kraus blow-up)."""
    if n < 0:
        raise ValueError("power requires n >= 0")
    s = to_superoperator(c)
    return Superoperator(c.dim, np.linalg.matrix_power(s.matrix, n))


def is_unital(c: KrausChannel, atol: float = 1e-9) -> bool:
    """True when the channel fixes the maximally mixed state."""
    ident = np.eye(c.dim, dtype=complex)
    return float(np.abs(apply_raw(c, ident) - ident).max()) <= atol


# --- JSON channel documents ---------------------------------------------------


def stinespring_from_document(sub) -> StinespringDilation:
    if not isinstance(sub, dict):
        raise ValueError('"stinespring" must be an object')
    required = {"dimA", "dimB", "unitary", "bath_state"}
    missing = required - sub.keys()
    if missing:
        raise ValueError(f"stinespring document is missing {sorted(missing)}")
    dim_a, dim_b = sub["dimA"], sub["dimB"]
    if not isinstance(dim_a, int) or not isinstance(dim_b, int):
        raise ValueError("dimA and dimB must be integers")
    unitary = json_to_matrix(sub["unitary"], what="unitary")
    bath = json_to_vector(sub["bath_state"], what="bath_state")
    return StinespringDilation(dim_a, dim_b, unitary, bath)


def channel_from_document(doc) -> KrausChannel:
    """Parse a channel document: Kraus form or Stinespring form.

    Accepted shapes:
      ``{"dim": N, "label"?: str, "kraus": [matrix, ...]}``
      ``{"label"?: str, "stinespring": {"dimA", "dimB", "unitary", "bath_state"}}``
    with complex entries as [re, im] pairs.  Exactly one of "kraus" /
    "stinespring" must be present.
    """
    if not isinstance(doc, dict):
        raise ValueError("channel document must be a JSON object")
    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise ValueError('"label" must be a string')
    has_kraus = "kraus" in doc
    has_stine = "stinespring" in doc
    if has_kraus == has_stine:
        raise ValueError('channel document needs exactly one of "kraus" or "stinespring"')
    if has_kraus:
        if "dim" not in doc or not isinstance(doc["dim"], int):
            raise ValueError('Kraus-form document needs an integer "dim"')
        dim = doc["dim"]
        raw = doc["kraus"]
        if not isinstance(raw, list) or not raw:
            raise ValueError('"kraus" must be a nonempty list of matrices')
        ops = tuple(json_to_matrix(k, what="kraus operator") for k in raw)
        return KrausChannel(dim, ops, label=label)
    dilation = stinespring_from_document(doc["stinespring"])
    if "dim" in doc and doc["dim"] != dilation.dim_a:
        raise ValueError('"dim" disagrees with stinespring dimA')
    return from_stinespring(dilation, label=label)


def channel_to_document(c: KrausChannel) -> dict:
    doc = {"dim": c.dim, "kraus": [matrix_to_json(k) for k in c.kraus_ops]}
    if c.label is not None:
        doc["label"] = c.label
    return doc


def stinespring_to_document(d: StinespringDilation, label: str | None = None) -> dict:
    doc = {
        "stinespring": {
            "dimA": d.dim_a,
            "dimB": d.dim_b,
            "unitary": matrix_to_json(d.unitary),
            "bath_state": vector_to_json(d.bath_state),
        }
    }
    if label is not None:
        doc["label"] = label
    return doc
