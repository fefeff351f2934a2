"""CPTP maps in Kraus form, their trace duals and Stinespring dilations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, UnsupportedError
from .linalg import (
    PAULI,
    CoarseGraining,
    _fix_phases,
    hermitian,
    is_unitary,
    ket,
    orthonormal_basis,
    partial_trace,
    tensor,
)

COMPLETENESS_TOL = 1e-10


@dataclass(frozen=True)
class KrausChannel:
    """Channel ``rho -> sum_k K_k rho K_k^dagger`` from dimension D to d.

    Kraus lists are not canonicalized; two channels are equal when they act
    identically, which :func:`channels_equal` checks on a spanning set.
    """

    kraus_ops: tuple
    name: str = "kraus"

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus_ops)
        if not ops:
            raise InvalidInputError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or any(k.shape != shape for k in ops):
            raise InvalidInputError("Kraus operators must share one matrix shape")
        if not all(np.all(np.isfinite(k)) for k in ops):
            raise InvalidInputError("Kraus operators have non-finite entries")
        gram = sum(k.conj().T @ k for k in ops)
        err = np.max(np.abs(gram - np.eye(shape[1])))
        if err > COMPLETENESS_TOL:
            raise InvalidInputError(f"Kraus operators are not trace preserving (error {err:.3e})")
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def in_dim(self) -> int:
        return self.kraus_ops[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    @property
    def stacked(self) -> np.ndarray:
        return np.stack(self.kraus_ops)

    def __call__(self, rho):
        return apply(self, rho)

    def adjoint(self, obs):
        return adjoint_apply(self, obs)


def apply(ch: KrausChannel, rho) -> np.ndarray:
    """Output state ``Lambda(rho)``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.in_dim, ch.in_dim):
        raise InvalidInputError(f"channel expects dimension {ch.in_dim}, got {rho.shape}")
    k = ch.stacked
    out = np.einsum("kij,jl,kml->im", k, rho, k.conj())
    return (out + out.conj().T) / 2


def adjoint_apply(ch: KrausChannel, obs) -> np.ndarray:
    """Trace dual ``Lambda*(O) = sum_k K_k^dagger O K_k``."""
    o = hermitian(obs, name="observable")
    if o.shape != (ch.out_dim, ch.out_dim):
        raise InvalidInputError(f"channel output dimension is {ch.out_dim}, observable is {o.shape}")
    k = ch.stacked
    out = np.einsum("kji,jl,klm->im", k.conj(), o, k)
    return (out + out.conj().T) / 2


def channels_equal(a: KrausChannel, b: KrausChannel, tol: float = 1e-10) -> bool:
    """Behavioral equality on the matrix units ``|i><j|`` of the input space."""
    if (a.in_dim, a.out_dim) != (b.in_dim, b.out_dim):
        return False
    d = a.in_dim
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            ka, kb = a.stacked, b.stacked
            oa = np.einsum("kij,jl,kml->im", ka, e, ka.conj())
            ob = np.einsum("kij,jl,kml->im", kb, e, kb.conj())
            if np.max(np.abs(oa - ob)) > tol:
                return False
    return True


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel((np.eye(d),), name="identity")


def unitary_channel(u) -> KrausChannel:
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        raise InvalidInputError("matrix is not unitary")
    return KrausChannel((u,), name="unitary")


def dephasing_channel(basis) -> KrausChannel:
    """Complete dephasing in the basis given by the columns of ``basis``."""
    b = orthonormal_basis(basis)
    return KrausChannel(tuple(np.outer(b[:, a], b[:, a].conj()) for a in range(b.shape[1])), name="dephasing")


def coarse_graining_channel(cg: CoarseGraining) -> KrausChannel:
    """Channel mapping ``rho`` to ``sum_i tr(Pi_i rho) Pi_i / V_i``.

    Kraus operators ``|a_i,mu><a_i,nu| / sqrt(V_i)`` for every block ``i``
    and every pair ``(mu, nu)`` inside it.
    """
    if not isinstance(cg, CoarseGraining):
        raise InvalidInputError("expected a CoarseGraining")
    ops = []
    for block in cg.vectors:
        rank = block.shape[1]
        for mu in range(rank):
            for nu in range(rank):
                ops.append(np.outer(block[:, mu], block[:, nu].conj()) / np.sqrt(rank))
    return KrausChannel(tuple(ops), name="coarse_graining")


def partial_trace_channel(d_s: int, d_e: int, keep="S") -> KrausChannel:
    """Discard one factor of an S (x) E system."""
    if d_s < 1 or d_e < 1:
        raise InvalidInputError("subsystem dimensions must be positive")
    if keep in (0, "S", "s"):
        ops = tuple(tensor(np.eye(d_s), ket(e, d_e)[None, :]) for e in range(d_e))
    elif keep in (1, "E", "e"):
        ops = tuple(tensor(ket(s, d_s)[None, :], np.eye(d_e)) for s in range(d_s))
    else:
        raise InvalidInputError(f"unknown subsystem tag {keep!r}")
    return KrausChannel(ops, name=f"partial_trace_keep_{'S' if keep in (0, 'S', 's') else 'E'}")


def _check_param(name, value):
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise InvalidInputError(f"{name} parameter must lie in [0, 1], got {value}")
    return value


def bit_flip(p: float) -> KrausChannel:
    p = _check_param("bit_flip", p)
    return KrausChannel((np.sqrt(1 - p) * PAULI["i"], np.sqrt(p) * PAULI["x"]), name="bit_flip")


def phase_flip(p: float) -> KrausChannel:
    p = _check_param("phase_flip", p)
    return KrausChannel((np.sqrt(1 - p) * PAULI["i"], np.sqrt(p) * PAULI["z"]), name="phase_flip")


def depolarizing(p: float) -> KrausChannel:
    """``rho -> (1 - p) rho + p I / 2``; injective for ``p < 1``."""
    p = _check_param("depolarizing", p)
    k0 = np.sqrt(1 - 3 * p / 4) * PAULI["i"]
    rest = tuple(np.sqrt(p / 4) * PAULI[a] for a in "xyz")
    return KrausChannel((k0,) + rest, name="depolarizing")


def amplitude_damping(gamma: float) -> KrausChannel:
    g = _check_param("amplitude_damping", gamma)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - g)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(g)], [0, 0]], dtype=complex)
    return KrausChannel((k0, k1), name="amplitude_damping")


ONE_TO_ONE = {
    "bit_flip": bit_flip,
    "phase_flip": phase_flip,
    "depolarizing": depolarizing,
    "amplitude_damping": amplitude_damping,
}


def named_one_to_one(kind: str, param: float) -> KrausChannel:
    """Standard qubit noise channel by name.

    Injective for ``bit_flip``/``phase_flip`` with ``p != 1/2``,
    ``depolarizing`` with ``p < 1`` and ``amplitude_damping`` with ``gamma < 1``.
    """
    try:
        factory = ONE_TO_ONE[kind]
    except KeyError:
        raise InvalidInputError(f"unknown channel {kind!r}; choose from {sorted(ONE_TO_ONE)}") from None
    return factory(param)


def is_injective(ch: KrausChannel, tol: float = 1e-9) -> bool:
    """True when the channel's transfer matrix has full column rank."""
    d = ch.in_dim
    k = ch.stacked
    # vec(K rho K^dag) = (K (x) conj K) vec(rho), row-major vec
    transfer = sum(np.kron(kk, kk.conj()) for kk in k)
    s = np.linalg.svd(transfer, compute_uv=False)
    return bool(s[-1] > tol * s[0]) if transfer.shape[0] >= d * d else False


@dataclass(frozen=True)
class DilationRecord:
    """Unitary on system (x) ancilla realizing a channel with ancilla in ``|0>``."""

    unitary: np.ndarray
    system_dim: int
    ancilla_dim: int
    ancilla_ref_index: int = 0

    def ancilla_state(self) -> np.ndarray:
        a = np.zeros((self.ancilla_dim, self.ancilla_dim), dtype=complex)
        a[self.ancilla_ref_index, self.ancilla_ref_index] = 1.0
        return a

    def joint_output(self, rho) -> np.ndarray:
        """``U (rho (x) |0><0|) U^dagger`` on system (x) ancilla."""
        u = self.unitary
        out = u @ tensor(rho, self.ancilla_state()) @ u.conj().T
        return (out + out.conj().T) / 2

    def apply(self, rho) -> np.ndarray:
        return partial_trace(self.joint_output(rho), (self.system_dim, self.ancilla_dim), "S")


def _complete_orthonormal(cols: np.ndarray, n: int) -> np.ndarray:
    """Extend orthonormal columns to an ``n x n`` unitary, scanning unit vectors in order."""
    basis = [cols[:, j] for j in range(cols.shape[1])]
    extra = []
    for j in range(n):
        if len(basis) + len(extra) == n:
            break
        v = ket(j, n)
        for _ in range(2):
            for b in basis + extra:
                v = v - np.vdot(b, v) * b
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            extra.append(v / norm)
    if not extra:
        return cols
    return np.column_stack([cols, _fix_phases(np.column_stack(extra))])


def stinespring_dilation(ch: KrausChannel) -> DilationRecord:
    """Build ``U`` with ``U (|psi> (x) |0>) = sum_k K_k|psi> (x) |k>``.

    The remaining columns come from Gram-Schmidt over the standard basis,
    so the result is deterministic.
    """
    if ch.in_dim != ch.out_dim:
        raise UnsupportedError("dilation is only built for channels with equal input and output dimension")
    d = ch.in_dim
    a = len(ch.kraus_ops)
    n = d * a
    k = ch.stacked
    # isometry column for input |s>: entries at (t, k) = K_k[t, s]
    iso = np.einsum("kts->tks", k).reshape(n, d)
    u = np.zeros((n, n), dtype=complex)
    fixed = [s * a for s in range(d)]
    u[:, fixed] = iso
    free = [j for j in range(n) if j not in fixed]
    if free:
        completed = _complete_orthonormal(iso, n)
        u[:, free] = completed[:, d:]
    return DilationRecord(unitary=u, system_dim=d, ancilla_dim=a)

