"""Dense Hermitian linear algebra on finite-dimensional Hilbert spaces.

Operators and states are plain complex ``numpy`` arrays. The helpers here
validate them, diagonalize them deterministically, apply scalar functions
through the spectral decomposition and handle bipartite S (x) E layouts.

Bipartite convention: the system factor always comes first, so index
``s * d_E + e`` addresses the pair ``(s, e)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, InvalidInputError

HERMITICITY_TOL = 1e-8
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
SUPPORT_CUTOFF = 1e-12
UNITARITY_TOL = 1e-9
MAX_DIM = 4096

SUBSYSTEMS = ("S", "E")


class Spectrum(NamedTuple):
    """Ascending eigenvalues and the matching unitary of column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _as_square(a, name="operator") -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise InvalidInputError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return m


def hermitian(a, tol: float = HERMITICITY_TOL, name="operator") -> np.ndarray:
    """Validate ``a`` as Hermitian and return its exact Hermitian part.

    Raises:
        InvalidInputError: if ``max|a - a^dagger|`` exceeds ``tol``, the
            matrix is not square or holds non-finite values.
    """
    m = _as_square(a, name)
    asym = np.max(np.abs(m - m.conj().T))
    if asym > tol:
        raise InvalidInputError(f"{name} is not Hermitian (max asymmetry {asym:.3e})")
    return (m + m.conj().T) / 2


def density_matrix(rho, trace_tol: float = TRACE_TOL, psd_tol: float = PSD_TOL, name="state") -> np.ndarray:
    """Validate ``rho`` as a density matrix (Hermitian, PSD, unit trace)."""
    m = hermitian(rho, name=name)
    tr = np.trace(m).real
    if abs(tr - 1.0) > trace_tol:
        raise InvalidInputError(f"{name} has trace {tr!r}, expected 1")
    wmin = np.linalg.eigvalsh(m)[0]
    if wmin < -psd_tol:
        raise InvalidInputError(f"{name} is not positive semidefinite (min eigenvalue {wmin:.3e})")
    return m


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    # largest-magnitude component of each column made real positive
    idx = np.argmax(np.abs(vecs), axis=0)
    lead = vecs[idx, np.arange(vecs.shape[1])]
    return vecs * (np.abs(lead) / lead)[None, :]


def eig_hermitian(h) -> Spectrum:
    """Deterministic eigendecomposition of a Hermitian matrix.

    Eigenvalues come back ascending. Each eigenvector's phase is fixed so
    that its largest-magnitude component is real and positive.
    """
    m = hermitian(h)
    w, v = np.linalg.eigh(m)
    return Spectrum(w, _fix_phases(v))


def func_of_hermitian(h, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a real scalar function to a Hermitian matrix through its spectrum.

    ``f`` receives the eigenvalue vector and must return finite reals.
    """
    w, v = eig_hermitian(h)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w), dtype=float)
    if not np.all(np.isfinite(fw)):
        bad = w[~np.isfinite(fw)]
        raise DomainError(f"function undefined at eigenvalue(s) {bad}")
    out = (v * fw) @ v.conj().T
    return (out + out.conj().T) / 2


def expm_hermitian(h) -> np.ndarray:
    return func_of_hermitian(h, np.exp)


def gibbs_state(h) -> np.ndarray:
    """Normalized ``exp(-h) / tr exp(-h)``, shifted by the minimum eigenvalue."""
    w, v = eig_hermitian(h)
    p = np.exp(-(w - w[0]))
    p /= p.sum()
    out = (v * p) @ v.conj().T
    return (out + out.conj().T) / 2


def logm_psd(rho, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """Logarithm of a positive semidefinite matrix.

    Raises:
        DomainError: if an eigenvalue lies below ``cutoff * max eigenvalue``;
            the log is then undefined on part of the space.
    """
    w, v = eig_hermitian(rho)
    if w[-1] <= 0 or w[0] < cutoff * w[-1]:
        raise DomainError(f"log undefined: eigenvalue {w[0]:.3e} below support cutoff")
    out = (v * np.log(w)) @ v.conj().T
    return (out + out.conj().T) / 2


def support(rho, cutoff: float = SUPPORT_CUTOFF) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors spanning the numerical support of ``rho``."""
    w, v = eig_hermitian(rho)
    keep = w > cutoff * max(w[-1], 0.0)
    return w[keep], v[:, keep]


def trace_distance(a, b) -> float:
    """Half the trace norm of ``a - b``."""
    d = np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh((d + d.conj().T) / 2))))


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``tr(a^dagger b)``."""
    return complex(np.vdot(np.asarray(a), np.asarray(b)))


def expectation(op, rho) -> float:
    """``Re tr(op rho)`` for Hermitian ``op``."""
    return float(np.real(np.sum(np.asarray(op).T * np.asarray(rho))))


def tensor(a, b) -> np.ndarray:
    """Kronecker product with ``a`` as the leading (system) factor."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] * b.shape[0] > MAX_DIM:
        raise InvalidInputError(f"tensor product dimension {a.shape[0] * b.shape[0]} exceeds {MAX_DIM}")
    return np.kron(a, b)


def _subsystem_index(keep) -> int:
    if keep in (0, "S", "s"):
        return 0
    if keep in (1, "E", "e"):
        return 1
    raise InvalidInputError(f"unknown subsystem tag {keep!r}; use 'S' or 'E'")


def partial_trace(rho, dims: Sequence[int], keep="S") -> np.ndarray:
    """Reduce a bipartite operator to the subsystem named by ``keep``."""
    d_s, d_e = (int(d) for d in dims)
    m = _as_square(rho, "state")
    if d_s < 1 or d_e < 1 or m.shape[0] != d_s * d_e:
        raise InvalidInputError(f"dims {dims} do not match operator of size {m.shape[0]}")
    t = m.reshape(d_s, d_e, d_s, d_e)
    if _subsystem_index(keep) == 0:
        return np.einsum("iaja->ij", t)
    return np.einsum("aiaj->ij", t)


def is_unitary(u, tol: float = UNITARITY_TOL) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < tol)


def orthonormal_basis(basis, tol: float = 1e-10) -> np.ndarray:
    """Validate a complete orthonormal basis given as columns of a square matrix."""
    b = _as_square(basis, "basis")
    if not is_unitary(b, tol):
        raise InvalidInputError("basis columns are not orthonormal and complete")
    return b


def computational_basis(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


def ket(index: int, d: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[index] = 1.0
    return v


def projector(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def gell_mann_basis(d: int) -> list[np.ndarray]:
    """Traceless Hermitian operator basis of size ``d**2 - 1``.

    Elements are orthonormal under the Hilbert-Schmidt inner product, so
    together with ``I / sqrt(d)`` they span all Hermitian ``d x d`` matrices.
    """
    ops = []
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = 1 / np.sqrt(2)
            ops.append(sym)
            asym = np.zeros((d, d), dtype=complex)
            asym[j, k] = -1j / np.sqrt(2)
            asym[k, j] = 1j / np.sqrt(2)
            ops.append(asym)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        ops.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    return ops


PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class CoarseGraining:
    """Complete family of orthogonal projectors partitioning the space into blocks.

    ``vectors[i]`` holds an orthonormal basis (as columns) of block ``i``; the
    projector is ``vectors[i] @ vectors[i]^dagger`` and its rank is ``V_i``.
    """

    vectors: tuple

    def __post_init__(self):
        blocks = tuple(np.asarray(v, dtype=complex).reshape(np.shape(v)[0], -1) for v in self.vectors)
        if not blocks:
            raise InvalidInputError("coarse-graining needs at least one block")
        d = blocks[0].shape[0]
        if any(b.shape[0] != d or b.shape[1] < 1 for b in blocks):
            raise InvalidInputError("coarse-graining blocks have inconsistent dimensions")
        full = np.concatenate(blocks, axis=1)
        if full.shape[1] != d or not is_unitary(full, 1e-10):
            raise InvalidInputError("coarse-graining blocks are not orthogonal and complete")
        object.__setattr__(self, "vectors", blocks)

    @classmethod
    def from_basis(cls, basis, block_sizes: Sequence[int]) -> "CoarseGraining":
        """Group consecutive basis columns into blocks of the given sizes."""
        b = orthonormal_basis(basis)
        sizes = [int(s) for s in block_sizes]
        if any(s < 1 for s in sizes) or sum(sizes) != b.shape[0]:
            raise InvalidInputError(f"block sizes {sizes} do not partition dimension {b.shape[0]}")
        edges = np.cumsum([0] + sizes)
        return cls(tuple(b[:, edges[i]:edges[i + 1]] for i in range(len(sizes))))

    @classmethod
    def from_projectors(cls, projectors, tol: float = 1e-10) -> "CoarseGraining":
        blocks = []
        for k, p in enumerate(projectors):
            p = hermitian(p, name=f"projector {k}")
            if np.max(np.abs(p @ p - p)) > tol:
                raise InvalidInputError(f"projector {k} is not idempotent")
            w, v = eig_hermitian(p)
            blocks.append(v[:, w > 0.5])
        return cls(tuple(blocks))

    @classmethod
    def fine(cls, basis) -> "CoarseGraining":
        b = orthonormal_basis(basis)
        return cls.from_basis(b, [1] * b.shape[0])

    @property
    def dim(self) -> int:
        return self.vectors[0].shape[0]

    @property
    def ranks(self) -> list[int]:
        return [b.shape[1] for b in self.vectors]

    @property
    def projectors(self) -> list[np.ndarray]:
        return [b @ b.conj().T for b in self.vectors]

    def probabilities(self, rho) -> np.ndarray:
        r = np.asarray(rho, dtype=complex)
        return np.array([np.real(np.trace(b.conj().T @ r @ b)) for b in self.vectors])

    def block_uniform_state(self, probabilities) -> np.ndarray:
        """``sum_i p_i Pi_i / V_i``."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for p, proj, rank in zip(probabilities, self.projectors, self.ranks):
            out += p * proj / rank
        return out

    def tensor(self, other: "CoarseGraining") -> "CoarseGraining":
        """Product coarse-graining, blocks ordered row-major over (self, other)."""
        return CoarseGraining(tuple(np.kron(a, b) for a in self.vectors for b in other.vectors))


@dataclass(frozen=True)
class JointOutcomeTable:
    """Joint outcome probabilities ``p_ij`` of a two-party measurement."""

    probabilities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 2:
            raise InvalidInputError("joint table must be two-dimensional")
        if np.any(p < -PSD_TOL) or abs(p.sum() - 1.0) > TRACE_TOL:
            raise InvalidInputError("joint table is not a probability distribution")
        object.__setattr__(self, "probabilities", np.clip(p, 0.0, None))

    @property
    def row_marginals(self) -> np.ndarray:
        return self.probabilities.sum(axis=1)

    @property
    def column_marginals(self) -> np.ndarray:
        return self.probabilities.sum(axis=0)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph[None, :]


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Hilbert-Schmidt random state (induced measure when ``rank < d``)."""
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return (rho + rho.conj().T) / 2


def random_hermitian(d: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * (g + g.conj().T) / 2


def random_probabilities(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.dirichlet(np.ones(n))


def thermal_state(h, beta: float) -> np.ndarray:
    """``exp(-beta h) / Z``."""
    return gibbs_state(beta * hermitian(h))
