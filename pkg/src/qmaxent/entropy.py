"""Entropy functionals in nats.

Eigenvalues below ``SUPPORT_CUTOFF`` times the largest one are treated as
exact zeros, so pure states have zero entropy and ``0 ln 0 = 0``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidInputError
from .linalg import (
    SUPPORT_CUTOFF,
    CoarseGraining,
    JointOutcomeTable,
    density_matrix,
    eig_hermitian,
    orthonormal_basis,
    partial_trace,
    tensor,
)

SUPPORT_LEAK_TOL = 1e-10


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz))) + 0.0


def _plogp(w: np.ndarray) -> float:
    w = np.where(w > SUPPORT_CUTOFF * max(w.max(), 0.0), w, 0.0)
    nz = w[w > 0]
    return float(np.sum(nz * np.log(nz)))


def von_neumann_entropy(rho) -> float:
    """``-tr(rho ln rho)``."""
    rho = density_matrix(rho)
    s = -_plogp(np.linalg.eigvalsh(rho))
    return s if s > 0 else 0.0


def relative_entropy(rho, sigma, clamp: bool = True) -> float:
    """Quantum relative entropy ``tr rho (ln rho - ln sigma)``.

    Returns ``math.inf`` when ``rho`` puts more than ``SUPPORT_LEAK_TOL``
    of its weight outside the support of ``sigma``. Roundoff can push the
    raw value slightly below zero; ``clamp=False`` returns it unchanged.
    """
    rho = density_matrix(rho, name="rho")
    sigma = density_matrix(sigma, name="sigma")
    if rho.shape != sigma.shape:
        raise InvalidInputError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    w, v = eig_hermitian(sigma)
    inside = w > SUPPORT_CUTOFF * w[-1]
    # weights of rho along sigma's eigenvectors
    weights = np.real(np.einsum("ik,ij,jk->k", v.conj(), rho, v))
    if weights[~inside].sum() > SUPPORT_LEAK_TOL:
        return math.inf
    cross = -float(np.sum(weights[inside] * np.log(w[inside])))
    value = _plogp(np.linalg.eigvalsh(rho)) + cross
    return max(value, 0.0) if clamp else value


def cross_entropy(rho, sigma, restrict_to_support: bool = False) -> float:
    """``-tr(rho ln sigma)``.

    Weight of ``rho`` outside the support of ``sigma`` makes this infinite
    unless ``restrict_to_support`` is set, in which case the logarithm is
    taken on the support only (zero on its complement).
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = density_matrix(sigma, name="sigma")
    if rho.shape != sigma.shape:
        raise InvalidInputError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    w, v = eig_hermitian(sigma)
    inside = w > SUPPORT_CUTOFF * w[-1]
    weights = np.real(np.einsum("ik,ij,jk->k", v.conj(), rho, v))
    if not restrict_to_support and weights[~inside].sum() > SUPPORT_LEAK_TOL:
        return math.inf
    return -float(np.sum(weights[inside] * np.log(w[inside])))


def diagonal_entropy(rho, basis) -> float:
    """Shannon entropy of the populations of ``rho`` in ``basis`` (columns)."""
    rho = density_matrix(rho)
    b = orthonormal_basis(basis)
    if b.shape != rho.shape:
        raise InvalidInputError("basis dimension does not match state")
    p = np.real(np.einsum("ia,ij,ja->a", b.conj(), rho, b))
    return shannon_entropy(np.clip(p, 0.0, None))


def observational_entropy(rho, cg: CoarseGraining) -> float:
    """``-sum_i p_i ln(p_i / V_i)`` with ``p_i = tr(Pi_i rho)``."""
    rho = density_matrix(rho)
    if not isinstance(cg, CoarseGraining) or cg.dim != rho.shape[0]:
        raise InvalidInputError("coarse-graining does not act on the state's space")
    p = np.clip(cg.probabilities(rho), 0.0, None)
    v = np.asarray(cg.ranks, dtype=float)
    nz = p > 0
    return float(-np.sum(p[nz] * np.log(p[nz] / v[nz])))


def mutual_information(rho_se, dims) -> float:
    """``S(rho_S) + S(rho_E) - S(rho_SE)``."""
    rho_se = density_matrix(rho_se)
    rho_s = partial_trace(rho_se, dims, "S")
    rho_e = partial_trace(rho_se, dims, "E")
    value = von_neumann_entropy(rho_s) + von_neumann_entropy(rho_e) - von_neumann_entropy(rho_se)
    return max(value, 0.0)


def mutual_information_relative(rho_se, dims) -> float:
    """Mutual information evaluated as ``S(rho_SE || rho_S (x) rho_E)``."""
    rho_s = partial_trace(rho_se, dims, "S")
    rho_e = partial_trace(rho_se, dims, "E")
    return relative_entropy(rho_se, tensor(rho_s, rho_e))


def classical_mutual_information(table) -> float:
    """``sum_ij p_ij ln(p_ij / (s_i p_j))`` for a joint outcome table."""
    if not isinstance(table, JointOutcomeTable):
        table = JointOutcomeTable(table)
    p = table.probabilities
    outer = np.outer(table.row_marginals, table.column_marginals)
    nz = p > 0
    return max(float(np.sum(p[nz] * np.log(p[nz] / outer[nz]))), 0.0)
