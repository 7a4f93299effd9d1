"""Laser-driving Hamiltonian restricted to the blockade-allowed subspace.

With the interaction set to zero on the allowed subspace, the dynamics is
generated by the restricted flip Hamiltonian: matrix element 1 (in units of
hbar * Omega, both set to 1) between any two allowed configurations that
differ by exactly one excitation, zero elsewhere.  Since every matrix element
changes the excitation number by one, the matrix is bipartite with respect to
the parity of the excitation number.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy import sparse

from .basis import AllowedBasis

__all__ = ["SparseHamiltonian", "build_hamiltonian", "reflection_operator"]


@dataclass(frozen=True)
class SparseHamiltonian:
    """Sparse symmetric flip Hamiltonian over an :class:`AllowedBasis`.

    ``matrix`` is CSR with unit off-diagonal entries and an empty diagonal;
    ``parity`` holds the excitation-number parity (0 even, 1 odd) per basis
    index.
    """

    basis: AllowedBasis
    matrix: sparse.csr_matrix
    parity: np.ndarray

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def to_dense(self, cap: int = 5000) -> np.ndarray:
        """Dense copy, refused above ``cap`` to avoid accidental huge arrays."""
        if self.dimension > cap:
            raise ValueError(
                f"dimension {self.dimension} exceeds dense cap {cap}")
        return self.matrix.toarray()

    def entries(self) -> Iterator[tuple[int, int, float]]:
        """Iterate (row, col, value) in row-major order, for the matrix dump."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        for k in order:
            yield int(coo.row[k]), int(coo.col[k]), float(coo.data[k])


def _window_masks(n_atoms: int, n_b: int) -> list[int]:
    # window_masks[t] covers sites within distance n_b of t, t included:
    # adding an excitation at t is allowed iff the window is free.
    masks = []
    for t in range(n_atoms):
        lo = max(t - n_b, 0)
        hi = min(t + n_b, n_atoms - 1)
        masks.append(((1 << (hi - lo + 1)) - 1) << lo)
    return masks


def build_hamiltonian(h_basis: AllowedBasis) -> SparseHamiltonian:
    """Assemble the restricted flip Hamiltonian over an enumerated basis.

    For every allowed configuration and every site whose excitation keeps the
    configuration allowed, a symmetric pair of unit entries links the two
    basis states.  The vacuum row therefore has exactly ``n_atoms`` nonzeros.
    """
    if h_basis.size == 0:
        raise ValueError("basis is empty")
    spec = h_basis.spec
    windows = _window_masks(spec.n_atoms, spec.n_b)
    index: dict[int, int] = {}
    masks: list[int] = []
    for i, sites in enumerate(h_basis.site_tuples):
        m = 0
        for s in sites:
            m |= 1 << s
        masks.append(m)
        index[m] = i
    rows: list[int] = []
    cols: list[int] = []
    for i, m in enumerate(masks):
        for t in range(spec.n_atoms):
            if m & windows[t] == 0:
                j = index[m | (1 << t)]
                rows.append(i)
                cols.append(j)
                rows.append(j)
                cols.append(i)
    data = np.ones(len(rows))
    matrix = sparse.csr_matrix(
        (data, (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
        shape=(h_basis.size, h_basis.size))
    parity = (h_basis.nu_values % 2).astype(np.int8)
    return SparseHamiltonian(basis=h_basis, matrix=matrix, parity=parity)


def reflection_operator(h_basis: AllowedBasis) -> np.ndarray:
    """Permutation implementing the spatial reflection ``site -> N - 1 - site``.

    Returns ``perm`` with ``perm[i]`` the index of the mirrored configuration;
    it is an involution and commutes with the flip Hamiltonian.
    """
    n = h_basis.spec.n_atoms
    perm = np.empty(h_basis.size, dtype=np.int64)
    for i, sites in enumerate(h_basis.site_tuples):
        perm[i] = h_basis.index_of(n - 1 - s for s in sites)
    return perm
