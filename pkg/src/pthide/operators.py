"""Dense Hermitian operator arithmetic on a bipartite Hilbert space.

Everything in this package is built on top of two conventions fixed here:

* product basis: ``|i>_A |j>_B`` maps to the flat index ``i * dB + j``
  (row-major, Alice's index most significant);
* partial transposition acts on Bob's factor.

Operators are stored densely.  Real symmetric matrices are kept in
``float64`` (they are Hermitian as-is); anything else is ``complex128``.
Keeping real inputs real halves the memory and roughly quadruples
eigensolver throughput, which matters for the larger multifold checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Refuse to build operators larger than this unless the caller raises the cap.
DEFAULT_DIM_CAP = 4096

HERMITICITY_ATOL = 1e-12


@dataclass(frozen=True)
class BipartiteDims:
    """Local dimensions (dA, dB) of a bipartite system; total dimension dA*dB."""

    dA: int
    dB: int

    def __post_init__(self):
        if self.dA < 1 or self.dB < 1:
            raise ValueError(f"local dimensions must be >= 1, got ({self.dA}, {self.dB})")

    @property
    def total(self) -> int:
        return self.dA * self.dB


def _coerce_entries(entries) -> np.ndarray:
    arr = np.asarray(entries)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"operator entries must be a square matrix, got shape {arr.shape}")
    if np.iscomplexobj(arr):
        return arr.astype(np.complex128, copy=False)
    return arr.astype(np.float64, copy=False)


@dataclass(frozen=True)
class HermitianOperator:
    """A Hermitian matrix tagged with the bipartite dimensions it acts on.

    Instances are treated as immutable: all operations return new objects
    and never modify ``entries`` in place.
    """

    dims: BipartiteDims
    entries: np.ndarray

    def __post_init__(self):
        arr = _coerce_entries(self.entries)
        if arr.shape[0] != self.dims.total:
            raise ValueError(
                f"matrix side {arr.shape[0]} does not match dA*dB = {self.dims.total}"
            )
        scale = 1.0 + (np.abs(arr).max() if arr.size else 0.0)
        dev = np.abs(arr - arr.conj().T).max() if arr.size else 0.0
        if dev > HERMITICITY_ATOL * scale:
            raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.dims.total

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    # Small amount of arithmetic sugar; results stay Hermitian for real scalars.
    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_same_dims(other)
        return HermitianOperator(self.dims, self.entries + other.entries)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_same_dims(other)
        return HermitianOperator(self.dims, self.entries - other.entries)

    def __neg__(self) -> "HermitianOperator":
        return HermitianOperator(self.dims, -self.entries)

    def __mul__(self, scalar) -> "HermitianOperator":
        return HermitianOperator(self.dims, self.entries * float(scalar))

    __rmul__ = __mul__

    def _check_same_dims(self, other: "HermitianOperator"):
        if self.dims != other.dims:
            raise ValueError(f"dimension mismatch: {self.dims} vs {other.dims}")


def identity(dims: BipartiteDims) -> HermitianOperator:
    return HermitianOperator(dims, np.eye(dims.total))


def zero(dims: BipartiteDims) -> HermitianOperator:
    return HermitianOperator(dims, np.zeros((dims.total, dims.total)))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (descending) and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def spectrum(a: HermitianOperator) -> Spectrum:
    """Full eigendecomposition of ``a`` with eigenvalues sorted descending."""
    w, v = np.linalg.eigh(a.entries)
    return Spectrum(eigenvalues=w[::-1].copy(), eigenvectors=v[:, ::-1].copy())


def partial_transpose(a: HermitianOperator) -> HermitianOperator:
    """Transpose Bob's tensor factor in the fixed product basis.

    The map is a linear involution, preserves the trace and Hermiticity,
    and acts factorwise on tensor products.
    """
    dA, dB = a.dims.dA, a.dims.dB
    d = a.dims.total
    t = a.entries.reshape(dA, dB, dA, dB)
    out = t.transpose(0, 3, 2, 1).reshape(d, d)
    return HermitianOperator(a.dims, out.copy())


def abs_op(e: HermitianOperator) -> HermitianOperator:
    """Operator absolute value |E|: same eigenvectors, eigenvalues |lambda|."""
    w, v = np.linalg.eigh(e.entries)
    return HermitianOperator(e.dims, _sym((v * np.abs(w)) @ v.conj().T))


def positive_part(e: HermitianOperator) -> HermitianOperator:
    """The PSD component in the split E = E(+) - E(-) with |E| = E(+) + E(-)."""
    w, v = np.linalg.eigh(e.entries)
    return HermitianOperator(e.dims, _sym((v * np.maximum(w, 0.0)) @ v.conj().T))


def negative_part(e: HermitianOperator) -> HermitianOperator:
    """The PSD operator E(-) = (|E| - E) / 2."""
    w, v = np.linalg.eigh(e.entries)
    return HermitianOperator(e.dims, _sym((v * np.maximum(-w, 0.0)) @ v.conj().T))


def _sym(x: np.ndarray) -> np.ndarray:
    # kill the anti-Hermitian rounding noise left by eigenbasis reconstruction
    return (x + x.conj().T) / 2


def is_psd(e: HermitianOperator, tol: float | None = None) -> tuple[bool, float]:
    """PSD test: True iff the minimum eigenvalue is >= -tol.

    Returns ``(verdict, min_eigenvalue)`` so callers can report margins.
    The default tolerance scales with the Frobenius norm.
    """
    if tol is None:
        tol = 1e-9 * (1.0 + e.frobenius_norm())
    elif tol < 0:
        raise ValueError("tolerance must be non-negative")
    lmin = float(np.linalg.eigvalsh(e.entries)[0])
    return lmin >= -tol, lmin


def trace_norm(e: HermitianOperator) -> float:
    """Sum of absolute eigenvalues (trace norm of a Hermitian matrix)."""
    return float(np.abs(np.linalg.eigvalsh(e.entries)).sum())


def tensor(
    a: HermitianOperator, b: HermitianOperator, cap: int | None = None
) -> HermitianOperator:
    """Tensor product with all Alice factors grouped before all Bob factors.

    The composite acts on (dA_a * dA_b) x (dB_a * dB_b); the index layout is
    rearranged from the raw Kronecker product so that partial transposition
    of the result transposes every Bob factor, i.e.
    ``partial_transpose(tensor(a, b)) == tensor(partial_transpose(a), partial_transpose(b))``.
    """
    cap = DEFAULT_DIM_CAP if cap is None else cap
    dims = BipartiteDims(a.dims.dA * b.dims.dA, a.dims.dB * b.dims.dB)
    if dims.total > cap:
        raise ValueError(
            f"tensor product dimension {dims.total} exceeds cap {cap}; "
            "pass a larger cap explicitly to allow it"
        )
    k = np.kron(a.entries, b.entries)
    # kron index layout is (a_A, a_B, b_A, b_B); regroup to (a_A, b_A, a_B, b_B)
    sh = (a.dims.dA, a.dims.dB, b.dims.dA, b.dims.dB)
    k = k.reshape(sh + sh).transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(dims.total, dims.total)
    return HermitianOperator(dims, np.ascontiguousarray(k))


def tensor_power(a: HermitianOperator, exponent: int, cap: int | None = None) -> HermitianOperator:
    if exponent < 1:
        raise ValueError("tensor power exponent must be >= 1")
    out = a
    for _ in range(exponent - 1):
        out = tensor(out, a, cap=cap)
    return out
