"""Dense complex linear algebra: tensor products, partial traces, Schatten
norms, Hermitian eigendecompositions, and Haar/Ginibre sampling.

All operations work on plain ``numpy`` arrays of ``complex128`` and are pure
functions of their inputs.  Matrices are validated on entry (finite entries,
shape) and a global dimension cap keeps every computation at desk scale.  The
cap defaults to 256 and can be overridden with the environment variable
``UPQP_MAX_DIM``.
"""

from __future__ import annotations

import json
import os

import numpy as np

DEFAULT_MAX_DIM = 256

#: tolerance used to decide whether a matrix counts as Hermitian
HERMITIAN_TOL = 1e-10


class DimensionLimitError(ValueError):
    """Raised when a requested matrix would exceed the configured size cap."""


def max_dim() -> int:
    """Current matrix dimension cap (env var ``UPQP_MAX_DIM`` or 256)."""
    raw = os.environ.get("UPQP_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    value = int(raw)
    if value < 1:
        raise ValueError(f"UPQP_MAX_DIM must be positive, got {value}")
    return value


def check_dim(n: int) -> int:
    cap = max_dim()
    if n > cap:
        raise DimensionLimitError(
            f"matrix dimension {n} exceeds the desk-scale cap {cap} "
            f"(set UPQP_MAX_DIM to raise it)"
        )
    return n


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return ``a`` as a 2-D complex128 array.

    Rejects non-2D input and non-finite entries.
    """
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    return bool(np.abs(m - m.conj().T).max(initial=0.0) <= tol * scale)


def hermitian_part(m: np.ndarray) -> np.ndarray:
    """(m + m†)/2: symmetrization applied before every eigendecomposition."""
    return (m + m.conj().T) / 2


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def tensor(a, b) -> np.ndarray:
    """Kronecker product with the desk-scale dimension cap enforced."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    check_dim(a.shape[0] * b.shape[0])
    check_dim(a.shape[1] * b.shape[1])
    return np.kron(a, b)


def partial_trace(m, dims: tuple[int, int], keep: str) -> np.ndarray:
    """Trace out one factor of a bipartite operator on C^dA ⊗ C^dB.

    ``keep`` selects the surviving subsystem, ``"A"`` or ``"B"``.  The input
    must be square with side dA*dB; the trace of the result equals the trace
    of the input.
    """
    m = as_matrix(m)
    da, db = dims
    if da < 1 or db < 1:
        raise ValueError(f"dims must be positive, got {dims}")
    if m.shape != (da * db, da * db):
        raise ValueError(f"expected shape {(da * db,) * 2} for dims {dims}, got {m.shape}")
    t = m.reshape(da, db, da, db)
    if keep == "A":
        return np.einsum("ajbj->ab", t)
    if keep == "B":
        return np.einsum("iaib->ab", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def singular_values(m) -> np.ndarray:
    m = as_matrix(m)
    return np.linalg.svd(m, compute_uv=False)


def schatten_norm(m, p) -> float:
    """ℓ_p norm of the singular values; ``p = np.inf`` gives the operator norm."""
    if p != np.inf and p < 1:
        raise ValueError(f"Schatten norms need p >= 1, got {p}")
    s = singular_values(m)
    if np.isinf(p):
        return float(s[0]) if s.size else 0.0
    if p == 1:
        return float(np.sum(s))
    if p == 2:
        return float(np.sqrt(np.sum(s**2)))
    return float(np.sum(s**p) ** (1.0 / p))


def trace_norm(m) -> float:
    return schatten_norm(m, 1)


def operator_norm(m) -> float:
    return schatten_norm(m, np.inf)


def eig_hermitian(m, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix.

    Inputs must be Hermitian within ``tol`` (relative); the Hermitian part is
    taken before decomposing to absorb round-off accumulated upstream.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected square matrix, got {m.shape}")
    if not is_hermitian(m, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(hermitian_part(m))
    return w, v


def is_unitary(m, tol: float = 1e-9) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    gram = m.conj().T @ m
    return bool(np.abs(gram - np.eye(m.shape[0])).max() <= tol)


# ----------------------------------------------------------------------------
# random ensembles


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """One Haar-distributed unitary via QR of a Ginibre matrix."""
    return haar_unitaries(d, 1, rng)[0]


def haar_unitaries(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of ``n`` Haar unitaries, shape (n, d, d).

    QR phases are fixed with the diagonal of R so the distribution is exactly
    Haar (Mezzadri's recipe).
    """
    check_dim(d)
    z = (rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.einsum("nii->ni", r).copy()
    ph /= np.abs(ph)
    return q * ph.conj()[:, None, :]


def haar_state(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector in C^d."""
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def ginibre(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a normalized Ginibre Wishart."""
    rank = d if rank is None else rank
    g = ginibre(d, rank, rng)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = ginibre(d, d, rng)
    return hermitian_part(g)


# ----------------------------------------------------------------------------
# JSON matrix format: {"rows": r, "cols": c, "entries": [[re, im], ...]}
# row-major, exact at full double precision.


def matrix_to_json(m) -> dict:
    m = as_matrix(m)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    entries = obj["entries"]
    if len(entries) != rows * cols:
        raise ValueError(f"entry count {len(entries)} != rows*cols = {rows * cols}")
    flat = np.array([complex(re, im) for re, im in entries])
    return as_matrix(flat.reshape(rows, cols))


def save_matrix(m, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(matrix_to_json(m), fh)


def load_matrix(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return matrix_from_json(json.load(fh))
