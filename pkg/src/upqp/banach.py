"""Embedding-side characterization of programmable processors.

A joint unitary V on data ⊗ memory induces the linear map
Φ_V(σ) = Tr_data[V (σ^T ⊗ Id_mem)] from trace-norm space into operator-norm
space; its completely bounded norm equals ‖V‖.  This module measures the
(near-)isometry of such maps, estimates Rademacher type-2 constants of matrix
families by exact sign enumeration or Monte Carlo, and assembles the memory
lower-bound witness that pushes the diagonal ±1 family through Φ_V.

The transpose in Φ_V is kept everywhere; a convention flag drops it for
cross-checking against displays that absorb the transposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg, quantum
from .linalg import as_matrix
from .quantum import Processor

#: default constant in T₂(B(H)) ≤ √(C log₂ dim H); 4 from the proof path,
#: configurable because the estimate "can be taken equal to 4 or maybe better"
DEFAULT_TYPE_CONSTANT = 4.0

EXACT_ENUMERATION_LIMIT = 20
EXACT_ENUMERATION_HARD_LIMIT = 30


class EmbeddingMap:
    """Callable Φ_T(σ) = Tr_data[T ((σ^T or σ) ⊗ Id_mem)] for T on d·m."""

    def __init__(self, t, d: int, m: int, transpose: bool = True):
        t = as_matrix(t, "t")
        if t.shape != (d * m, d * m):
            raise ValueError(f"expected a {(d * m,) * 2} matrix for (d, m) = {(d, m)}")
        self.t = t
        self.d = d
        self.m = m
        self.transpose = transpose
        self._tensor = t.reshape(d, m, d, m)

    def __call__(self, sigma) -> np.ndarray:
        sigma = as_matrix(sigma, "sigma")
        if sigma.shape != (self.d, self.d):
            raise ValueError(f"expected a {self.d}×{self.d} argument")
        if self.transpose:
            return np.einsum("akbl,ab->kl", self._tensor, sigma)
        return np.einsum("akbl,ba->kl", self._tensor, sigma)

    def cb_norm(self) -> float:
        """Completely bounded norm of Φ_T, which is the operator norm of T."""
        return linalg.operator_norm(self.t)


def processor_unitary(p: Processor) -> tuple[np.ndarray, int]:
    """The processor's joint unitary, dilating Kraus processors first.

    For a non-unitary processor the Stinespring isometry of its channel is
    completed to a unitary on data ⊗ (memory ⊗ ancilla); the program
    |φ⟩ ⊗ |0⟩_anc then induces the original channel, so programming errors
    are preserved.  Returns (V, effective memory dimension).
    """
    if p.is_unitary:
        return p.unitary, p.m
    iso, anc = quantum.stinespring_dilation(p.channel)
    n = p.d * p.m * anc
    linalg.check_dim(n)
    v = np.zeros((n, n), dtype=complex)
    cols_iso = [j * anc for j in range(p.d * p.m)]
    v[:, cols_iso] = iso
    # orthonormal complement, deterministically from the eigenvectors of the
    # projector onto the range of the isometry
    proj = iso @ iso.conj().T
    w, vec = np.linalg.eigh(proj)
    complement = [vec[:, i] for i in range(n) if w[i] < 0.5]
    free_cols = [c for c in range(n) if c not in set(cols_iso)]
    if len(complement) != len(free_cols):
        raise ValueError("dilation bookkeeping failed: complement dimension mismatch")
    for c, vecc in zip(free_cols, complement):
        v[:, c] = vecc
    if not linalg.is_unitary(v, 1e-8):
        raise ValueError("unitary completion of the Stinespring isometry failed")
    return v, p.m * anc


def embedding_map(p: Processor, transpose: bool = True) -> EmbeddingMap:
    v, m_eff = processor_unitary(p)
    return EmbeddingMap(v, p.d, m_eff, transpose)


def cb_norm(p: Processor | np.ndarray) -> float:
    """cb-norm of the induced map: ‖V‖ for the (possibly dilated) unitary, or
    the operator norm of a raw matrix given directly."""
    if isinstance(p, Processor):
        v, _ = processor_unitary(p)
        return linalg.operator_norm(v)
    return linalg.operator_norm(as_matrix(p, "map matrix"))


@dataclass(frozen=True)
class EmbeddingReport:
    processor_id: str
    sampled_min_ratio: float
    sampled_max_ratio: float
    epsilon_used: float
    samples: int

    def __post_init__(self):
        if not 0.0 <= self.sampled_min_ratio <= self.sampled_max_ratio:
            raise ValueError("ratio ordering violated")
        if self.sampled_max_ratio > 1.0 + 1e-8:
            raise ValueError("max ratio exceeds complete contractivity bound")


def distortion(
    target: Processor | EmbeddingMap,
    samples: int = 2000,
    seed: int = 0,
    epsilon_used: float = float("nan"),
    processor_id: str = "",
) -> EmbeddingReport:
    """Sample ‖Φ(σ)‖∞ over random trace-norm-one σ and record the extremes.

    Draws alternate between Haar rank-one |ψ⟩⟨γ| and trace-normalized Ginibre
    matrices, since the minimum need not occur at extreme points.
    """
    phi = target if isinstance(target, EmbeddingMap) else embedding_map(target)
    rng = np.random.default_rng(seed)
    d = phi.d
    lo, hi = np.inf, 0.0
    for k in range(samples):
        if k % 2 == 0:
            psi = linalg.haar_state(d, rng)
            gam = linalg.haar_state(d, rng)
            sigma = np.outer(psi, gam.conj())
        else:
            g = linalg.ginibre(d, d, rng)
            sigma = g / linalg.trace_norm(g)
        value = linalg.operator_norm(phi(sigma))
        lo = min(lo, value)
        hi = max(hi, value)
    return EmbeddingReport(processor_id, float(lo), float(hi), epsilon_used, samples)


# ----------------------------------------------------------------------------
# Rademacher type


@dataclass(frozen=True)
class TypeEstimate:
    family: str
    n: int
    space: str  # trace_norm | operator_norm
    lhs: float  # (E ‖Σ ε_i x_i‖²)^{1/2}, exact or sampled
    rhs: float  # (Σ ‖x_i‖²)^{1/2}
    ratio: float
    mode: str  # exact | monte_carlo
    samples: int = 0
    stderr: float = 0.0


def _space_norm(space: str):
    if space == "trace_norm":
        return linalg.trace_norm
    if space == "operator_norm":
        return linalg.operator_norm
    raise ValueError(f"unknown space {space!r}")


def rademacher_average(
    family,
    space: str,
    mode: str = "auto",
    samples: int = 20000,
    seed: int = 0,
    label: str = "",
) -> TypeEstimate:
    """Rademacher average of a matrix family in the chosen Schatten norm.

    ``mode='exact'`` enumerates all 2^n sign patterns (n ≤ 30 enforced, and
    only exact enumeration certifies a type lower bound); ``'monte_carlo'``
    samples sign patterns and reports the standard error of the squared
    average; ``'auto'`` picks exact for n ≤ 20.
    """
    mats = [as_matrix(x, "family member") for x in family]
    if not mats:
        raise ValueError("family must be nonempty")
    shape = mats[0].shape
    if any(m.shape != shape for m in mats):
        raise ValueError("family members must share dimensions")
    n = len(mats)
    norm = _space_norm(space)
    rhs = float(np.sqrt(sum(norm(x) ** 2 for x in mats)))
    if rhs == 0.0:
        raise ValueError("family is identically zero")
    stack = np.array(mats)

    if mode == "auto":
        mode = "exact" if n <= EXACT_ENUMERATION_LIMIT else "monte_carlo"
    if mode == "exact":
        if n > EXACT_ENUMERATION_HARD_LIMIT:
            raise ValueError(f"exact enumeration rejected for n = {n} > {EXACT_ENUMERATION_HARD_LIMIT}")
        # signs and -signs give the same norm: enumerate half the patterns
        total = 0.0
        for k in range(2 ** (n - 1)):
            signs = np.array([1.0] + [-1.0 if (k >> j) & 1 else 1.0 for j in range(n - 1)])
            total += norm(np.tensordot(signs, stack, axes=(0, 0))) ** 2
        lhs = float(np.sqrt(total / 2 ** (n - 1)))
        return TypeEstimate(label, n, space, lhs, rhs, lhs / rhs, "exact")

    rng = np.random.default_rng(seed)
    vals = np.empty(samples)
    for k in range(samples):
        signs = rng.choice([-1.0, 1.0], size=n)
        vals[k] = norm(np.tensordot(signs, stack, axes=(0, 0))) ** 2
    mean = float(vals.mean())
    se_mean = float(vals.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    lhs = float(np.sqrt(mean))
    stderr = se_mean / (2.0 * lhs) if lhs > 0 else 0.0
    return TypeEstimate(label, n, space, lhs, rhs, lhs / rhs, "monte_carlo", samples, stderr)


def diagonal_unit_family(d: int) -> list[np.ndarray]:
    """The diagonal matrix units |i⟩⟨i|, the canonical type-√d witness in S₁."""
    return [np.diag(np.eye(d)[i]).astype(complex) for i in range(d)]


def type2_upper_bound_operator_norm(m_dim: int, constant: float = DEFAULT_TYPE_CONSTANT) -> float:
    """√(C log₂ m) bound on the type-2 constant of B(H_m)."""
    if m_dim < 2:
        raise ValueError("bound needs dimension at least 2")
    return float(np.sqrt(constant * np.log2(m_dim)))


def type2_upper_bound_proof_path(m_dim: int) -> float:
    """The same bound evaluated as m^{1/p} √p at p = log_{√2}(m).

    Interpolation through the p-th Schatten class gives T₂ ≤ m^{1/p} √p for
    every p ≥ 2; the stated choice of p makes this √(4 log₂ m) exactly.
    """
    if m_dim < 2:
        raise ValueError("bound needs dimension at least 2")
    p = 2.0 * np.log2(m_dim)
    return float(m_dim ** (1.0 / p) * np.sqrt(p))


def theorem3_memory_lower_bound(
    d: int,
    eps: float,
    constant: float = DEFAULT_TYPE_CONSTANT,
    unitary: bool = False,
) -> tuple[float, float]:
    """Memory lower bound (value, log₂ value) enforced by the type chain.

    Unitary processors obey m ≥ 2^{(1−ε)d/C}; general channels pay the
    Stinespring ancilla accounting and obey
    m ≥ 2^{(1−ε)d/(3C) − (2/3)log₂ d}.  Accuracies ε ≥ 1 yield the vacuous
    bound 1.
    """
    if eps >= 1.0:
        return 1.0, 0.0
    if unitary:
        log2_value = (1.0 - eps) * d / constant
    else:
        log2_value = (1.0 - eps) * d / (3.0 * constant) - (2.0 / 3.0) * np.log2(d)
    log2_value = max(log2_value, 0.0)
    value = 2.0**log2_value if log2_value < 1000 else float("inf")
    return value, float(log2_value)


@dataclass(frozen=True)
class WitnessChain:
    sqrt_d: float
    image_ratio: float
    transported_lower: float  # (1−ε)^{-1/2} · image ratio
    operator_norm_bound: float  # √(C log₂ m')
    chain_holds: bool
    m_effective: int


@dataclass(frozen=True)
class MemoryWitness:
    certified_m_lower: float
    log2_m_lower: float
    vacuous: bool
    epsilon: float
    constant: float
    unitary: bool
    chain: WitnessChain


def memory_lower_bound_witness(
    p: Processor,
    eps: float,
    constant: float = DEFAULT_TYPE_CONSTANT,
) -> MemoryWitness:
    """Push the diagonal ±1 family through Φ_V and certify the type chain.

    The images of the diagonal matrix units are enumerated exactly in
    operator norm; the chain
    √d ≤ (1−ε)^{-1/2}·ratio(image) ≤ (1−ε)^{-1/2}·√(C log₂ m')
    is checked and the Theorem-style memory bound 2^{(1−ε)d/C} (unitary) or
    2^{(1−ε)d/(3C) − (2/3)log₂ d} (Kraus) is reported.  ε ≥ 1 flags a vacuous
    witness with bound 1.
    """
    phi = embedding_map(p)
    d = p.d
    family = diagonal_unit_family(d)
    images = [phi(x) for x in family]
    image_est = rademacher_average(images, "operator_norm", mode="exact", label="diagonal image")
    sqrt_d = float(np.sqrt(d))
    vacuous = eps >= 1.0
    if vacuous:
        transported = float("inf")
        holds = True
    else:
        transported = image_est.ratio / np.sqrt(1.0 - eps)
        holds = sqrt_d <= transported + 1e-9
    op_bound = type2_upper_bound_operator_norm(phi.m, constant)
    holds = bool(holds and image_est.ratio <= op_bound + 1e-9)
    value, log2_value = theorem3_memory_lower_bound(d, eps, constant, unitary=p.is_unitary)
    chain = WitnessChain(
        sqrt_d=sqrt_d,
        image_ratio=image_est.ratio,
        transported_lower=float(transported),
        operator_norm_bound=op_bound,
        chain_holds=holds,
        m_effective=phi.m,
    )
    return MemoryWitness(
        certified_m_lower=value,
        log2_m_lower=log2_value,
        vacuous=vacuous,
        epsilon=eps,
        constant=constant,
        unitary=p.is_unitary,
        chain=chain,
    )
