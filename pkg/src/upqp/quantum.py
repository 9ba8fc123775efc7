"""Quantum objects: states, channels in Kraus form, and processors acting on a
data ⊗ memory space together with the channel a program state induces on the
data register.

Conventions
-----------
* Joint spaces are ordered data ⊗ memory; ``np.kron(data_op, memory_op)``.
* Choi matrices live on out ⊗ in: J(Λ) = (Λ ⊗ Id)(|Ω⟩⟨Ω|) with |Ω⟩ = Σ|ii⟩
  unnormalized, so Tr_out J = Id_in for trace-preserving Λ.
* Program states are unit vectors, never density matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .linalg import as_matrix, check_dim, dagger, hermitian_part

TP_TOL = 1e-9
UNITARY_TOL = 1e-9

#: relative Choi-eigenvalue threshold for numerical Kraus rank decisions
CHOI_RANK_RTOL = 1e-9


@dataclass(frozen=True)
class Channel:
    """Completely positive trace-preserving map stored as a Kraus list."""

    kraus: tuple[np.ndarray, ...]
    d_in: int
    d_out: int

    def __post_init__(self):
        if not self.kraus:
            raise ValueError("channel needs at least one Kraus operator")
        ops = tuple(as_matrix(k, "Kraus operator") for k in self.kraus)
        object.__setattr__(self, "kraus", ops)
        for k in ops:
            if k.shape != (self.d_out, self.d_in):
                raise ValueError(
                    f"Kraus operator shape {k.shape} != ({self.d_out}, {self.d_in})"
                )
        gram = sum(dagger(k) @ k for k in ops)
        if np.abs(gram - np.eye(self.d_in)).max() > TP_TOL:
            raise ValueError("Kraus operators do not sum to the identity (not trace preserving)")

    def __call__(self, rho) -> np.ndarray:
        return apply_channel(self, rho)


def identity_channel(d: int) -> Channel:
    return Channel((np.eye(d, dtype=complex),), d, d)


def unitary_channel(u) -> Channel:
    u = as_matrix(u, "unitary")
    if not linalg.is_unitary(u, UNITARY_TOL):
        raise ValueError("matrix is not unitary within tolerance")
    return Channel((u,), u.shape[0], u.shape[0])


def weyl_operators(d: int) -> list[np.ndarray]:
    """The d² shift-and-clock unitaries X^a Z^b (generalized Paulis)."""
    omega = np.exp(2j * np.pi / d)
    x = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    z = np.diag(omega ** np.arange(d))
    ops = []
    for a in range(d):
        xa = np.linalg.matrix_power(x, a)
        for b in range(d):
            ops.append(xa @ np.linalg.matrix_power(z, b))
    return ops


def depolarizing_channel(d: int) -> Channel:
    """Fully depolarizing channel ρ ↦ Tr(ρ) Id/d via the Weyl twirl."""
    kraus = tuple(w / d for w in weyl_operators(d))
    return Channel(kraus, d, d)


def replacer_channel(tau) -> Channel:
    """Constant channel ρ ↦ Tr(ρ)·τ for a fixed state τ."""
    tau = as_matrix(tau, "tau")
    d = tau.shape[0]
    w, v = linalg.eig_hermitian(tau)
    if w.min() < -1e-9 or abs(w.sum() - 1.0) > 1e-9:
        raise ValueError("tau is not a density matrix")
    kraus = []
    for i in range(d):
        if w[i] <= 1e-15:
            continue
        for j in range(d):
            kraus.append(np.sqrt(w[i]) * np.outer(v[:, i], np.eye(d)[j]))
    return Channel(tuple(kraus), d, d)


def apply_channel(c: Channel, rho) -> np.ndarray:
    rho = as_matrix(rho, "rho")
    if rho.shape != (c.d_in, c.d_in):
        raise ValueError(f"state shape {rho.shape} != channel input dim {c.d_in}")
    out = np.zeros((c.d_out, c.d_out), dtype=complex)
    for k in c.kraus:
        out += k @ rho @ dagger(k)
    return out


def choi_matrix(c: Channel) -> np.ndarray:
    """J = (c ⊗ Id)(|Ω⟩⟨Ω|) on out ⊗ in; for Kraus K this is Σ vec(K)vec(K)†."""
    check_dim(c.d_out * c.d_in)
    j = np.zeros((c.d_out * c.d_in,) * 2, dtype=complex)
    for k in c.kraus:
        v = k.reshape(-1)
        j += np.outer(v, v.conj())
    return j


def kraus_from_choi(j, d_in: int, d_out: int, rtol: float = CHOI_RANK_RTOL) -> list[np.ndarray]:
    """Minimal (eigen-)Kraus list of a PSD Choi matrix.

    Eigenvalues below ``rtol`` times the largest are treated as zero, which
    makes the rank decision scale invariant.
    """
    j = as_matrix(j, "choi")
    w, v = linalg.eig_hermitian(j, tol=1e-8)
    if w.size and w[0] < -1e-8 * max(1.0, w[-1]):
        raise ValueError("Choi matrix is not positive semidefinite")
    cut = rtol * max(w[-1], 0.0) if w.size else 0.0
    ops = []
    for i in range(w.size - 1, -1, -1):
        if w[i] <= cut:
            break
        ops.append(np.sqrt(w[i]) * v[:, i].reshape(d_out, d_in))
    if not ops:
        raise ValueError("Choi matrix is numerically zero")
    return ops


def canonical_channel(kraus, d_in: int, d_out: int) -> Channel:
    """Re-canonicalize a Kraus list through its Choi eigendecomposition.

    Keeps Kraus lists minimal, which controls downstream SDP sizes.
    """
    j = np.zeros((d_out * d_in,) * 2, dtype=complex)
    for k in kraus:
        v = np.asarray(k, dtype=complex).reshape(-1)
        j += np.outer(v, v.conj())
    return Channel(tuple(kraus_from_choi(j, d_in, d_out)), d_in, d_out)


def channel_kraus_rank(c: Channel, rtol: float = CHOI_RANK_RTOL) -> int:
    w = np.linalg.eigvalsh(hermitian_part(choi_matrix(c)))
    return int(np.sum(w > rtol * max(w[-1], 0.0)))


def stinespring_dilation(c: Channel, rtol: float = CHOI_RANK_RTOL) -> tuple[np.ndarray, int]:
    """Isometry V: in → out ⊗ anc with Tr_anc[V ρ V†] = c(ρ).

    The ancilla dimension is the numerical Kraus rank of the channel.
    """
    kraus = kraus_from_choi(choi_matrix(c), c.d_in, c.d_out, rtol)
    anc = len(kraus)
    v = np.zeros((c.d_out * anc, c.d_in), dtype=complex)
    for k, op in enumerate(kraus):
        # row layout (out index, anc index), matching kron(out, anc)
        v[k::anc, :] = op
    return v, anc


@dataclass(frozen=True)
class ProgramState:
    """Unit memory vector encoding a target unitary."""

    vector: np.ndarray
    target_label: str = ""

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(v.real) & np.isfinite(v.imag)):
            raise ValueError("program vector has non-finite entries")
        if abs(np.linalg.norm(v) - 1.0) > 1e-10:
            raise ValueError("program vector is not normalized")
        object.__setattr__(self, "vector", v)


@dataclass(frozen=True)
class Processor:
    """A channel on data ⊗ memory with declared split (d, m).

    ``unitary`` holds the single joint unitary when the processor is a
    unitary channel.
    """

    channel: Channel
    d: int
    m: int
    unitary: np.ndarray | None = field(default=None)

    def __post_init__(self):
        dm = self.d * self.m
        if self.channel.d_in != dm or self.channel.d_out != dm:
            raise ValueError(
                f"processor channel acts on {self.channel.d_in} but d*m = {dm}"
            )
        if self.unitary is not None:
            u = as_matrix(self.unitary, "processor unitary")
            if u.shape != (dm, dm) or not linalg.is_unitary(u, UNITARY_TOL):
                raise ValueError("processor unitary flag set but matrix is not unitary")
            object.__setattr__(self, "unitary", u)

    @property
    def is_unitary(self) -> bool:
        return self.unitary is not None


def unitary_processor(v, d: int, m: int) -> Processor:
    v = as_matrix(v, "joint unitary")
    return Processor(Channel((v,), d * m, d * m), d, m, unitary=v)


def induced_program_channel(p: Processor, phi: ProgramState | np.ndarray) -> Channel:
    """The data channel ρ ↦ Tr_mem[P(ρ ⊗ |φ⟩⟨φ|)].

    Kraus operators are contracted directly, (Id ⊗ ⟨j|) K (Id ⊗ |φ⟩), then
    re-canonicalized through the Choi eigendecomposition.
    """
    vec = phi.vector if isinstance(phi, ProgramState) else np.asarray(phi, dtype=complex).reshape(-1)
    if vec.shape[0] != p.m:
        raise ValueError(f"program length {vec.shape[0]} != memory dim {p.m}")
    if abs(np.linalg.norm(vec) - 1.0) > 1e-10:
        raise ValueError("program vector is not normalized")
    d, m = p.d, p.m
    raw = []
    for k in p.channel.kraus:
        t = k.reshape(d, m, d, m)
        # block[j] = (Id ⊗ ⟨j|) K (Id ⊗ |φ⟩), one d×d operator per memory index
        blocks = np.einsum("ajbi,i->jab", t, vec)
        raw.extend(blocks)
    return canonical_channel(raw, d, d)


# ----------------------------------------------------------------------------
# JSON formats


def channel_to_json(c: Channel) -> dict:
    return {
        "d_in": c.d_in,
        "d_out": c.d_out,
        "kraus": [linalg.matrix_to_json(k) for k in c.kraus],
    }


def channel_from_json(obj: dict) -> Channel:
    kraus = tuple(linalg.matrix_from_json(k) for k in obj["kraus"])
    return Channel(kraus, int(obj["d_in"]), int(obj["d_out"]))


def processor_to_json(p: Processor) -> dict:
    out = {
        "d": p.d,
        "m": p.m,
        "is_unitary": p.is_unitary,
        "channel": channel_to_json(p.channel),
    }
    if p.is_unitary:
        out["unitary"] = linalg.matrix_to_json(p.unitary)
    return out


def processor_from_json(obj: dict) -> Processor:
    unitary = linalg.matrix_from_json(obj["unitary"]) if obj.get("is_unitary") else None
    return Processor(channel_from_json(obj["channel"]), int(obj["d"]), int(obj["m"]), unitary=unitary)


def save_processor(p: Processor, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(processor_to_json(p), fh)


def load_processor(path) -> Processor:
    with open(path, encoding="utf-8") as fh:
        return processor_from_json(json.load(fh))
