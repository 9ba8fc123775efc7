"""Explicit approximate universal programmable processors.

Provides the greedy ε-net on the unitary group and its controlled-unitary
processor, the teleportation processor with discarded outcomes, programming
error certification, the entanglement-fidelity program-state search, and the
contraction → processor synthesis pipeline.

Net membership uses the plain operator-norm distance ‖U − U_i‖; no global
phase quotient is applied, so U and e^{iθ}U count as distinct points.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import distances, linalg, quantum
from .linalg import as_matrix, check_dim, dagger
from .quantum import Channel, ProgramState, Processor, unitary_processor

EXACT_PROGRAM_TOL = 1e-8


# ----------------------------------------------------------------------------
# operator-norm geometry on the unitary group


def _op_norm_stack(diff: np.ndarray) -> np.ndarray:
    """Operator norms over the leading axes of a (..., d, d) stack."""
    d = diff.shape[-1]
    if d == 2:
        # closed form for 2x2: s_max^2 = (t + sqrt(t^2 - 4|det|^2))/2
        t = np.sum(np.abs(diff) ** 2, axis=(-2, -1))
        det = diff[..., 0, 0] * diff[..., 1, 1] - diff[..., 0, 1] * diff[..., 1, 0]
        disc = np.maximum(t * t - 4.0 * np.abs(det) ** 2, 0.0)
        return np.sqrt(0.5 * (t + np.sqrt(disc)))
    if diff.size == 0:
        return np.zeros(diff.shape[:-2])
    return np.linalg.svd(diff, compute_uv=False)[..., 0]


def _op_dist_batch(stack: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Operator norms ‖stack[k] − u‖ for a stack of d×d matrices."""
    return _op_norm_stack(stack - u)


def _min_dist_cross(cands: np.ndarray, members: np.ndarray, chunk: int = 128) -> np.ndarray:
    """Min operator-norm distance of each candidate to a member stack."""
    mins = np.full(cands.shape[0], np.inf)
    for lo in range(0, members.shape[0], chunk):
        part = members[lo : lo + chunk]
        dist = _op_norm_stack(cands[:, None, :, :] - part[None, :, :, :])
        mins = np.minimum(mins, dist.min(axis=1))
    return mins


def _unitary_features(stack: np.ndarray) -> np.ndarray:
    """Real feature vectors whose Euclidean distance is the Frobenius distance."""
    flat = stack.reshape(stack.shape[0], -1)
    return np.concatenate([flat.real, flat.imag], axis=1)


class _NetIndex:
    """Exact nearest-member queries under the operator norm.

    A KD-tree over Frobenius features prunes candidates using
    ‖Δ‖ ≤ ‖Δ‖_F ≤ √d ‖Δ‖; members inserted since the last rebuild sit in a
    small linear buffer that is always checked exactly.  Coverage queries run
    in two stages (single nearest neighbour for the bulk, a k-nearest gather
    for the undecided) and fall back to ball queries only when the k-th
    Frobenius distance cannot rule out closer members.
    """

    KNN = 16

    def __init__(self, d: int, rebuild_every: int = 64):
        self.d = d
        self.rt_rank = np.sqrt(d)
        self._store = np.zeros((1024, d, d), dtype=complex)
        self._count = 0
        self.tree: cKDTree | None = None
        self.tree_size = 0
        self.rebuild_every = rebuild_every

    def __len__(self) -> int:
        return self._count

    @property
    def stack(self) -> np.ndarray:
        return self._store[: self._count]

    def add(self, u: np.ndarray) -> None:
        if self._count == self._store.shape[0]:
            grown = np.zeros((2 * self._store.shape[0], self.d, self.d), dtype=complex)
            grown[: self._count] = self._store
            self._store = grown
        self._store[self._count] = u
        self._count += 1

    def refresh(self, force: bool = False) -> None:
        n = self._count
        if n and (force or n - self.tree_size >= self.rebuild_every):
            self.tree = cKDTree(_unitary_features(self.stack))
            self.tree_size = n

    def _knn(self, feats: np.ndarray, k: int):
        k = min(k, self.tree_size)
        fdist, idx = self.tree.query(feats, k=k, workers=-1)
        if k == 1:
            fdist = fdist[:, None]
            idx = idx[:, None]
        return fdist, idx

    def min_distances(self, cands: np.ndarray) -> np.ndarray:
        """Exact min operator-norm distance from each candidate to the members."""
        self.refresh()
        if self._count == 0:
            return np.full(cands.shape[0], np.inf)
        buffer = self.stack[self.tree_size :]
        out = _min_dist_cross(cands, buffer) if buffer.shape[0] else np.full(cands.shape[0], np.inf)
        if self.tree is None:
            return out
        feats = _unitary_features(cands)
        fdist, idx = self._knn(feats, self.KNN)
        ops = _op_norm_stack(self.stack[idx] - cands[:, None, :, :])
        out = np.minimum(out, ops.min(axis=1))
        # members beyond the k nearest have op-dist ≥ f_kth/√d
        unresolved = np.flatnonzero(fdist[:, -1] / self.rt_rank < out)
        for j in unresolved:
            ball = self.tree.query_ball_point(feats[j], self.rt_rank * out[j] * (1.0 + 1e-12))
            if ball:
                out[j] = min(out[j], _op_dist_batch(self.stack[np.asarray(ball)], cands[j]).min())
        return out

    def covered_flags(self, cands: np.ndarray, eps: float) -> np.ndarray:
        """Whether each candidate sits within eps of some member (exact)."""
        self.refresh()
        flags = np.zeros(cands.shape[0], dtype=bool)
        if self._count == 0:
            return flags
        buffer = self.stack[self.tree_size :]
        if buffer.shape[0]:
            flags |= _min_dist_cross(cands, buffer) <= eps
        if self.tree is None:
            return flags
        todo = np.flatnonzero(~flags)
        if not todo.size:
            return flags
        feats = _unitary_features(cands[todo])
        fnn, nn_idx = self._knn(feats, 1)
        flags[todo[fnn[:, 0] <= eps]] = True  # op-dist ≤ frobenius distance
        hard = np.flatnonzero(~flags[todo] & (fnn[:, 0] <= self.rt_rank * eps))
        if not hard.size:
            return flags
        fdist, idx = self._knn(feats[hard], self.KNN)
        ops = _op_norm_stack(self.stack[idx] - cands[todo[hard], None, :, :])
        near = ops.min(axis=1)
        flags[todo[hard[near <= eps]]] = True
        # not covered among the k nearest; a farther member could still cover
        # only if the k-th Frobenius distance leaves room below √d·eps
        unresolved = np.flatnonzero((near > eps) & (fdist[:, -1] < self.rt_rank * eps))
        for j in unresolved:
            g = todo[hard[j]]
            ball = self.tree.query_ball_point(feats[hard[j]], self.rt_rank * eps)
            if ball and _op_dist_batch(self.stack[np.asarray(ball)], cands[g]).min() <= eps:
                flags[g] = True
        return flags


@dataclass(frozen=True)
class NetCertification:
    samples: int
    max_residual: float
    seed: int

    def passed(self, resolution: float) -> bool:
        return self.max_residual <= resolution


@dataclass(frozen=True)
class UnitaryNet:
    """Finite covering of U(d) at operator-norm resolution ``resolution``."""

    members: np.ndarray  # (n, d, d)
    resolution: float
    d: int
    certification: NetCertification

    def __post_init__(self):
        stack = np.asarray(self.members, dtype=complex)
        for u in stack:
            if not linalg.is_unitary(u, 1e-9):
                raise ValueError("net member is not unitary")
        object.__setattr__(self, "members", stack)

    def __len__(self) -> int:
        return self.members.shape[0]

    @property
    def certified(self) -> bool:
        return self.certification.passed(self.resolution)

    def min_distance(self, u) -> float:
        return float(_op_dist_batch(self.members, as_matrix(u)).min())

    def nearest_member(self, u) -> tuple[int, float]:
        dists = _op_dist_batch(self.members, as_matrix(u))
        idx = int(np.argmin(dists))
        return idx, float(dists[idx])


def build_epsilon_net(
    d: int,
    eps: float,
    seed: int,
    max_candidates: int = 20000,
    cert_samples: int = 10000,
    batch: int = 2048,
) -> UnitaryNet:
    """Greedy covering of U(d): Haar candidates are adopted whenever their
    operator-norm distance to every current member exceeds ``eps``; the run
    stops after ``max_candidates`` consecutive covered draws.

    A fresh-sample certificate (``cert_samples`` Haar draws) records the worst
    min-distance afterwards; a certificate above ``eps`` marks the net as an
    insufficient run but the net is still returned.
    """
    if d < 2:
        raise ValueError("net construction needs d >= 2")
    if not 0.0 < eps < 2.0:
        raise ValueError("resolution must lie in (0, 2)")
    rng = np.random.default_rng(seed)
    index = _NetIndex(d)
    consecutive = 0
    while consecutive < max_candidates:
        cands = linalg.haar_unitaries(d, batch, rng)
        flags = index.covered_flags(cands, eps)
        fresh: list[np.ndarray] = []
        for j, u in enumerate(cands):
            covered = flags[j]
            if not covered and fresh:
                covered = _op_dist_batch(np.array(fresh), u).min() <= eps
            if covered:
                consecutive += 1
                if consecutive >= max_candidates:
                    break
            else:
                index.add(u)
                fresh.append(u)
                consecutive = 0
        index.refresh()

    index.refresh(force=True)
    cert_rng = np.random.default_rng(seed + 1)
    max_residual = 0.0
    remaining = cert_samples
    while remaining > 0:
        take = min(batch, remaining)
        probes = linalg.haar_unitaries(d, take, cert_rng)
        max_residual = max(max_residual, float(index.min_distances(probes).max()))
        remaining -= take
    cert = NetCertification(samples=cert_samples, max_residual=max_residual, seed=seed + 1)
    return UnitaryNet(index.stack.copy(), eps, d, cert)


def net_to_json(net: UnitaryNet) -> dict:
    return {
        "d": net.d,
        "resolution": net.resolution,
        "members": [linalg.matrix_to_json(u) for u in net.members],
        "certification": {
            "samples": net.certification.samples,
            "max_residual": net.certification.max_residual,
            "seed": net.certification.seed,
        },
    }


def net_from_json(obj: dict) -> UnitaryNet:
    cert = NetCertification(
        samples=int(obj["certification"]["samples"]),
        max_residual=float(obj["certification"]["max_residual"]),
        seed=int(obj["certification"].get("seed", 0)),
    )
    members = np.array([linalg.matrix_from_json(m) for m in obj["members"]])
    return UnitaryNet(members, float(obj["resolution"]), int(obj["d"]), cert)


def save_net(net: UnitaryNet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(net_to_json(net), fh)


def load_net(path) -> UnitaryNet:
    with open(path, encoding="utf-8") as fh:
        return net_from_json(json.load(fh))


# ----------------------------------------------------------------------------
# processors


def controlled_unitary(members: np.ndarray) -> np.ndarray:
    """V = Σ_i U_i ⊗ |i⟩⟨i| on data ⊗ memory."""
    stack = np.asarray(members, dtype=complex)
    n, d, _ = stack.shape
    check_dim(d * n)
    v = np.zeros((d * n, d * n), dtype=complex)
    for i in range(n):
        v[i :: n, i :: n] = stack[i]
    return v


def build_controlled_processor(net: UnitaryNet | np.ndarray) -> Processor:
    members = net.members if isinstance(net, UnitaryNet) else np.asarray(net, dtype=complex)
    v = controlled_unitary(members)
    return unitary_processor(v, members.shape[1], members.shape[0])


def diagonal_sign_processor(d: int) -> Processor:
    """Controlled processor over all 2^d diagonal ±1 unitaries.

    This is the exact programmable family behind the memory lower-bound
    witness: each sign pattern is programmed with zero error.
    """
    patterns = diagonal_sign_family(d)
    return build_controlled_processor(np.array([np.diag(p).astype(complex) for p in patterns]))


def diagonal_sign_family(d: int) -> np.ndarray:
    """All 2^d sign patterns (ε_1, ..., ε_d) in a fixed lexicographic order."""
    out = np.ones((2**d, d))
    for k in range(2**d):
        for j in range(d):
            if (k >> (d - 1 - j)) & 1:
                out[k, j] = -1.0
    return out


def build_teleportation_processor(d: int) -> Processor:
    """Deterministic teleportation processor with the Bell outcome discarded.

    Data register A is measured jointly with the first memory half A' in the
    Weyl-shifted Bell basis; the second memory half B is promoted to the data
    slot and the memory is reset.  Memory dimension is d²; the program
    kron(U, Id)|Ω⟩/√d is the state that programs U.
    """
    if d < 2:
        raise ValueError("teleportation processor needs d >= 2")
    dm = d * d * d
    check_dim(dm)
    weyl = quantum.weyl_operators(d)
    kraus = []
    inv_rt = 1.0 / np.sqrt(d)
    for w in weyl:
        k = np.zeros((dm, dm), dtype=complex)
        # input index (x, a', b) -> output (b, 0, 0); amplitude conj(Bell[x, a'])
        bell = w * inv_rt  # components of (W ⊗ Id)|Ω⟩/√d as a d×d matrix
        for x in range(d):
            for ap in range(d):
                amp = np.conj(bell[x, ap])
                if amp == 0:
                    continue
                for b in range(d):
                    row = b * d * d  # (data=b, memory=(0,0))
                    col = (x * d + ap) * d + b
                    k[row, col] = amp
        kraus.append(k)
    channel = Channel(tuple(kraus), dm, dm)
    return Processor(channel, d, d * d)


def teleportation_program(d: int, u, label: str = "") -> ProgramState:
    """Maximally entangled program kron(U, Id)|Ω⟩/√d for the teleportation
    processor; every such program induces the same replacer channel ρ ↦ Id/d."""
    u = as_matrix(u, "target")
    if not linalg.is_unitary(u):
        raise ValueError("target must be unitary")
    omega = np.eye(d, dtype=complex).reshape(-1)  # Σ |ii⟩ over (A', B)
    vec = (np.kron(u, np.eye(d, dtype=complex)) @ omega) / np.sqrt(d)
    return ProgramState(vec, label)


# ----------------------------------------------------------------------------
# programming error


@dataclass(frozen=True)
class ProgrammingErrorReport:
    target: np.ndarray
    program: ProgramState
    half_diamond_error: float
    method: str  # closed_form | sdp
    converged: bool = True

    def __post_init__(self):
        if not -1e-9 <= self.half_diamond_error <= 1.0 + 1e-9:
            raise ValueError("half diamond error must lie in [0, 1]")


def _single_unitary_kraus(c: Channel) -> np.ndarray | None:
    if len(c.kraus) == 1 and linalg.is_unitary(c.kraus[0], 1e-8):
        return c.kraus[0]
    return None


def programming_error(p: Processor, u, phi: ProgramState | np.ndarray, tol: float = 1e-7) -> ProgrammingErrorReport:
    """Half diamond distance between the program-induced channel and U·U†.

    Uses the unitary closed form whenever the induced channel is itself
    unitary, and the Choi SDP otherwise.
    """
    u = as_matrix(u, "target")
    if not linalg.is_unitary(u):
        raise ValueError("target must be unitary")
    program = phi if isinstance(phi, ProgramState) else ProgramState(np.asarray(phi, dtype=complex))
    induced = quantum.induced_program_channel(p, program)
    single = _single_unitary_kraus(induced)
    if single is not None:
        err = distances.unitary_diamond_distance(single, u)
        return ProgrammingErrorReport(u, program, min(err, 1.0), "closed_form")
    report = distances.diamond_distance(induced, quantum.unitary_channel(u), tol)
    return ProgrammingErrorReport(u, program, min(report.value, 1.0), "sdp", report.converged)


@dataclass(frozen=True)
class ProgramSearch:
    program: ProgramState
    proxy_fidelity: float
    degenerate: bool
    spectrum: np.ndarray


def best_program_state(p: Processor, u, label: str = "") -> ProgramSearch:
    """Heuristic program maximizing the entanglement fidelity of the induced
    channel with the target.

    The entanglement fidelity is the quadratic form ⟨φ|R|φ⟩ with a PSD R, so
    the search is the top eigenvector of R.  Degenerate top eigenspaces are
    resolved deterministically by projecting the first standard basis vector
    with nonzero projection onto the eigenspace; the result is flagged.  The
    returned program is a proxy; certification always goes through
    ``programming_error``.
    """
    u = as_matrix(u, "target")
    d, m = p.d, p.m
    r = np.zeros((m, m), dtype=complex)
    for k in p.channel.kraus:
        t = k.reshape(d, m, d, m)
        mat = np.einsum("ab,ajbi->ji", u.conj(), t)
        r += dagger(mat) @ mat
    r /= d * d
    w, v = np.linalg.eigh(r)
    top = w[-1]
    degenerate = bool(w.size > 1 and top - w[-2] <= 1e-9 * max(top, 1e-300))
    if degenerate:
        # project standard basis vectors onto the top eigenspace, take the
        # first with nonzero projection (canonical ordering)
        sel = w >= top - 1e-9 * max(top, 1e-300)
        basis = v[:, sel]
        vec = None
        for j in range(m):
            cand = basis @ basis[j, :].conj()
            if np.linalg.norm(cand) > 1e-9:
                vec = cand / np.linalg.norm(cand)
                break
        if vec is None:
            vec = v[:, -1]
    else:
        vec = v[:, -1]
    anchor = int(np.argmax(np.abs(vec)))
    phase = vec[anchor] / abs(vec[anchor])
    vec = vec * phase.conj()
    return ProgramSearch(ProgramState(vec, label), float(top), degenerate, w)


def certified_best_program_error(p: Processor, u, tol: float = 1e-7) -> ProgrammingErrorReport:
    search = best_program_state(p, u)
    return programming_error(p, u, search.program, tol)


def net_best_member(net: UnitaryNet, u) -> tuple[int, float]:
    """Best net member for a target, by entanglement fidelity |Tr(U†U_i)|.

    Equivalent to the top eigenvector of the program search on the controlled
    processor, which is diagonal in the member basis; works for nets far too
    large to materialize as processors.
    """
    u = as_matrix(u, "target")
    overlaps = np.abs(np.einsum("nab,ab->n", net.members, u.conj()))
    idx = int(np.argmax(overlaps))
    return idx, float(overlaps[idx])


def net_programming_error(net: UnitaryNet, u) -> ProgrammingErrorReport:
    """Certified best-program error of the controlled-net processor for a
    target, via the unitary closed form on the best member."""
    u = as_matrix(u, "target")
    idx, _ = net_best_member(net, u)
    err = distances.unitary_diamond_distance(net.members[idx], u)
    program = np.zeros(len(net), dtype=complex)
    program[idx] = 1.0
    return ProgrammingErrorReport(u, ProgramState(program), min(err, 1.0), "closed_form")


# ----------------------------------------------------------------------------
# Russo–Dye and the contraction → processor synthesis


def russo_dye_decompose(t) -> tuple[np.ndarray, np.ndarray]:
    """Write a contraction as the average of two unitaries.

    With T = A Σ B† and every singular value s = cos θ, the factors
    W± = A diag(e^{±iθ}) B† are unitary and (W₊ + W₋)/2 = T.
    """
    t = as_matrix(t, "contraction")
    if t.shape[0] != t.shape[1]:
        raise ValueError("contraction must be square")
    a, s, bh = np.linalg.svd(t)
    if s.size and s[0] > 1.0 + 1e-10:
        raise ValueError(f"operator norm {s[0]:.3e} exceeds 1")
    theta = np.arccos(np.clip(s, 0.0, 1.0))
    w_plus = a @ np.diag(np.exp(1j * theta)) @ bh
    w_minus = a @ np.diag(np.exp(-1j * theta)) @ bh
    return w_plus, w_minus


@dataclass
class SynthesisResult:
    """Processor synthesized from a contraction realizing an embedding.

    The processor memory is ordered (m, index, m̄): the original memory
    register, the 2-dimensional Russo–Dye index register, and the
    purification register.
    """

    processor: Processor
    achieved_delta: float
    predicted_epsilon: float
    d: int
    m: int
    t_matrix: np.ndarray
    record: dict = field(default_factory=dict)

    def memory_dim(self) -> int:
        return self.processor.m


def embedding_matrix(t, d: int, m: int, transpose: bool = True) -> np.ndarray:
    """Matrix of Φ_T: S₁(H_d) → B(H_m) over row-major vectorizations."""
    t = as_matrix(t, "t")
    if t.shape != (d * m, d * m):
        raise ValueError(f"expected {(d * m,) * 2} matrix, got {t.shape}")
    tt = t.reshape(d, m, d, m)
    # Φ(σ)[k,l] = Σ_ab tt[a,k,b,l] (σ^T)[b,a]
    f = tt.transpose(1, 3, 2, 0).reshape(m * m, d * d)
    if transpose:
        # column index (b, a) contracts σ^T[b,a] = σ[a,b]: swap to (a, b)
        f = f.reshape(m * m, d, d).transpose(0, 2, 1).reshape(m * m, d * d)
    return f


def synthesize_processor(
    t,
    d: int,
    m: int,
    delta: float | None = None,
    distortion_samples: int = 2000,
    seed: int = 7,
) -> SynthesisResult:
    """Build the Theorem-2 style processor V̄ = (W₊ ⊗ |0⟩⟨0| + W₋ ⊗ |1⟩⟨1|) ⊗ Id
    from a contraction T realizing Φ(σ) = Tr_d[T(σ^T ⊗ Id)].

    ``delta`` defaults to the measured embedding distortion of Φ_T
    (1 − sampled min ratio); the predicted programming accuracy is √(2δ).
    Maps that cannot be injective (m² < d²) are rejected.
    """
    from . import banach  # local import; banach depends on this module's types

    t = as_matrix(t, "contraction")
    if t.shape != (d * m, d * m):
        raise ValueError(f"expected a {(d * m,) * 2} contraction for (d, m) = {(d, m)}")
    if m * m < d * d:
        raise ValueError(
            f"Φ maps a d²={d * d} dimensional space into m²={m * m} dimensions; "
            "it cannot be injective, synthesis rejected"
        )
    check_dim(d * 2 * m * m)

    phi = banach.EmbeddingMap(t, d, m)
    if delta is None:
        report = banach.distortion(phi, samples=distortion_samples, seed=seed)
        delta = 1.0 - report.sampled_min_ratio
    delta = float(delta)

    w_plus, w_minus = russo_dye_decompose(t)
    members = np.array([w_plus, w_minus])
    v = controlled_unitary(members)  # on (d, m, index)
    v_bar = np.kron(v, np.eye(m, dtype=complex))  # append purification register
    processor = unitary_processor(v_bar, d, 2 * m * m)

    f = embedding_matrix(t, d, m)
    svals = np.linalg.svd(f, compute_uv=False)
    record = {
        "map_rank": int(np.sum(svals > 1e-10 * max(svals[0], 1e-300))),
        "map_sigma_min": float(svals[-1]),
        "map_sigma_max": float(svals[0]),
        "distortion_samples": distortion_samples if delta is not None else 0,
    }
    return SynthesisResult(
        processor=processor,
        achieved_delta=delta,
        predicted_epsilon=float(np.sqrt(2.0 * delta)),
        d=d,
        m=m,
        t_matrix=t,
        record=record,
    )


def synthesized_program(result: SynthesisResult, u, label: str = "") -> tuple[ProgramState, dict]:
    """Program state of the synthesized processor for a target unitary.

    The trace functional σ ↦ Tr(Uσ) is pulled back through Φ by least squares
    (minimum-norm inverse on the image, zero on the Hilbert–Schmidt
    orthocomplement), normalized in trace norm, purified, and woven with the
    equal-weight Russo–Dye index register.  The achieved functional quality
    (1 − δ_U) is measured exactly as the smallest eigenvalue of the pulled
    back observable and reported alongside.
    """
    u = as_matrix(u, "target")
    d, m = result.d, result.m
    if u.shape != (d, d) or not linalg.is_unitary(u):
        raise ValueError("target must be a d×d unitary")
    f = embedding_matrix(result.t_matrix, d, m)

    # solve Fᵀ w = t in the least-squares sense; minimal-norm w vanishes on
    # the orthocomplement of the image
    t_vec = u.T.reshape(-1)
    w_vec, *_ = np.linalg.lstsq(f.T, t_vec, rcond=None)
    residual = float(np.linalg.norm(f.T @ w_vec - t_vec))
    b_mat = w_vec.reshape(m, m)
    b_trace_norm = linalg.trace_norm(b_mat)
    if b_trace_norm < 1e-300:
        raise ValueError("pulled-back functional vanishes; target not representable")
    a_mat = b_mat.T / b_trace_norm

    # purify A = Σ μ_i |α_i⟩⟨β_i| into |ξ⟩ on (m, m̄)
    al, mu, ber = np.linalg.svd(a_mat)
    xi = (al * np.sqrt(mu)).reshape(m, m)  # xi[a, i] = sqrt(mu_i) α_i[a]

    # memory layout (m, index, m̄): weave the equal-weight index register
    inv_rt2 = 1.0 / np.sqrt(2.0)
    phi_vec = np.einsum("ab,i->aib", xi, np.array([inv_rt2, inv_rt2])).reshape(-1)
    phi_vec = phi_vec / np.linalg.norm(phi_vec)
    program = ProgramState(phi_vec, label)

    # measured guarantee: value(ρ) = Tr(G ρ) with G the pulled-back observable
    g_row = (a_mat.T.reshape(-1) @ f) @ np.kron(np.eye(d), u.conj())
    g_mat = g_row.reshape(d, d).T
    quality = float(np.linalg.eigvalsh(linalg.hermitian_part(g_mat))[0])
    quality = max(min(quality, 1.0), -1.0)
    bound = float(np.sqrt(max(1.0 - quality * quality, 0.0))) if quality > 0 else 1.0
    info = {
        "pullback_residual": residual,
        "functional_trace_norm": float(b_trace_norm),
        "quality": quality,
        "per_target_error_bound": bound,
        "below_target": bool(quality < 1.0 - result.achieved_delta - 1e-9),
    }
    return program, info
