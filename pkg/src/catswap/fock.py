"""Brute-force verifier in a truncated number basis.

Everything here is deliberately independent of the closed-form engine:
states are dense vectors over number states, the beam splitter is the
exponential of its two-mode generator, loss is a beam splitter against a
vacuum ancilla followed by a partial trace, and reductions are index
summations.  The cross-check entry points compare both routes scalar by
scalar and report the worst deviation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .states import ModeId, PureState

MAX_ENTRIES = 2 ** 26      # refuse tensors larger than this many complex entries
TAIL_BUDGET = 1e-12        # largest tolerated per-mode truncation tail


class TailBudgetError(ValueError):
    """Cutoff too small for the amplitudes in play."""


class MemoryBudgetError(ValueError):
    """Requested tensor would exceed the entry budget."""


def cutoff_for(*amps: complex) -> int:
    """Cutoff rule: ceil(lmax + 10 sqrt(lmax + 1) + 20) with lmax the
    largest |amplitude|^2 anywhere in the pipeline.  Keeps every coherent
    tail below the tail budget with margin."""
    lmax = max((abs(a) ** 2 for a in amps), default=0.0)
    return math.ceil(lmax + 10.0 * math.sqrt(lmax + 1.0) + 20.0)


def _poisson_tail(lam: float, cutoff: int) -> float:
    p = math.exp(-lam)
    total = p
    for n in range(1, cutoff + 1):
        p *= lam / n
        total += p
    return max(1.0 - total, 0.0)


def check_tail(amp: complex, cutoff: int) -> None:
    tail = _poisson_tail(abs(amp) ** 2, cutoff)
    if tail > TAIL_BUDGET:
        raise TailBudgetError(
            f"cutoff {cutoff} leaves tail {tail:.3e} > {TAIL_BUDGET} "
            f"for amplitude {amp}")


def check_entries(n_entries: int) -> None:
    if n_entries > MAX_ENTRIES:
        raise MemoryBudgetError(
            f"tensor of {n_entries} complex entries exceeds budget {MAX_ENTRIES}")


def coherent_column(alpha: complex, cutoff: int) -> np.ndarray:
    """Truncated number-basis expansion exp(-|a|^2/2) a^n / sqrt(n!)."""
    check_tail(alpha, cutoff)
    v = np.zeros(cutoff + 1, dtype=complex)
    v[0] = math.exp(-abs(alpha) ** 2 / 2.0)
    for n in range(1, cutoff + 1):
        v[n] = v[n - 1] * alpha / math.sqrt(n)
    return v


@dataclass(frozen=True)
class FockState:
    modes: tuple[ModeId, ...]
    cutoff: int
    tensor: np.ndarray      # shape (cutoff+1,) * len(modes)

    def mode_index(self, mode: ModeId) -> int:
        return self.modes.index(mode)


@dataclass(frozen=True)
class FockDensity:
    modes: tuple[ModeId, ...]
    cutoff: int
    matrix: np.ndarray      # shape (d**m, d**m)


def encode(x: PureState, cutoff: int) -> FockState:
    """Per-mode coherent expansion of every term, tensor-assembled."""
    d = cutoff + 1
    check_entries(d ** len(x.modes))
    out = np.zeros((d,) * len(x.modes), dtype=complex)
    for t in x.terms:
        piece = np.array([t.coeff], dtype=complex)
        for a in t.amps:
            piece = np.kron(piece, coherent_column(a, cutoff))
        out += piece.reshape((d,) * len(x.modes))
    return FockState(tuple(x.modes), cutoff, out)


def fock_norm(x: FockState) -> float:
    return float(np.linalg.norm(x.tensor))


def fock_inner(x: FockState, y: FockState) -> complex:
    if x.modes != y.modes or x.cutoff != y.cutoff:
        raise ValueError("operands must share modes and cutoff")
    return complex(np.vdot(x.tensor, y.tensor))


def bs_unitary(theta: float, cutoff: int) -> np.ndarray:
    """exp(theta (a b^dag - a^dag b)) on the truncated two-mode space.

    The generator conserves total photon number, so the exponential is
    assembled block by block over the number sectors; each block is the
    exponential of a small real antisymmetric matrix, hence the result is
    unitary to machine precision.
    """
    d = cutoff + 1
    check_entries(d ** 4)
    U = np.zeros((d * d, d * d), dtype=complex)
    for s in range(2 * d - 1):
        ms = np.arange(max(0, s - d + 1), min(s, d - 1) + 1)
        dim = len(ms)
        K = np.zeros((dim, dim))
        for i, m in enumerate(ms):
            n = s - m
            if i > 0:
                K[i - 1, i] = math.sqrt(m * (n + 1))   # (m,n) -> (m-1, n+1)
            if i < dim - 1:
                K[i + 1, i] = -math.sqrt((m + 1) * n)  # (m,n) -> (m+1, n-1)
        idx = ms * d + (s - ms)
        U[np.ix_(idx, idx)] = expm(theta * K)
    return U


def fock_bs(x: FockState, mode_a: ModeId, mode_b: ModeId, theta: float) -> FockState:
    ia, ib = x.mode_index(mode_a), x.mode_index(mode_b)
    d = x.cutoff + 1
    U = bs_unitary(theta, x.cutoff).reshape(d, d, d, d)
    t = np.tensordot(U, x.tensor, axes=([2, 3], [ia, ib]))
    return FockState(x.modes, x.cutoff, np.moveaxis(t, [0, 1], [ia, ib]))


def attach_vacuum(x: FockState, mode: ModeId) -> FockState:
    if mode in x.modes:
        raise ValueError(f"mode {mode!r} already present")
    d = x.cutoff + 1
    check_entries(d ** (len(x.modes) + 1))
    vac = np.zeros(d, dtype=complex)
    vac[0] = 1.0
    t = np.tensordot(x.tensor, vac, axes=0)
    return FockState(x.modes + (mode,), x.cutoff, t)


def fock_loss(x: FockState, sys_mode: ModeId, env_mode: ModeId, eta: float) -> FockState:
    """Loss as a beam splitter of angle arccos(sqrt(eta)) against a fresh
    vacuum mode; structurally independent of the engine's amplitude split."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta {eta} outside [0, 1]")
    y = attach_vacuum(x, env_mode)
    return fock_bs(y, sys_mode, env_mode, math.acos(math.sqrt(eta)))


def to_fock_density(x: FockState) -> FockDensity:
    v = x.tensor.ravel()
    check_entries(v.size ** 2)
    return FockDensity(x.modes, x.cutoff, np.outer(v, v.conj()))


def fock_partial_trace(rho: FockDensity, traced_modes) -> FockDensity:
    traced = set(traced_modes)
    unknown = traced - set(rho.modes)
    if unknown:
        raise ValueError(f"cannot trace unknown modes {sorted(unknown)}")
    d = rho.cutoff + 1
    m = len(rho.modes)
    t = rho.matrix.reshape((d,) * (2 * m))
    modes = list(rho.modes)
    for mode in [mm for mm in rho.modes if mm in traced]:
        i = modes.index(mode)
        k = len(modes)
        t = np.trace(t, axis1=i, axis2=k + i)
        modes.pop(i)
    dim = d ** len(modes)
    return FockDensity(tuple(modes), rho.cutoff, t.reshape(dim, dim))


def fock_purity(rho: FockDensity) -> float:
    return float(np.sum(rho.matrix * rho.matrix.T).real)


def fock_fidelity(rho: FockDensity, target: FockState) -> float:
    t = target.tensor.ravel()
    return float((t.conj() @ (rho.matrix @ t)).real)


# --- oracle pipelines ---------------------------------------------------------

def _cat_column(alpha: complex, cutoff: int) -> np.ndarray:
    v = coherent_column(alpha, cutoff) - coherent_column(-alpha, cutoff)
    return v / np.linalg.norm(v)


def _qbs_matrix(amp: complex, cutoff: int) -> np.ndarray:
    """Normalized two-mode (|a>|a> - |-a>|-a>) as a (d, d) coefficient grid."""
    p = coherent_column(amp, cutoff)
    m = coherent_column(-amp, cutoff)
    g = np.outer(p, p) - np.outer(m, m)
    return g / np.linalg.norm(g)


def oracle_entangled_pair(alpha: complex, cutoff: int) -> FockState:
    """Cat plus vacuum through the 50:50 splitter, built from first
    principles (coherent columns and the exponentiated generator)."""
    d = cutoff + 1
    vac = np.zeros(d, dtype=complex)
    vac[0] = 1.0
    v = np.kron(_cat_column(alpha, cutoff), vac)
    out = bs_unitary(math.pi / 4.0, cutoff) @ v
    return FockState(("A", "B"), cutoff, out.reshape(d, d))


@dataclass(frozen=True)
class SwapOracle:
    success_weight: float
    fidelity_vs_ideal: float
    residual: FockState      # normalized, on (A, D)


def swap_oracle(alpha: complex, beta: complex, cutoff: int | None = None) -> SwapOracle:
    """Lossless four-mode construction, projective contraction on (B, C)."""
    if cutoff is None:
        cutoff = cutoff_for(alpha, beta)
    d = cutoff + 1
    check_entries(d ** 4)
    pair = oracle_entangled_pair(alpha, cutoff).tensor
    psi = np.einsum("ab,cd->abcd", pair, pair)
    meas = _qbs_matrix(beta, cutoff)
    res = np.tensordot(meas.conj(), psi, axes=([0, 1], [1, 2]))
    w = float(np.linalg.norm(res) ** 2)
    resn = res / np.linalg.norm(res)
    ideal = _qbs_matrix(alpha / math.sqrt(2.0), cutoff)
    fid = float(abs(np.vdot(ideal, resn)) ** 2)
    return SwapOracle(w, fid, FockState(("A", "D"), cutoff, resn))


def _lossy_pair_tensor(alpha: complex, eta: float, cutoff: int) -> FockState:
    """Four-mode vector (sys1, sys2, env1, env2) after the splitter and two
    loss channels."""
    fs = oracle_entangled_pair(alpha, cutoff)
    fs = fock_loss(fs, "A", "X1", eta)
    fs = fock_loss(fs, "B", "X2", eta)
    # reorder to (A, B, X1, X2)
    perm = [fs.mode_index(m) for m in ("A", "B", "X1", "X2")]
    return FockState(("A", "B", "X1", "X2"), cutoff, np.transpose(fs.tensor, perm))


@dataclass(frozen=True)
class LossySwapReport:
    """All scalars of one lossy swapped state, computed in one pass."""
    alpha: float
    eta: float
    beta: float
    cutoff: int
    success_weight: float
    purity_ad: float
    entropy_a: float
    fid_a: float
    fid_b: float
    fid_c: float
    fid_zero: float

    def case_fidelity(self, case: str) -> float:
        return {"fig4a": self.fid_a, "fig4b": self.fid_b,
                "fig4c": self.fid_c, "zero": self.fid_zero}[case]


@lru_cache(maxsize=64)
def _lossy_swap_report(alpha: float, eta: float, beta: float, cutoff: int) -> LossySwapReport:
    d = cutoff + 1
    check_entries(d ** 4)
    ap = alpha / math.sqrt(2.0)

    # Halves after the measurement contraction: branch vectors on
    # (A, env, env) and (D, env, env), tagged by the measurement component.
    if eta == 0.0:
        # The odd measurement state is orthogonal to vacuum, so the
        # post-selected outcome has probability exactly zero here; the
        # state is the eta -> 0 limit of the normalized residual.
        vac = np.zeros(d, dtype=complex)
        vac[0] = 1.0
        half_a = {}
        for j in (+1, -1):
            env = coherent_column(j * ap, cutoff)
            half_a[j] = np.einsum("a,e,f->aef", vac, env, env)
        half_d = half_a
        weights = {+1: 1.0, -1: -1.0}
        success = 0.0
    else:
        pair = _lossy_pair_tensor(alpha, eta, cutoff).tensor
        nb = 2.0 * (1.0 - math.exp(-2.0 * abs(beta) ** 2))
        half_a = {}
        half_d = {}
        weights = {}
        for j in (+1, -1):
            bvec = coherent_column(j * beta, cutoff).conj()
            # measurement consumes the vacuum port of the left pair and the
            # cat port of the right pair
            half_a[j] = np.tensordot(bvec, pair, axes=(0, 1))  # (A, env, env)
            half_d[j] = np.tensordot(bvec, pair, axes=(0, 0))  # (D, env, env)
            weights[j] = j / math.sqrt(nb)
        success = None  # filled from the trace below

    rho = np.zeros((d * d, d * d), dtype=complex)
    for j in (+1, -1):
        for l in (+1, -1):
            aj = half_a[j].reshape(d, d * d)
            al = half_a[l].reshape(d, d * d)
            dj = half_d[j].reshape(d, d * d)
            dl = half_d[l].reshape(d, d * d)
            rho += (np.conjugate(weights[j]) * weights[l]
                    * np.kron(aj @ al.conj().T, dj @ dl.conj().T))
    tr = float(np.trace(rho).real)
    if success is None:
        success = tr
    rho /= tr

    rho_a = np.einsum("adbd->ab", rho.reshape(d, d, d, d))
    purity_ad = float(np.sum(rho * rho.T).real)
    entropy_a = 1.0 - float(np.sum(rho_a * rho_a.T).real)

    def target_vec(b, g, o, m, phi):
        t = (np.kron(coherent_column(b, cutoff), coherent_column(g, cutoff))
             + np.exp(1j * phi) * np.kron(coherent_column(o, cutoff),
                                          coherent_column(m, cutoff)))
        return t / np.linalg.norm(t)

    def fid(t):
        return float((t.conj() @ (rho @ t)).real)

    return LossySwapReport(
        alpha=alpha, eta=eta, beta=beta, cutoff=cutoff,
        success_weight=success,
        purity_ad=purity_ad,
        entropy_a=entropy_a,
        fid_a=fid(target_vec(ap, ap, -ap, -ap, math.pi)),
        fid_b=fid(target_vec(ap, ap, -ap, -ap, 0.0)),
        fid_c=fid(target_vec(ap, -ap, -ap, ap, 0.0)),
        fid_zero=fid(target_vec(ap, -ap, -ap, ap, math.pi)),
    )


def lossy_swap_report(alpha: complex, eta: float, beta: complex | None = None,
                      cutoff: int | None = None) -> LossySwapReport:
    if beta is None:
        beta = alpha / math.sqrt(2.0)
    if cutoff is None:
        cutoff = cutoff_for(alpha, beta)
    check_tail(alpha, cutoff)
    check_tail(beta, cutoff)
    return _lossy_swap_report(float(alpha.real if isinstance(alpha, complex) else alpha),
                              float(eta),
                              float(beta.real if isinstance(beta, complex) else beta),
                              int(cutoff))


# --- cross checks -------------------------------------------------------------

SCENARIOS = ("entangle", "swap", "lossy-swap", "entropy",
             "fidelity-a", "fidelity-b", "fidelity-c")


@dataclass(frozen=True)
class CrossCheck:
    scenario: str
    alpha: float
    eta: float
    beta: float
    cutoff: int
    deviations: tuple[tuple[str, float], ...]

    @property
    def max_deviation(self) -> float:
        return max((v for _, v in self.deviations), default=0.0)


def cross_check(scenario: str, alpha: float, eta: float = 1.0,
                beta: float | None = None, cutoff: int | None = None) -> CrossCheck:
    """Run one named scenario through both routes end to end and report
    the worst disagreement over all compared scalars."""
    from . import metrics, protocol
    from .states import tensor as state_tensor

    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")
    if beta is None:
        beta = alpha / math.sqrt(2.0)
    if cutoff is None:
        cutoff = cutoff_for(alpha, beta)
    devs: list[tuple[str, float]] = []

    if scenario == "entangle":
        eng = encode(protocol.entangle_pair(alpha, "A", "B"), cutoff)
        orc = oracle_entangled_pair(alpha, cutoff)
        devs.append(("pair overlap", abs(1.0 - abs(fock_inner(orc, eng)))))
        ref = encode(protocol.qbs_state(alpha / math.sqrt(2.0), "A", "B"), cutoff)
        devs.append(("ideal overlap", abs(1.0 - abs(fock_inner(orc, ref)))))
        devs.append(("norm", abs(1.0 - fock_norm(orc))))
    elif scenario == "swap":
        joint = state_tensor(protocol.entangle_pair(alpha, "A", "B"),
                             protocol.entangle_pair(alpha, "C", "D"))
        out = protocol.qbsm_project(joint, "B", "C", beta)
        orc = swap_oracle(alpha, beta, cutoff)
        devs.append(("success weight", abs(out.success_weight - orc.success_weight)))
        devs.append(("oracle fidelity vs ideal", abs(1.0 - orc.fidelity_vs_ideal)))
        eng = encode(out.normalized, cutoff)
        devs.append(("residual overlap",
                     abs(1.0 - abs(complex(np.vdot(orc.residual.tensor, eng.tensor))))))
    else:
        report = lossy_swap_report(alpha, eta, beta, cutoff)
        if scenario == "lossy-swap":
            res = metrics.lossy_swap_pipeline(alpha, eta, beta)
            rho = metrics.swapped_density(alpha, eta, beta)
            devs.append(("success weight",
                         abs(res.success_weight - report.success_weight)))
            devs.append(("purity", abs(metrics.purity(rho) - report.purity_ad)))
            target = metrics.target_for_case("fig4a", alpha / math.sqrt(2.0))
            devs.append(("fidelity vs ideal",
                         abs(metrics.fidelity(rho, target) - report.fid_a)))
        elif scenario == "entropy":
            devs.append(("entropy",
                         abs(metrics.entropy_ad(alpha, eta, beta) - report.entropy_a)))
        else:
            case = {"fidelity-a": "fig4a", "fidelity-b": "fig4b",
                    "fidelity-c": "fig4c"}[scenario]
            devs.append(("fidelity",
                         abs(metrics.fidelity_ad(alpha, eta, case, beta)
                             - report.case_fidelity(case))))

    return CrossCheck(scenario, float(alpha), float(eta), float(beta),
                      int(cutoff), tuple(devs))
