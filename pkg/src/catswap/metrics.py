"""Entanglement and quality metrics for the swapped state.

Two independent routes are kept side by side on purpose:

* the *engine* computes everything (partial traces, purity, linear
  entropy, fidelity) directly from the state algebra, with every
  normalization constant produced by ``norm``;
* ``closed_form_entropy`` and ``closed_form_fidelity`` are frozen
  transcriptions of the protocol's closed-form expressions, kept exactly
  as written, term for term, never simplified or corrected.

``audit_formulas`` evaluates both against the brute-force Fock oracle and
flags every grid point where the transcription disagrees with the engine.
The closed-form entropy genuinely disagrees (at eta = 1 it returns
exp(-2 alpha^2) where the exact reduced-state value is 1/2); surfacing
that is the audit's job, so the transcription must stay as printed.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .optics import ChannelParams, loss_apply
from .protocol import entangle_pair, qbsm_project
from .states import (
    DegenerateStateError,
    DyadTerm,
    MixedState,
    ModeId,
    PureState,
    _product_overlap,
    merge_dyads,
    normalize,
    pure_state,
    tensor,
    to_density,
    trace,
)

TRACE_TOL = 1e-8
FLAG_TOL = 1e-6     # engine vs closed-form discrepancy flag threshold
ORACLE_TOL = 1e-8   # required engine vs oracle agreement

FIDELITY_CASES = ("fig4a", "fig4b", "fig4c", "zero")


def partial_trace(rho: MixedState, traced_modes) -> MixedState:
    """Trace out the given modes: each dyad (w, ket, bra) picks up the
    factor prod_k <bra_k|ket_k> over the traced modes and loses those
    components.  Trace and hermiticity are preserved.
    """
    traced = set(traced_modes)
    unknown = traced - set(rho.modes)
    if unknown:
        raise ValueError(f"cannot trace unknown modes {sorted(unknown)}")
    idx = [i for i, m in enumerate(rho.modes) if m in traced]
    kept = [i for i, m in enumerate(rho.modes) if m not in traced]
    out_modes = tuple(rho.modes[i] for i in kept)
    dyads = []
    for d in rho.dyads:
        factor = _product_overlap(
            tuple(d.bra[i] for i in idx), tuple(d.ket[i] for i in idx))
        dyads.append(DyadTerm(
            d.coeff * factor,
            tuple(d.ket[i] for i in kept),
            tuple(d.bra[i] for i in kept)))
    return merge_dyads(MixedState(out_modes, tuple(dyads)))


def purity(rho: MixedState) -> float:
    """Tr rho^2 via dyad-pair overlap sums; requires unit trace."""
    t = trace(rho)
    if abs(t - 1.0) > TRACE_TOL:
        raise ValueError(f"purity needs unit trace, got {t}")
    out = 0.0 + 0.0j
    for p in rho.dyads:
        for q in rho.dyads:
            out += (p.coeff * q.coeff
                    * _product_overlap(p.bra, q.ket)
                    * _product_overlap(q.bra, p.ket))
    return out.real


def linear_entropy(rho: MixedState) -> float:
    """S = 1 - Tr rho^2 of an already-reduced state."""
    return 1.0 - purity(rho)


# --- the lossy swap pipeline -------------------------------------------------

PIPE_MODES = ("A", "B", "E1", "E2", "C", "D", "E3", "E4")


@dataclass(frozen=True)
class LossySwapResult:
    state: PureState        # normalized post-measurement state, env modes included
    success_weight: float   # squared norm of the raw projection


def default_beta(alpha: complex) -> complex:
    """Measurement amplitude matching the split signal amplitude."""
    return alpha / math.sqrt(2)


def lossy_swap_pipeline(alpha: complex, eta: float,
                        beta: complex | None = None) -> LossySwapResult:
    """Produce two entangled pairs on (A,B) and (C,D), pass all four
    location modes through loss channels of transmittance eta, then swap
    via the projective measurement on (B, C).

    Returns the normalized six-mode state on (A, D, E1, E2, E3, E4) and the
    projection's success weight.  At eta == 0 the measurement outcome has
    exactly zero probability (the odd measurement state is orthogonal to
    vacuum), so the state is built as the eta -> 0 limit of the normalized
    residual, with success weight reported as 0.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta {eta} outside [0, 1]")
    if beta is None:
        beta = default_beta(alpha)
    ap = alpha / math.sqrt(2)

    if eta == 0.0:
        # Limit state: locations in vacuum, environments keep the +- branches.
        raw = pure_state(
            ("A", "D", "E1", "E2", "E3", "E4"),
            [(1.0, (0.0, 0.0, ap, ap, ap, ap)),
             (-1.0, (0.0, 0.0, -ap, -ap, -ap, -ap))])
        return LossySwapResult(normalize(raw), 0.0)

    left = entangle_pair(alpha, "A", "B")
    left = loss_apply(left, ChannelParams(eta, "A", "E1"))
    left = loss_apply(left, ChannelParams(eta, "B", "E2"))
    right = entangle_pair(alpha, "C", "D")
    right = loss_apply(right, ChannelParams(eta, "C", "E3"))
    right = loss_apply(right, ChannelParams(eta, "D", "E4"))
    outcome = qbsm_project(tensor(left, right), "B", "C", beta)
    return LossySwapResult(outcome.normalized, outcome.success_weight)


def swapped_density(alpha: complex, eta: float,
                    beta: complex | None = None) -> MixedState:
    """Density operator of the swapped pair on (A, D) after tracing the
    four environment modes."""
    res = lossy_swap_pipeline(alpha, eta, beta)
    rho = to_density(res.state)
    return partial_trace(rho, {"E1", "E2", "E3", "E4"})


def entropy_ad(alpha: complex, eta: float, beta: complex | None = None) -> float:
    """Engine value of S = 1 - Tr rho_A^2 for the swapped pair: the degree
    of entanglement between location A and everything else (location D
    plus the environment modes)."""
    rho_ad = swapped_density(alpha, eta, beta)
    rho_a = partial_trace(rho_ad, {"D"})
    return linear_entropy(rho_a)


# --- fidelity ----------------------------------------------------------------

@dataclass(frozen=True)
class FidelityTarget:
    """Two-term coherent target (|beta>|gamma> + e^{i phi}|omega>|mu>)/sqrt(L)
    on an ordered mode pair."""
    beta: complex
    gamma: complex
    omega: complex
    mu: complex
    phi: float


def target_for_case(case: str, alpha_prime: complex) -> FidelityTarget:
    """Named target families, all parameterized by the split amplitude."""
    ap = alpha_prime
    if case == "fig4a":
        return FidelityTarget(ap, ap, -ap, -ap, math.pi)
    if case == "fig4b":
        return FidelityTarget(ap, ap, -ap, -ap, 0.0)
    if case == "fig4c":
        return FidelityTarget(ap, -ap, -ap, ap, 0.0)
    if case == "zero":
        return FidelityTarget(ap, -ap, -ap, ap, math.pi)
    raise ValueError(f"unknown fidelity case {case!r}; expected one of {FIDELITY_CASES}")


def target_state(target: FidelityTarget, mode_a: ModeId, mode_d: ModeId) -> PureState:
    """Build and normalize the target; the normalization constant L comes
    out of norm(), not from a transcription."""
    raw = pure_state(
        (mode_a, mode_d),
        [(1.0, (target.beta, target.gamma)),
         (cmath.exp(1j * target.phi), (target.omega, target.mu))])
    try:
        return normalize(raw)
    except DegenerateStateError:
        raise DegenerateStateError("fidelity target has vanishing norm") from None


def fidelity(rho: MixedState, target: FidelityTarget) -> float:
    """F = <Phi|rho|Phi> for a two-mode density operator."""
    if len(rho.modes) != 2:
        raise ValueError(f"fidelity needs a two-mode state, got modes {rho.modes}")
    phi = target_state(target, rho.modes[0], rho.modes[1])
    out = 0.0 + 0.0j
    for d in rho.dyads:
        amp_ket = sum(t.coeff.conjugate() * _product_overlap(t.amps, d.ket)
                      for t in phi.terms)
        amp_bra = sum(t.coeff * _product_overlap(d.bra, t.amps)
                      for t in phi.terms)
        out += d.coeff * amp_ket * amp_bra
    return out.real


def fidelity_ad(alpha: complex, eta: float, case: str = "fig4a",
                beta: complex | None = None,
                target: FidelityTarget | None = None) -> float:
    """Engine fidelity of the swapped (A, D) state against a named case
    target (or an explicit one)."""
    rho = swapped_density(alpha, eta, beta)
    if target is None:
        target = target_for_case(case, default_beta(alpha))
    return fidelity(rho, target)


# --- frozen closed-form transcriptions ---------------------------------------

def closed_form_entropy(alpha: float, eta: float) -> float:
    """Closed-form linear entropy of the swapped pair, transcribed exactly
    as the audited expression states it.  Do not simplify: the audit
    compares this verbatim form against the engine and the Fock oracle,
    and the disagreement (e.g. eta = 1 giving exp(-2 alpha^2) instead of
    the exact 1/2) is the finding it exists to expose.
    """
    a2 = abs(alpha) ** 2
    ap2 = a2 / 2.0                      # |alpha'|^2 with alpha' = alpha/sqrt(2)
    n_prime = 2.0 * (1.0 - math.exp(4.0 * (eta - 2.0) * ap2))
    if n_prime <= 1e-30:
        raise DegenerateStateError("degenerate normalization in closed-form entropy")
    bracket = (1.0
               - 4.0 * math.exp(-4.0 * a2) * math.exp(2.0 * eta * a2)
               + math.exp(-8.0 * a2) * math.exp(6.0 * eta * a2)
               + math.exp(-2.0 * eta * a2)
               + math.exp(-8.0 * a2) * math.exp(4.0 * eta * a2))
    return 1.0 - (2.0 / n_prime) * bracket


def closed_form_fidelity(alpha: float, eta: float, target: FidelityTarget) -> float:
    """Closed-form fidelity of the swapped pair against the two-term
    target, transcribed term for term (eight overlap-product groups plus
    the cos(phi) block).  sigma = alpha' * sqrt(eta) is computed
    internally and is never a free input.
    """
    ap = alpha / math.sqrt(2.0)
    ap2 = abs(ap) ** 2
    sigma = ap * math.sqrt(eta)
    b, g, o, m = target.beta, target.gamma, target.omega, target.mu
    phi = target.phi
    n_prime = 2.0 * (1.0 - math.exp(4.0 * (eta - 2.0) * ap2))
    big_l = 2.0 * (1.0 + math.exp(-0.5 * abs(b - o) ** 2)
                   * math.exp(-0.5 * abs(g - m) ** 2) * math.cos(phi))
    if big_l <= 1e-30 or n_prime <= 1e-30:
        raise DegenerateStateError("degenerate normalization in closed-form fidelity")
    env = math.exp(-8.0 * (1.0 - eta) * ap2)

    def e(x) -> float:
        return math.exp(-abs(x) ** 2)

    def h(x) -> float:
        return math.exp(-0.5 * abs(x) ** 2)

    total = (
        e(b - sigma) * e(g - sigma)
        + e(b + sigma) * e(g + sigma)
        - 2.0 * h(b - sigma) * h(b + sigma) * h(g - sigma) * h(g + sigma) * env
        + 2.0 * math.cos(phi) * (
            h(b - sigma) * h(o - sigma) * h(g - sigma) * h(m - sigma)
            + h(b + sigma) * h(o + sigma) * h(g + sigma) * h(m + sigma)
            - (h(b - sigma) * h(o + sigma) * h(g - sigma) * h(m + sigma)
               + h(b + sigma) * h(o - sigma) * h(g + sigma) * h(m - sigma)) * env)
        + e(o - sigma) * e(m - sigma)
        + e(o + sigma) * e(m + sigma)
        - 2.0 * h(o - sigma) * h(o + sigma) * h(m - sigma) * h(m + sigma) * env
    )
    return total / (big_l * n_prime)


# --- audit -------------------------------------------------------------------

@dataclass(frozen=True)
class AuditRow:
    """One grid point of the three-way comparison.  ``flag`` marks
    engine vs closed-form discrepancies; rows are only trustworthy when
    |engine - oracle| stays below the oracle tolerance."""
    alpha: float
    eta: float
    engine: float
    closed_form: float
    oracle: float
    flag: bool


def audit_formulas(alphas, etas, quantity: str = "entropy",
                   case: str = "fig4a", beta: complex | None = None,
                   cutoff: int | None = None,
                   flag_tol: float = FLAG_TOL) -> list[AuditRow]:
    """Evaluate engine, closed-form transcription, and Fock oracle on the
    (eta, alpha) grid.  quantity is 'entropy' or 'fidelity' (the latter
    for one named target case).  Rows are ordered by (eta, alpha).
    """
    from . import fock  # deferred: fock pulls in this module for cross-checks

    if quantity not in ("entropy", "fidelity"):
        raise ValueError(f"unknown audit quantity {quantity!r}")
    rows = []
    for eta in sorted(float(e) for e in etas):
        for alpha in sorted(float(a) for a in alphas):
            b = default_beta(alpha) if beta is None else beta
            report = fock.lossy_swap_report(alpha, eta, b, cutoff)
            if quantity == "entropy":
                engine = entropy_ad(alpha, eta, b)
                closed = closed_form_entropy(alpha, eta)
                oracle = report.entropy_a
            else:
                target = target_for_case(case, default_beta(alpha))
                engine = fidelity_ad(alpha, eta, case, b)
                closed = closed_form_fidelity(alpha, eta, target)
                oracle = report.case_fidelity(case)
            rows.append(AuditRow(
                alpha=alpha, eta=eta, engine=engine, closed_form=closed,
                oracle=oracle, flag=abs(engine - closed) > flag_tol))
    return rows
