"""Exact algebra for finite superpositions of multimode coherent states.

A pure state is a list of coherent product terms c * |a_1>|a_2>...|a_m|;
a mixed state is a list of dyads w * (|a_1>..)(<b_1|..).  Every inner
product reduces to the scalar Gaussian overlap of coherent amplitudes, so
norms, traces and density operators are computed in closed form with no
basis truncation.  All types are immutable; all operations are pure
functions of their inputs.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

ModeId = str

MERGE_TOL = 1e-12        # amplitude vectors closer than this (max component) merge
COEFF_DROP_REL = 1e-14   # relative coefficient threshold below which terms drop
DEGENERATE_NORM = 1e-30


class DegenerateStateError(ValueError):
    """State or projection with numerically vanishing norm."""


class ModeMismatchError(ValueError):
    """Operands disagree on their ordered mode lists."""


def overlap(a: complex, b: complex) -> complex:
    """Overlap <a|b> of two normalized coherent states.

    Closed form exp(-|a|^2/2 - |b|^2/2 + conj(a)*b).  The magnitude is
    exp(-|a-b|^2/2) <= 1, and overlap(a, a) == 1 exactly.
    """
    a = complex(a)
    b = complex(b)
    expo = a.conjugate() * b - 0.5 * (a.conjugate() * a).real - 0.5 * (b.conjugate() * b).real
    return cmath.exp(expo)


def _product_overlap(bra_amps, ket_amps) -> complex:
    """Product over modes of <bra_k|ket_k>."""
    out = 1.0 + 0.0j
    for x, y in zip(bra_amps, ket_amps):
        out *= overlap(x, y)
    return out


@dataclass(frozen=True)
class CoherentTerm:
    """One summand c * |a_1>...|a_m> of a pure state.

    ``amps`` holds one coherent amplitude per mode of the owning state;
    each single-mode factor |a_k> is the normalized coherent state.
    """
    coeff: complex
    amps: tuple[complex, ...]


@dataclass(frozen=True)
class PureState:
    modes: tuple[ModeId, ...]
    terms: tuple[CoherentTerm, ...]

    def mode_index(self, mode: ModeId) -> int:
        try:
            return self.modes.index(mode)
        except ValueError:
            raise ModeMismatchError(f"mode {mode!r} not in {self.modes}") from None


@dataclass(frozen=True)
class DyadTerm:
    """One summand w * (|ket_1>..|ket_m>)(<bra_1|..<bra_m|)."""
    coeff: complex
    ket: tuple[complex, ...]
    bra: tuple[complex, ...]


@dataclass(frozen=True)
class MixedState:
    modes: tuple[ModeId, ...]
    dyads: tuple[DyadTerm, ...]

    def mode_index(self, mode: ModeId) -> int:
        try:
            return self.modes.index(mode)
        except ValueError:
            raise ModeMismatchError(f"mode {mode!r} not in {self.modes}") from None


def pure_state(modes, terms) -> PureState:
    """Build a PureState from (coeff, amps) pairs, validating lengths."""
    modes = tuple(modes)
    if len(set(modes)) != len(modes):
        raise ModeMismatchError(f"duplicate mode ids in {modes}")
    built = []
    for coeff, amps in terms:
        amps = tuple(complex(a) for a in amps)
        if len(amps) != len(modes):
            raise ModeMismatchError(
                f"term has {len(amps)} amplitudes for {len(modes)} modes")
        built.append(CoherentTerm(complex(coeff), amps))
    return PureState(modes, tuple(built))


def coherent(alpha: complex, mode: ModeId) -> PureState:
    """Single coherent state |alpha> on one mode."""
    return pure_state((mode,), [(1.0, (alpha,))])


def vacuum(*modes: ModeId) -> PureState:
    """Vacuum on the given modes."""
    return pure_state(modes, [(1.0, (0.0,) * len(modes))])


def inner(x: PureState, y: PureState) -> complex:
    """<x|y> via the pairwise Gaussian-overlap expansion."""
    if x.modes != y.modes:
        raise ModeMismatchError(f"mode lists differ: {x.modes} vs {y.modes}")
    out = 0.0 + 0.0j
    for t in x.terms:
        for u in y.terms:
            out += t.coeff.conjugate() * u.coeff * _product_overlap(t.amps, u.amps)
    return out


def norm(x: PureState) -> float:
    return math.sqrt(max(inner(x, x).real, 0.0))


def normalize(x: PureState) -> PureState:
    n = norm(x)
    if n <= DEGENERATE_NORM:
        raise DegenerateStateError(f"norm {n} below {DEGENERATE_NORM}")
    return PureState(x.modes, tuple(CoherentTerm(t.coeff / n, t.amps) for t in x.terms))


def tensor(x, y):
    """Tensor product of two states over disjoint mode sets.

    Accepts two PureStates or two MixedStates; term count multiplies and
    norms are multiplicative.
    """
    common = set(x.modes) & set(y.modes)
    if common:
        raise ModeMismatchError(f"overlapping modes {sorted(common)}")
    modes = x.modes + y.modes
    if isinstance(x, PureState) and isinstance(y, PureState):
        terms = tuple(
            CoherentTerm(t.coeff * u.coeff, t.amps + u.amps)
            for t in x.terms for u in y.terms)
        return PureState(modes, terms)
    if isinstance(x, MixedState) and isinstance(y, MixedState):
        dyads = tuple(
            DyadTerm(p.coeff * q.coeff, p.ket + q.ket, p.bra + q.bra)
            for p in x.dyads for q in y.dyads)
        return MixedState(modes, dyads)
    raise TypeError("tensor requires two PureStates or two MixedStates")


def _amps_close(a, b, tol: float) -> bool:
    return all(abs(x - y) <= tol for x, y in zip(a, b))


def merge_terms(x: PureState, tol: float = MERGE_TOL) -> PureState:
    """Canonical form: sum coefficients of terms with equal amplitude
    vectors (max-component distance <= tol), then drop terms whose
    coefficient is negligible relative to the largest one.  Idempotent.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    reps: list[list] = []   # [amps, coeff]
    for t in x.terms:
        for rep in reps:
            if _amps_close(rep[0], t.amps, tol):
                rep[1] += t.coeff
                break
        else:
            reps.append([t.amps, t.coeff])
    max_c = max((abs(c) for _, c in reps), default=0.0)
    kept = tuple(CoherentTerm(c, amps) for amps, c in reps
                 if abs(c) >= COEFF_DROP_REL * max_c and abs(c) > 0.0)
    return PureState(x.modes, kept)


def merge_dyads(rho: MixedState, tol: float = MERGE_TOL) -> MixedState:
    """Dyad analogue of merge_terms: merge on (ket, bra) amplitude pairs."""
    reps: list[list] = []
    for d in rho.dyads:
        for rep in reps:
            if _amps_close(rep[0], d.ket, tol) and _amps_close(rep[1], d.bra, tol):
                rep[2] += d.coeff
                break
        else:
            reps.append([d.ket, d.bra, d.coeff])
    max_c = max((abs(c) for _, _, c in reps), default=0.0)
    kept = tuple(DyadTerm(c, k, b) for k, b, c in reps
                 if abs(c) >= COEFF_DROP_REL * max_c and abs(c) > 0.0)
    return MixedState(rho.modes, kept)


def to_density(x: PureState) -> MixedState:
    """|x><x| as a MixedState; trace equals norm(x)**2."""
    dyads = tuple(
        DyadTerm(ti.coeff * tj.coeff.conjugate(), ti.amps, tj.amps)
        for ti in x.terms for tj in x.terms)
    return merge_dyads(MixedState(x.modes, dyads))


def trace(rho: MixedState) -> complex:
    """Tr rho = sum of w * prod_k <bra_k|ket_k>."""
    out = 0.0 + 0.0j
    for d in rho.dyads:
        out += d.coeff * _product_overlap(d.bra, d.ket)
    return out


def normalize_trace(rho: MixedState) -> MixedState:
    t = trace(rho)
    if abs(t) <= DEGENERATE_NORM:
        raise DegenerateStateError(f"trace {t} below {DEGENERATE_NORM}")
    return MixedState(rho.modes, tuple(
        DyadTerm(d.coeff / t, d.ket, d.bra) for d in rho.dyads))


def scale(rho: MixedState, s: complex) -> MixedState:
    return MixedState(rho.modes, tuple(
        DyadTerm(d.coeff * s, d.ket, d.bra) for d in rho.dyads))


def hermiticity_defect(rho: MixedState) -> float:
    """Max |w - conj(w')| over dyads and their transposed partners.

    Zero (within tolerance) for every physical density operator produced
    by to_density or a partial trace.
    """
    worst = 0.0
    for d in rho.dyads:
        partner = None
        for e in rho.dyads:
            if _amps_close(e.ket, d.bra, MERGE_TOL) and _amps_close(e.bra, d.ket, MERGE_TOL):
                partner = e
                break
        if partner is None:
            worst = max(worst, abs(d.coeff))
        else:
            worst = max(worst, abs(d.coeff - partner.coeff.conjugate()))
    return worst


# --- line-oriented text serialization (for golden-file tests) ---------------

def _fmt(x: float) -> str:
    return format(x, ".17g")


def state_to_text(x: PureState) -> str:
    """Serialize: header line 'modes A B ...', then one term per line with
    coeff_re coeff_im followed by amp_re amp_im pairs, 17 significant digits.
    """
    lines = ["modes " + " ".join(x.modes)]
    for t in x.terms:
        fields = [_fmt(t.coeff.real), _fmt(t.coeff.imag)]
        for a in t.amps:
            fields.extend((_fmt(a.real), _fmt(a.imag)))
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"


def state_from_text(text: str) -> PureState:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("modes"):
        raise ValueError("missing 'modes' header line")
    modes = tuple(lines[0].split()[1:])
    terms = []
    for ln in lines[1:]:
        vals = [float(v) for v in ln.split()]
        if len(vals) != 2 + 2 * len(modes):
            raise ValueError(f"term line has {len(vals)} fields, "
                             f"expected {2 + 2 * len(modes)}")
        coeff = complex(vals[0], vals[1])
        amps = tuple(complex(vals[2 + 2 * k], vals[3 + 2 * k])
                     for k in range(len(modes)))
        terms.append((coeff, amps))
    return pure_state(modes, terms)
