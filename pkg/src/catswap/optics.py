"""Linear-optical transformations on coherent superposition states.

Two operations cover everything the protocol needs: a beam splitter mixing
two modes, and photon loss modeled as an exact amplitude split against a
fresh vacuum environment mode (a beam splitter with cos(theta) = sqrt(eta)
against vacuum, applied in closed form).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .states import CoherentTerm, ModeId, ModeMismatchError, PureState


@dataclass(frozen=True)
class BeamSplitterParams:
    """Mixing angle and mode pair; cos^2(theta) is the transmissivity and
    sin^2(theta) the reflectivity."""
    theta: float
    mode_a: ModeId
    mode_b: ModeId

    def __post_init__(self):
        if self.mode_a == self.mode_b:
            raise ModeMismatchError("beam splitter needs two distinct modes")


@dataclass(frozen=True)
class ChannelParams:
    """Loss channel of transmittance eta acting on sys_mode, spilling into a
    fresh env_mode.  The optional (distance, attenuation_length) pair records
    where eta came from when it was derived from a propagation length."""
    eta: float
    sys_mode: ModeId
    env_mode: ModeId
    distance: float | None = None
    attenuation_length: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta {self.eta} outside [0, 1]")
        if self.sys_mode == self.env_mode:
            raise ModeMismatchError("environment mode must differ from system mode")

    @classmethod
    def from_distance(cls, distance: float, attenuation_length: float,
                      sys_mode: ModeId, env_mode: ModeId) -> "ChannelParams":
        eta = eta_from_distance(distance, attenuation_length)
        return cls(eta, sys_mode, env_mode, distance, attenuation_length)


def bs_apply(x: PureState, p: BeamSplitterParams) -> PureState:
    """Beam splitter on (mode_a, mode_b): per term,
    (a, b) -> (a cos t - b sin t, a sin t + b cos t).

    The sign convention sends input (a, 0) to (a cos t, a sin t).  The map
    is a real rotation of the amplitude pair, so all pairwise term overlaps
    and hence the norm are preserved exactly; coefficients are untouched.
    """
    ia = x.mode_index(p.mode_a)
    ib = x.mode_index(p.mode_b)
    c, s = math.cos(p.theta), math.sin(p.theta)
    out = []
    for t in x.terms:
        a, b = t.amps[ia], t.amps[ib]
        amps = list(t.amps)
        amps[ia] = a * c - b * s
        amps[ib] = a * s + b * c
        out.append(CoherentTerm(t.coeff, tuple(amps)))
    return PureState(x.modes, tuple(out))


def loss_apply(x: PureState, p: ChannelParams) -> PureState:
    """Loss channel: per term, the sys_mode amplitude a becomes a*sqrt(eta)
    while the appended env_mode carries a*sqrt(1-eta).  An isometry: the
    mode count grows by one and the norm is preserved exactly.
    """
    if p.env_mode in x.modes:
        raise ModeMismatchError(f"environment mode {p.env_mode!r} already present")
    isys = x.mode_index(p.sys_mode)
    rt, rr = math.sqrt(p.eta), math.sqrt(1.0 - p.eta)
    out = []
    for t in x.terms:
        a = t.amps[isys]
        amps = list(t.amps)
        amps[isys] = a * rt
        amps.append(a * rr)
        out.append(CoherentTerm(t.coeff, tuple(amps)))
    return PureState(x.modes + (p.env_mode,), tuple(out))


def eta_from_distance(distance: float, attenuation_length: float) -> float:
    """Transmittance exp(-distance / attenuation_length) of a fiber span."""
    if attenuation_length <= 0:
        raise ValueError("attenuation length must be positive")
    if distance < 0:
        raise ValueError("distance must be nonnegative")
    return math.exp(-distance / attenuation_length)
