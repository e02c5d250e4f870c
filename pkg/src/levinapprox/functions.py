"""Test functions on a set ``E`` and the ``--fn`` mini-language."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .realset import RealLineSet
from .taumetric import tau


@dataclass(frozen=True)
class SampledFunction:
    """Target function on ``E`` with its sup-norm over a dense sample of ``E``.

    ``rule`` is one of ``tau-pow``, ``rho-pow``, ``abs-pow``, ``const``,
    ``sinc`` or ``table``; ``params`` holds its parameters.
    """

    rule: str
    params: dict
    E: RealLineSet
    func: object = field(repr=False, compare=False)
    sup_norm: float = field(default=None, compare=False)

    def __post_init__(self):
        if self.sup_norm is None:
            x = self.E.grid(20001)
            extra = [v for k, v in self.params.items() if k == "x0"]
            if extra:
                x = np.union1d(x, extra)
            object.__setattr__(self, "sup_norm", float(np.max(np.abs(self(x)))))

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))

    @property
    def label(self):
        args = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.rule}:{args}" if args else self.rule


def tau_pow(E, x0, alpha):
    """``tau_E(x0, x)**alpha``.

    Discontinuous at the edges of ``J~_j`` whenever ``x0`` lies in some
    enlarged gap, because the distance itself jumps there.
    """
    return SampledFunction("tau-pow", {"x0": x0, "alpha": alpha}, E,
                           lambda x: tau(E, x0, x) ** alpha)


def rho_pow(lmap, x0, alpha):
    """``rho_E(x0, x)**alpha``; continuous, Hoelder-``alpha`` in ``rho_E`` by the triangle inequality."""
    return SampledFunction("rho-pow", {"x0": x0, "alpha": alpha}, lmap.E,
                           lambda x: lmap.rho(x0, x) ** alpha)


def abs_pow(E, x0, alpha):
    return SampledFunction("abs-pow", {"x0": x0, "alpha": alpha}, E,
                           lambda x: np.abs(x - x0) ** alpha)


def const(E, value):
    return SampledFunction("const", {"value": value}, E,
                           lambda x: np.full(np.shape(x), float(value)))


def sinc_bump(E, sigma, shift=0.0):
    """``sin(sigma (x - shift)) / (sigma (x - shift))``; exactly of type ``sigma``."""
    return SampledFunction("sinc", {"sigma": sigma, "shift": shift}, E,
                           lambda x: np.sinc(sigma * (x - shift) / np.pi))


def table(E, xs, ys):
    """Piecewise-linear interpolation of tabulated values."""
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    return SampledFunction("table", {}, E, lambda x: np.interp(x, xs, ys))


def parse_function(spec, E, lmap=None):
    """Parse ``tau-pow:x0=..,alpha=..``, ``abs-pow:...``, ``rho-pow:...``, ``const:<v>``."""
    name, _, args = spec.partition(":")
    if name == "const":
        return const(E, float(args or 0.0))
    kw = {}
    for item in filter(None, args.split(",")):
        k, _, v = item.partition("=")
        kw[k.strip()] = float(v)
    if name == "tau-pow":
        return tau_pow(E, kw["x0"], kw["alpha"])
    if name == "abs-pow":
        return abs_pow(E, kw["x0"], kw["alpha"])
    if name == "rho-pow":
        if lmap is None:
            raise ValueError("rho-pow needs a solved map")
        return rho_pow(lmap, kw["x0"], kw["alpha"])
    if name == "sinc":
        return sinc_bump(E, kw["sigma"], kw.get("shift", 0.0))
    raise ValueError(f"unknown function spec {spec!r}")
