"""Convex symmetric losses, their asymmetric versions and left-derivatives.

Four loss kinds are supported:

======================  ============================  ===========================
kind                    rho(t)                        left-derivative psi_-(t)
======================  ============================  ===========================
``absolute``            ``|t|``                       ``-1`` for t <= 0, ``+1`` else
``quadratic``           ``t**2``                      ``2 t``
``power`` (r >= 1)      ``|t|**r``                    ``r sign(t) |t|**(r-1)``
``huber`` (c > 0)       ``t**2/(2c)`` or ``|t|-c/2``  ``t/c`` clipped to [-1, 1]
======================  ============================  ===========================

All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LossSpec", "parse_loss", "rho_eval", "psi_minus", "rho_alpha", "check_order"]

_KINDS = ("absolute", "quadratic", "power", "huber")


@dataclass(frozen=True)
class LossSpec:
    """A loss from the admissible family.

    Parameters
    ----------
    kind : str
        One of ``"absolute"``, ``"quadratic"``, ``"power"``, ``"huber"``.
    param : float, optional
        Exponent ``r >= 1`` for ``power``, scale ``c > 0`` for ``huber``.
    """

    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if self.kind == "power":
            if self.param is None or not np.isfinite(self.param) or self.param < 1:
                raise ValueError("power loss needs an exponent r >= 1")
        elif self.kind == "huber":
            if self.param is None or not np.isfinite(self.param) or self.param <= 0:
                raise ValueError("huber loss needs a scale c > 0")
        elif self.param is not None:
            raise ValueError(f"{self.kind} loss takes no parameter")

    @classmethod
    def absolute(cls):
        return cls("absolute")

    @classmethod
    def quadratic(cls):
        return cls("quadratic")

    @classmethod
    def power(cls, r):
        return cls("power", float(r))

    @classmethod
    def huber(cls, c):
        return cls("huber", float(c))

    @property
    def continuous_psi(self) -> bool:
        """True when psi_- is continuous, i.e. G is continuous in theta."""
        if self.kind == "absolute":
            return False
        if self.kind == "power":
            return self.param > 1
        return True

    @property
    def is_absolute_like(self) -> bool:
        return self.kind == "absolute" or (self.kind == "power" and self.param == 1)

    @property
    def affine_equivariant(self) -> bool:
        """Power-type losses (including absolute and quadratic)."""
        return self.kind != "huber"

    def __str__(self):
        if self.param is None:
            return self.kind
        return f"{self.kind}:{self.param:g}"


def parse_loss(text: str) -> LossSpec:
    """Parse ``"absolute"``, ``"quadratic"``, ``"power:R"`` or ``"huber:C"``."""
    name, _, arg = text.strip().lower().partition(":")
    if name in ("absolute", "quadratic"):
        if arg:
            raise ValueError(f"{name} loss takes no parameter: {text!r}")
        return LossSpec(name)
    if name in ("power", "huber"):
        if not arg:
            raise ValueError(f"{name} loss needs a parameter, e.g. {name}:1.5")
        try:
            value = float(arg)
        except ValueError:
            raise ValueError(f"bad loss parameter in {text!r}") from None
        return LossSpec(name, value)
    raise ValueError(f"unknown loss {text!r}")


def check_order(alpha) -> float:
    """Validate an order ``alpha`` in the open interval (0, 1)."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"order alpha must lie in (0, 1), got {alpha}")
    return alpha


def rho_eval(loss: LossSpec, t):
    t = np.asarray(t, dtype=float)
    a = np.abs(t)
    if loss.kind == "absolute":
        out = a
    elif loss.kind == "quadratic":
        out = t * t
    elif loss.kind == "power":
        out = a**loss.param
    else:
        c = loss.param
        out = np.where(a < c, t * t / (2.0 * c), a - c / 2.0)
    return out if out.ndim else float(out)


def psi_minus(loss: LossSpec, t):
    """Left-derivative of ``rho`` at ``t``."""
    t = np.asarray(t, dtype=float)
    if loss.kind == "absolute":
        out = np.where(t > 0, 1.0, -1.0)
    elif loss.kind == "quadratic":
        out = 2.0 * t
    elif loss.kind == "power":
        r = loss.param
        if r == 1:
            out = np.where(t > 0, 1.0, -1.0)
        else:
            # |t|**(r-1) -> 0 at t = 0 for any r > 1
            out = r * np.sign(t) * np.abs(t) ** (r - 1.0)
    else:
        out = np.clip(t / loss.param, -1.0, 1.0)
    return out if out.ndim else float(out)


def rho_alpha(loss: LossSpec, alpha, t):
    """Asymmetric loss ``((1-alpha) 1[t<0] + alpha 1[t>0]) rho(t)``."""
    alpha = check_order(alpha)
    t = np.asarray(t, dtype=float)
    w = np.where(t > 0, alpha, np.where(t < 0, 1.0 - alpha, 0.0))
    out = w * np.asarray(rho_eval(loss, t))
    return out if out.ndim else float(out)
