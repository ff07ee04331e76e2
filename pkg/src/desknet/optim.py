"""Parameter update rules: plain SGD, momentum SGD, and Adadelta.

All steps use the descent convention w <- w - lr * dL/dw, update in place,
and zero every gradient afterward. Non-finite gradients raise
DivergedError before any parameter is touched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergedError, InvalidRangeError
from .layers import Parameter


@dataclass
class HyperParams:
    """Knobs shared by the optimizers; each rule reads the ones it needs."""

    lr: float = 0.01
    momentum: float = 0.0
    rho: float = 0.95
    eps: float = 1e-6

    def validate(self):
        if not self.lr > 0:
            raise InvalidRangeError(f"lr must be > 0, got {self.lr}")
        if not 0.0 <= self.momentum < 1.0:
            raise InvalidRangeError(f"momentum must be in [0, 1), got {self.momentum}")
        if not 0.0 < self.rho < 1.0:
            raise InvalidRangeError(f"rho must be in (0, 1), got {self.rho}")
        if not self.eps > 0:
            raise InvalidRangeError(f"eps must be > 0, got {self.eps}")
        return self


def _checked_grads(params: list[Parameter]) -> list[np.ndarray]:
    grads = [p.grad for p in params]
    for p, g in zip(params, grads):
        if not np.isfinite(g).all():
            raise DivergedError(f"non-finite gradient in {p.name}")
    return grads


class SGD:
    """w <- w - lr * g."""

    name = "sgd"

    def __init__(self, params: list[Parameter], hp: HyperParams):
        self.params = params
        self.hp = hp.validate()

    def step(self):
        grads = _checked_grads(self.params)
        for p, g in zip(self.params, grads):
            p.value -= self.hp.lr * g
            p.zero_grad()


class MomentumSGD:
    """v <- momentum * v - lr * g;  w <- w + v."""

    name = "momentum"

    def __init__(self, params: list[Parameter], hp: HyperParams):
        self.params = params
        self.hp = hp.validate()
        self.velocity = [np.zeros_like(p.value) for p in params]

    def step(self):
        grads = _checked_grads(self.params)
        mu, lr = self.hp.momentum, self.hp.lr
        for p, g, v in zip(self.params, grads, self.velocity):
            v *= mu
            v -= lr * g
            p.value += v
            p.zero_grad()


class Adadelta:
    """Adaptive steps from running averages of squared grads and updates.

        Eg2  <- rho * Eg2 + (1-rho) * g^2
        dw    = -sqrt(Edx2 + eps) / sqrt(Eg2 + eps) * g
        Edx2 <- rho * Edx2 + (1-rho) * dw^2
        w    <- w + dw
    """

    name = "adadelta"

    def __init__(self, params: list[Parameter], hp: HyperParams):
        self.params = params
        self.hp = hp.validate()
        self.avg_sq_grad = [np.zeros_like(p.value) for p in params]
        self.avg_sq_update = [np.zeros_like(p.value) for p in params]

    def step(self):
        grads = _checked_grads(self.params)
        rho, eps = self.hp.rho, self.hp.eps
        for p, g, eg2, edx2 in zip(self.params, grads, self.avg_sq_grad, self.avg_sq_update):
            eg2 *= rho
            eg2 += (1.0 - rho) * g * g
            dw = -(np.sqrt(edx2 + eps) / np.sqrt(eg2 + eps)) * g
            edx2 *= rho
            edx2 += (1.0 - rho) * dw * dw
            p.value += dw
            p.zero_grad()


OPTIMIZERS = {"sgd": SGD, "momentum": MomentumSGD, "adadelta": Adadelta}


def make_optimizer(name: str, params: list[Parameter], hp: HyperParams):
    if name not in OPTIMIZERS:
        raise InvalidRangeError(
            f"unknown optimizer {name!r}; choose from {sorted(OPTIMIZERS)}"
        )
    return OPTIMIZERS[name](params, hp)
