"""Two-angle trigonometric function used to analyse the n = 3 deficit.

``F(a, b, t, th, ph) = r(th) + r(ph) - (a + b) t sin(th + ph)`` with
``r(s) = sqrt(a^2 cos^2 s + b^2 sin^2 s)`` on the square ``[0, pi/2]^2``.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

HALF_PI = np.pi / 2
ANGLE_SLACK = 1e-12


@dataclass(frozen=True)
class TrigParams:
    a: float
    b: float
    t: float
    theta: float
    phi: float

    def __post_init__(self):
        _check_positive(self.a, self.b, self.t)
        for ang in (self.theta, self.phi):
            if not (-ANGLE_SLACK <= ang <= HALF_PI + ANGLE_SLACK):
                raise ValueError(f"angle {ang} outside [0, pi/2]")


def _check_positive(a, b, t):
    if not (a > 0 and b > 0 and t > 0):
        raise ValueError(f"a, b, t must be positive, got {(a, b, t)}")


def _F(a, b, t, th, ph):
    r1 = np.sqrt(a * a * np.cos(th) ** 2 + b * b * np.sin(th) ** 2)
    r2 = np.sqrt(a * a * np.cos(ph) ** 2 + b * b * np.sin(ph) ** 2)
    return r1 + r2 - (a + b) * t * np.sin(th + ph)


def F_eval(p, *args):
    """Evaluate ``F``. Accepts a :class:`TrigParams` or ``(a, b, t, th, ph)``."""
    if not isinstance(p, TrigParams):
        p = TrigParams(p, *args)
    return float(_F(p.a, p.b, p.t, p.theta, p.phi))


@dataclass(frozen=True)
class OmegaResult:
    value: float
    theta: float
    phi: float

    def __iter__(self):
        return iter((self.value, self.theta, self.phi))


def omega_min(a, b, t, grid=400, refine=200):
    """Minimum of ``F`` over the closed square: grid scan including both
    endpoints, then bounded Nelder-Mead from the best few grid points."""
    _check_positive(a, b, t)
    s = np.linspace(0.0, HALF_PI, grid)
    vals = _F(a, b, t, s[:, None], s[None, :])
    flat = np.argsort(vals, axis=None, kind="stable")[:4]
    best = OmegaResult(float(vals.flat[flat[0]]), *(float(s[i]) for i in
                       np.unravel_index(flat[0], vals.shape)))
    if refine <= 0:
        return best
    for idx in flat:
        i, j = np.unravel_index(idx, vals.shape)
        res = minimize(
            lambda v: _F(a, b, t, v[0], v[1]),
            x0=[s[i], s[j]],
            method="Nelder-Mead",
            bounds=[(0.0, HALF_PI), (0.0, HALF_PI)],
            options={"maxiter": refine, "xatol": 1e-10, "fatol": 1e-14},
        )
        th, ph = np.clip(res.x, 0.0, HALF_PI)
        v = float(_F(a, b, t, th, ph))
        if v < best.value:
            best = OmegaResult(v, float(th), float(ph))
    return best


def omega_closed_form(a, b, t):
    """Known value of the minimum, or ``None`` where only its sign is known
    (``a != b`` with ``t < 1``, where it is positive)."""
    _check_positive(a, b, t)
    if a == b:
        return 2 * a * (1 - t)
    if t == 1:
        return 0.0
    if t > 1:
        return (a + b) * (1 - t)
    return None


def argmin_condition(a, b, theta, phi):
    """Distances of an argmin from the two zero-set branches at ``t = 1``:
    ``|th + ph - pi/2|`` and ``|tan th tan ph - a/b|``."""
    sum_gap = abs(theta + phi - HALF_PI)
    with np.errstate(over="ignore", invalid="ignore"):
        prod = np.tan(theta) * np.tan(phi)
    tan_gap = abs(prod - a / b) if np.isfinite(prod) else np.inf
    return float(sum_gap), float(tan_gap)
