"""Frozen semimartingale characteristics and their model builders.

``LocalCharacteristics`` is the triplet (drift, diffusion coefficient, jump
compensator) of a d-dimensional process at the evaluation date, with jump
compensation fixed to kappa(y) = y / (1 + |y|^2). ``ExpModelCharacteristics``
is the scalar exponential price model (spot, rate, volatility, log-jump
compensator).

Two builders produce frozen characteristics from higher-level descriptions:
a smooth function of a Markov jump-diffusion, and a time-changed Levy
process.
"""

import math

import numpy as np

from . import compensators as comp
from .compensators import JumpCompensator, kappa, no_jumps
from .errors import (DegenerateGradient, DimensionMismatch, DomainError,
                     InvariantViolation, QuadratureDivergence)
from .quadrature import DEFAULT_TOL


class LocalCharacteristics:
    """Frozen triplet (beta, delta, m) of a d-dimensional Ito semimartingale.

    Parameters
    ----------
    beta : array_like, shape (d,)
        Drift at the evaluation date, kappa-compensation convention.
    delta : array_like, shape (d, n)
        Diffusion coefficient; the instantaneous covariance is delta delta^T.
    jumps : JumpCompensator
        Jump compensator; must be one-dimensional unless atomic.
    """

    def __init__(self, beta, delta, jumps=None):
        self.beta = np.atleast_1d(np.asarray(beta, dtype=float))
        delta = np.asarray(delta, dtype=float)
        if delta.ndim == 0:
            delta = delta.reshape(1, 1)
        elif delta.ndim == 1:
            delta = delta.reshape(1, -1) if self.beta.size == 1 else delta.reshape(-1, 1)
        self.delta = delta
        self.dim = self.beta.size
        if self.delta.shape[0] != self.dim:
            raise DimensionMismatch(
                f"delta has {self.delta.shape[0]} rows for dimension {self.dim}")
        self.jumps = jumps if jumps is not None else no_jumps()
        if not isinstance(self.jumps, JumpCompensator):
            raise InvariantViolation("jumps must be a JumpCompensator")
        if not self.jumps.is_empty() and self.jumps.dim != self.dim:
            raise DimensionMismatch(
                f"jump compensator dimension {self.jumps.dim} != {self.dim}")

    def diffusion_matrix(self):
        return self.delta @ self.delta.T


class ExpModelCharacteristics:
    """Exponential price model data frozen at the evaluation date.

    S0 > 0 is the spot, r >= 0 the deterministic discount rate, sigma >= 0
    the volatility, and ``jumps`` the compensator of log-price jumps. With
    sigma = 0 the model is pure-jump.
    """

    def __init__(self, S0, r=0.0, sigma=0.0, jumps=None):
        if S0 <= 0:
            raise InvariantViolation(f"S0 must be positive, got {S0}")
        if r < 0:
            raise InvariantViolation(f"r must be nonnegative, got {r}")
        if sigma < 0:
            raise InvariantViolation(f"sigma must be nonnegative, got {sigma}")
        self.S0 = float(S0)
        self.r = float(r)
        self.sigma = float(sigma)
        self.jumps = jumps if jumps is not None else no_jumps()
        if not isinstance(self.jumps, JumpCompensator):
            raise InvariantViolation("jumps must be a JumpCompensator")

    @property
    def is_pure_jump(self):
        return self.sigma == 0.0

    def log_characteristics(self, tol=DEFAULT_TOL):
        """Characteristics of the log price X = ln S.

        The drift is r - sigma^2/2 - integral of (e^y - 1 - kappa(y)) m(dy),
        the compensation that makes the discounted price a martingale.
        """
        correction = self.jumps.exp_compensation(tol) if not self.jumps.is_empty() else 0.0
        beta = self.r - 0.5 * self.sigma**2 - correction
        return LocalCharacteristics([beta], [[self.sigma]], self.jumps)


# ----------------------------------------------------------------------
# builders


def from_markov(b, Sigma, jump_fn, nu, f, Z0, tol=DEFAULT_TOL):
    """Frozen scalar characteristics of f(Z) for a Markov jump-diffusion Z.

    Z has drift ``b``, diffusion matrix ``Sigma`` and jumps driven by a
    Poisson random measure with intensity ``nu``, hit through the jump
    amplitude map ``jump_fn``; all coefficients are taken at the evaluation
    date. ``f`` must be twice differentiable at ``Z0`` with a nonzero partial
    derivative in the last coordinate.

    Returns
    -------
    LocalCharacteristics
        One-dimensional characteristics of the image process. The jump
        compensator is the pushforward of ``nu`` under the increment map
        y -> f(Z0 + jump_fn(y)) - f(Z0), exposed through its tail functions
        (exact atoms when ``nu`` is atomic). The drift is reported in the
        kappa-compensation convention used by the rest of the package, i.e.
        the driving-coefficient formula
        grad f . b + tr[hess f Sigma Sigma^T] / 2 + integral of
        (f(Z0 + jump_fn(y)) - f(Z0) - jump_fn(y) . grad f) nu(dy)
        minus the truncation rebase integral of (u - kappa(u)) m(du).
    """
    Z0 = np.atleast_1d(np.asarray(Z0, dtype=float))
    d = Z0.size
    if f.dim != d:
        raise DimensionMismatch(f"f has dimension {f.dim}, Z0 has {d}")
    b = np.atleast_1d(np.asarray(b, dtype=float))
    Sigma = np.atleast_2d(np.asarray(Sigma, dtype=float))
    if b.size != d or Sigma.shape != (d, d):
        raise DimensionMismatch("b or Sigma inconsistent with Z0")

    grad = np.atleast_1d(np.asarray(f.gradient(Z0 if d > 1 else float(Z0[0])), dtype=float))
    hess = np.atleast_2d(np.asarray(f.hessian(Z0 if d > 1 else float(Z0[0])), dtype=float))
    if grad[-1] == 0.0:
        raise DegenerateGradient("last partial derivative of f vanishes at Z0")

    f0 = f.value(Z0 if d > 1 else float(Z0[0]))

    def increment(y):
        shifted = Z0 + np.atleast_1d(np.asarray(jump_fn(y), dtype=float))
        return f.value(shifted if d > 1 else float(shifted[0])) - f0

    def full_comp_integrand(y):
        psi = np.atleast_1d(np.asarray(jump_fn(y), dtype=float))
        shifted = Z0 + psi
        return (f.value(shifted if d > 1 else float(shifted[0])) - f0
                - float(np.dot(psi, grad)))

    a = Sigma @ Sigma.T
    beta_full = float(np.dot(grad, b)) + 0.5 * float(np.trace(hess @ a))
    if not nu.is_empty():
        beta_full += nu.integrate(full_comp_integrand, tol)

    delta0 = float(np.linalg.norm(grad @ Sigma))

    if nu.is_empty():
        pushforward = no_jumps()
    elif nu.form == "atomic":
        atoms = []
        for y, lam in zip(nu.locations, nu.masses):
            u = increment(y)
            if u != 0.0:
                atoms.append((u, lam))
        pushforward = comp.AtomicCompensator(atoms)
    else:
        pushforward = comp.PushforwardCompensator(nu, increment)

    # rebase the full-compensation drift onto the kappa convention
    rebase = 0.0
    if not pushforward.is_empty():
        rebase = pushforward.integrate(
            lambda u: u - kappa(u), tol,
            g_over_y2=lambda u: u / (1.0 + u * u))
    return LocalCharacteristics([beta_full - rebase], [[delta0]], pushforward)


def from_time_changed_levy(levy_triplet, theta0, tol=DEFAULT_TOL):
    """Frozen characteristics of a Levy process run on a stochastic clock.

    ``levy_triplet`` is (b, sigma2, nu) where b is the mean drift of the
    Levy process (finite second moment convention, E L_t = b t), sigma2 its
    Gaussian variance and nu its Levy measure; ``theta0`` is the current rate
    of time change. The compensator scales linearly with the rate:
    m(dy) = theta0 nu(dy).
    """
    b, sigma2, nu = levy_triplet
    if theta0 < 0:
        raise DomainError(f"theta0 must be nonnegative, got {theta0}")
    if sigma2 < 0:
        raise InvariantViolation("sigma2 must be nonnegative")
    if nu is None:
        nu = no_jumps()
    if not nu.is_empty():
        try:
            nu.integrate(lambda y: y * y, tol=1e-7, g_over_y2=lambda y: 1.0)
        except QuadratureDivergence as exc:
            raise InvariantViolation(
                f"nu fails the square-integrability requirement: {exc}") from exc
    if theta0 == 0.0:
        return LocalCharacteristics([0.0], [[0.0]], no_jumps())
    correction = 0.0
    if not nu.is_empty():
        correction = nu.integrate(lambda y: y - kappa(y), tol,
                                  g_over_y2=lambda y: y / (1.0 + y * y))
    beta = (float(b) - correction) * theta0
    delta = math.sqrt(float(sigma2) * theta0)
    return LocalCharacteristics([beta], [[delta]], nu.scaled(theta0))
