"""CHSH correlations for polarization analyzers on a one-parameter setting family.

Analyzers measure O(alpha) = cos(alpha) Z + sin(alpha) X; the four settings are
tied to a single angle theta as (2*theta, 0 | theta, 3*theta), and the source
states interpolate between the phi+ Bell state and the singlet with a mixing
angle xi.  Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    ALGEBRA_TOL,
    PAULI_X,
    PAULI_Z,
    herm_eigenvalues,
    tensor,
)
from .rng import SplitMix64

TWO_PI = 2.0 * math.pi
SQRT1_2 = 1.0 / math.sqrt(2.0)

CLASSICAL_LIMIT = 2.0
CIRELSON_LIMIT = 2.0 * math.sqrt(2.0)

BOUND_TOL = 1e-9


def analyzer_angle(alpha: float) -> float:
    """Reduce an analyzer angle into [0, 2*pi)."""
    a = float(alpha)
    if not math.isfinite(a):
        raise ValueError(f"analyzer angle must be finite, got {alpha!r}")
    a %= TWO_PI
    # Float modulo may return the modulus itself for tiny negative inputs.
    if a >= TWO_PI:
        a = 0.0
    return a


def theta_param(theta: float) -> float:
    """Validate the setting parameter theta, restricted to [0, pi]."""
    t = float(theta)
    if not math.isfinite(t) or not 0.0 <= t <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
    return t


def xi_param(xi: float) -> float:
    """Reduce the state mixing angle xi into [0, pi); S is pi-periodic in xi."""
    x = float(xi)
    if not math.isfinite(x):
        raise ValueError(f"xi must be finite, got {xi!r}")
    x %= math.pi
    if x >= math.pi:
        x = 0.0
    return x


@dataclass(frozen=True)
class SettingsQuartet:
    """The four analyzer angles (a1, a2 | b1, b2) derived from one theta."""

    a1: float
    a2: float
    b1: float
    b2: float


def settings_quartet(theta: float) -> SettingsQuartet:
    """Settings (2*theta, 0 | theta, 3*theta) for a given theta."""
    t = theta_param(theta)
    return SettingsQuartet(
        a1=analyzer_angle(2.0 * t),
        a2=0.0,
        b1=analyzer_angle(t),
        b2=analyzer_angle(3.0 * t),
    )


def analyzer_basis(alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal analyzer kets (s, s_perp) over (H, V).

    s(alpha) = cos(alpha/2)|H> + sin(alpha/2)|V>,
    s_perp(alpha) = sin(alpha/2)|H> - cos(alpha/2)|V>.
    """
    half = 0.5 * analyzer_angle(alpha)
    c, s = math.cos(half), math.sin(half)
    return np.array([c, s]), np.array([s, -c])


@dataclass(frozen=True, eq=False)
class Observable:
    """Dichotomic polarization observable with its defining analyzer angle."""

    alpha: float
    matrix: np.ndarray


def observable(alpha: float) -> Observable:
    """O(alpha) = cos(alpha) Z + sin(alpha) X, cross-checked against the projector form."""
    a = analyzer_angle(alpha)
    m = math.cos(a) * PAULI_Z + math.sin(a) * PAULI_X
    s, s_perp = analyzer_basis(a)
    from_projectors = np.outer(s, s) - np.outer(s_perp, s_perp)
    if np.max(np.abs(m - from_projectors)) > ALGEBRA_TOL:
        raise ArithmeticError("observable construction paths disagree")
    if np.max(np.abs(m @ m - np.eye(2))) > ALGEBRA_TOL:
        raise ArithmeticError("observable is not an involution")
    return Observable(alpha=a, matrix=m)


def state_phi(xi: float) -> np.ndarray:
    """Source ket cos(xi)|phi+> + sin(xi)|psi-> over the (HH, HV, VH, VV) basis.

    |phi+> = (|HH> + |VV>)/sqrt2 and |psi-> = (|HV> - |VH>)/sqrt2 (singlet).
    """
    x = xi_param(xi)
    c, s = math.cos(x), math.sin(x)
    return np.array([c, s, -s, c], dtype=complex) * SQRT1_2


@dataclass(frozen=True)
class CoincidenceProbabilities:
    """Joint outcome probabilities for one analyzer pair, normalized to 1."""

    p_pp: float
    p_pm: float
    p_mp: float
    p_mm: float

    def __post_init__(self):
        for name, p in zip(("p_pp", "p_pm", "p_mp", "p_mm"), self.as_tuple()):
            if not -ALGEBRA_TOL <= p <= 1.0 + ALGEBRA_TOL:
                raise ValueError(f"{name} = {p!r} outside [0, 1]")
        total = sum(self.as_tuple())
        if abs(total - 1.0) > ALGEBRA_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p_pp, self.p_pm, self.p_mp, self.p_mm)

    def correlation(self) -> float:
        return self.p_pp + self.p_mm - self.p_pm - self.p_mp


def coincidence_probabilities(alpha: float, beta: float, xi: float) -> CoincidenceProbabilities:
    """Squared overlaps of the source ket with the four analyzer product kets."""
    a_half = 0.5 * analyzer_angle(alpha)
    b_half = 0.5 * analyzer_angle(beta)
    ca, sa = math.cos(a_half), math.sin(a_half)
    cb, sb = math.cos(b_half), math.sin(b_half)
    x = xi_param(xi)
    c, s = math.cos(x), math.sin(x)

    def amp(a0, a1, b0, b1):
        # <phi(xi)| (a0,a1) x (b0,b1); all amplitudes involved are real.
        return (c * a0 * b0 + s * a0 * b1 - s * a1 * b0 + c * a1 * b1) * SQRT1_2

    return CoincidenceProbabilities(
        p_pp=amp(ca, sa, cb, sb) ** 2,
        p_pm=amp(ca, sa, sb, -cb) ** 2,
        p_mp=amp(sa, -ca, cb, sb) ** 2,
        p_mm=amp(sa, -ca, sb, -cb) ** 2,
    )


def correlation(alpha: float, beta: float, xi: float) -> float:
    """<O_a(alpha) O_b(beta)> as the signed sum of coincidence probabilities."""
    return coincidence_probabilities(alpha, beta, xi).correlation()


def s_parameter(theta: float, xi: float) -> float:
    """CHSH combination E(a1,b1) + E(a2,b1) + E(a1,b2) - E(a2,b2) at the theta settings."""
    t = theta_param(theta)
    x = xi_param(xi)
    q = settings_quartet(t)
    s = (
        correlation(q.a1, q.b1, x)
        + correlation(q.a2, q.b1, x)
        + correlation(q.a1, q.b2, x)
        - correlation(q.a2, q.b2, x)
    )
    if abs(s) > CIRELSON_LIMIT + BOUND_TOL:
        raise ArithmeticError(f"S = {s!r} exceeds the quantum ceiling")
    return s


def _family_coefficients(theta: float) -> tuple[float, float]:
    # S(theta, xi) = A cos(2 xi) + C sin(2 xi) on the state family.
    a = 3.0 * math.cos(theta) - math.cos(3.0 * theta)
    c = math.sin(theta) - math.sin(3.0 * theta)
    return a, c


def s_closed_form(theta: float, xi: float) -> float:
    """Closed form (3 cos t - cos 3t) cos 2xi + (sin t - sin 3t) sin 2xi."""
    t = theta_param(theta)
    x = xi_param(xi)
    a, c = _family_coefficients(t)
    return a * math.cos(2.0 * x) + c * math.sin(2.0 * x)


def bell_operator(theta: float) -> np.ndarray:
    """The 4x4 Hermitian operator whose expectation value is S at the theta settings."""
    q = settings_quartet(theta)
    oa1 = observable(q.a1).matrix
    oa2 = observable(q.a2).matrix
    ob1 = observable(q.b1).matrix
    ob2 = observable(q.b2).matrix
    return tensor(oa1, ob1) + tensor(oa2, ob1) + tensor(oa1, ob2) - tensor(oa2, ob2)


@dataclass(frozen=True)
class QuantumBounds:
    """Extreme eigenvalues of the Bell operator: the reachable S range."""

    s_min: float
    s_max: float

    def __post_init__(self):
        if self.s_min > self.s_max:
            raise ValueError("s_min exceeds s_max")
        if max(abs(self.s_min), abs(self.s_max)) > CIRELSON_LIMIT + BOUND_TOL:
            raise ValueError("bounds exceed the quantum ceiling")


def quantum_bounds(theta: float) -> QuantumBounds:
    """Spectral S bounds for the theta settings, from the Jacobi eigensolver."""
    vals = herm_eigenvalues(bell_operator(theta))
    return QuantumBounds(s_min=float(vals[0]), s_max=float(vals[-1]))


def family_extremum(theta: float) -> tuple[float, float]:
    """The xi maximizing S at fixed theta, and the maximum value.

    xi* = atan2(C, A)/2 reduced into [0, pi); the maximum sqrt(A^2 + C^2) is
    returned as s_parameter(theta, xi*) so both code paths stay tied together.
    """
    t = theta_param(theta)
    a, c = _family_coefficients(t)
    xi_star = (0.5 * math.atan2(c, a)) % math.pi
    if xi_star >= math.pi:
        xi_star = 0.0
    return xi_star, s_parameter(t, xi_star)


def classical_s_values() -> list[float]:
    """CHSH values of all 16 deterministic +-1 assignments (a1, a2, b1, b2)."""
    out = []
    for a1 in (-1, 1):
        for a2 in (-1, 1):
            for b1 in (-1, 1):
                for b2 in (-1, 1):
                    out.append(float(a1 * b1 + a2 * b1 + a1 * b2 - a2 * b2))
    return out


def classical_bound() -> float:
    """Maximum CHSH value over deterministic local assignments: exactly 2."""
    return max(classical_s_values())


def haar_sample_s(theta: float, n: int, seed: int) -> np.ndarray:
    """Bell-operator expectations for n Haar-random pure two-qubit states.

    Each state is built from 8 independent standard normals (real/imaginary
    parts of 4 amplitudes) and normalized; fixed seed gives a fixed sequence.
    """
    count = int(n)
    if count < 1:
        raise ValueError(f"need at least one sample, got {n!r}")
    b = bell_operator(theta)
    g = SplitMix64(seed).standard_normal(8 * count).reshape(count, 8)
    kets = g[:, 0::2] + 1j * g[:, 1::2]
    kets /= np.linalg.norm(kets, axis=1, keepdims=True)
    return np.real(np.einsum("ni,ij,nj->n", kets.conj(), b, kets))
