"""Inviscid Saint-Venant roll waves and their high-frequency stability data.

The nondimensional Saint-Venant system for inclined shallow-water flow,

    d_t(h, hU) + d_x(hU, hU^2 + h^2/(2 F^2)) = (0, h - |U| U),

with Froude number F, carries periodic traveling waves consisting of one
smooth monotone piece per period terminated by a Lax shock.  In the wave
frame the mass equation integrates to ``h (c - U) = q`` and the momentum
equation reduces to the scalar profile equation

    h'(x) = (h - (c - q/h)^2) / (h / F^2 - q^2 / h^2),

whose numerator and denominator vanish together at the sonic height
``h_s = (q^2 F^2)^{1/3}``.  Regularity at the sonic point pins ``c`` and
``q``; with the normalization ``h_s = 1`` used throughout this module,
``q = 1/F`` and ``c = 1 + 1/F``, and smooth profiles exist exactly for
``F > 2``.  The remaining freedom is the wave amplitude, exposed through the
downstream shock height ``h_plus``; the upstream height follows from the
momentum jump condition ``h_+ h_- (h_+ + h_-) = 2 q^2 F^2``.

Linearizing about the wave and diagonalizing by the eigenvectors of
``A_0^{-1} A`` produces two scalar transport modes with speeds

    alpha_1 = U - c - sqrt(h)/F  < 0       (transverse mode),
    alpha_2 = U - c + sqrt(h)/F            (sonic mode, one simple zero),

zeroth-order coefficients gamma_j and couplings beta_j.  The module computes
the boundary coefficients obtained by eliminating the shock-shift velocity
from the linearized jump conditions, the high-frequency stability index

    I = exp(int_0^X gamma_1 / alpha_1) * C,

the Sobolev threshold of the sonic mode, and the damping weights entering
the energy functional of the discrete simulator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import (
    InvalidInputError,
    NoRollWaveError,
    NumericalError,
    LopatinskyDegenerateError,
    StructuralAssumptionError,
    RollgapError,
)

__all__ = [
    "SVModel",
    "RollWaveProfile",
    "CharacteristicData",
    "JumpCoefficients",
    "StabilityIndexReport",
    "DampingWeights",
    "NoDampingWeightsError",
    "build_profile",
    "characteristics",
    "jump_coefficients",
    "stability_index",
    "hs_threshold",
    "sonic_mode_solvable",
    "damping_weights",
    "default_epsilon",
    "default_C0",
]

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(7)


class NoDampingWeightsError(RollgapError):
    """Raised when the high-frequency index is at or above one, so no choice
    of weights yields boundary dissipation."""


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SVModel:
    """Saint-Venant fluxes, source, and their Jacobians at a state (h, U)."""

    froude: float

    def f0(self, h, U):
        return np.array([h, h * U])

    def f(self, h, U):
        return np.array([h * U, h * U * U + h * h / (2.0 * self.froude**2)])

    def source(self, h, U):
        return np.array([0.0, h - abs(U) * U])

    def df0(self, h, U):
        return np.array([[1.0, 0.0], [U, h]])

    def df(self, h, U):
        return np.array([[U, h], [U * U + h / self.froude**2, 2.0 * h * U]])

    def dsource(self, h, U):
        if U < 0:
            raise InvalidInputError("profiles handled here have U > 0 throughout")
        return np.array([[0.0, 0.0], [1.0, -2.0 * U]])


# ---------------------------------------------------------------------------
# profile construction
# ---------------------------------------------------------------------------


def _min_admissible_height(F, c, q):
    """Smaller positive root of h - (c - q/h)^2 = 0 besides the sonic height.

    In x = sqrt(h) the equation is x^3 - c x^2 + q = 0; the middle root gives
    the height below which the profile slope would change sign again.
    """
    disc = np.sqrt((c - 1.0) ** 2 + 4.0 * q)
    x = ((c - 1.0) + disc) / 2.0
    return x * x


class RollWaveProfile:
    """One periodic cell of a roll wave, shock at the cell ends.

    Height increases from ``h_plus`` at 0+ through the sonic height at
    ``x_s`` to ``h_minus`` at X-; the sampled grid always contains 0, x_s and
    X.  ``h_of_x`` evaluates the profile anywhere in [0, X] from the dense
    output of the two sonic-launched integrations.
    """

    def __init__(self, model, c, q, h_s, x_s, X, grid, h_samples, h_plus, h_minus,
                 sol_left, sol_right):
        self.model = model
        self.c = c
        self.q = q
        self.h_s = h_s
        self.x_s = x_s
        self.X = X
        self.grid = grid
        self.h_samples = h_samples
        self.U_samples = c - q / h_samples if h_samples is not None else None
        self.h_plus = h_plus
        self.h_minus = h_minus
        self._sol_left = sol_left
        self._sol_right = sol_right

    def h_of_x(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(np.clip(x, 0.0, self.X))
        out = np.empty_like(x)
        left = x <= self.x_s
        if np.any(left):
            out[left] = self._sol_left.sol(x[left])[0]
        if np.any(~left):
            out[~left] = self._sol_right.sol(x[~left])[0]
        return float(out[0]) if scalar else out

    def u_of_x(self, x):
        return self.c - self.q / self.h_of_x(x)

    def rankine_hugoniot_residual(self):
        """Jump of f - c f0 across the shock, from the integrated end states."""
        hl = self.h_of_x(self.X)
        hr = self.h_of_x(0.0)
        m = self.model
        res = np.zeros(2)
        for sgn, h in ((1.0, hr), (-1.0, hl)):
            U = self.c - self.q / h
            res += sgn * (m.f(h, U) - self.c * m.f0(h, U))
        return res


def _profile_rates(F, c, q):
    """Numerator, denominator and their h-derivatives for the profile slope."""

    def N(h):
        return h - (c - q / h) ** 2

    def D(h):
        return h / F**2 - q * q / (h * h)

    def Np(h):
        U = c - q / h
        return 1.0 - 2.0 * U * q / (h * h)

    def Dp(h):
        return 1.0 / F**2 + 2.0 * q * q / h**3

    def Npp(h):
        U = c - q / h
        return 4.0 * U * q / h**3 - 2.0 * q * q / h**4

    def Dpp(h):
        return -6.0 * q * q / h**4

    def Nppp(h):
        U = c - q / h
        return 12.0 * q * q / h**5 - 12.0 * U * q / h**4

    def Dppp(h):
        return 24.0 * q * q / h**5

    return N, D, Np, Dp, Npp, Dpp, Nppp, Dppp


def _make_slope(F, c, q, h_s, taylor_halfwidth=1e-4):
    """dh/dx as a function of h, with the 0/0 at the sonic height replaced by
    the ratio of Taylor expansions (third order, so the patch error is far
    below integrator tolerance)."""
    N, D, Np, Dp, Npp, Dpp, Nppp, Dppp = _profile_rates(F, c, q)

    def slope(h):
        arr = np.atleast_1d(np.asarray(h, dtype=float))
        eps = arr - h_s
        near = np.abs(eps) < taylor_halfwidth
        out = np.empty_like(arr)
        if np.any(~near):
            hh = arr[~near]
            out[~near] = N(hh) / D(hh)
        if np.any(near):
            e = eps[near]
            num = Np(h_s) + Npp(h_s) * e / 2.0 + Nppp(h_s) * e * e / 6.0
            den = Dp(h_s) + Dpp(h_s) * e / 2.0 + Dppp(h_s) * e * e / 6.0
            out[near] = num / den
        return float(out[0]) if np.ndim(h) == 0 else out

    def inv_slope(h):
        return 1.0 / slope(h)

    return slope, inv_slope


def build_profile(F, normalization="h_s", h_plus=None, amplitude=0.5,
                  n_grid=800, rtol=1e-12, atol=1e-14):
    """Construct a roll-wave profile at Froude number F with h_s = 1.

    ``h_plus`` in (h_min, 1) selects the member of the one-parameter wave
    family (equivalently the period); when omitted, ``amplitude`` in (0, 1)
    interpolates between the zero-amplitude sonic wave and the maximal one.
    Raises :class:`NoRollWaveError` for F <= 2 (the slope through the sonic
    point would not be positive) or for an inadmissible shock pair.
    """
    if normalization != "h_s":
        raise InvalidInputError("only the h_s = 1 normalization is implemented")
    if not np.isfinite(F) or F <= 0:
        raise InvalidInputError("Froude number must be positive")
    if F <= 2.0:
        raise NoRollWaveError(
            f"no single-shock periodic wave at F = {F}: need F > 2 for a "
            "positive slope through the sonic point"
        )
    h_s = 1.0
    q = 1.0 / F
    c = 1.0 + 1.0 / F
    h_min = _min_admissible_height(F, c, q)
    if h_plus is None:
        if not 0.0 < amplitude < 1.0:
            raise InvalidInputError("amplitude must lie in (0, 1)")
        h_plus = 1.0 - amplitude * (1.0 - h_min)
    if not h_min < h_plus < 1.0:
        raise NoRollWaveError(
            f"no admissible shock pair: h_plus must lie in ({h_min:.6g}, 1)"
        )
    # momentum jump condition: h+ h- (h+ + h-) = 2 q^2 F^2  (= 2 at h_s = 1)
    rhs = 2.0 * q * q * F * F
    h_minus = (-h_plus**2 + np.sqrt(h_plus**4 + 4.0 * rhs * h_plus)) / (2.0 * h_plus)

    slope, inv_slope = _make_slope(F, c, q, h_s)

    # cell length and sonic position by quadrature of dx/dh (smooth integrand)
    x_s, err1 = quad(inv_slope, h_plus, h_s, epsabs=1e-14, epsrel=1e-13, limit=200)
    x_rest, err2 = quad(inv_slope, h_s, h_minus, epsabs=1e-14, epsrel=1e-13, limit=200)
    X = x_s + x_rest
    if not (np.isfinite(X) and X > 0 and x_s > 0) or err1 + err2 > 1e-9 * X:
        raise NumericalError("profile quadrature failed")

    def rhs_ode(x, y):
        return slope(y)

    try:
        sol_left = solve_ivp(rhs_ode, (x_s, 0.0), [h_s], method="DOP853",
                             dense_output=True, rtol=rtol, atol=atol)
        sol_right = solve_ivp(rhs_ode, (x_s, X), [h_s], method="DOP853",
                              dense_output=True, rtol=rtol, atol=atol)
    except Exception as exc:  # pragma: no cover - integrator blowup
        raise NumericalError("profile integration failed") from exc
    if not (sol_left.success and sol_right.success):
        raise NumericalError("profile integration did not converge")

    n_left = max(2, int(round(n_grid * x_s / X)))
    n_right = max(2, n_grid - n_left)
    grid = np.concatenate([
        np.linspace(0.0, x_s, n_left + 1),
        np.linspace(x_s, X, n_right + 1)[1:],
    ])
    profile = RollWaveProfile(
        model=SVModel(float(F)), c=c, q=q, h_s=h_s, x_s=x_s, X=X,
        grid=grid, h_samples=None, h_plus=h_plus, h_minus=h_minus,
        sol_left=sol_left, sol_right=sol_right,
    )
    profile.h_samples = profile.h_of_x(grid)
    profile.U_samples = c - q / profile.h_samples

    res = profile.rankine_hugoniot_residual()
    if np.max(np.abs(res)) > 1e-8:
        raise NumericalError(
            f"Rankine-Hugoniot residual {np.max(np.abs(res)):.3e} exceeds 1e-8"
        )
    if np.any(np.diff(profile.h_samples) <= 0):
        raise NumericalError("profile height is not strictly increasing")
    return profile


# ---------------------------------------------------------------------------
# characteristic fields
# ---------------------------------------------------------------------------


class SVCharacteristicFields:
    """Closed-form characteristic quantities along a profile.

    Everything is an explicit function of the height, with x entering through
    the profile evaluator; derivatives in x use the exact chain rule with the
    profile slope, so no grid differencing is involved.
    """

    def __init__(self, profile: RollWaveProfile):
        self.profile = profile
        F = profile.model.froude
        self._F = F
        self._c = profile.c
        self._q = profile.q
        self._slope, _ = _make_slope(F, profile.c, profile.q, profile.h_s)

    # -- pointwise in h ----------------------------------------------------

    def _u(self, h):
        return self._c - self._q / h

    def alpha1_h(self, h):
        return -self._q / h - np.sqrt(h) / self._F

    def alpha2_h(self, h):
        return -self._q / h + np.sqrt(h) / self._F

    def dalpha1_dh(self, h):
        return self._q / h**2 - 1.0 / (2.0 * self._F * np.sqrt(h))

    def dalpha2_dh(self, h):
        return self._q / h**2 + 1.0 / (2.0 * self._F * np.sqrt(h))

    # -- pointwise in x ----------------------------------------------------

    def h(self, x):
        return self.profile.h_of_x(x)

    def hprime(self, x):
        return self._slope(np.asarray(self.profile.h_of_x(x)))

    def alpha1(self, x):
        return self.alpha1_h(np.asarray(self.profile.h_of_x(x)))

    def alpha2(self, x):
        return self.alpha2_h(np.asarray(self.profile.h_of_x(x)))

    def alpha1_prime(self, x):
        h = np.asarray(self.profile.h_of_x(x))
        return self.dalpha1_dh(h) * self._slope(h)

    def alpha2_prime(self, x):
        h = np.asarray(self.profile.h_of_x(x))
        return self.dalpha2_dh(h) * self._slope(h)

    def T_matrix(self, x):
        """Eigenvector matrix, columns (-F sqrt(h), 1) and (F sqrt(h), 1)."""
        h = np.atleast_1d(np.asarray(self.profile.h_of_x(x)))
        phi = self._F * np.sqrt(h)
        T = np.zeros(h.shape + (2, 2))
        T[..., 0, 0] = -phi
        T[..., 0, 1] = phi
        T[..., 1, 0] = 1.0
        T[..., 1, 1] = 1.0
        return T

    def coupling_matrix(self, x):
        """The zeroth-order matrix M with diag (gamma_1, gamma_2) and
        off-diagonal (beta_1; beta_2), from T^{-1} A0^{-1} ((A T)' - E T)."""
        h = np.atleast_1d(np.asarray(self.profile.h_of_x(x), dtype=float))
        F, c, q = self._F, self._c, self._q
        U = c - q / h
        hp = self._slope(h)
        sq = np.sqrt(h)
        phi = F * sq
        dU = q / h**2
        dphi = F / (2.0 * sq)
        a1 = -q / h - sq / F
        a2 = -q / h + sq / F
        da1 = self.dalpha1_dh(h)
        da2 = self.dalpha2_dh(h)

        # A0 T columns and their h-derivatives
        a0t1 = np.stack([-phi, h - U * phi], axis=-1)
        a0t2 = np.stack([phi, h + U * phi], axis=-1)
        da0t1 = np.stack([-dphi, 1.0 - (dU * phi + U * dphi)], axis=-1)
        da0t2 = np.stack([dphi, 1.0 + dU * phi + U * dphi], axis=-1)

        # d(A T_j)/dx with A T_j = alpha_j A0 T_j
        dat1 = (da1[..., None] * a0t1 + a1[..., None] * da0t1) * hp[..., None]
        dat2 = (da2[..., None] * a0t2 + a2[..., None] * da0t2) * hp[..., None]

        # E T with E = [[0, 0], [1, -2U]]
        et = np.zeros(h.shape + (2, 2))
        et[..., 1, 0] = -phi - 2.0 * U
        et[..., 1, 1] = phi - 2.0 * U

        rhs = np.zeros(h.shape + (2, 2))
        rhs[..., :, 0] = dat1 - et[..., :, 0]
        rhs[..., :, 1] = dat2 - et[..., :, 1]

        # A0^{-1} = [[1, 0], [-U/h, 1/h]]
        a0inv = np.zeros(h.shape + (2, 2))
        a0inv[..., 0, 0] = 1.0
        a0inv[..., 1, 0] = -U / h
        a0inv[..., 1, 1] = 1.0 / h

        # T^{-1} = [[-1/(2 phi), 1/2], [1/(2 phi), 1/2]]
        tinv = np.zeros(h.shape + (2, 2))
        tinv[..., 0, 0] = -1.0 / (2.0 * phi)
        tinv[..., 0, 1] = 0.5
        tinv[..., 1, 0] = 1.0 / (2.0 * phi)
        tinv[..., 1, 1] = 0.5

        return tinv @ a0inv @ rhs

    def _coupling_entry(self, x, r, c):
        out = self.coupling_matrix(x)[..., r, c]
        return float(out[0]) if np.ndim(x) == 0 else out

    def gamma1(self, x):
        return self._coupling_entry(x, 0, 0)

    def gamma2(self, x):
        return self._coupling_entry(x, 1, 1)

    def beta1(self, x):
        return self._coupling_entry(x, 0, 1)

    def beta2(self, x):
        return self._coupling_entry(x, 1, 0)

    def AT_column(self, x, mode):
        """(A T_mode)(x) = alpha_mode * A0 T_mode as a 2-vector."""
        h = float(self.profile.h_of_x(x))
        U = self._c - self._q / h
        phi = self._F * np.sqrt(h)
        if mode == 1:
            a = self.alpha1_h(h)
            vec = np.array([-phi, h - U * phi])
        elif mode == 2:
            a = self.alpha2_h(h)
            vec = np.array([phi, h + U * phi])
        else:
            raise InvalidInputError("mode must be 1 or 2")
        return a * vec

    def translation_mode(self, x):
        """u-coordinates of the profile derivative, u = T^{-1} (h', U')."""
        h = np.atleast_1d(np.asarray(self.profile.h_of_x(x)))
        hp = self._slope(h)
        Up = self._q * hp / h**2
        phi = self._F * np.sqrt(h)
        u1 = -hp / (2.0 * phi) + Up / 2.0
        u2 = hp / (2.0 * phi) + Up / 2.0
        return np.stack([u1, u2], axis=0)

    def jump_f0(self):
        """[f0] across the shock, downstream state minus upstream state."""
        m = self.profile.model
        hr = float(self.profile.h_of_x(0.0))
        hl = float(self.profile.h_of_x(self.profile.X))
        return m.f0(hr, self._u(hr)) - m.f0(hl, self._u(hl))

    def jump_source(self):
        m = self.profile.model
        hr = float(self.profile.h_of_x(0.0))
        hl = float(self.profile.h_of_x(self.profile.X))
        return m.source(hr, self._u(hr)) - m.source(hl, self._u(hl))


@dataclass
class CharacteristicData:
    """Characteristic quantities sampled on the profile grid.

    ``T[i]`` diagonalizes ``A0^{-1} A`` at grid point i; the sonic-point
    derivatives are the exact chain-rule values, not grid differences.
    ``fields`` evaluates every quantity at arbitrary x for quadrature and for
    the simulator.
    """

    grid: np.ndarray
    alpha1: np.ndarray
    alpha2: np.ndarray
    gamma1: np.ndarray
    gamma2: np.ndarray
    beta1: np.ndarray
    beta2: np.ndarray
    T: np.ndarray
    alpha1_prime_xs: float
    alpha2_prime_xs: float
    gamma2_xs: float
    fields: SVCharacteristicFields


def characteristics(p: RollWaveProfile) -> CharacteristicData:
    """Diagonalize the linearized system along the profile.

    The speeds come out in closed form, ``alpha_{1,2} = U - c -/+ sqrt(h)/F``,
    with ``alpha_1 < alpha_2`` everywhere, ``alpha_1 < 0`` on the whole cell
    and ``alpha_2`` crossing zero transversally at the sonic point.
    """
    fields = SVCharacteristicFields(p)
    x = p.grid
    Mc = fields.coupling_matrix(x)
    a2p = float(fields.alpha2_prime(p.x_s))
    if not a2p > 0:
        raise StructuralAssumptionError("alpha_2 must cross zero with positive slope")
    return CharacteristicData(
        grid=x,
        alpha1=fields.alpha1(x),
        alpha2=fields.alpha2(x),
        gamma1=Mc[..., 0, 0],
        gamma2=Mc[..., 1, 1],
        beta1=Mc[..., 0, 1],
        beta2=Mc[..., 1, 0],
        T=fields.T_matrix(x),
        alpha1_prime_xs=float(fields.alpha1_prime(p.x_s)),
        alpha2_prime_xs=a2p,
        gamma2_xs=float(fields.gamma2(p.x_s)),
        fields=fields,
    )


# ---------------------------------------------------------------------------
# jump coefficients and stability index
# ---------------------------------------------------------------------------


def _det2(u, v):
    return u[0] * v[1] - u[1] * v[0]


@dataclass(frozen=True)
class JumpCoefficients:
    """Boundary condition for the transverse mode and shift dynamics.

    The incoming trace satisfies

        u_1(X-) = a0 u_1(X+) + b0 u_2(X-) + c0 u_2(X+) + d0 . G + e0 y(X),

    and the shift velocity is recovered as

        dy/dt = y_row_y * y + y_row_u1_0 u_1(0+) + y_row_u2_0 u_2(0+)
                + y_row_u2_X u_2(0-) + y_row_G . G,

    where traces on the far side of a shock carry the Floquet phase (applied
    by the simulator, not baked in here).  ``a0`` equals the determinant
    ratio C of the stability index by the Cramer formula.
    """

    a0: float
    b0: float
    c0: float
    d0: np.ndarray
    e0: float
    lopatinsky_det: float
    y_row_u1_0: float
    y_row_u2_0: float
    y_row_u2_X: float
    y_row_y: float
    y_row_G: np.ndarray


def jump_coefficients(p: RollWaveProfile, cd: CharacteristicData,
                      det_tol: float = 1e-12) -> JumpCoefficients:
    """Solve the linearized jump conditions for the incoming trace and dy/dt.

    The two unknowns at a shock are the incoming transverse trace u_1(X-) and
    the shift velocity; everything else is outgoing.  Solvability is exactly
    the nonvanishing of det[(A T_1)(X-), [f0]].
    """
    fields = cd.fields
    at1_0 = fields.AT_column(0.0, 1)
    at1_X = fields.AT_column(p.X, 1)
    at2_0 = fields.AT_column(0.0, 2)
    at2_X = fields.AT_column(p.X, 2)
    jf0 = fields.jump_f0()
    jR = fields.jump_source()

    DX = _det2(at1_X, jf0)
    scale = max(np.max(np.abs(at1_X)) * np.max(np.abs(jf0)), 1e-300)
    if abs(DX) < det_tol * scale:
        raise LopatinskyDegenerateError("boundary system is numerically singular")

    a0 = _det2(at1_0, jf0) / DX
    b0 = -_det2(at2_X, jf0) / DX
    c0 = _det2(at2_0, jf0) / DX
    d0 = np.array([-jf0[1], jf0[0]]) / DX  # row applied to G: -det(G, [f0])/DX
    e0 = -_det2(jR, jf0) / DX

    return JumpCoefficients(
        a0=float(a0), b0=float(b0), c0=float(c0), d0=d0, e0=float(e0),
        lopatinsky_det=float(DX),
        y_row_u1_0=float(-_det2(at1_X, at1_0) / DX),
        y_row_u2_0=float(-_det2(at1_X, at2_0) / DX),
        y_row_u2_X=float(_det2(at1_X, at2_X) / DX),
        y_row_y=float(_det2(at1_X, jR) / DX),
        y_row_G=np.array([-at1_X[1], at1_X[0]]) / DX,
    )


def _cell_gauss(f, grid):
    """Composite Gauss quadrature of a vectorized integrand over grid cells."""
    a = grid[:-1]
    b = grid[1:]
    mid = (a + b) / 2.0
    half = (b - a) / 2.0
    nodes = mid[:, None] + half[:, None] * _GAUSS_NODES[None, :]
    vals = f(nodes.ravel()).reshape(nodes.shape)
    return float(np.sum(half[:, None] * _GAUSS_WEIGHTS[None, :] * vals))


@dataclass(frozen=True)
class StabilityIndexReport:
    """High-frequency stability data for one profile.

    ``C`` is the boundary determinant ratio, ``transit_integral`` is
    ``int_0^X gamma_1/alpha_1``, and ``index = exp(transit_integral) * C``.
    ``hf_abscissa = log(index) / int_0^X |alpha_1|^{-1}`` is the real-part
    asymptote of the high-frequency spectrum: negative exactly when the
    index is below one.  ``a_from_solve`` re-derives C by solving the linear
    system instead of the determinant ratio.
    """

    C: float
    transit_integral: float
    index: float
    hf_abscissa: float
    a0: float
    b0: float
    c0: float
    d0: np.ndarray
    e0: float
    lopatinsky_det: float
    a_from_solve: float
    inv_speed_integral: float

    def to_dict(self):
        return {
            "C": float(self.C),
            "transit_integral": float(self.transit_integral),
            "index": float(self.index),
            "hf_abscissa": float(self.hf_abscissa),
            "a0": float(self.a0),
            "b0": float(self.b0),
            "c0": float(self.c0),
            "d0": [float(v) for v in self.d0],
            "e0": float(self.e0),
            "lopatinsky_det": float(self.lopatinsky_det),
        }


def stability_index(p: RollWaveProfile, cd: CharacteristicData) -> StabilityIndexReport:
    """Compute the high-frequency stability index and boundary coefficients."""
    fields = cd.fields
    jc = jump_coefficients(p, cd)

    def integrand(x):
        return fields.gamma1(x) / fields.alpha1(x)

    transit = _cell_gauss(integrand, p.grid)
    inv_speed = _cell_gauss(lambda x: 1.0 / np.abs(fields.alpha1(x)), p.grid)

    at1_0 = fields.AT_column(0.0, 1)
    at1_X = fields.AT_column(p.X, 1)
    jf0 = fields.jump_f0()
    sol = np.linalg.solve(np.column_stack([at1_X, jf0]), at1_0)

    index = float(np.exp(transit) * jc.a0)
    hf = float(np.log(abs(index)) / inv_speed) if index != 0 else -np.inf
    return StabilityIndexReport(
        C=float(jc.a0), transit_integral=float(transit), index=index,
        hf_abscissa=hf, a0=jc.a0, b0=jc.b0, c0=jc.c0, d0=jc.d0, e0=jc.e0,
        lopatinsky_det=jc.lopatinsky_det, a_from_solve=float(sol[0]),
        inv_speed_integral=float(inv_speed),
    )


def hs_threshold(p: RollWaveProfile, cd: CharacteristicData) -> float:
    """Sobolev threshold of the sonic mode: slaving holds for s above
    ``1/2 - gamma_2(x_s) / alpha_2'(x_s)``."""
    if cd.alpha2_prime_xs <= 0:
        raise StructuralAssumptionError("alpha_2'(x_s) must be positive")
    return 0.5 - cd.gamma2_xs / cd.alpha2_prime_xs


def sonic_mode_solvable(lam_re: float, gamma_s: float, d_s: float, k: float) -> bool:
    """Solvability of the local model d_s (x - x_s) u' = -(lambda + gamma_s) u
    at derivative order k: requires (Re lambda + gamma_s)/d_s > 1/2 - k."""
    if d_s <= 0:
        raise StructuralAssumptionError("outgoing sonic mode needs d_s > 0")
    return (lam_re + gamma_s) / d_s > 0.5 - k


# ---------------------------------------------------------------------------
# damping weights
# ---------------------------------------------------------------------------


@dataclass
class DampingWeights:
    """Energy weights for both modes on one periodic cell.

    ``omega1`` realizes a constant interior dissipation rate
    ``delta_1 = epsilon`` for the transverse mode; ``omega2`` freezes the
    sonic-mode rate at its sonic-point value ``delta_2``.  ``eta1`` is the
    boundary dissipation margin of the transverse mode; its zero-epsilon
    limit equals ``1 - index^2``, so positivity at small epsilon is the
    energy-side face of high-frequency spectral stability.
    """

    epsilon: float
    C0: float
    grid: np.ndarray
    omega1: np.ndarray
    omega2: np.ndarray
    delta1: float
    delta2: float
    eta1: float
    eta1_zero: float
    advisory: str | None
    _fields: SVCharacteristicFields
    _sonic_limit: float
    _g2_xs: float
    _a2p_xs: float

    def _omega1_exponent(self, xs):
        return _cumulative_gauss(self._omega1_integrand, xs)

    def _omega1_integrand(self, x):
        f = self._fields
        return 2.0 * (f.gamma1(x) - self.epsilon) / f.alpha1(x)

    def _omega2_integrand(self, x):
        f = self._fields
        x = np.asarray(x, dtype=float)
        a2 = f.alpha2(x)
        xs = f.profile.x_s
        near = np.abs(x - xs) < 1e-7 * max(f.profile.X, 1.0)
        out = np.empty_like(np.atleast_1d(a2), dtype=float)
        flat_x = np.atleast_1d(x)
        if np.any(~near):
            xx = flat_x[~near]
            out[~near] = (
                f.alpha2_prime(xx) - self._a2p_xs
                + 2.0 * (f.gamma2(xx) - self._g2_xs)
            ) / f.alpha2(xx)
        if np.any(near):
            out[near] = self._sonic_limit
        return out if np.ndim(x) else float(out[0])

    def omega1_at(self, xs):
        xs = np.asarray(xs, dtype=float)
        f = self._fields
        return np.abs(f.alpha1(xs)) * np.exp(self._omega1_exponent(xs))

    def omega2_at(self, xs):
        return self.C0 * np.exp(_cumulative_gauss(self._omega2_integrand, np.asarray(xs, dtype=float)))


def _cumulative_gauss(f, xs):
    """Cumulative integral of f from 0 to each entry of the sorted array xs."""
    xs = np.atleast_1d(xs)
    pts = np.concatenate([[0.0], xs])
    if np.any(np.diff(pts) < -1e-14):
        order = np.argsort(xs)
        inv = np.empty_like(order)
        inv[order] = np.arange(order.size)
        return _cumulative_gauss(f, xs[order])[inv]
    a = pts[:-1]
    b = pts[1:]
    mid = (a + b) / 2.0
    half = (b - a) / 2.0
    nodes = mid[:, None] + half[:, None] * _GAUSS_NODES[None, :]
    vals = np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape)
    pieces = np.sum(half[:, None] * _GAUSS_WEIGHTS[None, :] * vals, axis=1)
    return np.cumsum(pieces)


def damping_weights(p: RollWaveProfile, cd: CharacteristicData,
                    epsilon: float, C0: float) -> DampingWeights:
    """Build the mode weights for the damping energy at given margins.

    Needs the high-frequency index below one; too large an epsilon makes the
    transverse boundary margin ``eta1`` nonpositive even then, which is
    reported through the ``advisory`` field rather than an error.
    """
    if epsilon <= 0 or C0 <= 0:
        raise InvalidInputError("epsilon and C0 must be positive")
    rep = stability_index(p, cd)
    if abs(rep.index) >= 1.0:
        raise NoDampingWeightsError(
            f"high-frequency index {rep.index:.6g} is not below one"
        )
    fields = cd.fields
    a2p = cd.alpha2_prime_xs
    g2 = cd.gamma2_xs
    # limit of the sonic integrand, from one-sided analytic derivatives
    dx = 1e-6 * p.X
    a2pp = (fields.alpha2_prime(p.x_s + dx) - fields.alpha2_prime(p.x_s - dx)) / (2 * dx)
    g2p = (fields.gamma2(p.x_s + dx) - fields.gamma2(p.x_s - dx)) / (2 * dx)
    sonic_limit = float((a2pp + 2.0 * g2p) / a2p)

    delta2 = 0.5 * a2p + g2
    w = DampingWeights(
        epsilon=float(epsilon), C0=float(C0), grid=p.grid,
        omega1=None, omega2=None,
        delta1=float(epsilon), delta2=float(delta2),
        eta1=0.0, eta1_zero=0.0, advisory=None,
        _fields=fields, _sonic_limit=sonic_limit, _g2_xs=float(g2),
        _a2p_xs=float(a2p),
    )
    w.omega1 = w.omega1_at(p.grid)
    w.omega2 = w.omega2_at(p.grid)

    expo_eps = _cumulative_gauss(w._omega1_integrand, np.array([p.X]))[0]
    w.eta1 = float(1.0 - rep.a0**2 * np.exp(expo_eps))
    w.eta1_zero = float(1.0 - rep.a0**2 * np.exp(2.0 * rep.transit_integral))
    if w.eta1 <= 0:
        w.advisory = (
            "eta1 is nonpositive at this epsilon although the index is below "
            "one; decrease epsilon"
        )
    return w


def default_epsilon(p: RollWaveProfile, cd: CharacteristicData) -> float:
    """Half the epsilon at which eta1 drops to half its zero-epsilon value."""
    rep = stability_index(p, cd)
    if abs(rep.index) >= 1.0:
        raise NoDampingWeightsError("no damping margin: index is not below one")
    I2 = rep.index**2
    eps_star = np.log((1.0 + I2) / (2.0 * I2)) / (2.0 * rep.inv_speed_integral)
    return float(eps_star / 2.0)


def default_C0(p: RollWaveProfile, cd: CharacteristicData, epsilon: float,
               margin: float = 4.0) -> float:
    """Double C0 until the sonic boundary absorption dominates.

    Both sonic boundary terms carry a good sign with strength proportional
    to C0; they must absorb the transverse boundary cross terms produced by
    the sonic traces in the boundary condition, whose size is set by the
    transverse end weight and the coefficients b0, c0.
    """
    w1 = damping_weights(p, cd, epsilon, 1.0)
    jc = jump_coefficients(p, cd)
    f = cd.fields
    good_unit = min(
        abs(float(f.alpha2(0.0))),  # Omega2(0+)/C0 = 1
        abs(float(f.alpha2(p.X))) * float(np.exp(
            _cumulative_gauss(w1._omega2_integrand, np.array([p.X]))[0])),
    )
    bad = (abs(float(f.alpha1(p.X))) * float(w1.omega1_at(np.array([p.X]))[0])
           * (jc.b0**2 + jc.c0**2))
    C0 = 1.0
    while C0 * good_unit < margin * bad:
        C0 *= 2.0
    return C0
