"""Analytic axisymmetric TM mode solvers.

Two fundamental radially polarized modes are supported:

* ``fiber_tm01`` -- the TM01 mode of a step-index dielectric fiber
  (Bessel J core, modified Bessel K cladding, real effective index).
* ``wire_spp0`` -- the TM0 surface plasmon of a metal cylinder
  (modified Bessel I in the metal, K outside, complex effective index).

Fields follow the e^{i(beta z - w t)} phasor convention with
beta = n_eff * 2*pi/lambda.  Mode profiles are normalized to unit axial
power by default and expose (Er, Ez, Hphi) at arbitrary radii, which is
what the FDTD mode injection and the overlap integrals consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import special as bessel
from .constants import C0, EPS0, NM, k0_from_lambda_nm, omega_from_lambda_nm

DB_PER_NEPER = 20.0 * math.log10(math.e)

#: first zero of J0; the TM01 cutoff V-number of a step-index fiber
TM01_CUTOFF_V = 2.404825557695773


class ModeError(ValueError):
    """Mode solving failed."""


class NoModeError(ModeError):
    """No guided mode exists for the requested parameters."""


class BranchError(ModeError):
    """Complex root search left the physical mode branch."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


class DegenerateProfileError(ModeError):
    """Profile carries no power; cannot normalize."""


@dataclass
class GuidedMode:
    """One axisymmetric TM guided mode with sampled radial field profiles."""

    kind: str                 # 'fiber_tm01' | 'wire_spp0'
    lambda_nm: float
    radius_nm: float
    n_eff: complex
    eps_in: complex           # relative permittivity inside r < radius
    eps_out: complex          # relative permittivity outside
    amplitude: complex        # scales all fields
    r_nm: np.ndarray          # sample radii (uniform, starts at 0)
    residual: float           # normalized dispersion-relation residual at the root

    def __post_init__(self):
        self._sampled = None

    @property
    def beta(self) -> complex:
        """Propagation constant, rad/m."""
        return self.n_eff * k0_from_lambda_nm(self.lambda_nm)

    @property
    def pitch_nm(self) -> float:
        return float(self.r_nm[1] - self.r_nm[0])

    def fields_at(self, r_nm):
        """(Er, Ez, Hphi) phasors at arbitrary radii (nm), SI units."""
        r = np.asarray(r_nm, dtype=float) * NM
        a = self.radius_nm * NM
        w = omega_from_lambda_nm(self.lambda_nm)
        k0 = k0_from_lambda_nm(self.lambda_nm)
        beta = self.n_eff * k0

        q_in = k0 * np.emath.sqrt(self.n_eff**2 - self.eps_in)
        q_out = k0 * np.emath.sqrt(self.n_eff**2 - self.eps_out)
        if q_out.real < 0:
            q_out = -q_out

        inner = r <= a
        hphi = np.empty(r.shape, dtype=complex)
        ez = np.empty(r.shape, dtype=complex)

        if self.kind == "fiber_tm01":
            # q_in is imaginary (oscillatory core): q_in = i*kappa
            kappa = complex(q_in / 1j).real
            u = kappa * a
            ri = r[inner]
            hphi[inner] = bessel.j1(kappa * ri) / bessel.j1(u)
            ez[inner] = (1j * kappa / (w * EPS0 * self.eps_in)) * (
                bessel.j0(kappa * ri) / bessel.j1(u)
            )
        else:
            if q_in.real < 0:
                q_in = -q_in
            ri = r[inner]
            hphi[inner] = bessel.i1_ratio(q_in * ri, q_in * a)
            ez[inner] = (1j * q_in / (w * EPS0 * self.eps_in)) * bessel.i0_ratio(
                q_in * ri, q_in * a
            )

        ro = r[~inner]
        hphi[~inner] = bessel.k1_ratio(q_out * ro, q_out * a)
        ez[~inner] = (-1j * q_out / (w * EPS0 * self.eps_out)) * bessel.k0_ratio(
            q_out * ro, q_out * a
        )

        eps_local = np.where(inner, self.eps_in, self.eps_out)
        er = beta * hphi / (w * EPS0 * eps_local)

        scale = self.amplitude
        return er * scale, ez * scale, hphi * scale

    @property
    def profile(self):
        """Cached (Er, Ez, Hphi) on the stored radial grid."""
        if self._sampled is None:
            self._sampled = self.fields_at(self.r_nm)
        return self._sampled

    def power(self) -> float:
        """Axial Poynting flux of the profile, W (trapezoid over the grid)."""
        er, _, hphi = self.profile
        return axial_power(self.r_nm, er, hphi)

    def loss_db_per_um(self) -> float:
        return propagation_loss_db_per_um(self)


def axial_power(r_nm, er, hphi) -> float:
    """P = 1/2 Re integral Er conj(Hphi) 2 pi r dr over a sampled profile."""
    r = np.asarray(r_nm, dtype=float) * NM
    integrand = 0.5 * np.real(er * np.conj(hphi)) * 2.0 * np.pi * r
    return float(np.trapezoid(integrand, r))


def unconjugated_self_product(r_nm, er, hphi) -> complex:
    """N = integral Er Hphi 2 pi r dr (bi-orthogonal normalization)."""
    r = np.asarray(r_nm, dtype=float) * NM
    return complex(np.trapezoid(er * hphi * 2.0 * np.pi * r, r))


def _fiber_dispersion(n_eff, n_core, n_clad, radius_nm, lambda_nm):
    """G(n_eff) and its normalization scale for the step-index TM relation."""
    k0a = k0_from_lambda_nm(lambda_nm) * radius_nm * NM
    u = k0a * math.sqrt(max(n_core**2 - n_eff**2, 0.0))
    wv = k0a * math.sqrt(max(n_eff**2 - n_clad**2, 0.0))
    t1 = n_core**2 * wv * bessel.j1(u) * bessel.k0(wv)
    t2 = n_clad**2 * u * bessel.j0(u) * bessel.k1(wv)
    return t1 + t2, abs(t1) + abs(t2)


def _sample_radii(lambda_nm, radius_nm, decay_rate, pitch_nm):
    """Uniform grid from 0 to where the outer tail falls below 1e-4 of peak."""
    if pitch_nm is None:
        pitch_nm = lambda_nm / 400.0
    # exp(-decay*(r-a)) = 1e-4  ->  r = a + ln(1e4)/decay
    if decay_rate > 0:
        r_tail = radius_nm + math.log(1e4) / decay_rate / NM
    else:
        r_tail = 20.0 * lambda_nm
    r_max = max(4.0 * lambda_nm, r_tail)
    r_max = min(r_max, 40.0 * lambda_nm)
    n = int(math.ceil(r_max / pitch_nm)) + 1
    return np.arange(n) * pitch_nm


def solve_fiber_tm01(core_index, clad_index, radius_nm, lambda_nm,
                     pitch_nm=None) -> GuidedMode:
    """Solve the TM01 mode of a step-index fiber.

    Raises NoModeError below cutoff (V < 2.4048), reporting the V-number.
    """
    if not core_index > clad_index >= 1.0:
        raise ModeError(
            f"need core_index > clad_index >= 1, got {core_index}, {clad_index}"
        )
    if radius_nm <= 0:
        raise ModeError(f"radius must be positive, got {radius_nm}")
    k0a = k0_from_lambda_nm(lambda_nm) * radius_nm * NM
    v_number = k0a * math.sqrt(core_index**2 - clad_index**2)
    if v_number <= TM01_CUTOFF_V:
        raise NoModeError(
            f"TM01 below cutoff: V = {v_number:.4f} <= {TM01_CUTOFF_V:.4f} "
            f"(radius {radius_nm} nm at {lambda_nm} nm)"
        )

    # Scan from the core index downward; the first sign change is TM01.
    lo, hi = clad_index, core_index
    margin = (hi - lo) * 1e-9
    grid = np.linspace(hi - margin, lo + margin, 4096)
    vals = [_fiber_dispersion(n, core_index, clad_index, radius_nm, lambda_nm)[0]
            for n in grid]
    bracket = None
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            bracket = (grid[i], grid[i])
            break
        if vals[i] * vals[i + 1] < 0:
            bracket = (grid[i + 1], grid[i])
            break
    if bracket is None:
        raise NoModeError(
            f"no TM01 root found in ({clad_index}, {core_index}) although "
            f"V = {v_number:.4f} exceeds cutoff"
        )
    a, b = bracket
    fa = _fiber_dispersion(a, core_index, clad_index, radius_nm, lambda_nm)[0]
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = _fiber_dispersion(mid, core_index, clad_index, radius_nm, lambda_nm)[0]
        if fm == 0.0 or (b - a) < 1e-16:
            a = b = mid
            break
        if fa * fm < 0:
            b = mid
        else:
            a, fa = mid, fm
    n_eff = 0.5 * (a + b)
    g, scale = _fiber_dispersion(n_eff, core_index, clad_index, radius_nm, lambda_nm)
    residual = abs(g) / scale

    mode = GuidedMode(
        kind="fiber_tm01",
        lambda_nm=float(lambda_nm),
        radius_nm=float(radius_nm),
        n_eff=complex(n_eff),
        eps_in=complex(core_index**2),
        eps_out=complex(clad_index**2),
        amplitude=1.0,
        r_nm=_sample_radii(
            lambda_nm, radius_nm,
            k0_from_lambda_nm(lambda_nm) * math.sqrt(n_eff**2 - clad_index**2),
            pitch_nm,
        ),
        residual=residual,
    )
    return normalize_to_power(mode, 1.0)


def _wire_dispersion(n_eff, eps_m, eps_d, k0a):
    """D(n_eff) and a magnitude scale for the metal-wire TM0 relation."""
    q_m = np.emath.sqrt(n_eff**2 - eps_m)
    q_d = np.emath.sqrt(n_eff**2 - eps_d)
    if q_m.real < 0:
        q_m = -q_m
    if q_d.real < 0:
        q_d = -q_d
    um, ud = k0a * q_m, k0a * q_d
    t1 = (q_m / eps_m) * bessel.i0_over_i1(um)
    t2 = (q_d / eps_d) * bessel.k0_over_k1(ud)
    return t1 + t2, abs(t1) + abs(t2)


def planar_spp_index(eps_m: complex, eps_d: complex) -> complex:
    """Effective index of the flat-interface SPP, sqrt(em*ed/(em+ed))."""
    n = np.emath.sqrt(eps_m * eps_d / (eps_m + eps_d))
    if n.real < 0:
        n = -n
    return complex(n)


def solve_wire_spp(metal_eps, clad_index, radius_nm, lambda_nm,
                   pitch_nm=None) -> GuidedMode:
    """Solve the TM0 SPP mode of a metal cylinder in a uniform dielectric.

    Newton iteration on the complex effective index, seeded from the planar
    SPP and continued from large radii down to the requested one.
    """
    eps_m = complex(metal_eps)
    eps_d = complex(clad_index**2)
    if eps_m.real >= -eps_d.real:
        raise NoModeError(
            f"no bound SPP: Re(eps_metal) = {eps_m.real:.3f} must be below "
            f"-clad_index^2 = {-eps_d.real:.3f}"
        )
    if radius_nm <= 0:
        raise ModeError(f"radius must be positive, got {radius_nm}")

    k0 = k0_from_lambda_nm(lambda_nm)
    n_planar = planar_spp_index(eps_m, eps_d)

    # Continuation: quasi-planar radius down to the target in geometric steps.
    r_start = max(radius_nm, 5.0 * lambda_nm)
    radii = [r_start]
    while radii[-1] > radius_nm * 1.0001:
        radii.append(max(radii[-1] / 1.5, radius_nm))
    radii[-1] = radius_nm

    n = n_planar
    trace = [("seed", n)]
    for r in radii:
        k0a = k0 * r * NM
        h = 1e-9 * max(abs(n), 1.0)
        for it in range(60):
            d, scale = _wire_dispersion(n, eps_m, eps_d, k0a)
            if abs(d) / scale < 1e-13:
                break
            dp = _wire_dispersion(n + h, eps_m, eps_d, k0a)[0]
            dm = _wire_dispersion(n - h, eps_m, eps_d, k0a)[0]
            deriv = (dp - dm) / (2 * h)
            if deriv == 0:
                raise BranchError("zero derivative in Newton iteration", trace)
            step = d / deriv
            # Damp huge steps to stay on the branch.
            if abs(step) > 0.5 * abs(n):
                step *= 0.5 * abs(n) / abs(step)
            n = n - step
            trace.append((r, n))
            if n.real <= math.sqrt(eps_d.real) * 0.999 or n.imag < -1e-9:
                raise BranchError(
                    f"left SPP branch at radius {r:.1f} nm: n_eff = {n}", trace
                )
        else:
            raise BranchError(
                f"Newton did not converge at radius {r:.1f} nm (|D| = {abs(d):.2e})",
                trace,
            )

    k0a = k0 * radius_nm * NM
    d, scale = _wire_dispersion(n, eps_m, eps_d, k0a)
    residual = abs(d) / scale
    if n.imag < 0:
        raise BranchError(f"unphysical gain mode n_eff = {n}", trace)

    decay = k0 * np.emath.sqrt(n**2 - eps_d)
    mode = GuidedMode(
        kind="wire_spp0",
        lambda_nm=float(lambda_nm),
        radius_nm=float(radius_nm),
        n_eff=complex(n),
        eps_in=eps_m,
        eps_out=eps_d,
        amplitude=1.0,
        r_nm=_sample_radii(lambda_nm, radius_nm, decay.real, pitch_nm),
        residual=residual,
    )
    return normalize_to_power(mode, 1.0)


def propagation_loss_db_per_um(mode: GuidedMode) -> float:
    """Propagation power loss in dB per micrometre, 20 log10(e) Im(beta) * 1 um."""
    return DB_PER_NEPER * mode.beta.imag * 1e-6


def normalize_to_power(mode: GuidedMode, p_watt: float) -> GuidedMode:
    """Rescale the mode amplitude so the axial Poynting flux equals p_watt."""
    if p_watt <= 0:
        raise ModeError(f"target power must be positive, got {p_watt}")
    current = mode.power()
    if current <= 0:
        raise DegenerateProfileError("profile carries no axial power")
    mode.amplitude = mode.amplitude * math.sqrt(p_watt / current)
    mode._sampled = None
    return mode
