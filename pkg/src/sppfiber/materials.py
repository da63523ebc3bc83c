"""Frequency-dependent permittivity models and the narrow-window Drude fit.

Metals are represented by a Drude model with a conductivity term,

    eps(w) = eps_inf - wp^2 / (w^2 + i*gamma*w) + i*sigma / (eps0*w),

under the e^{-iwt} sign convention (lossy media have Im eps >= 0).
Parameters are obtained by least-squares fitting of tabulated handbook
optical constants over a 100 nm window around the operating wavelength.
Dielectrics are dispersionless.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy.optimize import least_squares

from .constants import EPS0, omega_from_lambda_nm

# Dispersionless fiber indices, overridable via run configs.
SILICA_INDEX = 1.45
SILICON_INDEX = 3.48

FIT_WINDOW_NM = 100.0
MIN_WINDOW_SAMPLES = 4
INTERP_WINDOW_SAMPLES = 8


class MaterialError(ValueError):
    """Invalid material definition or evaluation request."""


class CoverageError(MaterialError):
    """Tabulated data does not cover the requested fit window."""


class FitConvergenceError(MaterialError):
    """The damped least-squares fit failed to converge."""

    def __init__(self, message: str, trace: dict):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class TabulatedOptics:
    """Tabulated complex permittivity samples eps(lambda) of one material."""

    wavelengths_nm: np.ndarray
    eps: np.ndarray
    source_label: str = ""

    def __post_init__(self):
        lam = np.asarray(self.wavelengths_nm, dtype=float)
        eps = np.asarray(self.eps, dtype=complex)
        if lam.size < 2:
            raise MaterialError("tabulated data needs at least 2 entries")
        if not np.all(np.diff(lam) > 0):
            raise MaterialError("tabulated wavelengths must be strictly increasing")
        if np.any(eps.imag < -1e-12):
            raise MaterialError("passive medium requires Im(eps) >= 0 (e^{-iwt} convention)")
        object.__setattr__(self, "wavelengths_nm", lam)
        object.__setattr__(self, "eps", eps)

    def interp(self, lambda_nm):
        """Linearly interpolated complex permittivity at lambda_nm."""
        lam = np.atleast_1d(np.asarray(lambda_nm, dtype=float))
        if lam.min() < self.wavelengths_nm[0] or lam.max() > self.wavelengths_nm[-1]:
            raise CoverageError(
                f"wavelength {lambda_nm} nm outside tabulated range "
                f"[{self.wavelengths_nm[0]}, {self.wavelengths_nm[-1]}] nm"
            )
        re = np.interp(lam, self.wavelengths_nm, self.eps.real)
        im = np.interp(lam, self.wavelengths_nm, self.eps.imag)
        out = re + 1j * im
        return out[0] if np.isscalar(lambda_nm) else out

    @classmethod
    def from_file(cls, path, source_label=None) -> "TabulatedOptics":
        """Load whitespace-separated columns ``lambda_nm eps_re eps_im`` ('#' comments)."""
        arr = np.loadtxt(path, comments="#", ndmin=2)
        if arr.shape[1] < 3:
            raise MaterialError(f"{path}: expected 3 columns lambda_nm eps_re eps_im")
        label = source_label
        if label is None:
            with open(path) as fh:
                first = fh.readline().strip()
            label = first.lstrip("# ").strip() if first.startswith("#") else str(path)
        return cls(arr[:, 0], arr[:, 1] + 1j * arr[:, 2], label)


@dataclass(frozen=True)
class DrudeParams:
    """Drude-with-conductivity parameters (SI units)."""

    eps_inf: float
    omega_p: float  # rad/s
    gamma: float    # rad/s
    sigma: float    # S/m

    def __post_init__(self):
        if self.eps_inf < 1.0:
            raise MaterialError(f"eps_inf must be >= 1, got {self.eps_inf}")
        if self.omega_p <= 0:
            raise MaterialError(f"omega_p must be > 0, got {self.omega_p}")
        if self.gamma < 0 or self.sigma < 0:
            raise MaterialError("gamma and sigma must be >= 0")


@dataclass(frozen=True)
class Material:
    """A dispersionless dielectric, a Drude metal, or vacuum."""

    kind: str  # 'vacuum' | 'dielectric' | 'drude'
    index: float = 1.0
    drude: DrudeParams | None = None
    fit_window_nm: tuple[float, float] | None = None
    label: str = ""
    fit_residual: float = 0.0

    @classmethod
    def vacuum(cls) -> "Material":
        return cls(kind="vacuum", label="vacuum")

    @classmethod
    def dielectric(cls, n: float, label: str = "") -> "Material":
        if n < 1.0:
            raise MaterialError(f"dielectric index must be >= 1, got {n}")
        return cls(kind="dielectric", index=n, label=label or f"dielectric n={n}")

    @classmethod
    def metal(cls, params: DrudeParams, fit_window_nm=None, label="",
              fit_residual=0.0) -> "Material":
        return cls(kind="drude", drude=params, fit_window_nm=fit_window_nm,
                   label=label or "drude metal", fit_residual=fit_residual)

    @property
    def is_metal(self) -> bool:
        return self.kind == "drude"

    def eval_permittivity(self, lambda_nm: float) -> complex:
        """Complex relative permittivity at the given vacuum wavelength."""
        if lambda_nm <= 0:
            raise MaterialError(f"wavelength must be positive, got {lambda_nm} nm")
        if self.kind == "vacuum":
            return 1.0 + 0.0j
        if self.kind == "dielectric":
            return complex(self.index**2)
        if self.fit_window_nm is not None:
            lo, hi = self.fit_window_nm
            if not (lo <= lambda_nm <= hi):
                warnings.warn(
                    f"{self.label}: {lambda_nm} nm outside fit window [{lo}, {hi}] nm",
                    stacklevel=2,
                )
        return drude_permittivity(self.drude, lambda_nm)


def drude_permittivity(p: DrudeParams, lambda_nm) -> complex:
    """Evaluate the Drude-with-conductivity permittivity at lambda_nm."""
    w = omega_from_lambda_nm(1.0) / np.asarray(lambda_nm, dtype=float)  # 2*pi*c/lam
    eps = p.eps_inf - p.omega_p**2 / (w**2 + 1j * p.gamma * w) + 1j * p.sigma / (EPS0 * w)
    return complex(eps) if np.isscalar(lambda_nm) else eps


def _drude_jacobian(p: DrudeParams, w: np.ndarray) -> np.ndarray:
    """Complex partials of eps w.r.t. (eps_inf, omega_p, gamma, sigma)."""
    denom = w**2 + 1j * p.gamma * w
    cols = [
        np.ones_like(w, dtype=complex),
        -2.0 * p.omega_p / denom,
        1j * w * p.omega_p**2 / denom**2,
        1j / (EPS0 * w),
    ]
    return np.stack(cols, axis=1)


@dataclass(frozen=True)
class FitReport:
    """Per-sample relative residuals of a Drude fit over its window."""

    params: DrudeParams
    window_nm: tuple[float, float]
    wavelengths_nm: np.ndarray
    rel_residuals: np.ndarray = field(repr=False)

    @property
    def max_rel_residual(self) -> float:
        return float(np.max(self.rel_residuals))


def fit_drude(data: TabulatedOptics, center_nm: float,
              window_nm: float = FIT_WINDOW_NM) -> FitReport:
    """Fit Drude-with-conductivity parameters over a window around center_nm.

    Minimizes sum |eps_drude(lam_i) - eps_tab(lam_i)|^2 over the window
    samples with damped least squares and an analytic Jacobian.
    """
    lo, hi = center_nm - window_nm / 2.0, center_nm + window_nm / 2.0
    lam0, lam1 = data.wavelengths_nm[0], data.wavelengths_nm[-1]
    if lo < lam0 or hi > lam1:
        raise CoverageError(
            f"fit window [{lo}, {hi}] nm not covered by data [{lam0}, {lam1}] nm"
        )
    mask = (data.wavelengths_nm >= lo) & (data.wavelengths_nm <= hi)
    lam = data.wavelengths_nm[mask]
    eps_tab = data.eps[mask]
    if lam.size < MIN_WINDOW_SAMPLES:
        lam = np.linspace(lo, hi, INTERP_WINDOW_SAMPLES)
        eps_tab = data.interp(lam)

    w = omega_from_lambda_nm(1.0) / lam
    wc = omega_from_lambda_nm(center_nm)
    eps_c = data.interp(center_nm)
    # Initial guess: eps_inf = 1; omega_p from the real-part magnitude at the
    # window center; gamma from the imaginary part; sigma starts at zero.
    wp0 = wc * math.sqrt(max(1.0 - eps_c.real, 1e-6))
    g0 = max(eps_c.imag * wc**3 / wp0**2, 1e-8 * wc)

    # Optimizer works in dimensionless variables (frequencies in units of wc).
    def _params_from(x):
        return DrudeParams(x[0], x[1] * wc, x[2] * wc, x[3] * EPS0 * wc)

    def residuals(x):
        d = drude_permittivity(_params_from(x), lam) - eps_tab
        return np.concatenate([d.real, d.imag])

    def jacobian(x):
        scale = np.array([1.0, wc, wc, EPS0 * wc])
        jc = _drude_jacobian(_params_from(x), w) * scale[np.newaxis, :]
        return np.concatenate([jc.real, jc.imag])

    x0 = np.array([1.0, wp0 / wc, g0 / wc, 0.0])
    result = least_squares(
        residuals, x0, jac=jacobian,
        bounds=([1.0, 1e-12, 0.0, 0.0], [np.inf, np.inf, np.inf, np.inf]),
        method="trf", xtol=1e-14, ftol=1e-14, gtol=1e-14,
    )

    if not result.success:
        raise FitConvergenceError(
            f"Drude fit did not converge: {result.message}",
            trace={"x": result.x.tolist(), "cost": result.cost, "nfev": result.nfev},
        )
    params = _params_from(result.x)
    eps_fit = drude_permittivity(params, lam)
    rel = np.abs(eps_fit - eps_tab) / np.abs(eps_tab)
    return FitReport(params=params, window_nm=(lo, hi), wavelengths_nm=lam,
                     rel_residuals=rel)


_BUNDLED = {"silver": "silver.txt", "silver_ld": "silver_ld.txt",
            "gold": "gold.txt", "aluminium": "aluminium.txt",
            "aluminum": "aluminium.txt"}


def load_bundled(name: str) -> TabulatedOptics:
    """Load one of the bundled metal optical-constants tables by name."""
    key = name.lower()
    if key not in _BUNDLED:
        raise MaterialError(f"no bundled data for {name!r}; have {sorted(set(_BUNDLED))}")
    ref = resources.files("sppfiber.data").joinpath(_BUNDLED[key])
    with resources.as_file(ref) as path:
        return TabulatedOptics.from_file(path)


def fitted_metal(name: str, center_nm: float, window_nm: float = FIT_WINDOW_NM) -> Material:
    """Bundled tabulated data -> windowed Drude fit -> metal Material."""
    data = load_bundled(name)
    report = fit_drude(data, center_nm, window_nm)
    return Material.metal(
        report.params,
        fit_window_nm=report.window_nm,
        label=f"{name} ({data.source_label}; Drude fit @{center_nm:g} nm)",
        fit_residual=report.max_rel_residual,
    )
