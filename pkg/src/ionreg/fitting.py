"""Weighted nonlinear least squares and the fit helpers used by the toolkit.

The engine is a damped Gauss-Newton (Levenberg-style) iteration with a
multiplicative damping schedule: the damping factor starts at 1e-3, is
multiplied by 10 when a step increases chi-square and divided by 10 when
a step is accepted.  Parameter covariance is the inverse of the weighted
normal matrix at the optimum, scaled by the reduced chi-square.  Data
points are canonicalized (sorted) internally, so the result is invariant
under reordering of the inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FitResult",
    "SingularFitError",
    "NoCrossingError",
    "least_squares_fit",
    "fit_sine",
    "fit_crosstalk_decay",
    "find_zero_crossing",
]

_LAMBDA0 = 1e-3
_LAMBDA_MAX = 1e12
_LAMBDA_MIN = 1e-14
_COND_LIMIT = 1e13


class SingularFitError(ValueError):
    """Normal matrix is singular; ``parameters`` names the degenerate directions."""

    def __init__(self, message: str, parameters: tuple[int, ...]):
        super().__init__(message)
        self.parameters = parameters


class NoCrossingError(ValueError):
    """The data contain no zero crossing with the requested slope sign."""


@dataclass(frozen=True)
class FitResult:
    """Outcome of a least-squares fit.

    ``residual_norm`` is sqrt(chi-square) with the weighted residuals;
    ``dof`` the number of points minus parameters.  ``notes`` collects
    non-fatal flags such as boundary-pinned parameters.
    """

    params: np.ndarray
    covariance: np.ndarray
    residual_norm: float
    converged: bool
    iterations: int
    dof: int
    notes: tuple[str, ...] = field(default=())

    @property
    def sigmas(self) -> np.ndarray:
        """One-standard-deviation parameter uncertainties."""
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))

    @property
    def chi2(self) -> float:
        return self.residual_norm**2

    @property
    def reduced_chi2(self) -> float:
        return self.chi2 / self.dof if self.dof > 0 else float("nan")

    def to_json_dict(self) -> dict:
        return {
            "params": [float(p) for p in self.params],
            "sigmas": [float(s) for s in self.sigmas],
            "covariance": [[float(c) for c in row] for row in self.covariance],
            "residual_norm": float(self.residual_norm),
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "dof": int(self.dof),
            "notes": list(self.notes),
        }


def _jacobian(model, params, x):
    """Central-difference Jacobian d model / d params, shape (n_points, n_params)."""
    params = np.asarray(params, dtype=float)
    n = params.size
    cols = []
    for j in range(n):
        h = 1e-7 * max(abs(params[j]), 1.0)
        up = params.copy()
        dn = params.copy()
        up[j] += h
        dn[j] -= h
        cols.append((np.asarray(model(up, x), dtype=float) - np.asarray(model(dn, x), dtype=float)) / (2.0 * h))
    return np.stack(cols, axis=1)


def _covariance(a: np.ndarray, scale: float, strict: bool, notes: list[str]) -> np.ndarray:
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        # identify the parameter directions that carry no information
        _, s, vt = np.linalg.svd(a)
        bad = []
        for i, sv in enumerate(s):
            if sv <= s[0] * 1e-13 or s[0] == 0.0:
                bad.extend(int(j) for j in np.flatnonzero(np.abs(vt[i]) > 0.3))
        bad_t = tuple(sorted(set(bad))) or tuple(range(a.shape[0]))
        if strict:
            raise SingularFitError(
                f"normal matrix is singular; degenerate parameter indices {bad_t}", bad_t
            )
        notes.append(f"ill-conditioned normal matrix; parameter indices {bad_t} weakly constrained")
        return scale * np.linalg.pinv(a)
    return scale * np.linalg.inv(a)


def least_squares_fit(
    model,
    p0,
    x,
    y,
    sigma=None,
    max_iter: int = 200,
    ftol: float = 1e-14,
    xtol: float = 1e-14,
    strict_covariance: bool = True,
    accept_callback=None,
) -> FitResult:
    """Fit ``model(params, x) -> y_hat`` to data by damped least squares.

    Parameters
    ----------
    model : callable
        Vectorized model function of (params array, x array).
    p0 : sequence of float
        Initial parameter values.
    x, y : 1-d arrays of equal length
        Data points; internally sorted by (x, y, sigma) so that the fit
        does not depend on input ordering.
    sigma : 1-d array, optional
        Per-point standard deviations (weights 1/sigma^2); ones when omitted.
    strict_covariance : bool
        If True a singular normal matrix at the optimum raises
        :class:`SingularFitError`; otherwise a pseudo-inverse is used and
        the result carries a note.
    accept_callback : callable, optional
        Called as ``accept_callback(iteration, chi2, params)`` after each
        accepted step (used by tests to watch the damping contract).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    p = np.asarray(p0, dtype=float).copy()
    if x.ndim != 1 or x.shape != y.shape:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if sigma is None:
        sigma = np.ones_like(y)
    else:
        sigma = np.asarray(sigma, dtype=float)
        if sigma.shape != y.shape:
            raise ValueError("sigma must match the data shape")
        if np.any(sigma <= 0):
            raise ValueError("sigma entries must be positive")
    if p.ndim != 1 or p.size == 0:
        raise ValueError("p0 must be a non-empty 1-d parameter vector")
    if x.size < p.size:
        raise ValueError(f"need at least {p.size} points to fit {p.size} parameters, got {x.size}")

    order = np.lexsort((sigma, y, x))
    x, y, sigma = x[order], y[order], sigma[order]

    def chi2_of(params):
        r = (y - np.asarray(model(params, x), dtype=float)) / sigma
        return float(r @ r), r

    chi2, r = chi2_of(p)
    if not math.isfinite(chi2):
        raise ValueError("model is not finite at the initial parameters")

    lam = _LAMBDA0
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        jw = _jacobian(model, p, x) / sigma[:, None]
        a = jw.T @ jw
        g = jw.T @ r
        stepped = False
        while lam <= _LAMBDA_MAX:
            try:
                delta = np.linalg.solve(a + lam * np.eye(p.size), g)
            except np.linalg.LinAlgError:
                delta = None
            if delta is not None and np.all(np.isfinite(delta)):
                new_chi2, new_r = chi2_of(p + delta)
                if math.isfinite(new_chi2) and new_chi2 <= chi2:
                    improvement = chi2 - new_chi2
                    p = p + delta
                    chi2, r = new_chi2, new_r
                    lam = max(lam / 10.0, _LAMBDA_MIN)
                    stepped = True
                    if accept_callback is not None:
                        accept_callback(iterations, chi2, p.copy())
                    if improvement <= ftol * (1.0 + chi2) or np.max(np.abs(delta)) <= xtol * (
                        1.0 + np.max(np.abs(p))
                    ):
                        converged = True
                    break
            lam *= 10.0
        if not stepped:
            # damping exhausted: no downhill step exists to machine precision
            converged = True
        if converged:
            break

    notes: list[str] = []
    jw = _jacobian(model, p, x) / sigma[:, None]
    a = jw.T @ jw
    dof = x.size - p.size
    scale = chi2 / dof if dof > 0 else 1.0
    cov = _covariance(a, scale, strict_covariance, notes)
    return FitResult(
        params=p,
        covariance=cov,
        residual_norm=math.sqrt(chi2),
        converged=converged,
        iterations=iterations,
        dof=dof,
        notes=tuple(notes),
    )


# --------------------------------------------------------------------------- #
# sine fit

def _sine_model(params, t):
    offset, amplitude, omega, phase = params
    return offset + amplitude * np.sin(omega * t + phase)


def fit_sine(t, y, sigma=None) -> tuple[dict, FitResult]:
    """Fit ``y = offset + amplitude * sin(omega t + phase)``.

    The angular frequency is initialized from a coarse scan of 256
    candidates between half a cycle over the record and the Nyquist
    limit, then refined together with the other parameters.  Returns a
    parameter dictionary and the underlying :class:`FitResult` (parameter
    order: offset, amplitude, omega, phase; amplitude normalized >= 0,
    phase wrapped to (-pi, pi]).
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.ndim != 1 or t.shape != y.shape:
        raise ValueError("t and y must be 1-d arrays of equal length")
    if t.size < 8:
        raise ValueError(f"sine fit needs at least 8 points, got {t.size}")
    order = np.argsort(t, kind="stable")
    ts, ys = t[order], y[order]
    span = ts[-1] - ts[0]
    dt = np.median(np.diff(ts))
    if span <= 0 or dt <= 0:
        raise ValueError("t values must not be all identical")

    omega_lo = math.pi / span
    omega_hi = math.pi / dt
    candidates = np.linspace(omega_lo, omega_hi, 256)
    best = None
    for w in candidates:
        design = np.column_stack([np.sin(w * ts), np.cos(w * ts), np.ones_like(ts)])
        coef, _, _, _ = np.linalg.lstsq(design, ys, rcond=None)
        sse = float(np.sum((ys - design @ coef) ** 2))
        if best is None or sse < best[0]:
            best = (sse, w, coef)
    _, w0, (a_sin, a_cos, offset0) = best
    amp0 = math.hypot(a_sin, a_cos)
    phase0 = math.atan2(a_cos, a_sin)

    result = least_squares_fit(_sine_model, [offset0, amp0, w0, phase0], t, y, sigma=sigma)
    offset, amplitude, omega, phase = result.params
    # canonical form: positive amplitude and frequency, phase in (-pi, pi]
    if omega < 0:
        omega, phase, amplitude = -omega, -phase, -amplitude
    if amplitude < 0:
        amplitude = -amplitude
        phase += math.pi
    phase = math.remainder(phase, 2.0 * math.pi)
    if phase <= -math.pi:
        phase += 2.0 * math.pi
    params = {"offset": float(offset), "amplitude": float(amplitude), "omega": float(omega), "phase": float(phase)}
    canonical = FitResult(
        params=np.array([offset, amplitude, omega, phase]),
        covariance=result.covariance,
        residual_norm=result.residual_norm,
        converged=result.converged,
        iterations=result.iterations,
        dof=result.dof,
        notes=result.notes,
    )
    return params, canonical


# --------------------------------------------------------------------------- #
# crosstalk decay fit

def _sigmoid(v: float) -> float:
    if v >= 0:
        return 1.0 / (1.0 + math.exp(-v))
    e = math.exp(v)
    return e / (1.0 + e)


def _crosstalk_internal(params, n):
    v, u = params
    p0 = 1.0 / (1.0 + np.exp(-v))
    c = np.exp(u)
    return 0.5 * (1.0 + (2.0 * p0 - 1.0) * np.exp(-2.0 * c * np.asarray(n, dtype=float)))


#: reparameterized C below exp(-25) is treated as pinned at the C = 0 boundary
_C_PIN_LOG = -25.0


def fit_crosstalk_decay(n, f, sigma=None) -> tuple[dict, FitResult]:
    """Fit the exponential neighbor-fidelity decay F(n) = (1 + (2 p0 - 1) e^(-2 C n)) / 2.

    The bounds p0 in [0, 1] and C >= 0 are enforced by fitting the
    smooth reparameterization (logit p0, log C), which keeps the
    covariance meaningful; uncertainties are mapped back with the delta
    method.  A C estimate driven to the lower boundary is flagged in the
    result notes rather than raising.
    """
    n = np.asarray(n, dtype=float)
    f = np.asarray(f, dtype=float)
    if n.ndim != 1 or n.shape != f.shape:
        raise ValueError("n and f must be 1-d arrays of equal length")
    if np.any(n < 0):
        raise ValueError("pulse counts must be non-negative")
    if np.any((f < -0.05) | (f > 1.05)):
        raise ValueError("fidelities must lie in [0, 1]")

    # initial values: p0 from the smallest-n point, C from a log-slope estimate
    idx = np.argsort(n, kind="stable")
    p0_init = float(np.clip(f[idx[0]], 0.55, 0.995))
    contrast = 2.0 * f - 1.0
    usable = (n > 0) & (contrast > 0.05)
    if np.count_nonzero(usable) >= 2:
        slope = np.polyfit(n[usable], np.log(contrast[usable]), 1)[0]
        c_init = float(np.clip(-0.5 * slope, 1e-6, 1.0))
    else:
        c_init = 1e-3
    v0 = math.log(p0_init / (1.0 - p0_init))
    u0 = math.log(c_init)

    result = least_squares_fit(
        _crosstalk_internal, [v0, u0], n, f, sigma=sigma, strict_covariance=False
    )
    v, u = result.params
    p0 = _sigmoid(v)
    c = math.exp(u)
    jac = np.diag([p0 * (1.0 - p0), c])
    cov = jac @ result.covariance @ jac.T
    notes = list(result.notes)
    if u < _C_PIN_LOG:
        notes.append("C pinned at the lower boundary (decay not resolved)")
    if abs(v) > 12.0:
        notes.append("p0 pinned at a boundary")
    external = FitResult(
        params=np.array([p0, c]),
        covariance=cov,
        residual_norm=result.residual_norm,
        converged=result.converged,
        iterations=result.iterations,
        dof=result.dof,
        notes=tuple(notes),
    )
    return {"p0": float(p0), "C": float(c)}, external


# --------------------------------------------------------------------------- #
# zero crossing

def find_zero_crossing(x, y, slope: str = "negative", sigma=None) -> tuple[float, float]:
    """Locate the first zero crossing with the requested slope sign.

    Scans adjacent pairs for a sign change in the requested direction,
    fits a straight line through the four nearest points (weighted by
    ``sigma`` when given) and returns the root with its propagated
    uncertainty.  For noiseless data the uncertainty reflects the local
    deviation from linearity, i.e. it is grid-limited.
    """
    if slope not in ("negative", "positive"):
        raise ValueError(f"slope must be 'negative' or 'positive', got {slope!r}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape or x.size < 2:
        raise ValueError("x and y must be 1-d arrays of equal length >= 2")
    if sigma is not None:
        sigma = np.asarray(sigma, dtype=float)
        if sigma.shape != y.shape:
            raise ValueError("sigma must match the data shape")
    order = np.argsort(x, kind="stable")
    x, y = x[order], y[order]
    if sigma is not None:
        sigma = sigma[order]

    candidates = []
    for i in range(x.size - 1):
        if slope == "negative" and y[i] >= 0.0 > y[i + 1]:
            candidates.append(i)
        elif slope == "positive" and y[i] <= 0.0 < y[i + 1]:
            candidates.append(i)
    if not candidates:
        raise NoCrossingError(f"no zero crossing with {slope} slope in the data")

    # Noisy scans can produce spurious single-pair sign changes on the
    # wrong flank; a candidate only counts if the line fitted through its
    # neighborhood actually has the requested slope sign.
    for pair in candidates:
        x_mid = 0.5 * (x[pair] + x[pair + 1])
        k = min(4, x.size)
        window = np.argsort(np.abs(x - x_mid), kind="stable")[:k]
        window = np.sort(window)
        xw, yw = x[window], y[window]
        sw = sigma[window] if sigma is not None else None

        x_ref = float(np.mean(xw))

        def line(params, xx):
            return params[0] + params[1] * (xx - x_ref)

        fit = least_squares_fit(
            line,
            [float(np.mean(yw)), -1.0 if slope == "negative" else 1.0],
            xw,
            yw,
            sigma=sw,
        )
        a, b = fit.params
        if (slope == "negative" and b >= 0.0) or (slope == "positive" and b <= 0.0):
            continue
        x0 = x_ref - a / b
        caa, cab, cbb = fit.covariance[0, 0], fit.covariance[0, 1], fit.covariance[1, 1]
        shift = x0 - x_ref  # = -a/b
        var = (caa + 2.0 * shift * cab + shift * shift * cbb) / (b * b)
        return float(x0), float(math.sqrt(max(var, 0.0)))
    raise NoCrossingError(
        f"sign changes found, but none with a locally {slope} slope"
    )
