"""Separability criteria built on scaled correlation tensors.

Gap convention: ``gap = bound - norm`` for norm criteria and ``gap = min eig(rho^T_B)``
for PPT. Negative gaps certify entanglement; a state is reported as detected when
``gap < -tol``.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .bases import canonical_basis, sic_basis, sic_povm
from .correlation import CorrelationTensor, correlation_tensor, expectation_tensor, norm_factor, scale
from .exceptions import DimensionError, DomainError, PreconditionError
from .linalg_core import fold, partial_transpose, spectral_norm, svd, trace_norm, unfold
from .states import DensityMatrix, StateFamily

DETECTION_TOL = 1e-10
PPT_TOL = 1e-9
THRESHOLD_TOL = 1e-4


@dataclass(frozen=True)
class CriterionReport:
    criterion: str
    params: tuple[float, ...] | None
    lhs: float
    rhs: float
    gap: float
    detected: bool
    tol: float = DETECTION_TOL
    extras: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["params"] = list(self.params) if self.params is not None else None
        return out

    def summary(self) -> str:
        verdict = "ENTANGLED (detected)" if self.detected else "not detected"
        params = "" if self.params is None else " at " + ", ".join(f"{p:g}" for p in self.params)
        return f"{self.criterion}{params}: lhs={self.lhs:.10g} rhs={self.rhs:.10g} gap={self.gap:.6e} -> {verdict}"


@dataclass(frozen=True)
class BoundFactors:
    factors: tuple[float, ...]

    @property
    def product(self) -> float:
        return float(np.prod(self.factors))


def bound_factors(dims: Sequence[int], xs: Sequence[float]) -> BoundFactors:
    return BoundFactors(tuple(norm_factor(d, x) for d, x in zip(dims, xs)))


def _report(name, params, lhs, rhs, tol, **extras) -> CriterionReport:
    gap = float(rhs - lhs)
    return CriterionReport(name, params, float(lhs), float(rhs), gap, gap < -tol, tol, extras)


def _check_params(xs: Sequence[float]) -> tuple[float, ...]:
    xs = tuple(float(x) for x in xs)
    if any(not np.isfinite(x) or x < 0 for x in xs):
        raise DomainError(f"scaling parameters must be finite and >= 0, got {xs}")
    return xs


def _require_bipartite(rho: DensityMatrix) -> None:
    if not isinstance(rho, DensityMatrix):
        raise DomainError(f"expected a DensityMatrix, got {type(rho).__name__}")
    if rho.n_parties != 2:
        raise DimensionError(f"bipartite state required, got dims {rho.dims}")


def canonical_correlation(rho: DensityMatrix) -> CorrelationTensor:
    return correlation_tensor(rho)


def scaled_trace_norm(C: CorrelationTensor, x: float, y: float) -> float:
    """``|| D_x C D_y ||_tr`` for a bipartite canonical correlation matrix."""
    return trace_norm(scale(C, (x, y)).matrix())


def gap_from_tensor(C: CorrelationTensor, x: float, y: float) -> float:
    """``N_A(x) N_B(y) - ||D_x C D_y||_tr`` without catastrophic cancellation.

    Both terms grow like ``x y``, so the naive difference carries an absolute
    error of order ``eps * x * y``. Instead the trace norm is written as
    ``Tr(O^T M)`` with ``O`` the polar factor of ``M = D_x C D_y``; the ``x y``
    parts of the bound and of ``M[0, 0] O[0, 0]`` are cancelled analytically and
    ``1 - O[0, 0]`` is taken from the unit norm of the first row (or column) of
    ``O``. Since ``Tr(O^T M) <= ||M||_tr`` for any contraction ``O``, rounding in
    the SVD can only raise the gap, never fake a detection. The state is
    normalised to unit trace.
    """
    dA, dB = C.party_dims
    c = 1.0 / np.sqrt(dA * dB)
    raw = np.real(C.entries)
    if raw.shape != (dA * dA, dB * dB):
        raise DimensionError(f"expected a bipartite canonical matrix, got shape {raw.shape}")
    if raw[0, 0] <= 0:
        raise DomainError("correlation matrix has non-positive trace entry")
    raw = raw * (c / raw[0, 0])
    M = scale(CorrelationTensor(raw, C.party_dims, C.basis_kinds), (x, y)).matrix().copy()
    M[0, 0] = x * y * c
    U, _, V = svd(M)
    O = (U @ V.T).real
    edge = O[0, 1:] if O.shape[0] <= O.shape[1] else O[1:, 0]
    o00 = O[0, 0]
    one_minus_o00 = float(edge @ edge) / (1.0 + o00) if o00 > 0 else 1.0 - o00
    nA, nB = norm_factor(dA, x), norm_factor(dB, y)
    head = ((dA - 1) * (dB - 1) + (dA - 1) * y * y + (dB - 1) * x * x) / (dA * dB) / (nA * nB + x * y * c)
    rest = M[0, 1:] @ O[0, 1:] + M[1:, 0] @ O[1:, 0] + np.sum(M[1:, 1:] * O[1:, 1:])
    return float(head + x * y * c * one_minus_o00 - rest)


def family_gap(
    rho: DensityMatrix,
    x: float,
    y: float,
    tol: float = DETECTION_TOL,
    *,
    C: CorrelationTensor | None = None,
    name: str = "family",
) -> CriterionReport:
    """Evaluate ``N_A(x) N_B(y) - ||D_x C^can D_y||_tr``.

    ``gap`` comes from :func:`gap_from_tensor`; ``lhs`` and ``rhs`` are the plain
    values and agree with it up to rounding of order ``eps * x * y``.

    ``C`` may be passed to reuse a precomputed canonical correlation matrix.
    """
    _require_bipartite(rho)
    x, y = _check_params((x, y))
    if C is None:
        C = canonical_correlation(rho)
    lhs = scaled_trace_norm(C, x, y)
    rhs = bound_factors(rho.dims, (x, y)).product
    gap = gap_from_tensor(C, x, y)
    return CriterionReport(name, (x, y), float(lhs), float(rhs), gap, gap < -tol, tol, {})


NAMED_POINTS: dict[str, Callable[[int, int], tuple[float, float]]] = {
    "dV": lambda dA, dB: (0.0, 0.0),
    "CCNR": lambda dA, dB: (1.0, 1.0),
    "Fei": lambda dA, dB: (np.sqrt(2 / dA), np.sqrt(2 / dB)),
    "ESIC": lambda dA, dB: (np.sqrt(dA + 1), np.sqrt(dB + 1)),
}


def named_point(name: str, dims: Sequence[int]) -> tuple[float, float]:
    key = _canonical_name(name)
    return tuple(float(v) for v in NAMED_POINTS[key](*dims))


def _canonical_name(name: str) -> str:
    lookup = {k.lower(): k for k in NAMED_POINTS}
    key = lookup.get(name.lower().replace("-", "").replace("_", ""))
    if key is None:
        raise DomainError(f"unknown criterion {name!r}; expected one of {sorted(NAMED_POINTS)}")
    return key


def named_criterion(rho: DensityMatrix, name: str, tol: float = DETECTION_TOL) -> CriterionReport:
    """dV (0,0), CCNR (1,1), Fei (sqrt(2/d)), ESIC (sqrt(d+1)) members of the family."""
    _require_bipartite(rho)
    key = _canonical_name(name)
    x, y = named_point(key, rho.dims)
    return family_gap(rho, x, y, tol, name=key)


def _esic_mixing_coefficient(d: int, sign: str) -> float:
    # Pi_a = sum_b A_ab G_b / sqrt(d(d+1)) with A = 1 + a J
    if sign == "minus":
        return (np.sqrt(d + 1) - 1) / d**2
    return -(np.sqrt(d + 1) + 1) / d**2


def esic_direct(rho: DensityMatrix, sign: str = "minus", tol: float = DETECTION_TOL) -> CriterionReport:
    """ESIC bound on the SIC overlap matrix ``P_ab = <Pi^A_a x Pi^B_b>``.

    ``extras`` records the three equivalent norms: ``sqrt(dA(dA+1)dB(dB+1)) ||P||_tr``,
    ``||A C B||_tr`` with ``C`` in the SIC-derived bases, and the scaled canonical norm
    at ``(sqrt(dA+1), sqrt(dB+1))``.
    """
    _require_bipartite(rho)
    dA, dB = rho.dims
    sics = [sic_povm(dA), sic_povm(dB)]
    P = np.real(expectation_tensor(rho.mat, rho.dims, [s.effects for s in sics]))
    factor = np.sqrt(dA * (dA + 1) * dB * (dB + 1))
    lhs = trace_norm(P)
    rhs = 2.0 / factor

    C_sic = correlation_tensor(rho, [sic_basis(dA, sign), sic_basis(dB, sign)]).matrix()
    A = np.eye(dA * dA) + _esic_mixing_coefficient(dA, sign) * np.ones((dA * dA, dA * dA))
    B = np.eye(dB * dB) + _esic_mixing_coefficient(dB, sign) * np.ones((dB * dB, dB * dB))
    ACB = A @ C_sic @ B
    x, y = named_point("ESIC", rho.dims)
    canon = scaled_trace_norm(canonical_correlation(rho), x, y)
    return _report(
        "ESIC", (x, y), lhs, rhs, tol,
        scaled_norm=float(factor * lhs),
        acb_norm=trace_norm(ACB),
        acb_residual=float(np.max(np.abs(factor * P - ACB))),
        canonical_scaled_norm=canon,
        sign=sign,
    )


def ppt_check(rho: DensityMatrix, subsystem: int = -1, tol: float = PPT_TOL) -> CriterionReport:
    """Smallest eigenvalue of the partial transpose; detected iff ``< -tol``."""
    if not isinstance(rho, DensityMatrix):
        raise DomainError(f"expected a DensityMatrix, got {type(rho).__name__}")
    pt = partial_transpose(rho.mat, rho.dims, subsystem)
    lam = float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0])
    return CriterionReport("PPT", None, lam, 0.0, lam, lam < -tol, tol)


# ---------------------------------------------------------------------------
# parameter search and thresholds
# ---------------------------------------------------------------------------

def default_grid(n: int = 25, lo: float = 1e-2, hi: float = 1e5) -> np.ndarray:
    """``{0}`` followed by ``n - 1`` log-spaced points in ``[lo, hi]``."""
    return np.concatenate([[0.0], np.logspace(np.log10(lo), np.log10(hi), n - 1)])


@dataclass(frozen=True)
class OptimizationResult:
    x: float
    y: float
    gap: float
    report: CriterionReport


def optimize_xy(
    rho: DensityMatrix,
    grid: Sequence[float] | int | None = None,
    refine: bool = True,
    tol: float = DETECTION_TOL,
) -> OptimizationResult:
    """Minimize the family gap over ``(x, y)``: grid search, then Nelder-Mead."""
    _require_bipartite(rho)
    if grid is None or isinstance(grid, int):
        grid = default_grid(grid or 25)
    grid = np.asarray(grid, dtype=float)
    C = canonical_correlation(rho)
    gaps = np.array([[gap_from_tensor(C, x, y) for y in grid] for x in grid])
    i, j = np.unravel_index(np.argmin(gaps), gaps.shape)
    best = (float(grid[i]), float(grid[j]), float(gaps[i, j]))

    if refine:
        x0 = np.array(best[:2])
        step = np.where(x0 > 0, 0.1 * x0, 0.05)
        simplex = np.array([x0, x0 + [step[0], 0], x0 + [0, step[1]]])
        hi = float(grid.max())

        def fold_in(v):
            # reflect into [0, hi]: the search stays inside the grid's range
            return np.minimum(np.abs(v), hi)

        res = minimize(
            lambda v: gap_from_tensor(C, *fold_in(v)),
            x0, method="Nelder-Mead", options=dict(initial_simplex=simplex, xatol=1e-8, fatol=1e-14, maxiter=2000),
        )
        if res.fun < best[2]:
            x_opt, y_opt = fold_in(res.x)
            best = (float(x_opt), float(y_opt), float(res.fun))

    report = family_gap(rho, best[0], best[1], tol, C=C, name="family_opt")
    return OptimizationResult(report.params[0], report.params[1], report.gap, report)


CriterionFn = Callable[[DensityMatrix], CriterionReport]


def make_criterion(
    name: str,
    x: float | None = None,
    y: float | None = None,
    xs: Sequence[float] | None = None,
    tol: float = DETECTION_TOL,
) -> CriterionFn:
    """Build a ``state -> CriterionReport`` callable from a criterion name.

    Names: ``family`` (needs ``x``, ``y``), ``dV``, ``CCNR``, ``Fei``, ``ESIC``,
    ``esic_direct``, ``PPT``, ``filtered_dV``, ``optimal``, ``kyfan``, ``nuclear_lb``.
    """
    key = name.lower().replace("-", "_")
    if key == "family":
        if x is None or y is None:
            raise DomainError("the family criterion needs both x and y")
        return lambda rho: family_gap(rho, x, y, tol)
    if key in ("dv", "ccnr", "fei", "esic"):
        return lambda rho: named_criterion(rho, name, tol)
    if key == "esic_direct":
        return lambda rho: esic_direct(rho, tol=tol)
    if key == "ppt":
        return lambda rho: ppt_check(rho)
    if key in ("filtered_dv", "lfcmc"):
        from .filtering import filtered_dv_gap
        return lambda rho: filtered_dv_gap(rho, tol=tol)
    if key == "optimal":
        return lambda rho: optimize_xy(rho, tol=tol).report
    if key in ("kyfan", "nuclear_lb"):
        def crit(rho):
            return multipartite_gap(rho, xs if xs is not None else (1.0,) * rho.n_parties, key, tol)
        return crit
    raise DomainError(f"unknown criterion {name!r}")


@dataclass(frozen=True)
class ThresholdResult:
    p_star: float | None
    bracket: tuple[float, float] | None
    evaluations: int
    label: str = ""

    @property
    def detected(self) -> bool:
        return self.p_star is not None


def threshold_scan(
    family: StateFamily | Callable[[float], DensityMatrix],
    criterion: CriterionFn | str,
    tol: float = THRESHOLD_TOL,
    check_points: int = 11,
) -> ThresholdResult:
    """Smallest mixing weight ``p`` at which ``criterion`` detects the family member.

    Detection is assumed monotone in ``p``; a coarse pre-scan warns otherwise.
    Returns ``p_star=None`` if ``p = 1`` is not detected.
    """
    crit = make_criterion(criterion) if isinstance(criterion, str) else criterion
    label = getattr(family, "label", "")
    n_eval = 0

    def detected(p: float) -> bool:
        nonlocal n_eval
        n_eval += 1
        return crit(family(p)).detected

    if check_points:
        pattern = [detected(p) for p in np.linspace(0, 1, check_points)]
        first = pattern.index(True) if True in pattern else None
        if first is not None and not all(pattern[first:]):
            warnings.warn(f"detection along {label or 'family'} is not monotone in p", RuntimeWarning)
    if not detected(1.0):
        return ThresholdResult(None, None, n_eval, label)
    if detected(0.0):
        return ThresholdResult(0.0, (0.0, 0.0), n_eval, label)
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if detected(mid):
            hi = mid
        else:
            lo = mid
    return ThresholdResult(hi, (lo, hi), n_eval, label)


# ---------------------------------------------------------------------------
# multipartite tensor norms
# ---------------------------------------------------------------------------

def kyfan_norm(T: np.ndarray) -> tuple[float, int]:
    """Largest unfolding trace norm and the (smallest) mode attaining it."""
    values = [trace_norm(unfold(T, n)) for n in range(T.ndim)]
    mode = int(np.argmax(values))
    return values[mode], mode


def spectral_norm_upper_bound(M: np.ndarray) -> float:
    """``min_n ||M_(n)||_inf``, an upper bound on the tensor spectral norm."""
    return min(spectral_norm(unfold(M, n)) for n in range(M.ndim))


def _contract_all_but(T: np.ndarray, vecs: list[np.ndarray], skip: int) -> np.ndarray:
    out = T
    # contract from the last mode down so earlier axis numbers stay valid
    for n in reversed(range(T.ndim)):
        if n != skip:
            out = np.tensordot(out, vecs[n], axes=([n], [0]))
    return out


def rank_one_power_iteration(
    T: np.ndarray, vecs: list[np.ndarray], max_iter: int = 500, rtol: float = 1e-13,
) -> tuple[float, list[np.ndarray]]:
    """Alternating (higher-order) power iteration for the best rank-1 approximation."""
    vecs = [v / np.linalg.norm(v) for v in vecs]
    lam = 0.0
    for _ in range(max_iter):
        for n in range(T.ndim):
            v = _contract_all_but(T, vecs, n)
            nv = np.linalg.norm(v)
            if nv == 0:
                return 0.0, vecs
            vecs[n] = v / nv
        new = float(_contract_all_but(T, vecs, 0) @ vecs[0])
        if abs(abs(new) - abs(lam)) <= rtol * max(abs(new), 1e-300):
            lam = new
            break
        lam = new
    return lam, vecs


def tensor_nuclear_lower_bound(
    T: np.ndarray, restarts: int = 8, seed: int = 0, return_details: bool = False,
):
    """Certified lower bound on the tensor trace (nuclear) norm.

    Uses ``||T||_tr >= |<M|T>| / ||M||_inf`` with the spectral norm replaced by the
    upper bound :func:`spectral_norm_upper_bound`. Candidates: the max-mode
    unfolding norm, ``M = T``, folded unfolding-dual certificates ``U_n V_n^T`` and
    rank-1 terms from power iteration (HOSVD start plus ``restarts`` random starts).
    """
    T = np.asarray(T, dtype=float)
    if T.ndim < 2:
        raise DomainError("tensor must have at least 2 modes")
    kf, mode = kyfan_norm(T)
    candidates = {"kyfan": kf}

    ub = spectral_norm_upper_bound(T)
    candidates["self"] = float(np.sum(T * T) / ub) if ub > 0 else 0.0

    dual = 0.0
    for n in range(T.ndim):
        U, s, V = svd(unfold(T, n))
        M = fold(U @ V.T, n, T.shape)
        ub_m = spectral_norm_upper_bound(M)
        if ub_m > 0:
            dual = max(dual, abs(float(np.sum(M * T))) / ub_m)
    candidates["unfolding_dual"] = dual

    rng = np.random.default_rng(seed)
    starts = [[svd(unfold(T, n))[0][:, 0].real for n in range(T.ndim)]]
    starts += [[rng.normal(size=d) for d in T.shape] for _ in range(restarts)]
    candidates["rank_one"] = max(abs(rank_one_power_iteration(T, s)[0]) for s in starts)

    value = max(candidates.values())
    if return_details:
        return value, candidates
    return value


def multipartite_gap(
    rho: DensityMatrix,
    xs: Sequence[float],
    method: str = "kyfan",
    tol: float = DETECTION_TOL,
    seed: int = 0,
) -> CriterionReport:
    """Full-separability test ``||C(x_1..x_N)|| <= prod_k N_k(x_k)``.

    ``method='kyfan'`` uses the maximal unfolding trace norm; ``'nuclear_lb'`` a
    certified lower bound on the tensor trace norm.
    """
    if not isinstance(rho, DensityMatrix):
        raise DomainError(f"expected a DensityMatrix, got {type(rho).__name__}")
    if rho.n_parties < 2:
        raise DimensionError("at least two parties are required")
    xs = _check_params(xs)
    if len(xs) != rho.n_parties:
        raise DimensionError(f"{len(xs)} scaling factors for {rho.n_parties} parties")
    T = scale(correlation_tensor(rho), xs).scaled()
    rhs = bound_factors(rho.dims, xs).product
    if method == "kyfan":
        lhs, mode = kyfan_norm(T)
        return _report("multipartite_kyfan", xs, lhs, rhs, tol, mode=mode)
    if method == "nuclear_lb":
        lhs, details = tensor_nuclear_lower_bound(T, seed=seed, return_details=True)
        return _report("multipartite_nuclear_lb", xs, lhs, rhs, tol, **details)
    raise DomainError(f"unknown method {method!r}; expected 'kyfan' or 'nuclear_lb'")


# ---------------------------------------------------------------------------
# states with maximally mixed marginals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CenteredCheck:
    xs: tuple[float, ...]
    gaps: tuple[float, ...]
    decomposition_defect: float
    gap_spread: float | None

    def passed(self, tol: float = 1e-10) -> bool:
        ok = self.decomposition_defect <= tol
        return ok and (self.gap_spread is None or self.gap_spread <= tol)


def dv_centered_identity_check(
    rho: DensityMatrix,
    xs: Sequence[float] = (0.0, 0.5, 1.0, 2.0, 7.0),
    bloch_tol: float = 1e-8,
) -> CenteredCheck:
    """Check ``||D_x C D_y|| = xy/sqrt(dA dB) + ||D_0 C D_0||`` for centred states.

    For ``dA == dB`` also reports the spread of ``f(x, x)`` over ``xs``, which
    vanishes when the dV point is optimal.
    """
    _require_bipartite(rho)
    C = canonical_correlation(rho)
    M = C.matrix()
    dA, dB = rho.dims
    bloch = max(np.max(np.abs(M[1:, 0])), np.max(np.abs(M[0, 1:])))
    if bloch > bloch_tol:
        raise PreconditionError(f"marginals are not maximally mixed (Bloch component {bloch:.3e})")
    base = scaled_trace_norm(C, 0.0, 0.0)
    defect = 0.0
    for x in xs:
        for y in xs:
            expected = x * y / np.sqrt(dA * dB) + base
            defect = max(defect, abs(scaled_trace_norm(C, x, y) - expected))
    gaps = tuple(gap_from_tensor(C, x, x) for x in xs)
    spread = float(max(gaps) - min(gaps)) if dA == dB else None
    return CenteredCheck(tuple(float(x) for x in xs), gaps, float(defect), spread)
