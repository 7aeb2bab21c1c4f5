"""Ordinary least squares over factorial designs, with LOOCV, information
criteria, coupling eigen-analysis and the main-vs-pairwise comparison."""
import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import linalg

from src.exceptions import (
    InvalidArgument,
    LeverageOne,
    NotPairwiseFit,
    RankDeficient,
    TooFewRows,
    ZeroRSS,
    ZeroVariance,
)
from src.lattice.coalition import CoalitionTable
from src.lattice.interference import partition_by_component
from src.regress.design import DesignMatrix, DesignSpec, build_design

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10
LEVERAGE_TOLERANCE = 1e-10
EIGEN_SIGN_THRESHOLD = 1e-9
COUPLING_UNITS = ("presence", "fitted")


class Coupling(BaseModel):
    model_config = ConfigDict(frozen=True)

    a: str
    b: str
    value: float


class InformationCriteria(BaseModel):
    model_config = ConfigDict(frozen=True)

    aic: float
    bic: float
    n_params: int
    zero_rss: bool = False


class RegressionFit(BaseModel):
    model_config = ConfigDict(frozen=True)

    spec: DesignSpec
    columns: List[str]
    coefficients: List[float]
    intercept: float
    main_effects: Dict[str, float]
    couplings: List[Coupling]
    n: int
    p: int
    rss: float
    tss: float
    r2: float
    adj_r2: Optional[float] = None
    loocv_r2: Optional[float] = None
    aic: Optional[float] = None
    bic: Optional[float] = None
    zero_rss: bool = False
    residuals: List[float]
    fitted: List[float]


class CouplingSpectrum(BaseModel):
    model_config = ConfigDict(frozen=True)

    units: str
    components: List[str]
    matrix: List[List[float]]
    eigenvalues: List[float]
    n_negative: int
    n_positive: int
    n_zero: int
    strongest_positive: Optional[Coupling] = None
    strongest_negative: Optional[Coupling] = None


class ModelComparison(BaseModel):
    model_config = ConfigDict(frozen=True)

    main: RegressionFit
    pairwise: RegressionFit
    delta_aic: Optional[float] = None
    delta_bic: Optional[float] = None
    delta_loocv_r2: Optional[float] = None
    preferred_by_aic: Optional[str] = None
    preferred_by_bic: Optional[str] = None
    preferred_by_loocv: Optional[str] = None
    preferred_by_adj_r2: Optional[str] = None


def _qr(X: np.ndarray, columns: List[str]) -> Tuple[np.ndarray, np.ndarray]:
    if X.shape[0] < X.shape[1]:
        raise TooFewRows(X.shape[0], X.shape[1])
    Q, R = np.linalg.qr(X)
    diagonal = np.abs(np.diag(R))
    scale = diagonal.max() if diagonal.size else 0.0
    weak = np.flatnonzero(diagonal <= RANK_TOLERANCE * scale)
    if scale == 0.0 or weak.size:
        column = columns[int(weak[0])] if weak.size else columns[0]
        raise RankDeficient(column)
    return Q, R


def _solve(Q: np.ndarray, R: np.ndarray, y: np.ndarray) -> np.ndarray:
    return linalg.solve_triangular(R, Q.T @ y)


def _total_ss(y: np.ndarray) -> float:
    tss = float(np.sum((y - y.mean()) ** 2))
    if tss == 0.0:
        raise ZeroVariance()
    return tss


def _is_zero_rss(rss: float, tss: float) -> bool:
    return rss <= 1e-24 * tss


def _criteria(rss: float, tss: float, n: int, p: int) -> InformationCriteria:
    # The error variance is counted as a parameter alongside the coefficients
    n_params = p + 1
    if _is_zero_rss(rss, tss):
        return InformationCriteria(aic=-math.inf, bic=-math.inf, n_params=n_params, zero_rss=True)
    fit_term = n * math.log(rss / n) + n * (1.0 + math.log(2.0 * math.pi))
    return InformationCriteria(aic=fit_term + 2 * n_params, bic=fit_term + n_params * math.log(n), n_params=n_params)


def _press_loocv(Q: np.ndarray, residuals: np.ndarray, tss: float) -> float:
    leverage = np.sum(Q ** 2, axis=1)
    high = np.flatnonzero(leverage >= 1.0 - LEVERAGE_TOLERANCE)
    if high.size:
        raise LeverageOne(int(high[0]))
    press = float(np.sum((residuals / (1.0 - leverage)) ** 2))
    return 1.0 - press / tss


def fit_ols(design: DesignMatrix, response: Optional[np.ndarray] = None) -> RegressionFit:
    """Least-squares fit through a QR decomposition.

    ``response`` overrides the design's own response vector. LOOCV and the
    information criteria are left empty when the fit is saturated.
    """
    spec = design.spec
    columns = spec.column_names
    y = design.y if response is None else np.asarray(response, dtype=float)
    if y.shape != (design.n,):
        raise TooFewRows(int(y.size), design.p)
    Q, R = _qr(design.X, columns)
    beta = _solve(Q, R, y)
    fitted = design.X @ beta
    residuals = y - fitted
    n, p = design.n, design.p
    rss = float(residuals @ residuals)
    tss = _total_ss(y)
    r2 = 1.0 - rss / tss
    adj_r2 = loocv = aic = bic = None
    zero_rss = _is_zero_rss(rss, tss)
    if n > p:
        adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / (n - p)
        try:
            loocv = _press_loocv(Q, residuals, tss)
        except LeverageOne as exc:
            logger.warning(f"LOOCV undefined: {exc}")
        criteria = _criteria(rss, tss, n, p)
        aic, bic = criteria.aic, criteria.bic
        if criteria.zero_rss:
            logger.warning("Residual sum of squares is zero; AIC and BIC are -inf")

    main_effects = {}
    couplings = []
    for name, term, value in zip(columns, spec.terms, beta):
        if len(term) == 1:
            main_effects[name] = float(value)
        elif len(term) == 2 and spec.order == "pairwise":
            couplings.append(Coupling(a=spec.universe[term[0]], b=spec.universe[term[1]], value=float(value)))
    result = RegressionFit(
        spec=spec,
        columns=columns,
        coefficients=[float(b) for b in beta],
        intercept=float(beta[0]),
        main_effects=main_effects,
        couplings=couplings,
        n=n,
        p=p,
        rss=rss,
        tss=tss,
        r2=r2,
        adj_r2=adj_r2,
        loocv_r2=loocv,
        aic=aic,
        bic=bic,
        zero_rss=zero_rss,
        residuals=[float(e) for e in residuals],
        fitted=[float(f) for f in fitted],
    )
    logger.info(f"OLS {spec.encoding}/{spec.order}: n={n}, p={p}, R2={r2:.3f}")
    return result


def loocv_r2(design: DesignMatrix) -> float:
    """LOOCV R² = 1 - PRESS/TSS using the hat-matrix shortcut."""
    if design.n <= design.p:
        raise TooFewRows(design.n, design.p)
    Q, R = _qr(design.X, design.spec.column_names)
    residuals = design.y - design.X @ _solve(Q, R, design.y)
    return _press_loocv(Q, residuals, _total_ss(design.y))


def loocv_r2_refit(design: DesignMatrix) -> float:
    """LOOCV R² by refitting the model n times."""
    if design.n <= design.p:
        raise TooFewRows(design.n, design.p)
    tss = _total_ss(design.y)
    columns = design.spec.column_names
    rows = np.arange(design.n)
    press = 0.0
    for row in rows:
        keep = rows != row
        try:
            Q, R = _qr(design.X[keep], columns)
        except RankDeficient:
            raise LeverageOne(int(row)) from None
        prediction = design.X[row] @ _solve(Q, R, design.y[keep])
        press += float(design.y[row] - prediction) ** 2
    return 1.0 - press / tss


def information_criteria(fit: RegressionFit, strict: bool = False) -> InformationCriteria:
    """Gaussian AIC and BIC of a fit; ``strict`` turns a zero RSS into ZeroRSS."""
    if fit.n <= fit.p:
        raise TooFewRows(fit.n, fit.p)
    criteria = _criteria(fit.rss, fit.tss, fit.n, fit.p)
    if criteria.zero_rss and strict:
        raise ZeroRSS()
    return criteria


def coupling_eigen(fit: RegressionFit, units: str = "presence") -> CouplingSpectrum:
    """Eigen-structure of the symmetric coupling matrix of a pairwise fit.

    With ``units="presence"`` couplings are expressed per joint switch-on of
    the two components, which equals the binary-encoded interaction
    coefficient; a ±1 spin coupling is scaled by 4. ``units="fitted"`` keeps
    the coefficients as fitted. Eigenvalue signs do not depend on the units.
    """
    spec = fit.spec
    if spec.order != "pairwise" or spec.k < 2:
        raise NotPairwiseFit(spec.order)
    if units not in COUPLING_UNITS:
        raise InvalidArgument(f"unknown coupling units {units!r}; choose from {COUPLING_UNITS}")
    factor = 4.0 if units == "presence" and spec.encoding == "spin" else 1.0
    couplings = [c.model_copy(update={"value": c.value * factor}) for c in fit.couplings]
    J = np.zeros((spec.k, spec.k))
    for coupling in couplings:
        i, j = spec.universe.index(coupling.a), spec.universe.index(coupling.b)
        J[i, j] = J[j, i] = coupling.value
    eigenvalues = np.linalg.eigh(J)[0]
    by_value = sorted(couplings, key=lambda c: c.value)
    strongest_negative = by_value[0] if by_value and by_value[0].value < 0 else None
    strongest_positive = by_value[-1] if by_value and by_value[-1].value > 0 else None
    return CouplingSpectrum(
        units=units,
        components=list(spec.universe),
        matrix=J.tolist(),
        eigenvalues=[float(v) for v in eigenvalues],
        n_negative=int(np.sum(eigenvalues < -EIGEN_SIGN_THRESHOLD)),
        n_positive=int(np.sum(eigenvalues > EIGEN_SIGN_THRESHOLD)),
        n_zero=int(np.sum(np.abs(eigenvalues) <= EIGEN_SIGN_THRESHOLD)),
        strongest_positive=strongest_positive,
        strongest_negative=strongest_negative,
    )


def _prefer(main: Optional[float], pairwise: Optional[float], lower_is_better: bool) -> Optional[str]:
    if main is None or pairwise is None or main == pairwise:
        return None
    main_wins = main < pairwise if lower_is_better else main > pairwise
    return "main" if main_wins else "pairwise"


def _delta(main: Optional[float], pairwise: Optional[float]) -> Optional[float]:
    if main is None or pairwise is None or math.isinf(main) or math.isinf(pairwise):
        return None
    return pairwise - main


def compare_models(
    table: CoalitionTable,
    main_encoding: str = "binary",
    pairwise_encoding: str = "spin",
) -> ModelComparison:
    """Main-effects and pairwise fits side by side; deltas are pairwise - main."""
    main = fit_ols(build_design(table, DesignSpec(universe=table.universe, encoding=main_encoding, order="main")))
    pairwise = fit_ols(build_design(table, DesignSpec(universe=table.universe, encoding=pairwise_encoding, order="pairwise")))
    comparison = ModelComparison(
        main=main,
        pairwise=pairwise,
        delta_aic=_delta(main.aic, pairwise.aic),
        delta_bic=_delta(main.bic, pairwise.bic),
        delta_loocv_r2=_delta(main.loocv_r2, pairwise.loocv_r2),
        preferred_by_aic=_prefer(main.aic, pairwise.aic, lower_is_better=True),
        preferred_by_bic=_prefer(main.bic, pairwise.bic, lower_is_better=True),
        preferred_by_loocv=_prefer(main.loocv_r2, pairwise.loocv_r2, lower_is_better=False),
        preferred_by_adj_r2=_prefer(main.adj_r2, pairwise.adj_r2, lower_is_better=False),
    )
    logger.info(f"Model comparison: dAIC={comparison.delta_aic}, dBIC={comparison.delta_bic}")
    return comparison


def group_mean_effects(table: CoalitionTable) -> Dict[str, float]:
    """Mean value with a component minus mean value without it."""
    effects = {}
    for name in table.universe:
        split = partition_by_component(table, name)
        if split.with_mean is None or split.without_mean is None:
            continue
        effects[name] = split.with_mean - split.without_mean
    return effects
