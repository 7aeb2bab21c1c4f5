from .design import DesignSpec, DesignMatrix, build_design, encode
from .ols import (
    Coupling,
    InformationCriteria,
    RegressionFit,
    CouplingSpectrum,
    ModelComparison,
    fit_ols,
    loocv_r2,
    loocv_r2_refit,
    information_criteria,
    coupling_eigen,
    compare_models,
    group_mean_effects,
)

__all__ = [
    'DesignSpec',
    'DesignMatrix',
    'build_design',
    'encode',
    'Coupling',
    'InformationCriteria',
    'RegressionFit',
    'CouplingSpectrum',
    'ModelComparison',
    'fit_ols',
    'loocv_r2',
    'loocv_r2_refit',
    'information_criteria',
    'coupling_eigen',
    'compare_models',
    'group_mean_effects',
]
