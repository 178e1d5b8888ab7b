"""NB-EB vs CGAN-EB crash hotspot simulation benchmark."""

from ._core import (  # noqa: F401
    CganConfig,
    CganModel,
    Dataset,
    EbEstimate,
    ExperimentSpec,
    FunctionalForm,
    NbFit,
    SimConfig,
    Site,
    SummaryStat,
    analytic_loglinear_mean,
    builtin_grid,
    builtin_spec,
    cgan_eb,
    cgan_sample,
    fi_test,
    fit_nb,
    mape_hotspots,
    nb_eb,
    nb_pmf,
    paired_t_test,
    pmd_test,
    predict_mu,
    predictive_moments,
    rank_sites,
    run_experiment,
    simulate_dataset,
    summarize,
    train_cgan,
)
