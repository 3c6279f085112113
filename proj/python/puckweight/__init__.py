"""Weighted-shots hockey analytics on top of the C++ core.

Pipeline sketch::

    import puckweight as pw

    paths = pw.generate_season(seed=1, games=40, teams=6, out_dir="season")
    model = pw.fit(paths["events"], paths["shifts"])
    top = pw.score(paths["events"], paths["shifts"], model, top=5)
    goalies = pw.goalie_stats(paths["events"], paths["shifts"], model)
"""

from puckweight._puckweight import (
    Model,
    PuckweightError,
    apm,
    default_true_coefficients,
    fit,
    fit_irls,
    generate_season,
    goalie_stats,
    reliability,
    roc_auc,
    score,
    skater_stats,
    team_stats,
    validate,
    wowy,
    __version__,
)

__all__ = [
    "Model",
    "PuckweightError",
    "apm",
    "default_true_coefficients",
    "fit",
    "fit_irls",
    "generate_season",
    "goalie_stats",
    "reliability",
    "roc_auc",
    "score",
    "skater_stats",
    "team_stats",
    "validate",
    "wowy",
    "__version__",
]
