"""Retweet-network polarity and hashtag co-opting analysis.

Thin wrapper over the C++ core; see the individual function docstrings.
"""

from hashjack._core import (
    AnalysisError,
    ConfigError,
    InputError,
    __version__,
    brute_force_partition,
    forceatlas2,
    generate_corpus,
    louvain,
    modularity,
    odds_2x2,
    parse_corpus,
    run_pipeline,
    sentiment_agreement,
    z_quantile,
)

__all__ = [
    "AnalysisError",
    "ConfigError",
    "InputError",
    "__version__",
    "brute_force_partition",
    "forceatlas2",
    "generate_corpus",
    "louvain",
    "modularity",
    "odds_2x2",
    "parse_corpus",
    "run_pipeline",
    "sentiment_agreement",
    "z_quantile",
]
