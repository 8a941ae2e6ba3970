"""Random graph models specified by odds, and tests for them.

Submodules: :mod:`~rgraph.graph` (the graph type and file format),
:mod:`~rgraph.models`, :mod:`~rgraph.estimation`, :mod:`~rgraph.fixed_degree`,
:mod:`~rgraph.gof`, :mod:`~rgraph.spectral` and the :mod:`~rgraph.cli`.
"""
from .errors import (
    ConvergenceError,
    DegenerateLabelingError,
    FrozenChainError,
    FrozenChainWarning,
    GraphFormatError,
    MLENonexistenceError,
    NotGraphicalError,
    NumericalError,
    RGraphError,
    UnstableGroupError,
    ValidationError,
)
from .graph import Graph, load_graph, read_graph, save_graph, write_graph
from .models import (
    AdditiveParams,
    BetaParams,
    KBetaParams,
    Labeling,
    RankParams,
    dae,
    edge_probability,
    probability_matrix,
    sample_graph,
)
from .estimation import (
    anova_score,
    fit_additive_ls,
    fit_beta_mle,
    fit_kbeta_given_labels,
    fit_rank_ml,
    greedy_coloring,
)
from .fixed_degree import (
    Swap,
    SwapChain,
    enumerate_fixed_degree,
    enumerate_swaps,
    meta_degree,
    swap_chain_sample,
)
from .gof import (
    TestReport,
    blocked_sums_test,
    ks_uniform_test,
    mc_degree_test,
    uniform_transform,
)
from .spectral import SpectralReport, nontrivial_count, spectrum

__version__ = "0.1.0"
