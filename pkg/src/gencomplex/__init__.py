"""Generic-case complexity of decision problems in groups, measured numerically.

Free-group words and counting, presentations and homomorphisms, Stallings
subgroup graphs, coset graphs, cogrowth series, random walks, partial
decision algorithms and asymptotic densities.
"""

from .errors import BudgetExceeded, ConfigError, InvalidInput, Refused, SoundnessViolation
from .freegroup import Alphabet, format_word, free_reduce, parse_word
from .presentation import Homomorphism, Presentation, abelianization, kill_generators, parse_presentation
from .stallings import build_subgroup_graph, index, make_rewriter, member
from .schreier import CosetGraph, CoreCosetGraph, LazyBall, coset_graph, lazy_ball
from .cogrowth import CogrowthSeries, cogrowth_series, count_reduced, count_unreduced, decay_fit
from .randwalk import mc_return
from .genericdecide import Answer, Verdict, generic_cp, generic_mp, generic_wp, race
from .density import density_exact, density_mc, genericity_report, pair_density

__all__ = [
    "Alphabet", "Answer", "BudgetExceeded", "CogrowthSeries", "ConfigError", "CoreCosetGraph",
    "CosetGraph", "Homomorphism", "InvalidInput", "LazyBall", "Presentation", "Refused",
    "SoundnessViolation", "Verdict", "abelianization", "build_subgroup_graph", "cogrowth_series",
    "coset_graph", "count_reduced", "count_unreduced", "decay_fit", "density_exact", "density_mc",
    "format_word", "free_reduce", "generic_cp", "generic_mp", "generic_wp", "genericity_report",
    "index", "kill_generators", "lazy_ball", "make_rewriter", "mc_return", "member",
    "pair_density", "parse_presentation", "parse_word", "race",
]
