"""
wfsm_ais: exact weighted finite-state repertoires for string-based artificial
immune systems.
"""

from .errors import (AlphabetError, EnumerationLimitError, ExperimentConfigError, FormatError,
                     InvariantError, LengthMismatchError, RuleError, SelectionError, WfsmAisError)
from .rational import BigRational, format_rational, parse_rational, quantize, to_decimal
from .wfsm import (FsmStats, Wfsm, check, count_strings, difference, empty, enumerate_strings,
                   intersect, minimize, push_weights, scale, singleton, stats, support,
                   total_weight, union, union_all, weight_of)
from .fsm_io import dumps, loads, read_wfsm, write_wfsm
from .matching import (BiasTable, MatchingRule, RuleKind, co_pattern, matched_set_size, matches,
                       parse_rule, universe)
from .selection import (Mode, Polarity, Repertoire, ScoreReport, load_repertoire, negative_select,
                        positive_select, save_repertoire, score, score_batch)
from .metrics import auc
from .noisy import NoisyConfig, geometric_draw, membership_prob, run_noisy, sample_noisy
from .language import LanguageConfig, extract_ngrams, run_language
from .benchmark import merge_benchmark
from .experiment import ExperimentResult, run_seed

__version__ = "1.0.0"
