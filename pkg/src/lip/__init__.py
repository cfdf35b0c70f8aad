"""LiP: a proof checker and model checker for the logic of interactive proofs."""

from .checker import Evaluator, Query, denotation_successors, evaluate, parse_query
from .corpus import load_corpus, run_corpus
from .derivation import analysis_set, closure_subset, derives
from .formulas import parse_formula
from .kernel import Theory, Verdict, check_script, parse_script
from .model import (Model, ModelError, build_instant, build_relations, dump_model,
                    load_model, parse_model)
from .sampling import SweepConfig, random_model
from .sweeps import property_sweep, soundness_sweep, theorem_sweep
from .terms import BASE, DY, parse_message
from .theories import TheoryPreset, load_preset

__version__ = "0.1.0"
