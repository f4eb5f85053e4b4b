"""Direct translation of LTL into the canonical chain of co-Buchi automata,
with a brute-force lasso-word oracle for differential verification."""

from .awa import (
    Awa, NotNnf, NotWeak, Pcnf, accepts_lasso, awa_to_dot, check_weak,
    dualize, from_ltl, is_empty, winning_state_positions,
)
from .chain import (
    ChainConfig, Cocoa, HdNcw, ResourceLimit, VerifyReport, build_chain,
    build_chain_for_formula, chain_from_json, chain_to_json, dfw_to_hd_ncw,
    drop_accepting_transition, level_to_hoa, natural_color, ncw_accepts_lasso,
    verify_chain,
)
from .floating import (
    Dfw, Nfw, determinize, dfw_accepts_lasso, is_empty_dfw, level_product,
    minimize_dfw, reachable_transitions, universal_dfw,
)
from .formula import (
    Alphabet, Formula, InvalidParameter, LassoWord, ParseError, UnknownAtom,
    always, atom, conj, disj, enumerate_lassos, eval_lasso, eventually,
    implies, lower_bound_alphabet, lower_bound_family, neg, nxt, parse_lasso,
    parse_ltl, release, to_nnf, until,
)
from .obligation import (
    ObligationGraph, miyano_hayashi, nbw_accepts_lasso, nonempty_witness,
    obligation_to_dot,
)
from .sltm import (
    IncompatibleAutomata, Label, Sltm, build_canonical_sltm,
    label_accepts_lasso, label_of, labels_equivalent, sltm_state_after,
    sltm_to_json,
)

__all__ = [name for name in dir() if not name.startswith("_")]
