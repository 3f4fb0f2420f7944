"""Port-graph rewriting driven by a positional strategy language."""
from portrewrite.core import (
    Edge,
    GraphBuilder,
    LocatedGraph,
    Node,
    Port,
    PortGraph,
    PortGraphError,
    PSignature,
    designated_successors,
    free_ports,
    interface_nodes,
    successors,
    validate,
)
from portrewrite.matching import Match, PortConstraint, find_disjoint_tuples, find_matches, match_exists
from portrewrite.rewriting import IdSource, Rule, apply_match, apply_multi, apply_parallel, rewrite_once

__version__ = "0.1.0"
