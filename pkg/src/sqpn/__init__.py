"""Semi-qualitative probabilistic networks.

DAG-structured uncertainty models that mix qualitative signs with numeric
conditional probabilities, with sign propagation, interval propagation,
reverse-influence tightening, bounded-complexity propagation, trade-off
resolution, and an exact-inference oracle for validation.
"""

from .algebra import (
    Interval,
    Sign,
    TOLERANCE,
    classify,
    interval_add,
    interval_mul,
    sign_add,
    sign_mul,
    sign_to_unit_interval,
)
from .abstraction import (
    IntervalInfluence,
    IntervalNetwork,
    abstract_cpt_to_sign,
    build_interval_network,
    default_reverse,
    influence_interval_from_cpt,
    synergy_sign_from_cpt,
    tighten_reverse_bayes,
    tighten_reverse_root,
)
from .fileformat import (
    NetworkDocument,
    ParsedNetwork,
    SqpnParseError,
    parse_network,
    serialize_network,
)
from .model import (
    Arc,
    Cpt,
    Node,
    SqpnError,
    SqpnNetwork,
    SynergyDecl,
    active_links,
    topo_order,
    validate,
)
from .oracle import (
    ResolutionOutcome,
    delta_effect,
    posterior,
    reduce_node,
    resolve_tradeoff,
    reverse_arc,
    soundness_report,
)
from .propagate import (
    Observation,
    PropagationConfig,
    PropagationResult,
    apply_strength,
    entry_interval,
    propagate_intervals,
    propagate_signs,
)

__version__ = "0.1.0"
