"""Compile annotated regexps to minimal Mealy machines and stream input
through them, reporting every match (overlapping ones included) while
reading each symbol exactly once."""

from rematch.determinize import (
    Mealy,
    OutputBeforeInput,
    machine_output,
    subset_t,
    subset_tc,
    to_fst,
)
from rematch.formats import DocumentError, load, save, to_dot
from rematch.fst import (
    Fst,
    eps_closure,
    fst_output,
    state_behaviour,
    thompson,
    u_language,
)
from rematch.minimize import (
    DfaView,
    complete_dfa_view,
    complete_with_sink,
    hopcroft_partition,
    is_isomorphic,
    min_comp,
    minimize_dfa,
    to_dfa_view,
    trim_sink,
)
from rematch.regexp import (
    Atom,
    BehaviourTable,
    Concat,
    Epsilon,
    Expr,
    PatternSyntaxError,
    Star,
    Union,
    behaviour_of,
    complete_oracle,
    enumerate_language,
    input_alphabet,
    output_alphabet,
    parse,
    word_outputs,
)
from rematch.runtime import (
    MatchEvent,
    Session,
    Stuck,
    UnknownSymbol,
    format_event,
    run_stream,
    start,
)

__version__ = "0.1.0"
