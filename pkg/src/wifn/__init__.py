"""Static secrecy analysis of cryptographic protocols with witness functions,
under the empty theory or homomorphic encryption."""
from pathlib import Path

from .analyzer import Report, analyze, analyze_roles, render_json, render_text, report_from_json
from .context import Context, dump_context, inverse, load_context, load_context_file, type_of
from .errors import ContextError, ParseError, RoleError, SortError, WifnError
from .lattice import ALL, TOP, SecurityLevel, geq, join, meet
from .roles import (
    GeneralizedRole, MessageSpace, Narration, format_roles, generalize, message_space,
    parse_narration, parse_roles,
)
from .terms import (
    EPS, Const, Enc, Epsilon, Hash, Pair, Param, Substitution, Term, Theory, Var,
    alpha_equivalent, alpha_rename, apply, atoms, derive, normalize, parse_term, variables,
)
from .unify import mgu, unifiable_patterns
from .witness import (
    BoundCase, Selection, Variant, check_step, derivative_cases, external_protective_key,
    lower_bound, security_value, select, selection_level, upper_bound,
)

DATA = Path(__file__).parent / "data"
