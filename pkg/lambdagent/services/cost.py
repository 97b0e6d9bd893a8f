"""
Static cost bounds for agent terms.

In money mode a bounded fixpoint costs its bound times the most expensive
oracle reachable from its body, and pipeline stages add up. In call-count
mode every LLM call and non-primitive tool call counts one, and a fixpoint
multiplies the calls of one unfolding by its bound.
"""

from typing import Mapping, Optional, Set

from lambdagent.core.errors import UnknownOracleError
from lambdagent.models.terms import (
    Abs,
    App,
    Case,
    Checking,
    Comp,
    Dispatch,
    Fix,
    Guard,
    If,
    LamOracle,
    Mem,
    Pair,
    Prob,
    Proj,
    Scoped,
    Term,
    Tool,
    iter_terms,
)
from lambdagent.services.react_engine import TERMINATE

FREE_TOOLS = frozenset({TERMINATE})


def oracle_id(t: Term) -> Optional[str]:
    """Cost-table key of an oracle term: the model name of a ``lam``, the id of a tool."""
    if isinstance(t, LamOracle):
        return t.params.model_name
    if isinstance(t, Tool) and not t.tool_id.startswith("react."):
        return t.tool_id
    return None


def oracles(t: Term) -> Set[str]:
    return {oid for sub in iter_terms(t) if (oid := oracle_id(sub)) is not None}


def _price(oid: str, costs: Mapping[str, float]) -> float:
    if oid in costs:
        return costs[oid]
    if oid in FREE_TOOLS:
        return 0.0
    raise UnknownOracleError(oid)


def cost_estimate(
    t: Term,
    per_oracle_cost: Optional[Mapping[str, float]] = None,
    count_calls: bool = False,
) -> float:
    """Upper bound on the cost (or, with ``count_calls``, the oracle calls) of one application of ``t``."""
    costs = per_oracle_cost or {}
    if any(c < 0 for c in costs.values()):
        raise ValueError("costs must be non-negative")

    def go(term: Term) -> float:
        oid = oracle_id(term)
        if oid is not None:
            return 1.0 if count_calls else _price(oid, costs)
        if isinstance(term, Fix):
            if term.bound == 0:
                return 0.0
            if count_calls:
                return term.bound * go(term.body)
            prices = [_price(o, costs) for o in sorted(oracles(term.body))]
            return term.bound * max(prices, default=0.0)
        if isinstance(term, (If, Prob)):
            left, right = (
                (term.then_branch, term.else_branch) if isinstance(term, If) else (term.left, term.right)
            )
            return max(go(left), go(right))
        if isinstance(term, (Case, Dispatch)):
            head = term.classifier if isinstance(term, Case) else term.scrutinee
            arms = [body for _, body in term.branches]
            if term.default is not None:
                arms.append(term.default)
            extra = go(term.arg) if isinstance(term, Dispatch) else 0.0
            return go(head) + max((go(a) for a in arms), default=0.0) + extra
        if isinstance(term, Abs):
            return go(term.body)
        if isinstance(term, App):
            return go(term.fn) + go(term.arg)
        if isinstance(term, (Comp, Pair)):
            first, second = (term.first, term.second) if isinstance(term, Comp) else (term.left, term.right)
            return go(first) + go(second)
        if isinstance(term, (Proj, Guard, Mem, Checking, Scoped)):
            return go(term.inner)
        return 0.0

    return go(t)
