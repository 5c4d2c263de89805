"""Syntactic detection of placeholder resamplers.

Generated engines often stub out history resampling instead of
implementing it. The reward pipeline forfeits the information-tier weight
for such stubs, so detection must be cheap and run before any probes: it
inspects the function source, not its behavior.

A resampler is a stub when every return in its own body is one of:
an empty list literal, a list literal of constants, a bare None, or a
bare echo comprehension that replays the input history's actions
verbatim. A body with no returns at all (placeholder pass/raise bodies)
also counts. Missing source fails open: not a stub.
"""

from __future__ import annotations

import ast
import textwrap
from typing import Optional


def detect_stub(source: Optional[str]) -> bool:
    """True iff the resampler source is a recognizable placeholder."""
    if not source:
        return False
    try:
        tree = ast.parse(textwrap.dedent(source))
    except SyntaxError:
        return False
    func = _find_function(tree)
    if func is None:
        return False
    history_param = func.args.args[0].arg if func.args.args else None
    # Methods take self first; the history is then the second parameter.
    if history_param == "self" and len(func.args.args) > 1:
        history_param = func.args.args[1].arg
    returns = _own_returns(func)
    if not returns:
        return True
    return all(_is_stub_return(node.value, history_param) for node in returns)


def _find_function(tree: ast.AST) -> Optional[ast.FunctionDef]:
    functions = [
        node
        for node in ast.walk(tree)
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef))
    ]
    for node in functions:
        if node.name == "resample_history":
            return node
    return functions[0] if functions else None


def _own_returns(func: ast.FunctionDef) -> list[ast.Return]:
    """Return statements in the function's own scope, not nested defs."""
    returns: list[ast.Return] = []

    def walk(node: ast.AST) -> None:
        for child in ast.iter_child_nodes(node):
            if isinstance(child, (ast.FunctionDef, ast.AsyncFunctionDef, ast.Lambda)):
                continue
            if isinstance(child, ast.Return):
                returns.append(child)
            walk(child)

    walk(func)
    return returns


def _is_stub_return(value: Optional[ast.expr], history_param: Optional[str]) -> bool:
    if value is None:
        return True  # bare "return"
    if isinstance(value, ast.Constant) and value.value is None:
        return True
    if isinstance(value, (ast.List, ast.Tuple)):
        return all(isinstance(elt, ast.Constant) for elt in value.elts)
    if isinstance(value, ast.ListComp):
        return _is_echo_comprehension(value, history_param)
    return False


def _is_echo_comprehension(comp: ast.ListComp, history_param: Optional[str]) -> bool:
    """Match `[action for _, action in <history>]` and close variants."""
    if len(comp.generators) != 1:
        return False
    gen = comp.generators[0]
    if gen.ifs or gen.is_async:
        return False
    if not isinstance(gen.iter, ast.Name):
        return False
    if history_param is not None and gen.iter.id != history_param:
        return False
    if not isinstance(comp.elt, ast.Name):
        return False
    target = gen.target
    if isinstance(target, ast.Tuple):
        names = [elt.id for elt in target.elts if isinstance(elt, ast.Name)]
        return comp.elt.id in names
    if isinstance(target, ast.Name):
        return comp.elt.id == target.id
    return False
