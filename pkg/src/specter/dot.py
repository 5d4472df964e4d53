"""Graphviz DOT rendering of automata and module chains."""
from __future__ import annotations

from .automata import Dfa, Epsilon0Nfa, state_str
from .planner import ModuleChain


def _quote(text: str) -> str:
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def automaton_dot(source, name: str = "model") -> str:
    """States as nodes (marked ones double-circled), one labeled edge per
    transition; a designated initial state gets an entry arrow."""
    a: Epsilon0Nfa = getattr(source, "automaton", source)
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", "  node [shape=circle];"]
    initial = a.initial if isinstance(a, Dfa) else None
    if initial is not None:
        lines.append('  "__entry" [shape=point, style=invis];')
    for s in sorted(a.states):
        shape = ', shape=doublecircle' if s in a.marked else ""
        lines.append(f"  {_quote(state_str(s))} [label={_quote(state_str(s))}{shape}];")
    if initial is not None:
        lines.append(f'  "__entry" -> {_quote(state_str(initial))};')
    for (x, e), y in sorted(a.transitions.items()):
        label = f"{e} ({a.costs[e]:g})"
        lines.append(
            f"  {_quote(state_str(x))} -> {_quote(state_str(y))} [label={_quote(label)}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def chain_dot(chain: ModuleChain, name: str = "plan") -> str:
    """The chain as a linear digraph, closed by a dashed edge for the inverted
    task module."""
    t0 = chain.task_module_inverted
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", "  node [shape=circle];"]
    nodes = [t0.output_port]
    for m in chain.modules:
        nodes.append(m.output_port)
    seen = set()
    for s in nodes:
        if s not in seen:
            seen.add(s)
            lines.append(f"  {_quote(state_str(s))};")
    for m in chain.modules:
        label = f"{m.event} ({m.cost:g})"
        lines.append(
            f"  {_quote(state_str(m.input_port))} -> {_quote(state_str(m.output_port))} "
            f"[label={_quote(label)}];"
        )
    lines.append(
        f"  {_quote(state_str(t0.input_port))} -> {_quote(state_str(t0.output_port))} "
        f"[label={_quote(str(t0.event))}, style=dashed];"
    )
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(obj, name: str = None) -> str:
    """DOT text for an automaton, environment model or module chain."""
    if isinstance(obj, ModuleChain):
        return chain_dot(obj, name or "plan")
    return automaton_dot(obj, name or "model")
