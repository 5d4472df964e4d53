"""Compose agent declarations into the global environment model.

An agent contributes capability automata (what it can do), failure automata
(detected broken transitions) and constraint automata (what it must not do),
all single-slot. The environment interleaves every agent's capabilities,
merges in inter-agent capabilities authored over full composite states, and
subtracts the union of all constraints. Detected failures can also be carved
out of an already-built model without recomposing it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

from .algebra import concat_many, subtract_compat, union_compat
from .automata import (
    INTER_NAMESPACE,
    RESERVED_NAMESPACES,
    Epsilon0Nfa,
    EventId,
    State,
    empty_nfa,
    make_nfa,
)
from .errors import ArityMismatch, EventCollision, LiftError, SlotCollision, UnknownAgent, UnknownState


@dataclass(frozen=True)
class AgentSpec:
    """Declarative bundle of one agent's automata, all single-slot and
    namespaced by the agent id."""

    id: str
    capabilities: tuple
    failures: tuple = ()
    constraints: tuple = ()

    def __post_init__(self):
        if not self.id or self.id in RESERVED_NAMESPACES:
            raise ValueError(f"invalid agent id {self.id!r}")
        object.__setattr__(self, "capabilities", tuple(self.capabilities))
        object.__setattr__(self, "failures", tuple(self.failures))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if not self.capabilities:
            raise ValueError(f"agent {self.id!r} declares no capabilities")
        for nfa in self.capabilities + self.failures + self.constraints:
            if nfa.slot_names != (self.id,):
                raise ArityMismatch(
                    f"agent {self.id!r} automaton has slots {nfa.slot_names}, expected ({self.id!r},)"
                )
        for f in self.failures:
            _check_failure_shape(self.id, f)

    @property
    def alphabet(self) -> frozenset:
        """Atomic state labels this agent can occupy."""
        return frozenset(s[0] for nfa in self.capabilities for s in nfa.states)


def _check_failure_shape(agent_id: str, f: Epsilon0Nfa) -> None:
    if len(f.events) != 1 or len(f.transitions) != 1:
        raise ValueError(
            f"agent {agent_id!r} failure automaton must hold exactly one event "
            f"and one transition, got {len(f.events)} events, {len(f.transitions)} transitions"
        )
    ((x, _), y) = next(iter(f.transitions.items()))
    if f.states != {x, y}:
        raise ValueError(
            f"agent {agent_id!r} failure automaton states must be exactly the "
            f"failed transition's endpoints"
        )


@dataclass(frozen=True)
class InterAgentSpec:
    """Capabilities and constraints spanning several agents, authored directly
    over full-arity composite states (one uniquely named event per context)."""

    capabilities: Epsilon0Nfa = None
    constraints: Epsilon0Nfa = None

    @property
    def member_ids(self) -> tuple:
        """Agents whose component any inter event actually moves, in slot order."""
        touched = set()
        for nfa in (self.capabilities, self.constraints):
            if nfa is None:
                continue
            for sig in nfa.signatures.values():
                touched.update(slot for slot, _, _ in sig)
        for nfa in (self.capabilities, self.constraints):
            if nfa is not None:
                return tuple(s for s in nfa.slot_names if s in touched)
        return ()


@dataclass(frozen=True)
class EnvironmentModel:
    """The composed global automaton plus its agent-slot metadata."""

    automaton: Epsilon0Nfa
    agent_ids: tuple
    per_agent_alphabets: tuple  # tuple[frozenset[str], ...]

    def slot_of(self, agent_id: str) -> int:
        try:
            return self.agent_ids.index(agent_id)
        except ValueError:
            raise UnknownAgent(f"no agent {agent_id!r}; have {self.agent_ids}") from None

    @property
    def theta(self) -> int:
        """State-count law value: the product of the agent alphabet sizes."""
        return math.prod(len(a) for a in self.per_agent_alphabets)

    def theta_prime(self, agent_id: str) -> int:
        """Worst-case transitions touched when failing one agent's transition."""
        slot = self.slot_of(agent_id)
        return math.prod(
            len(a) for i, a in enumerate(self.per_agent_alphabets) if i != slot
        )


@dataclass(frozen=True)
class FailureEvent:
    """A detected infeasible transition of one agent.

    ``agent_id`` may be ``"inter"``, in which case ``event`` must be given and
    ``source``/``target`` are ignored.
    """

    agent_id: str
    source: str = None
    target: str = None
    event: EventId = None


def build_agent_capabilities(spec: AgentSpec) -> Epsilon0Nfa:
    """Union of the agent's capability automata minus its failure automata."""
    caps = reduce(union_compat, spec.capabilities)
    if spec.failures:
        caps = subtract_compat(caps, reduce(union_compat, spec.failures))
    return caps


def build_agent_constraints(spec: AgentSpec) -> Epsilon0Nfa:
    """Union of the agent's constraint automata; empty when it has none."""
    if not spec.constraints:
        return empty_nfa((spec.id,))
    return reduce(union_compat, spec.constraints)


def build_agent(spec: AgentSpec) -> Epsilon0Nfa:
    """The agent model: capabilities minus constraints."""
    return subtract_compat(build_agent_capabilities(spec), build_agent_constraints(spec))


def _check_lifted(nfa: Epsilon0Nfa, slots: tuple, alphabets: Sequence, what: str) -> None:
    if nfa.slot_names != slots:
        raise LiftError(f"{what} automaton has slots {nfa.slot_names}, expected {slots}")
    for s in nfa.states:
        for i, label in enumerate(s):
            if label not in alphabets[i]:
                raise LiftError(
                    f"{what} automaton references {label!r}, unknown for agent {slots[i]!r}"
                )


def build_environment(agents: Sequence, inter: InterAgentSpec = None) -> EnvironmentModel:
    """Interleave every agent's capabilities, merge inter-agent automata, and
    subtract the union of all constraints."""
    agents = list(agents)
    if not agents:
        raise ValueError("need at least one agent")
    ids = tuple(a.id for a in agents)
    if len(set(ids)) != len(ids):
        raise SlotCollision(f"duplicate agent ids in {ids}")

    per_agent_caps = [build_agent_capabilities(a) for a in agents]
    per_agent_cons = [build_agent_constraints(a) for a in agents]
    alphabets = tuple(frozenset(s[0] for s in k.states) for k in per_agent_caps)
    for agent_id, alphabet in zip(ids, alphabets):
        if not alphabet:
            raise ValueError(f"agent {agent_id!r} has an empty state alphabet")

    env_caps = concat_many(per_agent_caps)
    env_cons = concat_many(per_agent_cons)

    inter_caps = inter.capabilities if inter is not None else None
    inter_cons = inter.constraints if inter is not None else None
    if inter_caps is not None:
        _check_lifted(inter_caps, ids, alphabets, "inter-agent capability")
        clash = inter_caps.events & env_caps.events
        if clash:
            raise EventCollision(f"inter-agent events already exist: {sorted(clash)}")
        global_caps = union_compat(env_caps, inter_caps)
    else:
        global_caps = env_caps
    if inter_cons is not None:
        _check_lifted(inter_cons, ids, alphabets, "inter-agent constraint")
        global_cons = union_compat(env_cons, inter_cons)
    else:
        global_cons = env_cons

    model = subtract_compat(global_caps, global_cons)
    env = EnvironmentModel(model, ids, alphabets)
    if len(model.states) != env.theta:
        raise LiftError(
            f"state count {len(model.states)} violates the product law {env.theta}"
        )
    return env


def inject_failure(env: EnvironmentModel, f: FailureEvent) -> EnvironmentModel:
    """Carve one agent's failed transition out of a built model.

    Removes every composite transition whose moving agent is ``f.agent_id``
    and whose component goes ``f.source -> f.target`` (optionally restricted
    to one event). States, markings, events and costs are untouched; the input
    model is not modified.
    """
    a = env.automaton
    if f.agent_id == INTER_NAMESPACE:
        if f.event is None:
            raise ValueError("inter-agent failures need an explicit event")

        def doomed(x: State, e: EventId, y: State) -> bool:
            return e == f.event

    else:
        slot = env.slot_of(f.agent_id)
        alphabet = env.per_agent_alphabets[slot]
        for label in (f.source, f.target):
            if label not in alphabet:
                raise UnknownState(f"{label!r} is not a state of agent {f.agent_id!r}")

        def doomed(x: State, e: EventId, y: State) -> bool:
            return (
                e.namespace == f.agent_id
                and x[slot] == f.source
                and y[slot] == f.target
                and (f.event is None or e == f.event)
            )

    transitions = {(x, e): y for (x, e), y in a.transitions.items() if not doomed(x, e, y)}
    nfa = make_nfa(a.slot_names, a.states, a.events, transitions, a.costs, marked=a.marked)
    return EnvironmentModel(nfa, env.agent_ids, env.per_agent_alphabets)
