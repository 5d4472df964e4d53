from __future__ import annotations

import random

import pytest
from hypothesis import strategies as st

from specter.automata import EventId, make_nfa


def ev(namespace: str, name: str) -> EventId:
    return EventId(namespace, name)


@pytest.fixture
def two_state_nfa():
    """Minimal single-slot machine: A --e1--> B."""
    e1 = ev("R1", "e1")
    return make_nfa(
        slot_names=("R1",),
        states=[("A",), ("B",)],
        events=[e1],
        transitions={(("A",), e1): ("B",)},
        costs={e1: 10},
        marked=[("A",), ("B",)],
    )


@st.composite
def arity1_nfas(st_draw, slot: str = "a0", min_states: int = 2, max_states: int = 5):
    """Random single-slot automaton with uniquely named events (so endpoint
    patterns can never collide)."""
    n = st_draw(st.integers(min_states, max_states))
    labels = [f"s{i}" for i in range(n)]
    pairs = st_draw(
        st.lists(
            st.tuples(st.sampled_from(labels), st.sampled_from(labels)),
            min_size=1,
            max_size=8,
            unique=True,
        )
    )
    transitions = {}
    costs = {}
    for i, (u, v) in enumerate(pairs):
        e = EventId(slot, f"e{i}")
        transitions[((u,), e)] = (v,)
        costs[e] = st_draw(st.integers(1, 100))
    return make_nfa(
        (slot,),
        [(label,) for label in labels],
        costs.keys(),
        transitions,
        costs,
    )


def random_arity1_nfa(rng: random.Random, slot: str, n_states: int, n_edges: int, *, prefix: str = "e"):
    """Seeded single-slot automaton builder for non-hypothesis sweeps."""
    labels = [f"s{i}" for i in range(n_states)]
    pairs = set()
    while len(pairs) < min(n_edges, n_states * n_states):
        pairs.add((rng.choice(labels), rng.choice(labels)))
    transitions = {}
    costs = {}
    for i, (u, v) in enumerate(sorted(pairs)):
        e = EventId(slot, f"{prefix}{i}")
        transitions[((u,), e)] = (v,)
        costs[e] = rng.randint(1, 100)
    return make_nfa((slot,), [(label,) for label in labels], costs.keys(), transitions, costs)
