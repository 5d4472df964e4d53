"""Brute-force references and the seeded scenario generator.

Everything here exists to check the fast paths from the outside: the shortest
path oracle is an exhaustive label-correcting relaxation that shares no code
with the planner's Dijkstra, and the generator produces small reproducible
multi-agent scenarios for property sweeps.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable

from .automata import EventId, Projector, State, make_nfa, proj
from .composer import AgentSpec, EnvironmentModel, InterAgentSpec
from .errors import BoundExceeded, NoPath, UnknownState
from .planner import TaskSpecification

DEFAULT_STATE_BOUND = 10_000


def brute_force_shortest(
    env: EnvironmentModel,
    x0: State,
    goal: Callable,
    bound: int = DEFAULT_STATE_BOUND,
):
    """Exact minimum-cost path from ``x0`` to the cheapest state satisfying
    ``goal``, via relaxation to fixpoint over the raw transition map.

    Returns ``(path, cost)`` where ``path`` is a state list. Among equal-cost
    goal states the lexicographically smallest wins.
    """
    a = env.automaton
    if len(a.states) > bound:
        raise BoundExceeded(f"{len(a.states)} states exceeds the oracle bound {bound}")
    x0 = tuple(x0)
    if x0 not in a.states:
        raise UnknownState(f"{x0} is not a state of the model")

    edges = sorted(a.transitions.items())
    dist = {x0: 0.0}
    parent = {}
    for _ in range(max(len(a.states), 1)):
        changed = False
        for (x, e), y in edges:
            dx = dist.get(x)
            if dx is None:
                continue
            nd = dx + a.costs[e]
            if nd < dist.get(y, math.inf):
                dist[y] = nd
                parent[y] = x
                changed = True
        if not changed:
            break

    reached_goals = [s for s in sorted(a.states) if goal(s) and s in dist]
    if not reached_goals:
        raise NoPath("no goal state is reachable")
    best = min(reached_goals, key=lambda s: (dist[s], s))

    path = [best]
    while path[-1] != x0:
        path.append(parent[path[-1]])
    path.reverse()
    return path, dist[best]


def enumerate_goal_states(env: EnvironmentModel, task: TaskSpecification) -> set:
    """All marked states whose projection satisfies the task."""
    a = env.automaton
    b, gamma = task.projector, task.target
    return {s for s in a.states if s in a.marked and proj(s, b) == gamma}


@dataclass(frozen=True)
class GeneratedScenario:
    seed: int
    agents: tuple
    inter: InterAgentSpec
    initial: State
    task: TaskSpecification


def random_scenario(
    seed: int,
    n_agents: int = None,
    alphabet_size: int = None,
    *,
    p_constraints: float = 0.4,
    p_failure: float = 0.3,
    p_inter: float = 0.6,
    p_inter_revives_failure: float = 0.25,
    cost_range: tuple = (1, 100),
    multi_slot_tasks: bool = True,
) -> GeneratedScenario:
    """Seeded random scenario: 2-4 agents with 2-5 states each, integer costs,
    full marking on capabilities and empty marking on removers.

    Occasionally an inter-agent capability re-declares a failed agent event,
    which the environment must then retain.
    """
    rng = random.Random(seed)
    n = n_agents or rng.randint(2, 4)
    lo, hi = cost_range

    agents = []
    alphabets = []
    failed_events = []  # (agent index, EventId, src label, dst label, cost)
    for i in range(n):
        aid = f"a{i}"
        k = alphabet_size or rng.randint(2, 5)
        labels = [f"s{j}" for j in range(k)]
        alphabets.append(labels)

        # A cycle keeps the agent strongly connected; extra edges add shortcuts.
        order = labels[:]
        rng.shuffle(order)
        pairs = []
        seen = set()
        for u, v in zip(order, order[1:] + order[:1]):
            if u != v and (u, v) not in seen:
                seen.add((u, v))
                pairs.append((u, v))
        for _ in range(rng.randint(0, k * (k - 1) // 2)):
            u, v = rng.choice(labels), rng.choice(labels)
            if (u, v) not in seen:
                seen.add((u, v))
                pairs.append((u, v))

        transitions = {}
        costs = {}
        for idx, (u, v) in enumerate(pairs):
            e = EventId(aid, f"m{idx}")
            transitions[((u,), e)] = (v,)
            costs[e] = rng.randint(lo, hi)
        caps = make_nfa((aid,), [(l,) for l in labels], costs, transitions, costs)

        constraints = ()
        if pairs and rng.random() < p_constraints:
            chosen = rng.sample(pairs, rng.randint(1, min(2, len(pairs))))
            c_transitions = {}
            c_costs = {}
            c_states = set()
            for idx, (u, v) in enumerate(pairs):
                if (u, v) in chosen:
                    e = EventId(aid, f"m{idx}")
                    c_transitions[((u,), e)] = (v,)
                    c_costs[e] = costs[e]
                    c_states.update({(u,), (v,)})
            constraints = (
                make_nfa((aid,), c_states, c_costs, c_transitions, c_costs, marked=()),
            )

        failures = ()
        if pairs and rng.random() < p_failure:
            idx = rng.randrange(len(pairs))
            u, v = pairs[idx]
            e = EventId(aid, f"m{idx}")
            failures = (
                make_nfa((aid,), {(u,), (v,)}, [e], {((u,), e): (v,)}, {e: costs[e]}, marked=()),
            )
            failed_events.append((i, e, u, v, costs[e]))

        agents.append(AgentSpec(aid, (caps,), failures, constraints))

    slot_names = tuple(a.id for a in agents)
    inter = None
    if n >= 2 and rng.random() < p_inter:
        transitions = {}
        costs = {}
        states = set()
        for j in range(rng.randint(1, 3)):
            mover = rng.randrange(n)
            src_label = rng.choice(alphabets[mover])
            dst_label = rng.choice([l for l in alphabets[mover] if l != src_label] or [src_label])
            context = tuple(rng.choice(alphabets[i]) for i in range(n))
            src = tuple(src_label if i == mover else context[i] for i in range(n))
            dst = tuple(dst_label if i == mover else context[i] for i in range(n))
            e = EventId("inter", f"x{j}")
            transitions[(src, e)] = dst
            costs[e] = rng.randint(lo, hi)
            states.update({src, dst})
        if failed_events and rng.random() < p_inter_revives_failure:
            agent_idx, e, u, v, cost = rng.choice(failed_events)
            context = tuple(rng.choice(alphabets[i]) for i in range(n))
            src = tuple(u if i == agent_idx else context[i] for i in range(n))
            dst = tuple(v if i == agent_idx else context[i] for i in range(n))
            transitions[(src, e)] = dst
            costs[e] = cost
            states.update({src, dst})
        caps = make_nfa(slot_names, states, costs, transitions, costs)
        inter = InterAgentSpec(capabilities=caps)

    initial = tuple(rng.choice(alphabets[i]) for i in range(n))
    n_task_slots = rng.choice((1, 1, 1, 2)) if (multi_slot_tasks and n >= 2) else 1
    chosen_slots = sorted(rng.sample(range(n), n_task_slots))
    projector = Projector(tuple(i in chosen_slots for i in range(n)))
    target = tuple(rng.choice(alphabets[i]) for i in chosen_slots)
    task = TaskSpecification(projector, target)

    return GeneratedScenario(seed, tuple(agents), inter, initial, task)
