"""Semiautomata, flat automata, and components with projections.

Run semantics: a semiautomaton maps a string to the state reached from the
initial state; an automaton maps a non-empty string to the output of the
state reached after all but the last letter, paired with the last letter.
Instances are immutable after construction and all operations are pure.
"""

from __future__ import annotations

import itertools
from collections import deque
from typing import NamedTuple

import numpy as np

from .alphabets import FactoredAlphabet, Letter, Projection
from .errors import (
    ArityMismatchError,
    CapExceededError,
    EmptyInputError,
    UnknownLetterError,
)

DEFAULT_MONOID_CAP = 100_000


class Semiautomaton:
    """States plus a total transition function over a flat alphabet."""

    def __init__(self, alphabet, states, transitions, initial):
        self.alphabet = tuple(alphabet)
        self.states = tuple(states)
        self.transitions = dict(transitions)
        self.initial = initial
        if len(set(self.states)) != len(self.states) or not self.states:
            raise ValueError("states must be a non-empty duplicate-free sequence")
        if len(set(self.alphabet)) != len(self.alphabet) or not self.alphabet:
            raise ValueError("alphabet must be a non-empty duplicate-free sequence")
        if initial not in self.states:
            raise ValueError(f"initial state {initial!r} not among states")
        for q in self.states:
            for a in self.alphabet:
                if (q, a) not in self.transitions:
                    raise ValueError(f"transition missing for ({q!r}, {a!r})")
                if self.transitions[(q, a)] not in self.states:
                    raise ValueError(f"transition ({q!r}, {a!r}) leaves the state set")

    @property
    def n_states(self) -> int:
        return len(self.states)

    def step(self, state, letter):
        try:
            return self.transitions[(state, letter)]
        except KeyError:
            raise UnknownLetterError(letter, where="semiautomaton")

    def run(self, string, start=None):
        """State reached from ``start`` (default: initial) on the string;
        the empty string returns the start state unchanged."""
        q = self.initial if start is None else start
        for i, a in enumerate(string):
            if (q, a) not in self.transitions:
                raise UnknownLetterError(a, position=i, where="semiautomaton")
            q = self.transitions[(q, a)]
        return q

    def __call__(self, string):
        return self.run(string)

    # -- transition monoid ---------------------------------------------------

    def transition_monoid(self, cap: int = DEFAULT_MONOID_CAP):
        """All distinct state transformations induced by strings (including
        the empty string), as tuples over state indices."""
        index = {q: i for i, q in enumerate(self.states)}
        n = len(self.states)
        identity = tuple(range(n))
        generators = {
            a: tuple(index[self.transitions[(q, a)]] for q in self.states)
            for a in self.alphabet
        }
        seen = {identity}
        frontier = deque([identity])
        while frontier:
            f = frontier.popleft()
            for g in generators.values():
                h = tuple(g[f[i]] for i in range(n))
                if h not in seen:
                    if len(seen) >= cap:
                        raise CapExceededError("transition monoid", len(seen) + 1, cap)
                    seen.add(h)
                    frontier.append(h)
        return seen

    def is_aperiodic(self, cap: int = DEFAULT_MONOID_CAP) -> bool:
        """True iff every monoid element f satisfies f^k = f^(k+1) for some
        k <= number of states, i.e. no string permutes a state subset
        nontrivially."""
        n = len(self.states)
        for f in self.transition_monoid(cap):
            power = f
            stabilised = False
            for _ in range(n):
                nxt = tuple(f[power[i]] for i in range(n))
                if nxt == power:
                    stabilised = True
                    break
                power = nxt
            if not stabilised:
                return False
        return True


class EquivalenceResult(NamedTuple):
    equivalent: bool
    counterexample: tuple | None

    def __bool__(self) -> bool:
        return self.equivalent


class FlatAutomaton:
    """A semiautomaton plus an output function on (state, letter) pairs.

    ``alphabet`` is the concrete set of letters; ``factored`` optionally
    records coordinate structure for letters that are tuples.
    """

    def __init__(self, alphabet, states, transitions, initial, output_map,
                 outputs=None, factored: FactoredAlphabet | None = None):
        self.core = Semiautomaton(alphabet, states, transitions, initial)
        self.alphabet = self.core.alphabet
        self.states = self.core.states
        self.initial = initial
        self.factored = factored
        self.output_map = dict(output_map)
        for q in self.states:
            for a in self.alphabet:
                if (q, a) not in self.output_map:
                    raise ValueError(f"output missing for ({q!r}, {a!r})")
        if outputs is None:
            seen = []
            for v in self.output_map.values():
                if v not in seen:
                    seen.append(v)
            outputs = sorted(seen, key=repr)
        self.outputs = tuple(outputs)

    @property
    def n_states(self) -> int:
        return len(self.states)

    def transition(self, state, letter):
        return self.core.step(state, letter)

    def output(self, state, letter):
        try:
            return self.output_map[(state, letter)]
        except KeyError:
            raise UnknownLetterError(letter, where="automaton output")

    def run(self, string):
        """Output on a non-empty string: the output function applied to the
        state reached after all but the last letter, with the last letter."""
        string = tuple(string)
        if len(string) == 0:
            raise EmptyInputError()
        q = self.core.run(string[:-1])
        return self.output(q, string[-1])

    def __call__(self, string):
        return self.run(string)

    def is_aperiodic(self, cap: int = DEFAULT_MONOID_CAP) -> bool:
        return self.core.is_aperiodic(cap)

    # -- reachability and minimization ----------------------------------------

    def reachable_states(self):
        """Reachable states in BFS discovery order (letters in alphabet
        order), starting at the initial state."""
        order = [self.initial]
        seen = {self.initial}
        i = 0
        while i < len(order):
            q = order[i]
            i += 1
            for a in self.alphabet:
                nxt = self.core.transitions[(q, a)]
                if nxt not in seen:
                    seen.add(nxt)
                    order.append(nxt)
        return order

    def restrict(self, letters) -> "FlatAutomaton":
        """Sub-automaton over a subset of the alphabet."""
        letters = tuple(letters)
        missing = [a for a in letters if a not in set(self.alphabet)]
        if missing:
            raise UnknownLetterError(missing[0], where="restrict")
        trans = {(q, a): self.core.transitions[(q, a)] for q in self.states for a in letters}
        outs = {(q, a): self.output_map[(q, a)] for q in self.states for a in letters}
        return FlatAutomaton(letters, self.states, trans, self.initial, outs,
                             outputs=self.outputs)

    def minimize(self) -> "FlatAutomaton":
        """Smallest automaton implementing the same string function.

        Partition refinement over output rows, restricted to reachable
        states; the result is canonically relabelled 0..k-1 in BFS order.
        """
        order = self.reachable_states()
        index = {q: i for i, q in enumerate(order)}
        delta = np.array(
            [[index[self.core.transitions[(q, a)]] for a in self.alphabet] for q in order],
            dtype=np.int64,
        )
        out_ids: dict = {}
        out_rows = np.array(
            [
                [out_ids.setdefault(self.output_map[(q, a)], len(out_ids))
                 for a in self.alphabet]
                for q in order
            ],
            dtype=np.int64,
        )
        _, block = np.unique(out_rows, axis=0, return_inverse=True)
        n_blocks = block.max() + 1
        while True:
            signature = np.column_stack([block, block[delta]])
            _, refined = np.unique(signature, axis=0, return_inverse=True)
            n_refined = refined.max() + 1
            block = refined
            if n_refined == n_blocks:
                break
            n_blocks = n_refined
        # canonical ids by first occurrence in BFS order
        ids: dict = {}
        for i, q in enumerate(order):
            if int(block[i]) not in ids:
                ids[int(block[i])] = len(ids)
        state_id = {q: ids[int(block[i])] for i, q in enumerate(order)}
        new_states = range(len(ids))
        trans = {}
        outs = {}
        for q in order:
            for a in self.alphabet:
                key = (state_id[q], a)
                trans[key] = state_id[self.core.transitions[(q, a)]]
                outs[key] = self.output_map[(q, a)]
        return FlatAutomaton(self.alphabet, new_states, trans, state_id[self.initial],
                             outs, outputs=self.outputs, factored=self.factored)

    # -- equivalence -----------------------------------------------------------

    def equivalent(self, other: "FlatAutomaton", max_len: int | None = None) -> EquivalenceResult:
        """Do both automata implement the same string function?

        Over the same letter set this is an exact product-automaton check
        (outputs compared on all reachable state pairs, per letter).  With
        different letter sets of equal size, letters are paired by sorted
        order and strings up to ``max_len`` are compared exhaustively.
        """
        if set(self.alphabet) == set(other.alphabet):
            return self._equivalent_exact(other)
        if max_len is None:
            raise ValueError(
                "alphabets differ; pass max_len for the paired exhaustive check"
            )
        if len(self.alphabet) != len(other.alphabet):
            raise ValueError("alphabets differ in size; no letter pairing exists")
        mine = sorted(self.alphabet, key=repr)
        theirs = sorted(other.alphabet, key=repr)
        for length in range(1, max_len + 1):
            for idxs in itertools.product(range(len(mine)), repeat=length):
                s1 = tuple(mine[i] for i in idxs)
                s2 = tuple(theirs[i] for i in idxs)
                if self.run(s1) != other.run(s2):
                    return EquivalenceResult(False, s1)
        return EquivalenceResult(True, None)

    def _equivalent_exact(self, other: "FlatAutomaton") -> EquivalenceResult:
        letters = sorted(self.alphabet, key=repr)
        start = (self.initial, other.initial)
        parent: dict = {start: None}
        queue = deque([start])
        while queue:
            pair = queue.popleft()
            qa, qb = pair
            for a in letters:
                if self.output_map[(qa, a)] != other.output_map[(qb, a)]:
                    # rebuild the prefix leading to this pair
                    prefix = []
                    node = pair
                    while parent[node] is not None:
                        node, letter = parent[node]
                        prefix.append(letter)
                    prefix.reverse()
                    return EquivalenceResult(False, tuple(prefix) + (a,))
                nxt = (self.core.transitions[(qa, a)], other.core.transitions[(qb, a)])
                if nxt not in parent:
                    parent[nxt] = (pair, a)
                    queue.append(nxt)
        return EquivalenceResult(True, None)

    # -- serialization -----------------------------------------------------------

    def to_dict(self) -> dict:
        idx = {q: i for i, q in enumerate(self.states)}
        data = {
            "letters": [list(a) if isinstance(a, tuple) else a for a in self.alphabet],
            "states": [repr(q) for q in self.states],
            "initial": idx[self.initial],
            "outputs": list(self.outputs),
            "transitions": [
                [idx[q], i, idx[self.core.transitions[(q, a)]]]
                for q in self.states
                for i, a in enumerate(self.alphabet)
            ],
            "output_rows": [
                [idx[q], i, self.output_map[(q, a)]]
                for q in self.states
                for i, a in enumerate(self.alphabet)
            ],
        }
        if self.factored is not None:
            data["alphabet"] = [
                {"name": c.name, "values": list(c.values)} for c in self.factored.coords
            ]
        return data

    @staticmethod
    def from_dict(data: dict) -> "FlatAutomaton":
        letters = tuple(
            tuple(a) if isinstance(a, list) else a for a in data["letters"]
        )
        states = tuple(range(len(data["states"])))
        trans = {(q, letters[i]): t for q, i, t in data["transitions"]}
        outs = {(q, letters[i]): o for q, i, o in data["output_rows"]}
        factored = None
        if "alphabet" in data:
            factored = FactoredAlphabet.of(
                *((c["name"], tuple(c["values"])) for c in data["alphabet"])
            )
        return FlatAutomaton(letters, states, trans, data["initial"], outs,
                             outputs=tuple(data["outputs"]), factored=factored)

    def to_dot(self) -> str:
        """GraphViz rendering; states get double circles when outputs are
        {0,1} and consistently mark the transition targets."""
        idx = {q: i for i, q in enumerate(self.states)}
        accepting = self._accepting_states() if set(self.outputs) <= {0, 1} else None
        lines = ["digraph automaton {", "  rankdir=LR;", '  __start [shape=point, label=""];']
        for q in self.states:
            shape = "doublecircle" if accepting is not None and q in accepting else "circle"
            lines.append(f'  q{idx[q]} [shape={shape}, label="{q}"];')
        lines.append(f"  __start -> q{idx[self.initial]};")
        for q in self.states:
            for a in self.alphabet:
                label = str(a)
                if accepting is None:
                    label += f" / {self.output_map[(q, a)]}"
                target = self.core.transitions[(q, a)]
                lines.append(f'  q{idx[q]} -> q{idx[target]} [label="{label}"];')
        lines.append("}")
        return "\n".join(lines)

    def _accepting_states(self):
        """States F such that output(q, a) == 1 iff the transition enters F,
        or None when no such labelling is consistent."""
        label: dict = {}
        for q in self.states:
            for a in self.alphabet:
                target = self.core.transitions[(q, a)]
                out = self.output_map[(q, a)]
                if label.setdefault(target, out) != out:
                    return None
        return {q for q, v in label.items() if v == 1}


class ComponentAutomaton:
    """An automaton over a factored alphabet that projects its input to a
    dependency set, maps the projection into a small internal alphabet, and
    transitions on the result.

    ``output_fn`` is a callable (state, projected letter) -> output, or one
    of the shorthands ``'state'`` (return the state unchanged) and
    ``'next_state'`` (return the transition target, i.e. the state the input
    letter leads to).
    """

    def __init__(self, alphabet: FactoredAlphabet, dependencies, input_fn,
                 core: Semiautomaton, output_fn="state", outputs=None,
                 name: str | None = None):
        self.alphabet = alphabet
        if isinstance(dependencies, Projection):
            if dependencies.source_arity != alphabet.arity:
                raise ArityMismatchError(alphabet.arity, dependencies.source_arity,
                                         "dependency set")
            self.dependencies = dependencies
        else:
            self.dependencies = Projection(alphabet.arity, tuple(dependencies))
        if self.dependencies.degree == 0:
            raise ValueError("a component must depend on at least one coordinate")
        self.projected = alphabet.project(self.dependencies.indices)
        self.input_fn = input_fn
        self.core = core
        self.name = name or "component"

        if callable(output_fn):
            self._theta = output_fn
            if outputs is None:
                outputs = self._sweep_outputs()
        elif output_fn == "state":
            self._theta = lambda q, x: q
            outputs = core.states
        elif output_fn == "next_state":
            self._theta = lambda q, x: core.step(q, input_fn(x))
            outputs = core.states
        else:
            raise ValueError(f"unknown output_fn {output_fn!r}")
        self.output_kind = output_fn if isinstance(output_fn, str) else "table"
        self.outputs = tuple(outputs)
        self._validate()

    def _sweep_outputs(self):
        seen = []
        for q in self.core.states:
            for x in self.projected.letters():
                v = self._theta(q, x)
                if v not in seen:
                    seen.append(v)
        return sorted(seen, key=repr)

    def _validate(self):
        internal = set(self.core.alphabet)
        outs = set(self.outputs)
        for x in self.projected.letters():
            v = self.input_fn(x)
            if v not in internal:
                raise UnknownLetterError(
                    v, where=f"{self.name}: input function range"
                )
            for q in self.core.states:
                if self.theta(q, x) not in outs:
                    raise UnknownLetterError(
                        self.theta(q, x), where=f"{self.name}: output function range"
                    )

    def project(self, letter: Letter) -> Letter:
        self.alphabet.check(letter, self.name)
        return self.dependencies(letter)

    def theta(self, state, projected_letter: Letter):
        return self._theta(state, projected_letter)

    def induce(self) -> FlatAutomaton:
        """The flat automaton over the full alphabet: transitions feed the
        projected letter through the input function; outputs read the
        projected letter directly."""
        letters = tuple(self.alphabet.letters())
        trans = {}
        outs = {}
        for q in self.core.states:
            for sigma in letters:
                x = self.dependencies(sigma)
                trans[(q, sigma)] = self.core.step(q, self.input_fn(x))
                outs[(q, sigma)] = self.theta(q, x)
        return FlatAutomaton(letters, self.core.states, trans, self.core.initial,
                             outs, outputs=self.outputs, factored=self.alphabet)

    def run(self, string):
        return self.induce().run(string)
