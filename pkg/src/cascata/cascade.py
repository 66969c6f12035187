"""Cascade composition: stepping semantics, flattening, simplicity check.

Component i reads the external input extended by the outputs of components
1..i-1, so its input alphabet must be the previous component's alphabet plus
one coordinate holding that component's outputs.  Within one step every
component sees the pre-update states of all others; transitions are then
applied simultaneously.
"""

from __future__ import annotations

import itertools
import math
from typing import NamedTuple

from .alphabets import FactoredAlphabet, Letter
from .automata import ComponentAutomaton, FlatAutomaton
from .errors import CapExceededError, EmptyInputError

DEFAULT_PRODUCT_CAP = 1_000_000

CascadeState = tuple


class StepResult(NamedTuple):
    state: CascadeState
    output: object
    component_outputs: tuple


class Cascade:
    def __init__(self, components):
        self.components = tuple(components)
        if not self.components:
            raise ValueError("a cascade needs at least one component")
        self.external = self.components[0].alphabet
        base = self.external.arity
        for i, comp in enumerate(self.components):
            if comp.alphabet.arity != base + i:
                raise ValueError(
                    f"component {i + 1} ({comp.name}) has arity "
                    f"{comp.alphabet.arity}, expected {base + i}"
                )
            if i > 0:
                prev = self.components[i - 1]
                if comp.alphabet.coords[:-1] != prev.alphabet.coords:
                    raise ValueError(
                        f"component {i + 1} ({comp.name}) does not extend the "
                        f"alphabet of component {i}"
                    )
                extra = comp.alphabet.coords[-1]
                if set(extra.values) != set(prev.outputs):
                    raise ValueError(
                        f"coordinate {extra.name!r} of component {i + 1} does not "
                        f"hold the outputs of component {i}"
                    )
        self._proj0 = tuple(
            tuple(j - 1 for j in c.dependencies.indices) for c in self.components
        )

    @property
    def depth(self) -> int:
        return len(self.components)

    def initial_state(self) -> CascadeState:
        return tuple(c.core.initial for c in self.components)

    def _advance(self, states: CascadeState, letter: Letter):
        """Outputs of every component at the current states, plus the
        simultaneously-updated state tuple.

        The external letter is validated once here; per-component projections
        reuse precomputed 0-based index tuples (inputs built further down the
        chain are valid by construction).
        """
        self.external.check(letter, "cascade input")
        current = letter
        outs = []
        internal = []
        for comp, q, idx in zip(self.components, states, self._proj0):
            x = tuple(current[i] for i in idx)
            outs.append(comp.theta(q, x))
            internal.append(comp.input_fn(x))
            current = current + (outs[-1],)
        new_states = tuple(
            comp.core.step(q, a)
            for comp, q, a in zip(self.components, states, internal)
        )
        return tuple(outs), new_states

    def step(self, states: CascadeState, letter: Letter) -> StepResult:
        outs, new_states = self._advance(states, letter)
        return StepResult(new_states, outs[-1], outs)

    def run(self, string):
        string = tuple(string)
        if not string:
            raise EmptyInputError("cascade run")
        states = self.initial_state()
        out = None
        for letter in string:
            outs, states = self._advance(states, letter)
            out = outs[-1]
        return out

    def __call__(self, string):
        return self.run(string)

    def product_size(self) -> int:
        return math.prod(len(c.core.states) for c in self.components)

    def _tabulated(self):
        """Per-component (state, projected letter) -> (next state, output)
        tables, so product sweeps are dictionary lookups."""
        tables = []
        for comp in self.components:
            table = {}
            for q in comp.core.states:
                for x in comp.projected.letters():
                    table[(q, x)] = (comp.core.step(q, comp.input_fn(x)),
                                     comp.theta(q, x))
            tables.append(table)
        return tables

    def flatten(self, cap: int = DEFAULT_PRODUCT_CAP, prune: bool = True) -> FlatAutomaton:
        """The single product automaton the cascade denotes, over the
        external alphabet.  ``prune`` keeps reachable product states only."""
        size = self.product_size()
        if size > cap:
            raise CapExceededError("cascade product", size, cap)
        letters = tuple(self.external.letters())
        init = self.initial_state()
        tables = self._tabulated()
        proj0 = self._proj0

        def advance(st, sigma):
            current = sigma
            nxt = []
            out = None
            for table, q, idx in zip(tables, st, proj0):
                x = tuple(current[i] for i in idx)
                q2, out = table[(q, x)]
                nxt.append(q2)
                current = current + (out,)
            return tuple(nxt), out

        trans = {}
        outs = {}
        if prune:
            order = [init]
            seen = {init}
            i = 0
            while i < len(order):
                st = order[i]
                i += 1
                for sigma in letters:
                    nxt, out = advance(st, sigma)
                    trans[(st, sigma)] = nxt
                    outs[(st, sigma)] = out
                    if nxt not in seen:
                        seen.add(nxt)
                        order.append(nxt)
            states = order
        else:
            states = list(
                itertools.product(*(c.core.states for c in self.components))
            )
            for st in states:
                for sigma in letters:
                    nxt, out = advance(st, sigma)
                    trans[(st, sigma)] = nxt
                    outs[(st, sigma)] = out
        return FlatAutomaton(
            letters, states, trans, init, outs,
            outputs=self.components[-1].outputs, factored=self.external,
        )

    def is_simple(self) -> bool:
        """True when every non-final component's output function returns the
        current state, checked extensionally."""
        for comp in self.components[:-1]:
            for q in comp.core.states:
                for x in comp.projected.letters():
                    if comp.theta(q, x) != q:
                        return False
        return True


def chain_alphabet(external: FactoredAlphabet, components_so_far) -> FactoredAlphabet:
    """Input alphabet for the next component: the external alphabet extended
    by one coordinate per already-built component, named after it."""
    alphabet = external
    for comp in components_so_far:
        alphabet = alphabet.extend(comp.name, comp.outputs)
    return alphabet


def build_chained(external: FactoredAlphabet, specs) -> Cascade:
    """Construct a cascade from per-component specs.

    Each spec is a dict with keys ``name``, ``dependencies``, ``input_fn``,
    ``core``, and optionally ``output_fn`` / ``outputs``; alphabets are
    chained automatically.
    """
    built: list[ComponentAutomaton] = []
    for spec in specs:
        alphabet = chain_alphabet(external, built)
        built.append(
            ComponentAutomaton(
                alphabet,
                spec["dependencies"],
                spec["input_fn"],
                spec["core"],
                output_fn=spec.get("output_fn", "state"),
                outputs=spec.get("outputs"),
                name=spec["name"],
            )
        )
    return Cascade(built)
