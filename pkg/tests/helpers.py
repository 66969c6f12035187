"""Shared generators for randomized tests."""

import itertools
import random

from cascata.alphabets import FactoredAlphabet
from cascata.automata import ComponentAutomaton, Semiautomaton
from cascata.cascade import Cascade, chain_alphabet
from cascata.primes import make_counter, make_flipflop


def random_external(rng: random.Random, max_arity=2, max_domain=3) -> FactoredAlphabet:
    arity = rng.randint(1, max_arity)
    coords = []
    for i in range(arity):
        size = rng.randint(2, max_domain)
        coords.append((f"c{i}", tuple(f"{chr(97 + i)}{j}" for j in range(size))))
    return FactoredAlphabet.of(*coords)


def random_semiautomaton(rng: random.Random, max_states=3, max_letters=3) -> Semiautomaton:
    n = rng.randint(1, max_states)
    k = rng.randint(1, max_letters)
    letters = tuple(f"p{j}" for j in range(k))
    states = tuple(range(n))
    trans = {(q, a): rng.randrange(n) for q in states for a in letters}
    return Semiautomaton(letters, states, trans, rng.randrange(n))


def random_component(rng: random.Random, alphabet: FactoredAlphabet, core=None,
                     output="random", name="comp") -> ComponentAutomaton:
    arity = alphabet.arity
    deps = tuple(sorted(rng.sample(range(1, arity + 1), rng.randint(1, arity))))
    if core is None:
        core = random_semiautomaton(rng)
    letters = list(alphabet.project(deps).letters())
    phi = {x: rng.choice(core.alphabet) for x in letters}
    input_fn = lambda x, table=phi: table[x]
    if output == "state":
        return ComponentAutomaton(alphabet, deps, input_fn, core,
                                  output_fn="state", name=name)
    gamma = tuple(f"g{j}" for j in range(rng.randint(1, 3)))
    theta = {(q, x): rng.choice(gamma) for q in core.states for x in letters}
    output_fn = lambda q, x, table=theta: table[(q, x)]
    return ComponentAutomaton(alphabet, deps, input_fn, core,
                              output_fn=output_fn, outputs=gamma, name=name)


def random_cascade(rng: random.Random, max_d=3, max_arity=2, max_domain=3,
                   cores="random", simple=False) -> Cascade:
    external = random_external(rng, max_arity, max_domain)
    d = rng.randint(1, max_d)
    comps = []
    for i in range(d):
        alphabet = chain_alphabet(external, comps)
        if cores == "flipflop":
            core = make_flipflop(with_reset=rng.random() < 0.5,
                                 initial=rng.randint(0, 1))
        else:
            core = random_semiautomaton(rng)
        output = "state" if (simple and i < d - 1) else \
            rng.choice(["state", "random"])
        comps.append(random_component(rng, alphabet, core=core,
                                      output=output, name=f"k{i}"))
    return Cascade(comps)


def cascade_with_counter(rng: random.Random, modulus=5, max_d=3) -> Cascade:
    """Cascade containing a counter whose inc is driven directly by one
    external letter, so the inc cycle is always reachable."""
    external = random_external(rng, max_arity=1, max_domain=3)
    trigger = external.coords[0].values[0]
    d = rng.randint(1, max_d)
    position = rng.randrange(d)
    comps = []
    for i in range(d):
        alphabet = chain_alphabet(external, comps)
        if i == position:
            core = make_counter(modulus)
            input_fn = lambda x, t=trigger: "inc" if x[0] == t else "read"
            comps.append(ComponentAutomaton(alphabet, (1,), input_fn, core,
                                            output_fn="state", name=f"k{i}"))
        else:
            comps.append(random_component(
                rng, alphabet,
                core=make_flipflop(with_reset=rng.random() < 0.5),
                output=rng.choice(["state", "random"]), name=f"k{i}"))
    return Cascade(comps)


def exhaustive_strings(letters, max_len):
    for length in range(1, max_len + 1):
        yield from itertools.product(letters, repeat=length)


def string_sweep(letters, max_len, cap, rng: random.Random):
    """Every string up to max_len when that fits under the cap; otherwise
    all short strings plus random longer ones up to the cap."""
    letters = list(letters)
    total = sum(len(letters) ** le for le in range(1, max_len + 1))
    if total <= cap:
        return list(exhaustive_strings(letters, max_len))
    out = []
    length = 1
    while sum(len(letters) ** le for le in range(1, length + 1)) <= cap // 2 and length <= max_len:
        out.extend(itertools.product(letters, repeat=length))
        length += 1
    while len(out) < cap:
        le = rng.randint(length, max_len)
        out.append(tuple(rng.choice(letters) for _ in range(le)))
    return out
