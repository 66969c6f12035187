"""Bound calculators and the brute-force growth/dimension oracles that
certify them empirically.

Cardinality bounds multiply the per-part choices of an automaton (projection,
input function, core, output function); growth bounds multiply per-part
growths, with input/output functions charged on letter samples of size
(sample size x maximum string length).  Asymptotic sample-complexity bounds
are instantiated with explicit constants, documented below; those constants
are instantiations, not claims carried by the bound statements themselves.

Logs are base 2 throughout; the natural log appears only inside the explicit
finite-class constant.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .alphabets import projection_count
DEFAULT_SEARCH_CAP = 2_000_000

#: multiplier for the dimension-based sample size; an instantiation of an
#: asymptotic bound, not a guaranteed constant.
DIMENSION_SAMPLE_CONSTANT = 8


@dataclass(frozen=True)
class ComponentClassSpec:
    """Sizes (and optionally dimensions) of the choice sets for one
    component: projections are ``binomial(arity, degree)`` many; input
    functions, cores and output functions are counted directly.

    ``input_dim`` / ``output_dim`` default to the log2-cardinality of the
    finite class when unset, which upper-bounds the true dimension.
    """

    arity: int
    degree: int
    n_input_fns: int
    n_cores: int
    n_output_fns: int
    internal_size: int
    output_size: int
    input_dim: float | None = None
    output_dim: float | None = None

    def __post_init__(self):
        for label, n in (
            ("n_input_fns", self.n_input_fns),
            ("n_cores", self.n_cores),
            ("n_output_fns", self.n_output_fns),
            ("internal_size", self.internal_size),
            ("output_size", self.output_size),
        ):
            if n < 1:
                raise ValueError(f"{label} must be positive, got {n}")

    @property
    def n_projections(self) -> int:
        return projection_count(self.arity, self.degree)

    @property
    def resolved_input_dim(self) -> float:
        return self.input_dim if self.input_dim is not None else math.log2(self.n_input_fns)

    @property
    def resolved_output_dim(self) -> float:
        return self.output_dim if self.output_dim is not None else math.log2(self.n_output_fns)

    def capacity(self) -> float:
        """log2 of the projection and core choices plus the input/output
        function dimensions; the exponent the dimension bounds run on."""
        return (
            math.log2(self.n_projections)
            + math.log2(self.n_cores)
            + self.resolved_input_dim
            + self.resolved_output_dim
        )


@dataclass(frozen=True)
class ClassDescriptor:
    components: tuple[ComponentClassSpec, ...]
    max_len: int
    epsilon: float = 0.1
    eta: float = 0.1

    def __post_init__(self):
        if not self.components:
            raise ValueError("descriptor needs at least one component")
        if self.max_len < 1:
            raise ValueError("max_len must be at least 1")
        for label, v in (("epsilon", self.epsilon), ("eta", self.eta)):
            if not 0 < v < 1:
                raise ValueError(f"{label} must lie in (0, 1), got {v}")

    @property
    def depth(self) -> int:
        return len(self.components)


# ---------------------------------------------------------------------------
# Cardinality and sample-size bounds for finite classes.
# ---------------------------------------------------------------------------


def cardinality_bound_automata(spec: ComponentClassSpec) -> int:
    return spec.n_projections * spec.n_input_fns * spec.n_cores * spec.n_output_fns


def cardinality_bound_cascade(desc: ClassDescriptor) -> int:
    return math.prod(cardinality_bound_automata(c) for c in desc.components)


def sample_bound_finite(cardinality: int, epsilon: float, eta: float) -> int:
    """Sample size sufficient for a finite class under 0-1 loss:
    ceil(ln(2|F|/eta) / (2 eps^2)), the two-sided Hoeffding instantiation of
    the log-cardinality bound."""
    if cardinality < 1:
        raise ValueError("cardinality must be at least 1")
    return math.ceil(math.log(2 * cardinality / eta) / (2 * epsilon**2))


# ---------------------------------------------------------------------------
# Growth and dimension bounds.
# ---------------------------------------------------------------------------


def haussler_growth_bound(dim: float, n_points: int, n_outputs: int) -> float:
    """(e * n * |Y|) ** dim, the dimension-to-growth chain."""
    return (math.e * n_points * n_outputs) ** dim


def _finite_growth(n_functions: int, n_points: int, n_outputs: int) -> int:
    """Trivially valid growth bound for a finite class: patterns cannot
    outnumber the functions or the output tuples."""
    return min(n_functions, n_outputs**n_points)


def growth_bound_automata(spec: ComponentClassSpec, ell: int, max_len: int,
                          input_growth=None, output_growth=None) -> float:
    """Growth bound for an automaton class at sample size ``ell``: the
    projection and core counts times the input-function growth on
    ell * max_len letters times the output-function growth on ell letters.

    ``input_growth`` / ``output_growth`` map a letter-sample size to a growth
    value (exact values may be supplied from the empirical machinery);
    defaults use the finite-class fallback.
    """
    if input_growth is None:
        input_growth = lambda n: _finite_growth(spec.n_input_fns, n, spec.internal_size)
    if output_growth is None:
        output_growth = lambda n: _finite_growth(spec.n_output_fns, n, spec.output_size)
    return (
        spec.n_projections
        * spec.n_cores
        * input_growth(ell * max_len)
        * output_growth(ell)
    )


def growth_bound_cascade(desc: ClassDescriptor, ell: int,
                         input_growths: Sequence | None = None,
                         output_growths: Sequence | None = None) -> float:
    """Product of per-component factors; note both the input and the output
    functions are charged on ell * max_len letters here."""
    total = 1
    for i, spec in enumerate(desc.components):
        ig = input_growths[i] if input_growths else (
            lambda n, s=spec: _finite_growth(s.n_input_fns, n, s.internal_size)
        )
        og = output_growths[i] if output_growths else (
            lambda n, s=spec: _finite_growth(s.n_output_fns, n, s.output_size)
        )
        total *= (
            spec.n_projections
            * spec.n_cores
            * ig(ell * desc.max_len)
            * og(ell * desc.max_len)
        )
    return total


def dimension_bound_automata(spec: ComponentClassSpec, max_len: int) -> float:
    """2 w log2(w e M |internal| |output|) with w the component capacity;
    only valid when w >= 2."""
    w = spec.capacity()
    if w < 2:
        raise ValueError(f"dimension bound requires capacity w >= 2, got {w:.3f}")
    return 2 * w * math.log2(w * math.e * max_len * spec.internal_size * spec.output_size)


def dimension_bound_cascade(desc: ClassDescriptor) -> float:
    """Cascade form: 2 d w log2(d w e M |internal| |output|) where w and the
    alphabet sizes are maxima over the components (cardinality maxima)."""
    d = desc.depth
    w = max(c.capacity() for c in desc.components)
    pi = max(c.internal_size for c in desc.components)
    gamma = max(c.output_size for c in desc.components)
    if d * w < 2:
        raise ValueError(f"dimension bound requires d*w >= 2, got {d * w:.3f}")
    return 2 * d * w * math.log2(d * w * math.e * desc.max_len * pi * gamma)


def sample_bound_dimension(dim: float, n_outputs: int, epsilon: float, eta: float,
                           constant: int = DIMENSION_SAMPLE_CONSTANT) -> int:
    """Bound-shaped sample size from a dimension:
    ceil(C (dim ln|Y| + ln(1/eta)) / eps^2).  The multiplier C is a
    documented instantiation, not a guarantee."""
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    return math.ceil(constant * (dim * math.log(n_outputs) + math.log(1 / eta)) / epsilon**2)


# ---------------------------------------------------------------------------
# Empirical growth and dimension.
# ---------------------------------------------------------------------------


class GrowthReport(NamedTuple):
    sample_size: int
    count: int
    witness: tuple
    exact: bool
    bound: float | None = None

    def against(self, bound: float) -> "GrowthReport":
        return self._replace(bound=bound)


class DimensionReport(NamedTuple):
    value: int
    witness: tuple
    exact: bool


def pattern_count(functions: Sequence, sample: Sequence) -> int:
    """Number of distinct output tuples of the class on the sample."""
    return len({tuple(f(x) for x in sample) for f in functions})


def empirical_growth(functions: Sequence, universe: Sequence, ell: int,
                     mode: str = "exact", cap: int = DEFAULT_SEARCH_CAP,
                     restarts: int = 200, seed: int = 0) -> GrowthReport:
    """Maximum pattern count over size-``ell`` samples from the universe.

    The count on a sample depends only on its support set and never shrinks
    when the support grows, so exact mode iterates subsets of size
    min(ell, |universe|) instead of all multisets; the witness is padded back
    to a size-``ell`` sample.  Past the cap, or in heuristic mode, randomized
    restarts report a certified lower bound with its witness.
    """
    functions = list(functions)
    universe = list(universe)
    support = min(ell, len(universe))
    if mode == "exact" and math.comb(len(universe), support) > cap:
        mode = "heuristic"
    if mode == "exact":
        best, witness = 0, ()
        for subset in itertools.combinations(universe, support):
            n = pattern_count(functions, subset)
            if n > best:
                best, witness = n, subset
        witness = witness + (witness[0],) * (ell - len(witness)) if witness else ()
        return GrowthReport(ell, best, witness, True)
    if mode != "heuristic":
        raise ValueError(f"unknown mode {mode!r}")
    rng = random.Random(seed)
    best, witness = 0, ()
    for _ in range(restarts):
        sample = tuple(rng.choice(universe) for _ in range(ell))
        n = pattern_count(functions, sample)
        if n > best:
            best, witness = n, sample
    return GrowthReport(ell, best, witness, False)


def _shatters(functions, points) -> bool:
    patterns = set()
    want = 2 ** len(points)
    for f in functions:
        patterns.add(tuple(f(x) for x in points))
        if len(patterns) == want:
            return True
    return False


def vc_dimension(functions: Sequence, universe: Sequence,
                 cap: int = DEFAULT_SEARCH_CAP) -> DimensionReport:
    """Largest sample size from the universe on which the class realizes all
    binary patterns, by exhaustive subset search.

    Outputs must take at most two values.  If the subset search at some size
    would exceed the cap, the best size found so far is returned flagged as
    a lower bound.
    """
    functions = list(functions)
    universe = list(universe)
    outputs = {f(x) for f in functions for x in universe}
    if len(outputs) > 2:
        raise ValueError(f"vc dimension needs binary outputs, saw {sorted(map(repr, outputs))}")
    best = DimensionReport(0, (), True)
    h = 1
    while h <= len(universe):
        if 2**h > len(functions):
            return best
        if math.comb(len(universe), h) * len(functions) > cap:
            return DimensionReport(best.value, best.witness, False)
        found = None
        for points in itertools.combinations(universe, h):
            if _shatters(functions, points):
                found = points
                break
        if found is None:
            return best
        best = DimensionReport(h, found, True)
        h += 1
    return best


def binarize(functions: Sequence, outputs: Sequence):
    """Indicator functions on (point, output) pairs: 1 when the function
    maps the point to that output."""
    return [
        (lambda xy, f=f: 1 if f(xy[0]) == xy[1] else 0)
        for f in functions
    ]


def graph_dimension(functions: Sequence, universe: Sequence, outputs: Sequence,
                    cap: int = DEFAULT_SEARCH_CAP) -> DimensionReport:
    """VC dimension of the binarized class over (point, output) pairs."""
    pairs = [(x, y) for x in universe for y in outputs]
    return vc_dimension(binarize(functions, outputs), pairs, cap)


def class_dimension(functions: Sequence, universe: Sequence, outputs: Sequence,
                    cap: int = DEFAULT_SEARCH_CAP) -> DimensionReport:
    """VC dimension for binary outputs, graph dimension otherwise."""
    if len(set(outputs)) <= 2:
        return vc_dimension(functions, universe, cap)
    return graph_dimension(functions, universe, outputs, cap)


def empirical_dimension(functions: Sequence, universe: Sequence, mode: str,
                        outputs: Sequence | None = None,
                        cap: int = DEFAULT_SEARCH_CAP) -> DimensionReport:
    """Shattering dimension by exhaustive search, mode 'vc' or 'graph'."""
    if mode == "vc":
        return vc_dimension(functions, universe, cap)
    if mode == "graph":
        if outputs is None:
            outputs = sorted({f(x) for f in functions for x in universe}, key=repr)
        return graph_dimension(functions, universe, outputs, cap)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Growth propositions, verified exactly on supplied small classes.
# ---------------------------------------------------------------------------


class PropositionCheck(NamedTuple):
    name: str
    sample_size: int
    measured: float
    bound: float
    ok: bool


def _exact_growth_value(functions, universe, ell) -> int:
    return empirical_growth(functions, universe, ell, mode="exact").count


def verify_growth_propositions(
    outer: Sequence, inner: Sequence, outer_universe: Sequence,
    mid_universe: Sequence, string_functions: Sequence,
    string_universe: Sequence, outputs: Sequence,
    ells: Iterable[int] = (1, 2, 3),
) -> list[PropositionCheck]:
    """Check the growth inequalities exactly on small concrete classes.

    ``outer``: functions X -> W over ``outer_universe``;
    ``inner``: functions W -> Y over ``mid_universe`` (the outer range);
    ``string_functions``: string functions over ``string_universe``, whose
    strings must use letters from ``outer_universe`` and should be
    prefix-closed so the prefix-map comparison samples from the same pool;
    ``outputs``: output values of ``outer`` (for binarization).
    Violations come back as failed rows; every row carries the measured
    value and its bound.
    """
    outer = list(outer)
    inner = list(inner)
    string_functions = list(string_functions)
    string_universe = [tuple(s) for s in string_universe]
    max_len = max(len(s) for s in string_universe)
    checks = []

    composed = [(lambda x, f=f, g=g: g(f(x))) for f in outer for g in inner]
    crossed = [
        (lambda x, f=f, h=h: (f(x), h(x))) for f in outer for h in composed
    ]
    binarized = binarize(outer, outputs)
    pairs_universe = [(x, y) for x in outer_universe for y in outputs]
    starred = [(lambda s, f=f: f(s[-1])) for f in outer]
    barred = [
        (lambda s, g=g: tuple(g(s[: i + 1]) for i in range(len(s))))
        for g in string_functions
    ]
    dim = class_dimension(outer, outer_universe, outputs)

    for ell in ells:
        g_outer = _exact_growth_value(outer, outer_universe, ell)
        g_inner = _exact_growth_value(inner, mid_universe, ell)
        g_comp = _exact_growth_value(composed, outer_universe, ell)
        checks.append(PropositionCheck(
            "composition", ell, g_comp, g_outer * g_inner, g_comp <= g_outer * g_inner
        ))
        g_cross = _exact_growth_value(crossed, outer_universe, ell)
        checks.append(PropositionCheck(
            "cross_product", ell, g_cross, g_outer * g_comp, g_cross <= g_outer * g_comp
        ))
        g_bin = _exact_growth_value(binarized, pairs_universe, ell)
        checks.append(PropositionCheck(
            "binarization", ell, g_bin, g_outer, g_bin <= g_outer
        ))
        g_star = _exact_growth_value(starred, string_universe, ell)
        checks.append(PropositionCheck(
            "last_letter_lift", ell, g_star, g_outer, g_star <= g_outer
        ))
        g_string = _exact_growth_value(string_functions, string_universe, ell * max_len)
        g_bar = _exact_growth_value(barred, string_universe, ell)
        checks.append(PropositionCheck(
            "prefix_map", ell, g_bar, g_string, g_bar <= g_string
        ))
        h_bound = haussler_growth_bound(dim.value, ell, len(set(outputs)))
        checks.append(PropositionCheck(
            "dimension_chain", ell, g_outer, h_bound, g_outer <= h_bound
        ))
    return checks
