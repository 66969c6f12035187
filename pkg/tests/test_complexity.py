import itertools
import math

import pytest

from cascata.alphabets import FactoredAlphabet, TableClass
from cascata.complexity import (
    ClassDescriptor,
    ComponentClassSpec,
    binarize,
    cardinality_bound_automata,
    cardinality_bound_cascade,
    class_dimension,
    dimension_bound_automata,
    dimension_bound_cascade,
    empirical_growth,
    graph_dimension,
    growth_bound_automata,
    haussler_growth_bound,
    pattern_count,
    sample_bound_dimension,
    sample_bound_finite,
    vc_dimension,
    verify_growth_propositions,
)


def spec(arity=1, degree=1, phi=1, delta=1, theta=1, pi=2, gamma=2, **kw):
    return ComponentClassSpec(arity, degree, phi, delta, theta, pi, gamma, **kw)


# ---------------------------------------------------------------------------
# Cardinality and sample bounds.
# ---------------------------------------------------------------------------


def test_cardinality_bound_formula():
    assert cardinality_bound_automata(spec(arity=2, degree=1, phi=3)) == 6


def test_cardinality_bound_matches_single_alphabet_specialization():
    # non-factored input, identity input function, all cores on k letters and
    # n states, all indicator output functions
    k, n = 2, 3
    s = spec(arity=1, degree=1, phi=1, delta=n ** (k * n), theta=2**n, pi=k, gamma=2)
    assert cardinality_bound_automata(s) == n ** (k * n) * 2**n


def test_enumerated_distinct_automata_within_bound():
    from cascata.automata import ComponentAutomaton
    from cascata.primes import make_flipflop

    external = FactoredAlphabet.single("e", ("a", "b"))
    phi_class = TableClass(external, ("set", "read"))
    automata = [
        ComponentAutomaton(external, (1,), phi, make_flipflop(with_reset=False),
                           output_fn="state")
        for phi in phi_class
    ]
    strings = [
        s for length in range(1, 5)
        for s in itertools.product(external.letters(), repeat=length)
    ]
    behaviors = {tuple(a.induce().run(s) for s in strings) for a in automata}
    bound = cardinality_bound_automata(
        spec(arity=1, degree=1, phi=phi_class.cardinality)
    )
    assert len(behaviors) <= bound


def test_cascade_bound_reduces_to_automata_at_depth_one():
    s = spec(arity=2, degree=1, phi=5, delta=2, theta=3)
    desc = ClassDescriptor((s,), max_len=4)
    assert cardinality_bound_cascade(desc) == cardinality_bound_automata(s)


def test_cascade_bound_multiplies_and_respects_singletons():
    ones = ClassDescriptor((spec(), spec(arity=2)), max_len=4)
    assert cardinality_bound_cascade(ones) == 1 * 2  # projection choices remain
    fixed = ClassDescriptor((spec(), spec(arity=2, degree=2)), max_len=4)
    assert cardinality_bound_cascade(fixed) == 1


def test_cardinality_bound_monotone_in_each_factor():
    base = spec(arity=3, degree=1, phi=4, delta=2, theta=2)
    more = spec(arity=3, degree=1, phi=5, delta=2, theta=2)
    assert cardinality_bound_automata(more) >= cardinality_bound_automata(base)


def test_sample_bound_finite_values():
    assert sample_bound_finite(1024, 0.1, 0.1) == 497
    assert sample_bound_finite(1, 0.1, 0.1) == 150


def test_sample_bound_finite_scaling_and_monotonicity():
    full = sample_bound_finite(1024, 0.05, 0.1)
    assert 3.5 <= full / sample_bound_finite(1024, 0.1, 0.1) <= 4.5
    assert sample_bound_finite(10, 0.1, 0.1) <= sample_bound_finite(1000, 0.1, 0.1)


# ---------------------------------------------------------------------------
# Growth and dimension bounds.
# ---------------------------------------------------------------------------


def test_growth_bound_all_singletons_is_one():
    s = spec(pi=1, gamma=1)
    assert growth_bound_automata(s, ell=5, max_len=3) == 1


def test_dimension_bound_value():
    s = spec(arity=4, degree=2, input_dim=4.0 - math.log2(6), output_dim=0.0,
             pi=3, gamma=2)
    assert s.capacity() == pytest.approx(4.0)
    assert dimension_bound_automata(s, max_len=8) == pytest.approx(72.2213, abs=1e-3)


def test_dimension_bound_errors_exactly_below_two():
    low = spec(input_dim=1.9, output_dim=0.0)
    with pytest.raises(ValueError):
        dimension_bound_automata(low, max_len=4)
    ok = spec(input_dim=2.0, output_dim=0.0)
    assert dimension_bound_automata(ok, max_len=4) > 0


def test_cascade_dimension_bound_structure():
    one = ClassDescriptor((spec(input_dim=2.0, output_dim=0.0),), max_len=8)
    two = ClassDescriptor((spec(input_dim=2.0, output_dim=0.0),) * 2, max_len=8)
    d1 = dimension_bound_cascade(one)
    d2 = dimension_bound_cascade(two)
    assert d2 > 2 * d1 - 1e-9  # doubled leading factor plus log d inside


def test_sample_bound_dimension_values_and_scaling():
    assert sample_bound_dimension(10, 2, 0.1, 0.1) == 7388
    two = sample_bound_dimension(10, 2, 0.1, 0.1)
    four = sample_bound_dimension(10, 4, 0.1, 0.1)
    # the dimension term doubles with log|Y|
    assert four > two
    assert sample_bound_dimension(20, 2, 0.1, 0.1) > two
    assert sample_bound_dimension(10, 2, 0.1, 0.05) > two


# ---------------------------------------------------------------------------
# Empirical growth and dimension.
# ---------------------------------------------------------------------------

BOOL2 = FactoredAlphabet.of(("x", (0, 1)), ("y", (0, 1)))
POINTS2 = [(0,), (1,)]
TABLES2 = list(TableClass(FactoredAlphabet.of(("p", (0, 1))), (0, 1)))


def test_empirical_growth_singleton_class():
    fn = TABLES2[0]
    report = empirical_growth([fn], POINTS2, 3)
    assert report.count == 1 and report.exact


def test_empirical_growth_full_table_class_shatters():
    report = empirical_growth(TABLES2, POINTS2, 2)
    assert report.count == 4
    assert len(report.witness) == 2


def test_empirical_growth_heuristic_is_a_lower_bound():
    exact = empirical_growth(TABLES2, POINTS2, 2, mode="exact")
    heur = empirical_growth(TABLES2, POINTS2, 2, mode="heuristic", seed=1)
    assert not heur.exact
    assert heur.count <= exact.count


def test_pattern_count_on_fixed_sample():
    assert pattern_count(TABLES2, POINTS2) == 4


def test_vc_dimension_of_full_boolean_tables():
    domain = FactoredAlphabet.single("p", ("u", "v", "w"))
    fns = list(TableClass(domain, (0, 1)))
    points = list(domain.letters())
    report = vc_dimension(fns, points)
    assert report.value == 3 and report.exact


def test_vc_dimension_singleton_class_is_zero():
    assert vc_dimension([TABLES2[0]], POINTS2).value == 0


def test_graph_dimension_cross_check():
    domain = FactoredAlphabet.single("p", ("u", "v"))
    fns = list(TableClass(domain, ("r", "g", "b")))
    points = list(domain.letters())
    via_helper = graph_dimension(fns, points, ("r", "g", "b"))
    pairs = [(x, y) for x in points for y in ("r", "g", "b")]
    direct = vc_dimension(binarize(fns, ("r", "g", "b")), pairs)
    assert via_helper.value == direct.value


def test_class_dimension_dispatches_on_output_count():
    domain = FactoredAlphabet.single("p", ("u", "v"))
    binary = list(TableClass(domain, (0, 1)))
    assert class_dimension(binary, list(domain.letters()), (0, 1)).value == 2


def test_empirical_dimension_modes():
    from cascata.complexity import empirical_dimension

    domain = FactoredAlphabet.single("p", ("u", "v"))
    binary = list(TableClass(domain, (0, 1)))
    points = list(domain.letters())
    assert empirical_dimension(binary, points, "vc").value == 2
    wide = list(TableClass(domain, ("r", "g", "b")))
    assert empirical_dimension(wide, points, "graph").value == \
        graph_dimension(wide, points, ("r", "g", "b")).value
    with pytest.raises(ValueError):
        empirical_dimension(binary, points, "nope")


def test_empirical_growth_respects_theoretical_bound():
    # one tiny automaton class, exhaustively
    from cascata.automata import ComponentAutomaton
    from cascata.primes import make_flipflop

    external = FactoredAlphabet.single("e", ("a", "b"))
    phi_class = TableClass(external, ("set", "read"))
    members = [
        ComponentAutomaton(external, (1,), phi, make_flipflop(with_reset=False),
                           output_fn="state").induce()
        for phi in phi_class
    ]
    letters = list(external.letters())
    strings = [
        s for length in range(1, 4)
        for s in itertools.product(letters, repeat=length)
    ]
    max_len = 3
    comp = spec(arity=1, degree=1, phi=phi_class.cardinality, pi=2, gamma=2)
    for ell in (1, 2, 3):
        measured = empirical_growth(members, strings, ell).count
        phi_growth = lambda n: empirical_growth(list(phi_class), letters, n).count
        bound = growth_bound_automata(comp, ell, max_len, input_growth=phi_growth,
                                      output_growth=lambda n: 1)
        assert measured <= bound


def test_haussler_chain_bounds_growth():
    dim = vc_dimension(TABLES2, POINTS2).value
    for ell in (1, 2, 3):
        measured = empirical_growth(TABLES2, POINTS2, ell).count
        assert measured <= haussler_growth_bound(dim, ell, 2)


def test_verify_growth_propositions_all_hold():
    outer = TABLES2  # functions on 1-tuples over {0,1} into {0,1}
    inner = [lambda w: w, lambda w: 1 - w, lambda w: 0, lambda w: 1]
    string_universe = [
        s for length in range(1, 4)
        for s in itertools.product(POINTS2, repeat=length)
    ]
    string_functions = [
        lambda s: sum(x[0] for x in s) % 2,
        lambda s: int(any(x[0] for x in s)),
        lambda s: s[-1][0],
    ]
    checks = verify_growth_propositions(
        outer, inner, POINTS2, [0, 1], string_functions, string_universe,
        outputs=(0, 1),
    )
    names = {c.name for c in checks}
    assert names == {"composition", "cross_product", "binarization",
                     "last_letter_lift", "prefix_map", "dimension_chain"}
    for check in checks:
        assert check.ok, check
