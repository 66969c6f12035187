"""Command-line surface.

Commands: run, flatten, minimize, equiv, aperiodic, check, bounds, growth,
learn, scenario.  Exit codes: 0 success, 2 parse/validation error, 3 cap
exceeded, 4 verification failure (inequivalent automata, oracle mismatch).
The environment variable ``CASCATA_CAP`` overrides the default size caps;
``--cap`` overrides both.

Trace files hold one trace per line: space-separated letters, each letter a
comma-separated list of coordinate values.  Label files hold one 0/1 per
line.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys

from . import crafting
from .alphabets import (
    FactoredAlphabet,
    MonotoneDnfClass,
    TableClass,
    ThresholdClass,
)
from .cascade import Cascade, DEFAULT_PRODUCT_CAP, chain_alphabet
from .complexity import (
    ClassDescriptor,
    ComponentClassSpec,
    cardinality_bound_cascade,
    dimension_bound_cascade,
    empirical_growth,
    growth_bound_cascade,
    sample_bound_dimension,
    sample_bound_finite,
)
from .crafting import SequenceTaskFamily
from .errors import CapExceededError, CascataError, SpecFileError
from .learner import (
    LabeledSample,
    StringDistribution,
    class_min_risk,
    draw_sample,
    erm_select,
    estimate_risk,
)
from .specfile import cascade_from_spec, cascade_to_spec

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CAP = 3
EXIT_VERIFY = 4


def _load_json(path: str) -> dict:
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as e:
        raise SpecFileError(f"cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise SpecFileError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}")


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as f:
            f.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _cap(args, default: int) -> int:
    if getattr(args, "cap", None):
        return args.cap
    env = os.environ.get("CASCATA_CAP")
    return int(env) if env else default


def _parse_letter(token: str, alphabet: FactoredAlphabet, line_no: int):
    parts = token.split(",")
    if len(parts) != alphabet.arity:
        raise SpecFileError(
            f"line {line_no}: letter {token!r} has {len(parts)} coordinates, "
            f"expected {alphabet.arity}"
        )
    letter = []
    for part, coord in zip(parts, alphabet.coords):
        match = next((v for v in coord.values if str(v) == part), None)
        if match is None:
            raise SpecFileError(
                f"line {line_no}: value {part!r} not in coordinate {coord.name!r}"
            )
        letter.append(match)
    return tuple(letter)


def _format_letter(letter) -> str:
    return ",".join(str(v) for v in letter)


# ---------------------------------------------------------------------------
# Enumerable classes from class-spec files.
# ---------------------------------------------------------------------------


class EnumerableCascadeClass:
    """Product class: fixed dependency sets, cores and output functions, one
    enumerable input-function class per component; the last component's
    choice varies fastest."""

    def __init__(self, external, parts):
        self.external = external
        self.parts = parts  # list of (name, deps, input_class, core_spec, output_fn)

    @property
    def cardinality(self) -> int:
        return math.prod(p[2].cardinality for p in self.parts)

    @property
    def input_classes(self):
        return [p[2] for p in self.parts]

    def _build(self, choices) -> Cascade:
        from .automata import ComponentAutomaton
        from .cascade import chain_alphabet
        from .specfile import _parse_core

        built = []
        for (name, deps, _, core_spec, output_fn), fn in zip(self.parts, choices):
            alphabet = chain_alphabet(self.external, built)
            core = _parse_core(core_spec, name)
            built.append(ComponentAutomaton(alphabet, deps, fn, core,
                                            output_fn=output_fn, name=name))
        return Cascade(built)

    def member(self, index: int) -> Cascade:
        if not 0 <= index < self.cardinality:
            raise IndexError(index)
        choices = []
        for _, _, cls, _, _ in reversed(self.parts):
            choices.append(cls.function_at(index % cls.cardinality))
            index //= cls.cardinality
        choices.reverse()
        return self._build(choices)

    def __iter__(self):
        for choices in itertools.product(*(list(p[2]) for p in self.parts)):
            yield self._build(choices)


def _parse_input_class(data, signature, where: str):
    kinds = {"mono_dnf", "table", "threshold"}
    if not isinstance(data, dict) or data.get("kind") not in kinds:
        raise SpecFileError(f"input_class kind must be one of {sorted(kinds)}", where)
    if data["kind"] == "mono_dnf":
        return MonotoneDnfClass(signature, data.get("max_terms", 1),
                                outputs=(data.get("on_true", 1), data.get("on_false", 0)))
    if data["kind"] == "threshold":
        return ThresholdClass(signature,
                              outputs=(data.get("on_true", 1), data.get("on_false", 0)))
    return TableClass(signature, tuple(data["outputs"]))


def load_class_spec(data: dict):
    """A class-spec file is either {"family": "sequence_tasks", "d": N} or an
    alphabet plus components carrying ``input_class`` descriptors."""
    if "family" in data:
        if data["family"] != "sequence_tasks":
            raise SpecFileError(f"unknown family {data['family']!r}")
        extra = set(data) - {"family", "d", "letters"}
        if extra:
            raise SpecFileError(f"unknown fields {sorted(extra)}", "family")
        letters = tuple(data["letters"]) if "letters" in data else None
        return SequenceTaskFamily(int(data["d"]), letters)
    from .specfile import _parse_alphabet, _require_keys

    _require_keys(data, {"alphabet", "components"}, set(), "class spec")
    external = _parse_alphabet(data["alphabet"])
    parts = []
    alphabet_arity = external.arity
    sig_alphabet = external
    built_names = []
    for i, comp in enumerate(data["components"]):
        where = f"components[{i}]"
        _require_keys(comp, {"name", "dependencies", "input_class", "core"},
                      {"output_fn", "outputs"}, where)
        deps = comp["dependencies"]
        if any(not isinstance(j, int) or j < 1 or j > alphabet_arity for j in deps):
            raise SpecFileError(f"dependencies out of range [1, {alphabet_arity}]", where)
        signature = sig_alphabet.project(deps)
        cls = _parse_input_class(comp["input_class"], signature, f"{where}.input_class")
        output_fn = comp.get("output_fn", "state")
        parts.append((comp["name"], tuple(deps), cls, comp["core"], output_fn))
        built_names.append(comp["name"])
        # extend the chained alphabet with this component's outputs
        probe = EnumerableCascadeClass(external, parts).member(0)
        sig_alphabet = chain_alphabet(external, probe.components)
        alphabet_arity += 1
    return EnumerableCascadeClass(external, parts)


# ---------------------------------------------------------------------------
# Commands.
# ---------------------------------------------------------------------------


def cmd_run(args) -> int:
    cascade = cascade_from_spec(_load_json(args.spec))
    outputs = []
    with open(args.traces) as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                print(f"line {line_no}: empty trace has no output", file=sys.stderr)
                continue
            letters = tuple(
                _parse_letter(tok, cascade.external, line_no) for tok in line.split()
            )
            outputs.append(str(cascade.run(letters)))
    _emit("\n".join(outputs), args.out)
    return EXIT_OK


def _flat_for(args, minimize: bool):
    cascade = cascade_from_spec(_load_json(args.spec))
    auto = cascade.flatten(cap=_cap(args, DEFAULT_PRODUCT_CAP),
                           prune=not getattr(args, "no_prune", False))
    if minimize:
        auto = auto.minimize()
    return auto


def _emit_automaton(auto, args) -> int:
    print(f"states: {auto.n_states}", file=sys.stderr)
    if args.format == "dot":
        _emit(auto.to_dot(), args.out)
    elif args.format == "text":
        lines = [f"states: {auto.n_states}",
                 "letters: " + " ".join(_format_letter(a) if isinstance(a, tuple) else str(a)
                                        for a in auto.alphabet)]
        idx = {q: i for i, q in enumerate(auto.states)}
        for q in auto.states:
            for a in auto.alphabet:
                tok = _format_letter(a) if isinstance(a, tuple) else str(a)
                lines.append(
                    f"{idx[q]} --{tok}/{auto.output_map[(q, a)]}--> "
                    f"{idx[auto.core.transitions[(q, a)]]}"
                )
        _emit("\n".join(lines), args.out)
    else:
        _emit(json.dumps(auto.to_dict(), indent=2, default=str), args.out)
    return EXIT_OK


def cmd_flatten(args) -> int:
    return _emit_automaton(_flat_for(args, minimize=False), args)


def cmd_minimize(args) -> int:
    return _emit_automaton(_flat_for(args, minimize=True), args)


def cmd_equiv(args) -> int:
    a = cascade_from_spec(_load_json(args.spec)).flatten(cap=_cap(args, DEFAULT_PRODUCT_CAP))
    b = cascade_from_spec(_load_json(args.spec2)).flatten(cap=_cap(args, DEFAULT_PRODUCT_CAP))
    result = a.equivalent(b, max_len=args.max_len)
    if result.equivalent:
        print("equivalent")
        return EXIT_OK
    witness = " ".join(_format_letter(x) for x in result.counterexample)
    print(f"not equivalent; counterexample: {witness}")
    return EXIT_VERIFY


def cmd_aperiodic(args) -> int:
    cascade = cascade_from_spec(_load_json(args.spec))
    auto = cascade.flatten(cap=_cap(args, DEFAULT_PRODUCT_CAP))
    cap = _cap(args, 100_000)
    monoid = auto.core.transition_monoid(cap)
    verdict = "aperiodic" if auto.core.is_aperiodic(cap) else "not aperiodic"
    print(f"{verdict}; monoid size: {len(monoid)}")
    return EXIT_OK


def cmd_check(args) -> int:
    """Compare the compositional string function against stepping the
    cascade, on exhaustive short strings plus seeded random longer ones."""
    import random as random_module

    from .functional import cascade_function

    cascade = cascade_from_spec(_load_json(args.spec))
    tree = cascade_function(cascade)
    letters = list(cascade.external.letters())
    rng = random_module.Random(args.seed)
    strings = []
    length = 1
    while len(letters) ** length <= 500 and length <= args.max_len:
        strings.extend(itertools.product(letters, repeat=length))
        length += 1
    while len(strings) < args.samples:
        n = rng.randint(length, max(length, args.max_len))
        strings.append(tuple(rng.choice(letters) for _ in range(n)))
    for s in strings:
        if tree(s) != cascade.run(s):
            witness = " ".join(_format_letter(x) for x in s)
            print(f"mismatch on: {witness}")
            return EXIT_VERIFY
    print(f"compositional function agrees with the cascade on {len(strings)} strings")
    return EXIT_OK


def _descriptor_from_file(data) -> tuple[ClassDescriptor, object | None]:
    if "family" in data:
        fam = load_class_spec({k: data[k] for k in ("family", "d", "letters") if k in data})
        desc = fam.descriptor(data.get("max_len", 8),
                              data.get("epsilon", 0.1), data.get("eta", 0.1))
        return desc, fam
    comps = []
    for i, c in enumerate(data["components"]):
        allowed = {"arity", "degree", "n_input_fns", "n_cores", "n_output_fns",
                   "internal_size", "output_size", "input_dim", "output_dim"}
        unknown = set(c) - allowed
        if unknown:
            raise SpecFileError(f"unknown fields {sorted(unknown)}", f"components[{i}]")
        comps.append(ComponentClassSpec(**c))
    return ClassDescriptor(tuple(comps), data.get("max_len", 8),
                           data.get("epsilon", 0.1), data.get("eta", 0.1)), None


def cmd_bounds(args) -> int:
    data = _load_json(args.descriptor)
    desc, fam = _descriptor_from_file(data)
    rows: list[tuple[str, str, str]] = []
    card = cardinality_bound_cascade(desc)
    enumerated = fam.cardinality if fam is not None else None
    rows.append(("cardinality_bound", str(card), "product of per-part choices"))
    if enumerated is not None:
        rows.append(("cardinality_enumerated", str(enumerated), "fixed dependency sets"))
    for i, c in enumerate(desc.components):
        rows.append((f"log2_input_class[{i + 1}]", f"{math.log2(c.n_input_fns):.3f}", ""))
    base = enumerated if enumerated is not None else card
    rows.append((
        "sample_size_finite", str(sample_bound_finite(base, desc.epsilon, desc.eta)),
        "instantiation ln(2|F|/eta)/(2 eps^2), not a stated constant",
    ))
    for ell in args.ell:
        rows.append((f"growth_bound(ell={ell})",
                     f"{growth_bound_cascade(desc, ell):.6g}", ""))
    try:
        dim = dimension_bound_cascade(desc)
        rows.append(("dimension_bound", f"{dim:.3f}", ""))
        rows.append((
            "sample_size_dimension",
            str(sample_bound_dimension(max(dim, 1.0), 2, desc.epsilon, desc.eta)),
            "bound-shaped estimate, instantiation C=8",
        ))
    except ValueError as e:
        rows.append(("dimension_bound", "n/a", str(e)))
    if args.baseline_letters and args.baseline_states:
        k, n = args.baseline_letters, args.baseline_states
        rows.append((
            "all_acceptors_baseline",
            f"{k * n * math.log2(n):.1f}",
            f"k*n*log2(n) for k={k}, n={n}, displayed for comparison only",
        ))
    if args.format == "csv":
        text = "quantity,value,note\n" + "\n".join(
            f"{q},{v},\"{note}\"" for q, v, note in rows
        )
    else:
        width = max(len(q) for q, _, _ in rows)
        text = "\n".join(
            f"{q:<{width}}  {v}" + (f"  [{note}]" if note else "")
            for q, v, note in rows
        )
    _emit(text, args.out)
    return EXIT_OK


def _class_universe(cls, max_len: int, cap: int = 4000):
    external = cls.external
    letters = list(external.letters())
    universe = []
    for length in range(1, max_len + 1):
        count = len(letters) ** length
        if len(universe) + count > cap:
            break
        universe.extend(itertools.product(letters, repeat=length))
    return universe


def _growth_descriptor(cls, max_len: int):
    """Descriptor and per-component input classes for an enumerable class."""
    if isinstance(cls, SequenceTaskFamily):
        return cls.descriptor(max_len), [cls.watcher_class] * (cls.d - 1) + [cls.goal_class]
    probe = cls.member(0)
    specs = []
    for i, (comp, part) in enumerate(zip(probe.components, cls.parts)):
        specs.append(ComponentClassSpec(
            arity=comp.alphabet.arity,
            degree=comp.dependencies.degree,
            n_input_fns=part[2].cardinality,
            n_cores=1, n_output_fns=1,
            internal_size=len(comp.core.alphabet),
            output_size=len(comp.outputs),
        ))
    return ClassDescriptor(tuple(specs), max_len), cls.input_classes


def cmd_growth(args) -> int:
    cls = load_class_spec(_load_json(args.classspec))
    cap = _cap(args, 200_000)
    if cls.cardinality > cap:
        raise CapExceededError("class enumeration", cls.cardinality, cap)
    members = list(cls)
    universe = _class_universe(cls, args.max_len)
    desc, input_classes = _growth_descriptor(cls, args.max_len)
    growths = [
        (lambda n, c=c: empirical_growth(list(c), list(c.signature.letters()),
                                         n, mode="exact").count)
        for c in input_classes
    ]
    ones = [(lambda n: 1)] * len(input_classes)
    lines = ["ell  patterns  bound  verdict"]
    for ell in args.ell:
        report = empirical_growth(members, universe, ell, mode=args.mode)
        bound = growth_bound_cascade(desc, ell, input_growths=growths,
                                     output_growths=ones)
        verdict = "ok" if report.count <= bound else "VIOLATION"
        exact = "" if report.exact else " (lower bound)"
        lines.append(f"{ell}  {report.count}{exact}  {bound:.6g}  {verdict}")
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def _read_labeled(traces_path, labels_path, external) -> LabeledSample:
    with open(traces_path) as f:
        lines = [line.strip() for line in f if line.strip()]
    strings = [
        tuple(_parse_letter(tok, external, i + 1) for tok in line.split())
        for i, line in enumerate(lines)
    ]
    with open(labels_path) as f:
        labels = [int(line.strip()) for line in f if line.strip()]
    if len(labels) != len(strings):
        raise SpecFileError(
            f"{len(strings)} traces but {len(labels)} labels"
        )
    return LabeledSample(tuple(zip(strings, labels)))


def cmd_learn(args) -> int:
    config = _load_json(args.config)
    allowed = {"seed", "epsilon", "eta", "max_len", "n", "n_mc", "min_risk",
               "letter_weights"}
    unknown = set(config) - allowed
    if unknown:
        raise SpecFileError(f"unknown fields {sorted(unknown)}", "config")
    seed = config.get("seed", 0)
    epsilon = config.get("epsilon", 0.1)
    eta = config.get("eta", 0.1)
    max_len = config.get("max_len", 8)
    n_mc = config.get("n_mc", 2000)
    cls = load_class_spec(_load_json(args.classspec))
    cap = _cap(args, 500_000)
    if cls.cardinality > cap:
        raise CapExceededError("class enumeration", cls.cardinality, cap)
    bound = sample_bound_finite(cls.cardinality, epsilon, eta)

    target = None
    if args.target:
        target = cascade_from_spec(_load_json(args.target))
        letters = list(cls.external.letters())
        weights = config.get("letter_weights")
        dist = StringDistribution(tuple(letters), max_len,
                                  tuple(weights) if weights else None)
        n = config.get("n") or bound
        sample = draw_sample(dist, target, n, seed=seed)
    elif args.traces and args.labels:
        sample = _read_labeled(args.traces, args.labels, cls.external)
        n = len(sample)
    else:
        raise SpecFileError("learn needs either --target or --traces with --labels")

    chosen = erm_select(cls, sample)
    winner = chosen.function if isinstance(chosen.function, Cascade) else chosen.function
    report = [
        f"class size: {cls.cardinality}",
        f"sample size: {n} (finite-class bound {bound}; "
        "instantiation ln(2|F|/eta)/(2 eps^2), not a stated constant)",
        f"chosen member: {chosen.index}",
        f"empirical risk: {chosen.empirical_risk:.6f} ({chosen.tie_count} tied)",
    ]
    if target is not None:
        est = estimate_risk(winner, target, dist, n_mc, seed=seed ^ 0xA5A5)
        report.append(f"estimated true risk: {est.mean:.6f} +- {est.stderr:.6f}")
        min_risk = config.get("min_risk")
        if min_risk is None and cls.cardinality <= 4000:
            min_risk = class_min_risk(cls, target, dist, n_mc, seed=seed ^ 0x5EED)
        if min_risk is not None:
            report.append(f"risk gap vs class minimum: {max(0.0, est.mean - min_risk):.6f}")
        else:
            report.append("risk gap vs class minimum: n/a (class too large; "
                          "set min_risk in the config, 0.0 for a realizable target)")
    print("\n".join(report))
    if args.out:
        _emit(json.dumps(cascade_to_spec(winner), indent=2), args.out)
    return EXIT_OK


def cmd_scenario(args) -> int:
    if args.what == "flipflop":
        _emit(json.dumps(cascade_to_spec(crafting.build_flipflop_task_cascade()), indent=2),
              args.out)
    elif args.what == "counter":
        _emit(json.dumps(cascade_to_spec(crafting.build_counter_task_cascade()), indent=2),
              args.out)
    elif args.what == "family":
        _emit(json.dumps({"family": "sequence_tasks", "d": args.d}, indent=2), args.out)
    elif args.what == "traces":
        traces = crafting.generate_traces(args.n, args.max_len, seed=args.seed)
        labels = [crafting.task_label(t) for t in traces]
        base = args.out or "scenario"
        with open(f"{base}.traces", "w") as f:
            f.write("\n".join(" ".join(crafting.trace_words(t)) for t in traces) + "\n")
        with open(f"{base}.labels", "w") as f:
            f.write("\n".join(str(y) for y in labels) + "\n")
        print(f"wrote {base}.traces and {base}.labels "
              f"({sum(labels)} positive of {len(labels)})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser.
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cascata")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=("json", "dot", "text")):
        p.add_argument("--out")
        p.add_argument("--cap", type=int)
        if fmt:
            p.add_argument("--format", choices=fmt, default=fmt[0])

    p = sub.add_parser("run", help="run a cascade on a trace file")
    p.add_argument("spec")
    p.add_argument("traces")
    common(p, fmt=None)
    p.set_defaults(fn=cmd_run)

    for name, fn in (("flatten", cmd_flatten), ("minimize", cmd_minimize)):
        p = sub.add_parser(name, help=f"{name} a cascade spec")
        p.add_argument("spec")
        p.add_argument("--no-prune", action="store_true")
        common(p)
        p.set_defaults(fn=fn)

    p = sub.add_parser("equiv", help="compare two cascade specs")
    p.add_argument("spec")
    p.add_argument("spec2")
    p.add_argument("--max-len", type=int, default=None)
    common(p, fmt=None)
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("aperiodic", help="aperiodicity of the flattened cascade")
    p.add_argument("spec")
    common(p, fmt=None)
    p.set_defaults(fn=cmd_aperiodic)

    p = sub.add_parser("check", help="compositional function vs cascade stepping")
    p.add_argument("spec")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--max-len", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    common(p, fmt=None)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("bounds", help="bound table for a class descriptor")
    p.add_argument("descriptor")
    p.add_argument("--ell", type=int, nargs="*", default=[1, 2, 3])
    p.add_argument("--baseline-letters", type=int)
    p.add_argument("--baseline-states", type=int)
    common(p, fmt=("text", "csv"))
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("growth", help="empirical growth of an enumerable class")
    p.add_argument("classspec")
    p.add_argument("--ell", type=int, nargs="*", default=[1, 2])
    p.add_argument("--max-len", type=int, default=3)
    p.add_argument("--mode", choices=("exact", "heuristic"), default="exact")
    common(p, fmt=None)
    p.set_defaults(fn=cmd_growth)

    p = sub.add_parser("learn", help="empirical risk minimization over a class")
    p.add_argument("config")
    p.add_argument("classspec")
    p.add_argument("--traces")
    p.add_argument("--labels")
    p.add_argument("--target")
    common(p, fmt=None)
    p.set_defaults(fn=cmd_learn)

    p = sub.add_parser("scenario", help="built-in crafting scenario artifacts")
    p.add_argument("what", choices=("flipflop", "counter", "family", "traces"))
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--max-len", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    common(p, fmt=None)
    p.set_defaults(fn=cmd_scenario)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CapExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except (SpecFileError, CascataError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
