import json

import pytest

from cascata.cli import main
from cascata.crafting import (
    build_counter_task_cascade,
    build_flipflop_task_cascade,
    generate_traces,
    task_label,
    trace_words,
)
from cascata.errors import SpecFileError
from cascata.specfile import cascade_from_spec, cascade_to_spec


def roundtrip(cascade):
    return cascade_from_spec(json.loads(json.dumps(cascade_to_spec(cascade))))


def test_spec_round_trip_flipflop_scenario():
    original = build_flipflop_task_cascade()
    back = roundtrip(original)
    assert back.flatten().equivalent(original.flatten()).equivalent


def test_spec_round_trip_counter_scenario_behavior_spotcheck():
    original = build_counter_task_cascade()
    back = roundtrip(original)
    for trace in generate_traces(60, 10, seed=1):
        assert back.run(trace) == original.run(trace)


def test_spec_serialization_recognizes_prime_cores():
    spec = cascade_to_spec(build_counter_task_cascade())
    cores = [c["core"] for c in spec["components"]]
    assert cores == ["counter:16", "counter:16", "flipflop_wo", "counter:16",
                     "flipflop_wo"]


def test_spec_rejects_unknown_fields():
    spec = cascade_to_spec(build_flipflop_task_cascade())
    spec["bogus"] = 1
    with pytest.raises(SpecFileError):
        cascade_from_spec(spec)
    spec.pop("bogus")
    spec["components"][0]["mystery"] = True
    with pytest.raises(SpecFileError):
        cascade_from_spec(spec)


def test_spec_rejects_bad_dependencies():
    spec = cascade_to_spec(build_flipflop_task_cascade())
    spec["components"][0]["dependencies"] = [0]
    with pytest.raises(SpecFileError):
        cascade_from_spec(spec)
    spec["components"][0]["dependencies"] = [7]
    with pytest.raises(SpecFileError):
        cascade_from_spec(spec)


# ---------------------------------------------------------------------------
# CLI.
# ---------------------------------------------------------------------------


@pytest.fixture
def flipflop_spec(tmp_path):
    path = tmp_path / "flipflop.json"
    path.write_text(json.dumps(cascade_to_spec(build_flipflop_task_cascade())))
    return str(path)


def test_cli_run(flipflop_spec, tmp_path, capsys):
    traces = tmp_path / "t.traces"
    traces.write_text("steel factory\nwood iron factory\n\nwood iron fire factory\n")
    assert main(["run", flipflop_spec, str(traces)]) == 0
    out = capsys.readouterr()
    assert out.out.splitlines() == ["1", "0", "1"]
    assert "line 3" in out.err


def test_cli_flatten_and_minimize(flipflop_spec, tmp_path, capsys):
    out = tmp_path / "auto.json"
    assert main(["flatten", flipflop_spec, "--no-prune", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert len(data["states"]) == 32
    assert main(["flatten", flipflop_spec, "--out", str(out)]) == 0
    reachable = len(json.loads(out.read_text())["states"])
    assert reachable < 32
    assert main(["minimize", flipflop_spec, "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert len(data["states"]) <= reachable
    err = capsys.readouterr().err
    assert "states:" in err


def test_cli_flatten_dot_and_text(flipflop_spec, capsys):
    assert main(["flatten", flipflop_spec, "--format", "dot"]) == 0
    assert "digraph" in capsys.readouterr().out
    assert main(["flatten", flipflop_spec, "--no-prune", "--format", "text"]) == 0
    assert "states: 32" in capsys.readouterr().out


def test_cli_equiv_self_and_counterexample(flipflop_spec, tmp_path, capsys):
    assert main(["equiv", flipflop_spec, flipflop_spec]) == 0
    assert "equivalent" in capsys.readouterr().out
    other = tmp_path / "other.json"
    spec = cascade_to_spec(build_flipflop_task_cascade())
    # corrupt the goal trigger: steel alone stops enabling the factory
    goal = spec["components"][-1]
    goal["input_fn"]["entries"] = [
        [vals, "read" if (vals[0] == "factory" and vals[4] == 1 and vals[1] == 0) else out]
        for vals, out in goal["input_fn"]["entries"]
    ]
    other.write_text(json.dumps(spec))
    code = main(["equiv", flipflop_spec, str(other)])
    assert code == 4
    assert "counterexample" in capsys.readouterr().out


def test_cli_aperiodic(flipflop_spec, capsys):
    assert main(["aperiodic", flipflop_spec]) == 0
    out = capsys.readouterr().out
    assert out.startswith("aperiodic")
    assert "monoid size" in out


def test_cli_check_oracle_agreement(flipflop_spec, capsys):
    assert main(["check", flipflop_spec, "--samples", "80", "--max-len", "5"]) == 0
    assert "agrees" in capsys.readouterr().out


def test_cli_cap_exit_code(flipflop_spec):
    assert main(["flatten", flipflop_spec, "--cap", "4"]) == 3


def test_cli_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["flatten", str(bad)]) == 2
    missing_field = tmp_path / "missing.json"
    missing_field.write_text(json.dumps({"alphabet": []}))
    assert main(["flatten", str(missing_field)]) == 2


def test_cli_bounds_family(tmp_path, capsys):
    desc = tmp_path / "family.json"
    desc.write_text(json.dumps({"family": "sequence_tasks", "d": 5, "max_len": 8}))
    assert main(["bounds", str(desc), "--baseline-letters", "6",
                 "--baseline-states", "32"]) == 0
    out = capsys.readouterr().out
    assert "cardinality_bound" in out
    assert "sample_size_finite" in out
    assert "log2_input_class[5]" in out
    assert "all_acceptors_baseline" in out


def test_cli_bounds_csv_components(tmp_path, capsys):
    desc = tmp_path / "desc.json"
    desc.write_text(json.dumps({
        "components": [{"arity": 2, "degree": 1, "n_input_fns": 4, "n_cores": 1,
                        "n_output_fns": 1, "internal_size": 2, "output_size": 2,
                        "input_dim": 2.0}],
        "max_len": 4,
    }))
    assert main(["bounds", str(desc), "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "quantity,value,note"
    assert any(line.startswith("dimension_bound,") for line in lines)


def test_cli_growth_family(tmp_path, capsys):
    spec = tmp_path / "class.json"
    spec.write_text(json.dumps({"family": "sequence_tasks", "d": 2}))
    assert main(["growth", str(spec), "--ell", "1", "2", "--max-len", "2"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("ell")
    assert all("ok" in line for line in out[1:])


def test_cli_learn_with_target(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"seed": 3, "epsilon": 0.1, "eta": 0.1,
                                  "max_len": 5, "n": 120, "n_mc": 400,
                                  "min_risk": 0.0}))
    classspec = tmp_path / "class.json"
    classspec.write_text(json.dumps({"family": "sequence_tasks", "d": 2}))
    from cascata.crafting import SequenceTaskFamily

    target = tmp_path / "target.json"
    target.write_text(json.dumps(cascade_to_spec(SequenceTaskFamily(2).sequence_target())))
    winner = tmp_path / "winner.json"
    assert main(["learn", str(config), str(classspec), "--target", str(target),
                 "--out", str(winner)]) == 0
    out = capsys.readouterr().out
    assert "empirical risk: 0.0" in out
    assert "risk gap vs class minimum" in out
    learned = cascade_from_spec(json.loads(winner.read_text()))
    assert learned.depth == 2


def test_cli_learn_from_trace_files(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"seed": 1}))
    classspec = tmp_path / "class.json"
    classspec.write_text(json.dumps({
        "alphabet": [{"name": "event", "values": ["blank", "steel", "factory"]}],
        "components": [
            {"name": "steel", "dependencies": [1], "core": "flipflop_wo",
             "input_class": {"kind": "mono_dnf", "max_terms": 1,
                             "on_true": "set", "on_false": "read"},
             "output_fn": "state"},
            {"name": "goal", "dependencies": [1, 2], "core": "flipflop_wo",
             "input_class": {"kind": "mono_dnf", "max_terms": 1,
                             "on_true": "set", "on_false": "read"},
             "output_fn": "next_state"},
        ],
    }))
    weights = {"blank": 0.4, "steel": 0.3, "factory": 0.3,
               "wood": 0.0, "iron": 0.0, "fire": 0.0}
    traces = generate_traces(150, 8, seed=2, weights=weights)
    trace_path = tmp_path / "x.traces"
    trace_path.write_text("\n".join(" ".join(trace_words(t)) for t in traces))
    labels_path = tmp_path / "x.labels"
    labels_path.write_text("\n".join(str(task_label(t)) for t in traces))
    assert main(["learn", str(config), str(classspec),
                 "--traces", str(trace_path), "--labels", str(labels_path)]) == 0
    out = capsys.readouterr().out
    assert "chosen member" in out
    assert "empirical risk: 0.0" in out  # the rule task is realizable here


def test_cli_scenario_artifacts(tmp_path, capsys):
    out = tmp_path / "spec.json"
    assert main(["scenario", "counter", "--out", str(out)]) == 0
    assert cascade_from_spec(json.loads(out.read_text())).product_size() == 16384
    base = tmp_path / "run1"
    assert main(["scenario", "traces", "--n", "40", "--max-len", "6",
                 "--seed", "5", "--out", str(base)]) == 0
    lines = (tmp_path / "run1.traces").read_text().splitlines()
    labels = (tmp_path / "run1.labels").read_text().splitlines()
    assert len(lines) == len(labels) == 40
    assert set(labels) <= {"0", "1"}
