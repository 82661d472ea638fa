import csv
import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from osctransport import fileio
from osctransport.cli import main
from osctransport.errors import ContractError, ParseError
from osctransport.fixtures import fold_instance, fold_map, fold_mu, fold_nu
from osctransport.mapbuild import monotone_map
from osctransport.measure import Domain, Interval
from osctransport.solver import solve
from osctransport.stepcalc import StepFn

import gen

randoms = st.randoms(use_true_random=False)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def fold_dir(tmp_path, capsys):
    assert run(capsys, "counterexample", "--delta", "1/10", "-o", tmp_path)[0] == 0
    return tmp_path


# -- round trips ----------------------------------------------------------------

@settings(max_examples=40)
@given(randoms)
def test_instance_round_trip(rng):
    inst = gen.density_instance(rng) if rng.random() < 0.5 else gen.atomic_instance(rng)
    text = fileio.dumps(fileio.instance_to_json(inst))
    assert fileio.instance_from_json(fileio.loads(text)) == inst


@settings(max_examples=40)
@given(randoms)
def test_stepfn_and_map_round_trip(rng):
    fn = gen.step_fn(rng)
    assert fileio.stepfn_from_json(fileio.loads(fileio.dumps(fileio.stepfn_to_json(fn)))) == fn
    T = gen.affine_map(rng, 4)
    assert fileio.map_from_json(fileio.loads(fileio.dumps(fileio.map_to_json(T)))) == T


@pytest.mark.parametrize("mode", ["atoms", "cells"])
def test_result_round_trip_re_verifies(mode):
    res = solve(fold_instance(), n=8, mode=mode)
    back = fileio.result_from_json(fileio.loads(fileio.dumps(fileio.result_to_json(res))))
    assert back == res


def test_decimal_and_integer_numbers_parse_exactly():
    rec = fileio.instance_to_json(fold_instance())
    rec["delta"] = 0.1
    assert fileio.instance_from_json(fileio.loads(json.dumps(rec))).delta == F(1, 10)


def test_tampered_result_is_rejected():
    rec = fileio.result_to_json(solve(fold_instance(), n=8))
    rec["K"] = "1/1000"
    with pytest.raises(ContractError):
        fileio.result_from_json(rec)


def test_missing_field_is_a_parse_error():
    rec = fileio.instance_to_json(fold_instance())
    del rec["mu"]
    with pytest.raises(ParseError):
        fileio.instance_from_json(rec)


# -- subcommands ----------------------------------------------------------------------

def test_counterexample_files(fold_dir, capsys):
    inst = fileio.read_instance(fold_dir / "instance.json")
    assert inst == fold_instance()
    assert fileio.read_map(fold_dir / "U.json") == fold_map()
    assert fileio.read_map(fold_dir / "T_monotone.json") == monotone_map(fold_mu(), fold_nu(), "inc")


def test_eval_map_prints_exact_values(fold_dir, capsys):
    assert run(capsys, "eval-map", "-i", fold_dir / "instance.json", "-m", fold_dir / "U.json")[1] == "1/5\n"
    assert run(capsys, "eval-map", "-i", fold_dir / "instance.json", "-m", fold_dir / "T_monotone.json")[1] == "2/5\n"


def test_solve_is_byte_identical_across_threads(fold_dir, capsys):
    inst = fold_dir / "instance.json"
    a, b = fold_dir / "a.json", fold_dir / "b.json"
    assert run(capsys, "solve", "-i", inst, "-o", a, "--quantize", 16)[0] == 0
    assert run(capsys, "solve", "-i", inst, "-o", b, "--quantize", 16, "--threads", 3)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    res = fileio.read_result(a)
    assert res.K < F(2, 5)
    code, out, _ = run(capsys, "eval-plan", "-r", a, "--delta", "1/10")
    assert code == 0 and F(out.strip()) == res.K


def test_solve_with_oracle(tmp_path, capsys):
    inst = gen.atomic_instance(random.Random(4), n_max=5)
    path = tmp_path / "i.json"
    fileio.write_json(path, fileio.instance_to_json(inst))
    code, out, _ = run(capsys, "solve", "-i", path, "-o", tmp_path / "r.json", "--oracle")
    assert code == 0
    assert fileio.read_json(tmp_path / "r.json")["stats"]["oracle_K"] == out.split("= ")[1].strip()


def test_build_map_and_plot(fold_dir, capsys):
    inst, res, m = fold_dir / "instance.json", fold_dir / "r.json", fold_dir / "m.json"
    assert run(capsys, "solve", "-i", inst, "-o", res, "--quantize", 12, "--mode", "cells")[0] == 0
    code, out, _ = run(capsys, "build-map", "-i", inst, "-r", res, "-o", m)
    assert code == 0
    report = json.loads(out)
    assert report["pushforward"] and report["graph_in_strip"] and report["pieces"] <= report["piece_bound"]
    assert run(capsys, "plot", "-m", m, "-o", fold_dir / "m.svg", "--csv", fold_dir / "m.csv")[0] == 0
    assert (fold_dir / "m.svg").read_text().lstrip().startswith("<?xml")
    assert run(capsys, "plot", "-m", res, "-o", fold_dir / "s.svg", "--csv", fold_dir / "s.csv")[0] == 0
    K = fileio.read_result(res).K
    with open(fold_dir / "s.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert rows and all(F(r["lower"]) <= F(r["upper"]) for r in rows)
    # the certificate strip is [f, f^up + K] with f^up <= f
    assert all(F(r["upper"]) - F(r["lower"]) <= K for r in rows)


def test_build_map_rejects_atoms_mode(fold_dir, capsys):
    res = fold_dir / "r.json"
    run(capsys, "solve", "-i", fold_dir / "instance.json", "-o", res, "--quantize", 8)
    assert run(capsys, "build-map", "-i", fold_dir / "instance.json", "-r", res, "-o", fold_dir / "m.json")[0] == 1


def test_plot_of_monotone_map_has_the_breakpoints(fold_dir, capsys):
    run(capsys, "plot", "-m", fold_dir / "T_monotone.json", "-o", fold_dir / "t.svg", "--csv", fold_dir / "t.csv")
    with open(fold_dir / "t.csv") as fh:
        xs = {F(r["x"]) for r in csv.DictReader(fh)}
    assert {F(1, 4), F(3, 4), F(7, 8)} <= xs


def test_transform_and_decompose(tmp_path, capsys):
    unit = Domain.interval(0, 1)
    const = tmp_path / "c.json"
    fileio.write_json(const, fileio.stepfn_to_json(StepFn.constant(unit, 3)))
    code, out, _ = run(capsys, "transform", "--fn", const, "--delta", "1/10", "--op", "up")
    assert code == 0 and fileio.stepfn_from_json(json.loads(out)) == StepFn.constant(unit, 3)
    valley = StepFn(unit, ((Interval(0, F(3, 10), False, True), F(2)), (Interval(F(3, 10), F(7, 10)), F(0)),
                           (Interval(F(7, 10), 1, True, False), F(2))))
    fn = tmp_path / "v.json"
    fileio.write_json(fn, fileio.stepfn_to_json(valley))
    code, out, _ = run(capsys, "decompose", "--pair", fn, "--delta", "1/10")
    rec = json.loads(out)
    assert code == 0 and len(rec["floors"]) == 1 and rec["split_points"] == ["1/2"]
    assert len(rec["merged"]) <= rec["piece_bound"]


def test_exit_codes(tmp_path, fold_dir, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "eval-map", "-i", bad, "-m", fold_dir / "U.json")[0] == 2
    rec = fileio.read_json(fold_dir / "instance.json")
    rec["delta"] = "0"
    fileio.write_json(bad, rec)
    assert run(capsys, "eval-map", "-i", bad, "-m", fold_dir / "U.json")[0] == 1
    rec["delta"] = "1/10"
    rec["mu"]["pieces"][0][1] = "16/5"
    fileio.write_json(bad, rec)
    assert run(capsys, "eval-map", "-i", bad, "-m", fold_dir / "U.json")[0] == 1
    assert run(capsys, "eval-map", "-i", tmp_path / "missing.json", "-m", fold_dir / "U.json")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["eval-plan", "-r", str(bad), "--delta", "x/y"])
    assert info.value.code == 2
