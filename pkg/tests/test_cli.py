"""End-to-end tests for the latdens command line driver.

Everything goes through main(argv) so the exit codes and printed
payloads are exactly what a shell user sees.
"""

import json
import random

import pytest

from latdens.cli import JobConfig, CLIError, main, parse_lattice, serialize_lattice


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def doc(gram, **extra):
    payload = {"gram": gram}
    payload.update(extra)
    return json.dumps(payload)


I2 = doc([[1, 0], [0, 1]])


# -- density ----------------------------------------------------------------


def test_density_text_contains_value(capsys):
    code, out, _ = run(capsys, "density", "--input", I2)
    assert code == 0
    assert "density 4/1" in out


def test_density_json_payload(capsys):
    code, out, _ = run(capsys, "density", "--input", I2, "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["density"] == "4/1"
    assert payload["exponents"]["N"] == 1
    assert payload["group"]["order"] == 8


def test_density_json_is_byte_identical_across_runs(capsys):
    outs = []
    for _ in range(3):
        code, out, _ = run(capsys, "density", "--input", I2, "--json")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1] == outs[2]


def test_density_from_file(capsys, tmp_path):
    path = tmp_path / "i2.json"
    path.write_text(I2)
    code, out, _ = run(capsys, "density", "--input", str(path))
    assert code == 0
    assert "4/1" in out


# -- analyze ----------------------------------------------------------------


def test_analyze_reports_jordan_and_chain(capsys):
    code, out, _ = run(capsys, "analyze", "--input",
                       doc([[2, 1], [1, 2]]), "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["jordan"] == [{"scale": 0, "rank": 2, "parity": "II"}]
    assert payload["chain"]["alpha"] == 0
    scales = {row["i"]: row for row in payload["chain"]["scales"]}
    assert scales[0]["type"] in ("IIo", "IIe", "II")
    assert payload["lattice"]["gram"] == [[2, 1], [1, 2]]


def test_analyze_empty_gram_is_invalid(capsys):
    code, _, err = run(capsys, "analyze", "--input", doc([]))
    assert code == 2
    assert "gram" in err


def test_analyze_singular_gram_cannot_be_certified(capsys):
    # exact cancellation is indistinguishable from a tiny nonzero det,
    # so this is a precision failure rather than a parse failure
    code, _, _ = run(capsys, "analyze", "--input", doc([[1, 1], [1, 1]]))
    assert code == 3


def test_analyze_fractional_scales(capsys):
    code, out, _ = run(capsys, "analyze", "--input",
                       doc([["1/2", 0], [0, 1]]), "--json")
    assert code == 0
    payload = json.loads(out)
    assert {"scale": -1, "rank": 1, "parity": "I"} in payload["jordan"]


# -- mass -------------------------------------------------------------------


def test_mass_sum_squares_three(capsys):
    code, out, _ = run(capsys, "mass", "--sum-squares", "3")
    assert code == 0
    assert out.strip() == "1/48"


def test_mass_sum_squares_json(capsys):
    code, out, _ = run(capsys, "mass", "--sum-squares", "4", "--json")
    assert code == 0
    assert json.loads(out) == {"n": 4, "mass": "1/384"}


def test_mass_from_gram(capsys):
    code, out, _ = run(capsys, "mass", "--input", doc([[1, 0], [0, 3]]), "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["mass"] == "1/4"
    assert {"p": 3, "density": "6/1"} in payload["local"]


def test_mass_needs_exactly_one_source(capsys):
    code, _, err = run(capsys, "mass")
    assert code == 2
    code, _, err = run(capsys, "mass", "--sum-squares", "3",
                       "--input", doc([[1]]))
    assert code == 2
    assert "exactly one" in err


def test_mass_field_data_roundtrip(capsys, tmp_path):
    path = tmp_path / "q.json"
    path.write_text(json.dumps(
        {"degree": 1, "discriminant": 1, "dyadicDegrees": [1]}))
    code, out, _ = run(capsys, "mass", "--sum-squares", "3",
                       "--field-data", str(path))
    assert code == 0
    assert out.strip() == "1/48"


def test_mass_field_data_missing_values(capsys, tmp_path):
    path = tmp_path / "f.json"
    path.write_text(json.dumps(
        {"degree": 2, "discriminant": 5, "dyadicDegrees": [2]}))
    code, _, err = run(capsys, "mass", "--sum-squares", "3",
                       "--field-data", str(path))
    assert code == 2
    assert "zeta" in err


def test_mass_rejects_fractional_gram(capsys):
    code, _, _ = run(capsys, "mass", "--input", doc([["1/2", 0], [0, 1]]))
    assert code == 2


# -- oracle -----------------------------------------------------------------


def test_oracle_json_shape_and_agreement(capsys):
    code, out, _ = run(capsys, "oracle", "--input", I2, "--json")
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"levels", "ratios", "stabilized", "value"}
    assert payload["stabilized"] is True
    assert payload["value"] == "8/1"  # twice the density 4


def test_oracle_odd_prime(capsys):
    code, out, _ = run(capsys, "oracle", "--input", doc([[1, 0], [0, 3]]),
                       "--prime", "3", "--max-level", "6", "--json")
    assert code == 0
    assert json.loads(out)["value"] == "12/1"


def test_oracle_unstabilized_reports_and_exits_3(capsys):
    code, out, _ = run(capsys, "oracle", "--input",
                       doc([[2, 0], [0, 2]]), "--max-level", "3", "--json")
    assert code == 3
    payload = json.loads(out)
    assert payload["stabilized"] is False
    assert payload["value"] is None


def test_oracle_budget_exceeded(capsys):
    i5 = [[1 if i == j else 0 for j in range(5)] for i in range(5)]
    code, _, err = run(capsys, "oracle", "--input", doc(i5))
    assert code == 4
    assert "budget" in err


def test_oracle_rejects_fractional_entries(capsys):
    code, _, err = run(capsys, "oracle", "--input", doc([["1/2", 0], [0, 1]]))
    assert code == 2
    assert "integral" in err


def test_oracle_odd_prime_rejects_extension_documents(capsys):
    code, _, _ = run(capsys, "oracle", "--input",
                     doc([[1, 0], [0, 1]], residue_degree=2), "--prime", "3")
    assert code == 2


# -- normal-form ------------------------------------------------------------


def test_normal_form_profiles(capsys):
    code, out, _ = run(capsys, "normal-form", "--input",
                       doc([[1, 0, 0], [0, 1, 0], [0, 0, 2]]), "--json")
    assert code == 0
    payload = json.loads(out)
    assert [s["scale"] for s in payload["scales"]] == [0, 1]
    assert payload["scales"][0]["rank"] == 2
    assert payload["scales"][0]["parity"] == "I"


def test_normal_form_needs_precision(capsys):
    i5 = [[1 if i == j else 0 for j in range(5)] for i in range(5)]
    code, _, err = run(capsys, "normal-form", "--input", doc(i5))
    assert code == 3
    assert "precision" in err
    code, out, _ = run(capsys, "normal-form", "--input", doc(i5),
                       "--precision", "30")
    assert code == 0
    assert "rank 5" in out


# -- document parsing and serialization -------------------------------------


def test_parse_precedence_flag_beats_document():
    lattice = parse_lattice({"precision": 16, "gram": [[1]]}, precision=32)
    assert lattice.descriptor.precision == 32
    lattice = parse_lattice({"precision": 16, "gram": [[1]]})
    assert lattice.descriptor.precision == 16
    lattice = parse_lattice({"gram": [[1]]})
    assert lattice.descriptor.precision == 24
    assert lattice.descriptor.degree == 1


ROUND_TRIP_DOCS = [
    {"gram": [[1, 0], [0, 1]]},
    {"gram": [[2, 1], [1, 2]]},
    {"gram": [["1/2", 0], [0, 1]]},
    {"gram": [["3/4", "1/2"], ["1/2", 5]]},
    {"residue_degree": 2, "gram": [[[1, 1], [0, 0]], [[0, 0], [2, 0]]]},
    {"residue_degree": 2,
     "gram": [[["1/2", "3/4"], [0, 0]], [[0, 0], [1, 0]]]},
    {"residue_degree": 3, "precision": 20,
     "gram": [[[4, 0, 6], [1, 0, 0]], [[1, 0, 0], [0, 2, 0]]]},
]


@pytest.mark.parametrize("document", ROUND_TRIP_DOCS)
def test_round_trip(document):
    lattice = parse_lattice(document)
    serialized = serialize_lattice(lattice)
    again = parse_lattice(serialized)
    assert again.descriptor == lattice.descriptor
    for row_a, row_b in zip(lattice.gram, again.gram):
        for a, b in zip(row_a, row_b):
            assert a == b
    assert serialize_lattice(again) == serialized


def test_round_trip_random_integer_grams():
    rng = random.Random(0xC11)
    for _ in range(40):
        n = rng.randint(1, 4)
        rows = [[0] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = rng.choice([1, 3, 5, 7]) * 2 ** rng.randint(0, 3)
            for j in range(i):
                rows[i][j] = rows[j][i] = rng.randint(-4, 4)
        try:
            lattice = parse_lattice({"gram": rows})
        except Exception:
            continue  # randomly singular
        again = parse_lattice(serialize_lattice(lattice))
        for row_a, row_b in zip(lattice.gram, again.gram):
            for a, b in zip(row_a, row_b):
                assert a == b


def test_parse_rejects_bad_entries():
    with pytest.raises(CLIError):
        parse_lattice({"gram": [["1/3"]]})
    with pytest.raises(CLIError):
        parse_lattice({"gram": [[True]]})
    with pytest.raises(CLIError):
        parse_lattice({"gram": [[1, 0]]})
    with pytest.raises(CLIError):
        parse_lattice({"gram": [[[1, 0]]]})  # array entry over the base ring
    with pytest.raises(CLIError):
        parse_lattice({"gram": "nope"})
    with pytest.raises(CLIError):
        parse_lattice([1, 2, 3])
    with pytest.raises(CLIError):
        parse_lattice({"residue_degree": 0, "gram": [[1]]})


def test_bad_denominator_exit_code(capsys):
    code, _, err = run(capsys, "density", "--input", doc([["1/3", 0], [0, 1]]))
    assert code == 2
    assert "power of two" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "density", "--input", "/does/not/exist.json")
    assert code == 2
    assert "no such file" in err


def test_invalid_inline_json(capsys):
    code, _, err = run(capsys, "density", "--input", "{not json")
    assert code == 2
    assert "invalid JSON" in err


# -- config validation --------------------------------------------------------


def test_job_config_validation():
    with pytest.raises(CLIError):
        JobConfig(command="density", precision=4)
    with pytest.raises(CLIError):
        JobConfig(command="density", residue_degree=0)
    with pytest.raises(CLIError):
        JobConfig(command="oracle", prime=1)
    with pytest.raises(CLIError):
        JobConfig(command="oracle", max_level=0)
    with pytest.raises(CLIError):
        JobConfig(command="oracle", jobs=0)
    with pytest.raises(CLIError):
        JobConfig(command="density", output="yaml")
    cfg = JobConfig(command="density", input="x.json")
    assert cfg.precision is None and cfg.prime == 2


def test_low_precision_flag_exit_code(capsys):
    code, _, _ = run(capsys, "density", "--input", doc([[1]]),
                     "--precision", "4")
    assert code == 2


def test_argparse_errors_do_not_raise(capsys):
    assert main(["no-such-command"]) == 2
    capsys.readouterr()
    assert main([]) == 2
    capsys.readouterr()
    assert main(["--help"]) == 0
    capsys.readouterr()
