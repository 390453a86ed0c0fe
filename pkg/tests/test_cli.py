import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import trine_povm
from smearing import MarkovKernel, SharpObservable, validate
from smearing.cli import run
from smearing.serialization import dumps, kernel_to_dict, observable_from_dict, observable_to_dict


@pytest.fixture
def files(tmp_path, sigma_z, noisy, block_pair):
    P, M = block_pair

    def write(name, doc):
        path = tmp_path / name
        path.write_text(dumps(doc))
        return str(path)

    return {
        "sz": write("sz.json", observable_to_dict(sigma_z)),
        "noisy": write("noisy.json", observable_to_dict(noisy)),
        "P": write("P.json", observable_to_dict(P)),
        "M": write("M.json", observable_to_dict(M)),
        "trine": write("trine.json", observable_to_dict(trine_povm())),
        "id": write("id.json", kernel_to_dict(MarkovKernel(noisy.outcomes, noisy.outcomes, np.eye(2)))),
        "flip": write("flip.json", kernel_to_dict(MarkovKernel("+-", "+-", [[0.75, 0.25], [0.25, 0.75]]))),
        "I": write("I.json", observable_to_dict(SharpObservable(["I"], [np.eye(2)]))),
        "bad": write("bad.json", {"outcomes": ["a"], "effects": [[[[2, 0], [0, 0]], [[0, 0], [1, 0]]]]}),
        "dir": tmp_path,
    }


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_find_kernel_noisy_to_sharp(capsys, files):
    code, doc = call(capsys, "find-kernel", "--from", files["noisy"], "--to", files["sz"])
    assert code == 1
    assert doc["verdict"] == "infeasible"


def test_find_kernel_sharp_to_noisy(capsys, files):
    dump = files["dir"] / "lp.json"
    code, doc = call(capsys, "find-kernel", "--from", files["sz"], "--to", files["noisy"], "--dump-lp", str(dump))
    assert code == 0
    assert doc["certificate"]["residual"] <= 1e-7
    assert json.loads(dump.read_text())["problem"]["num_vars"] == 4


def test_smear_identity(capsys, files, noisy):
    code, doc = call(capsys, "smear", "--observable", files["noisy"], "--kernel", files["id"])
    assert code == 0
    assert observable_from_dict(doc).effects.tobytes() == noisy.effects.tobytes()


def test_equivalence_suite_block_example(capsys, files):
    code, doc = call(capsys, "equivalence-suite", "--sharp", files["P"], "--observable", files["M"])
    assert code == 0
    assert doc["agree"] and set(doc["verdicts"].values()) == {True}
    assert len(doc["verdicts"]) == 4


def test_equivalence_suite_infeasible(capsys, files):
    code, doc = call(capsys, "equivalence-suite", "--sharp", files["sz"], "--observable", files["noisy"])
    assert code == 1 and doc["agree"]


@pytest.mark.parametrize(
    "argv, code",
    [
        (("validate", "--observable", "{noisy}"), 0),
        (("validate", "--observable", "{bad}"), 1),
        (("validate", "--kernel", "{flip}"), 0),
        (("sharp-parent", "--observable", "{noisy}"), 0),
        (("sharp-parent", "--observable", "{trine}"), 1),
        (("contains-range", "--sharp", "{P}", "--observable", "{M}"), 0),
        (("contains-range", "--sharp", "{sz}", "--observable", "{noisy}"), 1),
        (("oracle-contains", "--sharp", "{P}", "--observable", "{M}"), 0),
        (("function-of", "--sharp", "{P}", "--observable", "{M}"), 0),
        (("indicator-kernel", "--from", "{sz}", "--to", "{noisy}"), 1),
        (("preceq", "--from", "{sz}", "--to", "{noisy}"), 0),
        (("preceq", "--from", "{noisy}", "--to", "{sz}"), 1),
        (("clean", "--sharp", "{sz}"), 0),
        (("clean", "--sharp", "{P}"), 1),
        (("finer", "--sharp", "{P}"), 0),
        (("finer", "--sharp", "{sz}"), 1),
        (("extremal", "--observable", "{trine}"), 0),
        (("extremal", "--observable", "{noisy}"), 1),
        (("perturb", "--observable", "{sz}", "--kernel", "{flip}", "--b1", "+"), 0),
        (("contains-range", "--sharp", "{noisy}", "--observable", "{M}"), 2),
        (("smear", "--observable", "{bad}", "--kernel", "{id}"), 2),
        (("validate", "--observable", "{dir}/missing.json"), 2),
        (("acceptance", "--suite", "nope"), 2),
        (("random", "--kind", "pvm", "--dim", "2", "--outcomes", "2"), 2),
        (("no-such-command",), 2),
        (("contains-range", "--sharp", "{P}", "--observable", "{M}", "--tol-eq", "-1"), 2),
    ],
)
def test_exit_codes(capsys, files, argv, code):
    argv = [a.format(**files) for a in argv]
    assert run(argv) == code
    capsys.readouterr()


def test_perturb_hand_values(capsys, files):
    _, doc = call(capsys, "perturb", "--observable", files["sz"], "--kernel", files["flip"], "--b1", "+")
    assert doc["nu_plus"][0][0] == pytest.approx(0.5625)
    assert doc["defect"] == pytest.approx(0.375, abs=1e-9)


def test_finer_witness(capsys, files):
    _, doc = call(capsys, "finer", "--sharp", files["P"])
    assert doc["witness"] == {"contains_range": True, "finer_preceq_original": True, "original_preceq_finer": False}


@pytest.mark.parametrize("kind", ["pvm", "povm", "commutative", "kernel"])
def test_random_is_deterministic_and_reparses(capsys, kind):
    argv = ["random", "--kind", kind, "--dim", "3", "--outcomes", "3", "--seed", "7"]
    code, first = call(capsys, *argv)
    assert code == 0
    _, second = call(capsys, *argv)
    assert first == second
    if kind != "kernel":
        assert validate(observable_from_dict(first)).ok


def test_outputs_reparse(capsys, files):
    out = files["dir"] / "parent.json"
    assert run(["sharp-parent", "--observable", files["noisy"], "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert validate(observable_from_dict(doc["certificate"]["parent"])).ok


def test_acceptance_suite_via_cli(capsys):
    code, doc = call(capsys, "acceptance", "--suite", "noisy-qubit", "--seed", "0")
    assert code == 0 and doc["passed"]


def test_module_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "smearing", "clean", "--sharp", files["sz"]], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["clean"] is True
