import json
import subprocess
import sys

import pytest

from tordeg import corpus, io
from tordeg.cli import main
from tordeg.errors import SpecError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def corpus_file(tmp_path, capsys, name, *extra):
    code, out, _ = run(capsys, "corpus", name, *extra)
    assert code == 0
    path = tmp_path / f"{name}.json"
    path.write_text(out)
    return path


@pytest.mark.parametrize("make", [
    lambda: io.triple_to_doc(corpus.torus_triple(2, kinks=2)),
    lambda: io.triple_to_doc(corpus.k3_triple(1)),
    lambda: io.triple_to_doc(corpus.cycle_triple((1, 2), (3, 1))),
    lambda: io.spec_to_doc(corpus.k3_spec()),
    lambda: io.spec_to_doc(corpus.abelian_spec((2, 2))),
])
def test_documents_roundtrip_byte_identical(make):
    doc = make()
    text = io.dumps(doc)
    again = io.load(text)
    if again["kind"] == "degeneration":
        d, pol = io.spec_from_doc(again)
        assert io.dumps(io.spec_to_doc(d, pol)) == text
    else:
        b, phi = io.complex_from_doc(again)
        assert io.dumps(io.complex_to_doc(b, phi)) == text


def test_schema_errors_name_the_location():
    doc = io.triple_to_doc(corpus.torus_triple(2))
    doc["cells"][0]["vertices"] = "oops"
    with pytest.raises(SpecError, match="/cells/0/vertices"):
        io.complex_from_doc(doc)


def test_malformed_json():
    with pytest.raises(SpecError):
        io.load("{not json")


def test_legendre_swaps_cycle(tmp_path, capsys):
    src = corpus_file(tmp_path, capsys, "im_cycle", "--lengths", "1,1,1")
    code, out, _ = run(capsys, "legendre", "-i", str(src), "--degrees", "2,1,1")
    assert code == 0
    doc = json.loads(out)
    lengths = sorted(abs(int(c["vertices"][1][0]) - int(c["vertices"][0][0])) for c in doc["cells"])
    assert lengths == [1, 1, 2]


def test_double_legendre_is_isomorphic(tmp_path, capsys):
    src = corpus_file(tmp_path, capsys, "k3_tetrahedron", "--degree", "2")
    once = tmp_path / "once.json"
    twice = tmp_path / "twice.json"
    assert main(["legendre", "-i", str(src), "-o", str(once)]) == 0
    assert main(["legendre", "-i", str(once), "-o", str(twice)]) == 0
    code, out, _ = run(capsys, "check", "-i", str(twice), "--isomorphic-to", str(src))
    assert code == 0
    res = json.loads(out)["results"]
    assert res["ok"] and res["checks"]["isomorphic"] is True


def test_k3_holonomy_command(tmp_path, capsys):
    src = corpus_file(tmp_path, capsys, "k3_tetrahedron")
    code, out, _ = run(capsys, "holonomy", "-i", str(src), "--loop", "v2,s1,v1,s2,v2")
    assert code == 0
    res = json.loads(out)["results"]
    assert res["linear"] == [[1, 0], [4, 1]]
    assert res["normal_form"] == [[1, 0], [4, 1]]


def test_check_exit_codes(tmp_path, capsys):
    good = corpus_file(tmp_path, capsys, "torus", "--dim", "2")
    assert run(capsys, "check", "-i", str(good))[0] == 0
    bad = corpus_file(tmp_path, capsys, "skew_torus3")
    assert run(capsys, "check", "-i", str(bad))[0] == 2


def test_invalid_input_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"kind": "complex"}')
    code, _, err = run(capsys, "build", "-i", str(path))
    assert code == 1 and err.startswith("error:")
    assert run(capsys, "build", "-i", str(tmp_path / "missing.json"))[0] == 1


def test_unknown_fixture(capsys):
    assert run(capsys, "corpus", "klein_bottle")[0] == 1


def test_local_model_command(tmp_path, capsys):
    src = corpus_file(tmp_path, capsys, "im_cycle", "--lengths", "3,1")
    code, out, _ = run(capsys, "local-model", "-i", str(src), "--format", "text")
    assert code == 0
    assert "u + v = 3w" in out


def test_output_is_deterministic(tmp_path, capsys):
    a = corpus_file(tmp_path, capsys, "k3_tetrahedron", "--degree", "1").read_text()
    b = corpus_file(tmp_path, capsys, "k3_tetrahedron", "--degree", "1").read_text()
    assert a == b


def test_svg_and_plot_data(tmp_path, capsys):
    src = corpus_file(tmp_path, capsys, "k3_tetrahedron")
    plot = tmp_path / "plot.json"
    code, out, _ = run(capsys, "build", "-i", str(src), "--format", "svg", "--emit-plot", str(plot))
    assert code == 0 and out.startswith("<svg")
    assert json.loads(plot.read_text())["cells"]


def test_console_pipe():
    producer = subprocess.run(
        [sys.executable, "-m", "tordeg.cli", "corpus", "cycle", "--lengths", "1,2,3", "--degrees", "2,1,1"],
        capture_output=True, text=True, check=True,
    )
    consumer = subprocess.run(
        [sys.executable, "-m", "tordeg.cli", "involution"],
        input=producer.stdout, capture_output=True, text=True,
    )
    assert consumer.returncode == 0, consumer.stderr
    res = json.loads(consumer.stdout)["results"]
    assert res["involution"] is True
    assert set(res["isomorphism"]["cell_maps"]) == {"x0", "x1", "x2"}


def test_cells_in_canonical_order():
    doc = io.triple_to_doc(corpus.torus_triple(2, [[2, 1], [1, 3]]))
    keys = [(sorted(c["vertices"]), c["id"]) for c in doc["cells"]]
    assert keys == sorted(keys)
