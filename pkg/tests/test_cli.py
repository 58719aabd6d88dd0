"""Command line interface: every subcommand, exit codes, JSON verdicts,
and deterministic exports."""

import json

import pytest

from abcalc.cli import main
from abcalc.systems import corpus_path

NETWORK = str(corpus_path("network.abc"))
ZERO = str(corpus_path("zero.abc"))
HANDSHAKE = str(corpus_path("handshake.bpi"))


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


@pytest.fixture
def closed(tmp_path):
    """The restricted network and the three-shot test as model files."""
    text = corpus_path("network.abc").read_text()
    n = tmp_path / "closed.abc"
    n.write_text(text.replace(
        "system: restrictOut(ffwd){ CP1 || CF1 || CF2 };",
        "system: restrictIn(gstar){ restrictOut(ffwd){ CP1 || CF1 || CF2 } };",
    ))
    t = tmp_path / "t.abc"
    t.write_text(text.replace(
        "system: restrictOut(ffwd){ CP1 || CF1 || CF2 };",
        "system: T;",
    ))
    return str(n), str(t)


class TestParse:
    def test_abc(self, capsys):
        rc, out, _ = run(capsys, "parse", NETWORK)
        assert rc == 0 and "restrictOut(ffwd)" in out

    def test_bpi(self, capsys):
        rc, out, _ = run(capsys, "parse", HANDSHAKE)
        assert rc == 0 and out.strip() == "a!(x).b(y).nil || a(u).b!(u).nil"

    def test_missing_file(self, capsys):
        rc, _, err = run(capsys, "parse", "no_such_file.abc")
        assert rc == 2 and "error" in err

    def test_parse_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.abc"
        bad.write_text("comp C { iface: }")
        rc, _, err = run(capsys, "parse", str(bad))
        assert rc == 2 and "error" in err


class TestSteps:
    def test_network_steps(self, capsys):
        rc, out, _ = run(capsys, "steps", NETWORK, "--universe", "none")
        assert rc == 0
        assert '"p", "v"' in out

    def test_bpi_steps(self, capsys):
        rc, out, _ = run(capsys, "steps", HANDSHAKE)
        assert rc == 0 and "a!(x)" in out

    def test_no_steps(self, capsys):
        rc, out, _ = run(capsys, "steps", ZERO, "--universe", "none")
        assert rc == 0 and "(no steps)" in out


class TestExplore:
    def test_stdout(self, capsys):
        rc, out, _ = run(capsys, "explore", NETWORK, "--universe", "none")
        assert rc == 0 and out.startswith("des (0,13,10)")

    def test_output_file_deterministic_across_jobs(self, capsys, tmp_path):
        paths = []
        for i, jobs in enumerate(("1", "4", "1")):
            p = tmp_path / f"out{i}.aut"
            rc, _, _ = run(capsys, "explore", NETWORK, "--universe", "none",
                           "--jobs", jobs, "-o", str(p))
            assert rc == 0
            paths.append(p.read_bytes())
        assert paths[0] == paths[1] == paths[2]

    def test_bound_exceeded(self, capsys):
        rc, _, err = run(capsys, "explore", NETWORK, "--max-states", "2")
        assert rc == 2 and "bound" in err

    def test_json(self, capsys):
        rc, out, _ = run(capsys, "explore", NETWORK, "--universe", "none", "--json")
        payload = json.loads(out)
        assert rc == 0
        assert payload["schema_version"] == 1
        assert payload["states"] == 10 and payload["transitions"] == 13
        assert payload["universe_fingerprint"]


class TestBarbs:
    def test_network(self, capsys):
        rc, out, _ = run(capsys, "barbs", NETWORK)
        assert rc == 0 and 'role == "client"' in out

    def test_weak_flag(self, capsys):
        rc, out, _ = run(capsys, "barbs", NETWORK, "--weak", "--json")
        payload = json.loads(out)
        assert rc == 0 and payload["weak"] is True

    def test_none(self, capsys):
        rc, out, _ = run(capsys, "barbs", ZERO)
        assert rc == 0 and "(none)" in out


class TestCheckBisim:
    def test_equivalent(self, capsys, closed):
        n_closed, t = closed
        rc, out, _ = run(capsys, "check-bisim", "--weak", n_closed, t)
        assert rc == 0 and "equivalent" in out and "not equivalent" not in out

    def test_not_equivalent_with_witness(self, capsys, closed):
        _, t = closed
        rc, out, _ = run(capsys, "check-bisim", "--strong", NETWORK, t)
        assert rc == 1
        assert "not equivalent" in out and "witness:" in out

    def test_json_verdict(self, capsys, closed, tmp_path):
        n_closed, t = closed
        sidecar = tmp_path / "verdict.json"
        rc, _, _ = run(capsys, "check-bisim", "--weak", n_closed, t,
                       "--json", str(sidecar))
        assert rc == 0
        payload = json.loads(sidecar.read_text())
        assert payload["equivalent"] is True and payload["mode"] == "weak"

    def test_inconclusive(self, capsys, closed):
        n_closed, t = closed
        rc, _, _ = run(capsys, "check-bisim", "--weak", n_closed, t,
                       "--max-states", "3")
        assert rc == 2


class TestTranslate:
    def test_output_parses_back(self, capsys, tmp_path):
        out_file = tmp_path / "handshake.abc"
        rc, _, _ = run(capsys, "translate", HANDSHAKE, "-o", str(out_file))
        assert rc == 0
        from abcalc.syntax import parse_abc

        model = parse_abc(out_file.read_text())
        assert model.component is not None

    def test_rejects_abc_input(self, capsys):
        rc, _, err = run(capsys, "translate", NETWORK)
        assert rc == 2 and "expects a .bpi" in err


class TestVerifyEncoding:
    def test_ok(self, capsys):
        rc, out, _ = run(capsys, "verify-encoding", HANDSHAKE)
        assert rc == 0 and out.startswith("ok")

    def test_unbound_recursion(self, capsys, tmp_path):
        bad = tmp_path / "bad.bpi"
        bad.write_text("A(v)")
        rc, _, err = run(capsys, "verify-encoding", str(bad))
        assert rc == 1 and "error" in err


class TestCorpus:
    def test_all_green(self, capsys):
        rc, out, _ = run(capsys, "corpus")
        assert rc == 0
        assert "FAIL" not in out
        assert out.count("ok  ") == 8


def test_usage_errors(capsys):
    rc, _, _ = run(capsys, "check-bisim", NETWORK, NETWORK)  # missing mode
    assert rc == 2
    rc, _, err = run(capsys, "explore", NETWORK, "--max-states", "-1")
    assert rc == 2 and "positive" in err
