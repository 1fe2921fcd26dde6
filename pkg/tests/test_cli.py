import json

import numpy as np
import pytest

from qdivstat import io as qio
from qdivstat.cli import cli_main
from qdivstat.divergences import eigenbasis_povm, petz_renyi, umegaki
from qdivstat.limit_laws import qre_null_limit

from conftest import rand_direction, rand_state


@pytest.fixture
def states(rng, tmp_path):
    rho = rand_state(rng, 2, 0.1)
    sigma = rand_state(rng, 2, 0.1)
    rp, sp = tmp_path / "rho.json", tmp_path / "sigma.json"
    qio.dump_matrix(rho, str(rp))
    qio.dump_matrix(sigma, str(sp))
    return rho, sigma, str(rp), str(sp)


def run(capsys, argv):
    rc = cli_main(argv)
    out = capsys.readouterr().out
    return rc, out


class TestDivergenceCommand:
    def test_umegaki(self, states, capsys):
        rho, sigma, rp, sp = states
        rc, out = run(capsys, ["divergence", "--kind", "umegaki", "--rho", rp, "--sigma", sp])
        assert rc == 0
        payload = json.loads(out)
        assert payload["name"] == "umegaki"
        assert payload["support_ok"] is True
        assert payload["value"] == pytest.approx(umegaki(rho, sigma).value)

    def test_petz_with_alpha(self, states, capsys):
        rho, sigma, rp, sp = states
        rc, out = run(capsys, ["divergence", "--kind", "petz", "--alpha", "1.5",
                               "--rho", rp, "--sigma", sp])
        assert rc == 0
        payload = json.loads(out)
        assert payload["alpha"] == 1.5
        assert payload["value"] == pytest.approx(petz_renyi(rho, sigma, 1.5).value)

    def test_petz_missing_alpha_is_validation_error(self, states, capsys):
        _, _, rp, sp = states
        rc, _ = run(capsys, ["divergence", "--kind", "petz", "--rho", rp, "--sigma", sp])
        assert rc == 2

    def test_infinite_value_serialized(self, tmp_path, capsys):
        rp, sp = tmp_path / "r.json", tmp_path / "s.json"
        qio.dump_matrix(np.diag([1.0, 0.0]), str(rp))
        qio.dump_matrix(np.diag([0.0, 1.0]), str(sp))
        rc, out = run(capsys, ["divergence", "--kind", "umegaki", "--rho", str(rp), "--sigma", str(sp)])
        assert rc == 0
        payload = json.loads(out)
        assert payload["value"] == "inf"
        assert payload["support_ok"] is False

    def test_measured_with_povm_files(self, states, tmp_path, capsys):
        rho, sigma, rp, sp = states
        pv = tmp_path / "povm.json"
        with open(pv, "w") as fh:
            json.dump(qio.povm_to_json(eigenbasis_povm(rho)), fh)
        rc, out = run(capsys, ["divergence", "--kind", "measured", "--rho", rp,
                               "--sigma", sp, "--povm", str(pv)])
        assert rc == 0
        assert json.loads(out)["argmax_index"] == 0


class TestLimitCommand:
    def test_eval_bundle(self, rng, tmp_path, capsys):
        rho = rand_state(rng, 2, 0.1)
        L1 = rand_direction(rng, 2)
        bundle = {"functional": "qre_null", "rho": qio.matrix_to_json(rho),
                  "L1": qio.matrix_to_json(L1), "L2": None}
        path = tmp_path / "bundle.json"
        with open(path, "w") as fh:
            json.dump(bundle, fh)
        rc, out = run(capsys, ["limit", "eval", str(path)])
        assert rc == 0
        assert float(out) == pytest.approx(qre_null_limit(rho, L1, None))

    def test_unknown_functional(self, rng, tmp_path, capsys):
        path = tmp_path / "bundle.json"
        with open(path, "w") as fh:
            json.dump({"functional": "nope"}, fh)
        rc, _ = run(capsys, ["limit", "eval", str(path)])
        assert rc == 2


class TestTomographyCommand:
    def test_deterministic_output(self, states, capsys):
        _, _, rp, _ = states
        rc1, out1 = run(capsys, ["tomography", "--state", rp, "--n", "200", "--seed", "4"])
        rc2, out2 = run(capsys, ["tomography", "--state", rp, "--n", "200", "--seed", "4"])
        assert rc1 == rc2 == 0
        assert out1 == out2
        payload = json.loads(out1)
        assert payload["record"]["n"] == 200

    def test_missing_seed_rejected_by_parser(self, states, capsys):
        _, _, rp, _ = states
        rc = cli_main(["tomography", "--state", rp, "--n", "200"])
        assert rc == 2


class TestExperimentCommand:
    def test_inline_run_writes_byte_identical_csv(self, states, tmp_path, capsys):
        _, _, rp, sp = states
        outs = []
        for name in ("e1.csv", "e2.csv"):
            out = tmp_path / name
            rc, _ = run(capsys, ["experiment", "--kind", "one_sample_alt", "--rho", rp,
                                 "--sigma", sp, "--n", "300", "--trials", "120",
                                 "--seed", "7", "--out", str(out)])
            assert rc == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_config_file_run(self, states, tmp_path, capsys):
        rho, sigma, _, _ = states
        cfg = {"kind": "one_sample_null", "rho": qio.matrix_to_json(rho),
               "n_grid": [200], "trials": 110, "seed": 12}
        path = tmp_path / "cfg.json"
        with open(path, "w") as fh:
            json.dump(cfg, fh)
        rc, out = run(capsys, ["experiment", "--config", str(path)])
        assert rc == 0
        assert json.loads(out)["summary"][0]["n"] == 200

    def test_missing_seed_is_validation_error(self, states, capsys):
        _, _, rp, sp = states
        rc, _ = run(capsys, ["experiment", "--kind", "one_sample_alt", "--rho", rp,
                             "--sigma", sp, "--n", "300", "--trials", "120"])
        assert rc == 2

    def test_config_missing_seed(self, states, tmp_path, capsys):
        rho, _, _, _ = states
        path = tmp_path / "cfg.json"
        with open(path, "w") as fh:
            json.dump({"kind": "one_sample_null", "rho": qio.matrix_to_json(rho),
                       "n_grid": [200], "trials": 110}, fh)
        rc, _ = run(capsys, ["experiment", "--config", str(path)])
        assert rc == 2


class TestHypothesisCommand:
    def test_scenario_run(self, tmp_path, capsys):
        sigma = np.eye(2) / 2
        rho = np.diag([0.75, 0.25])
        d0 = umegaki(rho, sigma).value
        scenario = {"states": [qio.matrix_to_json(rho)], "sigma": qio.matrix_to_json(sigma),
                    "epsilons": [0.0, d0 + 0.1], "tau": 0.3, "n": 300, "trials": 60, "seed": 2}
        path = tmp_path / "scenario.json"
        with open(path, "w") as fh:
            json.dump(scenario, fh)
        out_csv = tmp_path / "rates.csv"
        rc, out = run(capsys, ["hypothesis", "--scenario", str(path), "--out", str(out_csv)])
        assert rc == 0
        header = out_csv.read_text().splitlines()[0]
        assert header == "hypothesis,trials,errors,rate,wilson_low,wilson_high,copies_used"
        assert json.loads(out)[0]["hypothesis"] == 0

    def test_bad_scenario_is_validation_error(self, tmp_path, capsys):
        path = tmp_path / "scenario.json"
        path.write_text("{}")
        rc, _ = run(capsys, ["hypothesis", "--scenario", str(path), "--out", str(tmp_path / "x.csv")])
        assert rc == 2


class TestParsing:
    def test_unknown_subcommand(self):
        assert cli_main(["frobnicate"]) == 2

    def test_missing_required_flag(self):
        assert cli_main(["divergence", "--kind", "umegaki"]) == 2
