import json
import math

import numpy as np
import pytest

from margin_discrim.cli import curve, main

HELSTROM_09 = 0.7179449471770336


class TestCurveFunction:
    def test_row_values(self):
        rows = curve(0.9, 11)
        assert rows[0].m == 0.0
        assert rows[0].p_strong == pytest.approx(0.1, abs=1e-15)
        assert rows[0].p_weak == pytest.approx(0.1, abs=1e-15)
        assert rows[-1].m == 1.0
        assert rows[-1].p_strong == pytest.approx(HELSTROM_09, abs=1e-15)
        assert rows[5].p_strong == pytest.approx(HELSTROM_09, abs=1e-15)  # m = 0.5

    def test_ordering_invariant(self):
        for rows in (curve(0.9, 41), curve(0.3, 41), curve(0.99, 23)):
            for row in rows:
                assert row.p_unambiguous <= row.p_strong + 1e-12
                assert row.p_strong <= row.p_weak + 1e-12
                assert row.p_weak <= row.p_minimum_error + 1e-12
                for value in (row.p_strong, row.p_weak, row.p_unambiguous,
                              row.p_minimum_error):
                    assert 0.0 <= value <= 1.0

    def test_too_few_steps(self):
        from margin_discrim import DomainError

        with pytest.raises(DomainError):
            curve(0.9, 1)


class TestSolveCommand:
    def test_basic_json(self, capsys):
        rc = main(["solve", "--fidelity", "0.9", "--margin", "0", "--condition", "strong"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["p_success"] == pytest.approx(0.1, abs=1e-12)
        assert payload["regime"] == "margin-limited"
        assert payload["report"]["p_error_given_1"] == pytest.approx(0.0, abs=1e-10)
        assert set(payload["povm"]) == {"e1", "e2", "e3"}

    def test_minimum_error_regime(self, capsys):
        rc = main(["solve", "--fidelity", "0.9", "--margin", "0.3"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["regime"] == "minimum-error"
        assert payload["p_success"] == pytest.approx(HELSTROM_09, abs=1e-12)

    def test_oracle_flag(self, capsys):
        rc = main(["solve", "--fidelity", "0.8", "--margin", "0.05", "--oracle",
                   "--grid-n", "20000"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["oracle_delta"] < 1e-8

    def test_fidelity_one_rejected(self, capsys):
        rc = main(["solve", "--fidelity", "1.0", "--margin", "0.1"])
        assert rc == 2
        err = capsys.readouterr().err
        assert "|<phi1|phi2>|" in err

    def test_bad_flag_exit_code(self):
        assert main(["solve", "--fidelity", "0.9", "--condition", "sideways"]) == 2


class TestCurveCommand:
    def test_csv_format_and_stability(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert main(["curve", "--fidelity", "0.9", "--m-steps", "21",
                     "--out", str(out1)]) == 0
        assert main(["curve", "--fidelity", "0.9", "--m-steps", "21",
                     "--out", str(out2)]) == 0
        text1 = out1.read_bytes()
        assert text1 == out2.read_bytes()
        lines = text1.decode().strip().split("\n")
        assert lines[0] == "m,p_strong,p_weak,p_unambiguous,p_minimum_error"
        assert len(lines) == 22
        first = [float(v) for v in lines[1].split(",")]
        assert first[1] == pytest.approx(0.1, abs=1e-12)

    def test_figure_rendered(self, tmp_path):
        fig = tmp_path / "curve.png"
        rc = main(["curve", "--fidelity", "0.9", "--m-steps", "41",
                   "--out", str(tmp_path / "c.csv"), "--fig", str(fig)])
        assert rc == 0
        assert fig.exists() and fig.stat().st_size > 1000


class TestSimulateCommand:
    def test_json_payload(self, capsys):
        rc = main(["simulate", "--fidelity", "0.9", "--margin", "0.1",
                   "--shots", "20000", "--seed", "5"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["shots"] == 20000
        assert sum(sum(row) for row in payload["counts"]) == 20000
        assert payload["closed_form_p_success"] == pytest.approx(0.225, abs=1e-12)
        emp = payload["empirical_report"]["p_success"]
        assert abs(emp - 0.225) < 0.02


class TestOracleCommand:
    def test_reduced_mode(self, capsys):
        rc = main(["oracle", "--fidelity", "0.9", "--margin", "0.1",
                   "--condition", "weak", "--mode", "reduced", "--budget", "50000"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["delta"] < 1e-8
        assert payload["feasible"] is True
        assert payload["argmax"]["y"] == pytest.approx(3 / 3.8, abs=1e-9)

    def test_general_mode(self, capsys):
        rc = main(["oracle", "--fidelity", "0.9", "--margin", "0.1",
                   "--mode", "general", "--budget", "20000", "--seed", "2"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["delta"] < 1e-2
        assert set(payload["argmax"]) == {"alpha1", "beta1", "alpha2", "beta2"}


class TestLoccCommand:
    def test_entangled_preset(self, capsys):
        rc = main(["locc", "--fidelity", "0.5", "--margin", "0.0",
                   "--condition", "strong", "--seed", "3"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["max_deviation"] <= 1e-8
        assert payload["locc_report"]["p_success"] == pytest.approx(0.5, abs=1e-8)
        assert payload["p_success_locc"] == pytest.approx(payload["p_success_global"], abs=1e-8)
        assert payload["margin_slack"] >= -1e-9
        assert len(payload["branches"]) >= 2
        for branch in payload["branches"]:
            assert branch["slack_ratio_1"] >= -1e-9
            assert branch["slack_ratio_2"] >= -1e-9
            assert branch["overlap"] >= -1e-9

    def test_product_preset(self, capsys):
        rc = main(["locc", "--fidelity", "0.9", "--margin", "0.1",
                   "--phi1", "product", "--phi2", "product", "--seed", "3"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["locc_report"]["p_success"] == pytest.approx(0.225, abs=1e-8)

    def test_json_matrices(self, capsys):
        phi1 = json.dumps([[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]])
        amp = math.sqrt(1 - 0.25)
        phi2 = json.dumps([[[0.5, 0.0], [amp, 0.0]], [[0.0, 0.0], [0.0, 0.0]]])
        rc = main(["locc", "--phi1", phi1, "--phi2", phi2, "--margin", "0.05",
                   "--condition", "weak", "--seed", "1"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["fidelity"] == pytest.approx(0.5, abs=1e-12)
        assert payload["max_deviation"] <= 1e-8

    def test_identical_states_exit_2(self, capsys):
        phi = json.dumps([[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]])
        rc = main(["locc", "--phi1", phi, "--phi2", phi, "--margin", "0.1"])
        assert rc == 2

    def test_malformed_state_exit_2(self):
        assert main(["locc", "--phi1", "{bad json", "--phi2", "product",
                     "--fidelity", "0.5"]) == 2
