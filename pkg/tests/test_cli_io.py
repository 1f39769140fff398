"""Scenario parsing, CSV round trips, result emission and the CLI."""

import io
import json
import math

import pytest

from mmwcomp import (CdfPoint, Condition, ModelCard, OutagePctRow,
                     PathLossSample, ReceptionRecord, ResultBundle,
                     RunMetadata, ScenarioError, build_cdf, emit_results,
                     format_pct, load_model_cards, load_scenario,
                     load_topology, parse_scenario, read_masks_csv,
                     read_samples_csv, scenario_to_json, write_masks_csv,
                     write_samples_csv)
from mmwcomp.cli import main
from mmwcomp.params import CAMPAIGN_SERVING_SETS

MINIMAL = {
    "base_stations": [{"id": "B1", "x_m": 0.0, "y_m": 0.0}],
    "ues": [{"id": "U1", "x_m": 30.0, "y_m": 0.0}],
}


def minimal(**extra):
    obj = json.loads(json.dumps(MINIMAL))
    obj.update(extra)
    return obj


class TestParseScenario:
    def test_defaults(self):
        sc = parse_scenario(minimal())
        assert sc.base_stations[0].height_m == 4.0
        assert sc.ues[0].height_m == 1.4
        assert sc.models[Condition.LOS].ple == 2.0
        assert sc.models[Condition.NLOS].sigma_db == 11.4
        assert sc.models[Condition.NLOS_BEST].ple == 2.9
        assert sc.budget.max_pl_db == 175.0
        assert sc.sweep.n_rx_directions == 72
        assert sc.condition_policy.p_los == pytest.approx(11 / 36)
        assert sc.seed == 73

    def test_schema_version(self):
        parse_scenario(minimal(schema_version=1))
        with pytest.raises(ScenarioError, match="schema_version"):
            parse_scenario(minimal(schema_version=2))

    def test_unknown_key_rejected_with_path(self):
        with pytest.raises(ScenarioError, match="scenario"):
            parse_scenario(minimal(extra_field=1))
        obj = minimal()
        obj["base_stations"][0]["colour"] = "red"
        with pytest.raises(ScenarioError, match=r"base_stations\[0\]"):
            parse_scenario(obj)

    def test_negative_sigma_rejected_with_key_path(self):
        obj = minimal(models={"LOS": {"f_ghz": 73.5, "ple": 2.0,
                                      "sigma_db": -1.0}})
        with pytest.raises(ScenarioError, match=r"models\.LOS"):
            parse_scenario(obj)

    def test_partial_models_merge_with_defaults(self):
        obj = minimal(models={"NLOS": {"f_ghz": 73.5, "ple": 3.4,
                                       "sigma_db": 9.7}})
        sc = parse_scenario(obj)
        assert sc.models[Condition.NLOS].ple == 3.4
        assert sc.models[Condition.LOS].ple == 2.0  # untouched default

    def test_missing_required_sections(self):
        with pytest.raises(ScenarioError, match="ues"):
            parse_scenario({"base_stations": MINIMAL["base_stations"]})

    def test_explicit_conditions(self):
        sc = parse_scenario(minimal(conditions={"U1/B1": "NLOS"}))
        assert sc.condition_policy.explicit[("U1", "B1")] is Condition.NLOS
        with pytest.raises(ScenarioError, match="conditions"):
            parse_scenario(minimal(conditions={"U9/B1": "NLOS"}))
        with pytest.raises(ScenarioError, match="LOS or NLOS"):
            parse_scenario(minimal(conditions={"U1/B1": "NLOS_BEST"}))
        with pytest.raises(ScenarioError, match="ue_id/bs_id"):
            parse_scenario(minimal(conditions={"U1B1": "NLOS"}))

    def test_bad_number_type(self):
        obj = minimal()
        obj["ues"][0]["x_m"] = "thirty"
        with pytest.raises(ScenarioError, match="x_m"):
            parse_scenario(obj)

    def test_round_trip_through_json(self):
        sc = parse_scenario(minimal(conditions={"U1/B1": "NLOS"}, seed=99))
        again = parse_scenario(json.loads(scenario_to_json(sc)))
        assert again == sc

    def test_load_scenario_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ScenarioError, match="invalid JSON"):
            load_scenario(path)


class TestSamplesCsv:
    def test_round_trip_exact(self, tmp_path):
        samples = [PathLossSample(63.0, 152.49541205654867, Condition.NLOS),
                   PathLossSample(10.5, 91.25, Condition.LOS, "VH")]
        path = tmp_path / "samples.csv"
        write_samples_csv(samples, path)
        back = read_samples_csv(path)
        assert back == samples  # repr emission reloads bit-exact

    def test_parse_basic_row(self):
        buf = io.StringIO("d_m,pl_db,condition,polarization\n63,152.5,NLOS,VV\n")
        [s] = read_samples_csv(buf)
        assert (s.d_m, s.pl_db, s.condition, s.polarization) == (
            63.0, 152.5, Condition.NLOS, "VV")

    def test_strict_reports_line_number(self):
        buf = io.StringIO(
            "d_m,pl_db,condition,polarization\n63,152.5,NLOS,VV\n0.5,80,LOS,VV\n")
        with pytest.raises(ScenarioError, match="line 3"):
            read_samples_csv(buf)

    def test_lenient_skips_bad_rows(self):
        buf = io.StringIO(
            "d_m,pl_db,condition,polarization\n0.5,80,LOS,VV\n63,152.5,NLOS,VV\n")
        samples = read_samples_csv(buf, strict=False)
        assert len(samples) == 1 and samples[0].d_m == 63.0

    def test_header_mismatch(self):
        with pytest.raises(ScenarioError, match="header"):
            read_samples_csv(io.StringIO("distance,pl\n1,2\n"))

    def test_empty_file(self):
        with pytest.raises(ScenarioError, match="empty"):
            read_samples_csv(io.StringIO(""))

    def test_header_only_warns(self):
        with pytest.warns(UserWarning, match="no data rows"):
            out = read_samples_csv(io.StringIO("d_m,pl_db,condition,polarization\n"))
        assert out == []


class TestMasksCsv:
    def test_round_trip(self, tmp_path):
        mask = tuple(i % 3 != 0 for i in range(72))
        records = {("U1", "B1"): ReceptionRecord(("U1", "B1"), mask)}
        path = tmp_path / "masks.csv"
        write_masks_csv(records, path)
        assert read_masks_csv(path) == records

    def test_bad_mask_length(self):
        buf = io.StringIO("rx_id,tx_id,mask\nU1,B1,101\n")
        with pytest.raises(ScenarioError, match="72"):
            read_masks_csv(buf)

    def test_duplicate_link(self):
        row = "U1,B1," + "1" * 72
        buf = io.StringIO(f"rx_id,tx_id,mask\n{row}\n{row}\n")
        with pytest.raises(ScenarioError, match="duplicate"):
            read_masks_csv(buf)


def test_load_topology(tmp_path):
    path = tmp_path / "topology.json"
    path.write_text(json.dumps({u: list(s)
                                for u, s in CAMPAIGN_SERVING_SETS.items()}))
    assert load_topology(path) == CAMPAIGN_SERVING_SETS
    path.write_text(json.dumps({"U1": []}))
    with pytest.raises(ScenarioError):
        load_topology(path)


class TestFormatting:
    def test_fixed_one_decimal(self):
        assert format_pct(0.024186) == "2.4"
        assert format_pct(0.555555) == "55.6"
        assert format_pct(1.0) == "100.0"
        assert format_pct(0.0) == "0.0"

    def test_scientific_below_threshold(self):
        assert format_pct(6.942e-7) == "6.9E-5"
        assert format_pct(1.757e-7) == "1.8E-5"
        assert format_pct(7.066e-5) == "7.1E-3"

    def test_threshold_boundary(self):
        assert format_pct(1e-4) == "0.0"      # exactly 0.01% stays fixed
        assert format_pct(0.99e-4) == "9.9E-3"


class TestResults:
    def test_build_cdf(self):
        pts = build_cdf([3.0, 1.0, 2.0, math.inf])
        assert [p.x for p in pts] == [1.0, 2.0, 3.0]
        assert pts[-1].p == 1.0
        with pytest.raises(ValueError):
            build_cdf([math.inf])

    def test_bundle_rejects_malformed_cdf(self):
        meta = RunMetadata("test", "0")
        with pytest.raises(ValueError, match="non-decreasing"):
            ResultBundle(meta, cdfs={"x": [CdfPoint(2.0, 0.5),
                                           CdfPoint(1.0, 1.0)]})
        with pytest.raises(ValueError, match="end at probability 1"):
            ResultBundle(meta, cdfs={"x": [CdfPoint(1.0, 0.5)]})

    def test_emit_outage_schema_and_determinism(self, tmp_path):
        bundle = ResultBundle(
            RunMetadata("coverage", "0.1.0"),
            outage_rows=[OutagePctRow("NLOS", 63.0, 0.024186, 0.00742),
                         OutagePctRow("NLOS_BEST", 63.0, 6.942e-7, 1.757e-7)])
        first = {p.name: p.read_bytes()
                 for p in emit_results(bundle, tmp_path / "a")}
        second = {p.name: p.read_bytes()
                  for p in emit_results(bundle, tmp_path / "b")}
        assert first == second
        text = first["outage.csv"].decode()
        lines = text.splitlines()
        assert lines[0] == "condition,distance_m,p_out_edge_pct,p_out_region_pct"
        assert lines[1] == "NLOS,63,2.4,0.7"
        assert lines[2] == "NLOS_BEST,63,6.9E-5,1.8E-5"
        meta = json.loads(first["metadata.json"])
        assert meta["timestamp"] is None

    def test_model_cards_round_trip(self, tmp_path):
        cards = [ModelCard("NLOS", 73.5, 4.5987654321, 11.40123456789,
                           Condition.NLOS, n_samples=10000)]
        bundle = ResultBundle(RunMetadata("fit", "0.1.0"), model_cards=cards)
        emit_results(bundle, tmp_path)
        [back] = load_model_cards(tmp_path / "models.json")
        assert back.ple == pytest.approx(cards[0].ple, abs=1e-9)
        assert back.sigma_db == pytest.approx(cards[0].sigma_db, abs=1e-9)
        assert back.condition is Condition.NLOS
        assert back.to_model().ple == back.ple


SCENARIO_JSON = {
    "base_stations": [{"id": "B1", "x_m": 0.0, "y_m": 0.0},
                      {"id": "B2", "x_m": 80.0, "y_m": 0.0}],
    "ues": [{"id": "U1", "x_m": 30.0, "y_m": 20.0}],
    "seed": 7,
}


class TestCli:
    def write_scenario(self, tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(SCENARIO_JSON))
        return str(path)

    def test_coverage_stdout(self, capsys):
        assert main(["coverage"]) == 0
        out = capsys.readouterr().out
        assert "NLOS 63 2.4 0.7" in out
        assert "NLOS_BEST 63 6.9E-5 1.8E-5" in out

    def test_coverage_custom_distances(self, capsys):
        assert main(["coverage", "--distances", "63"]) == 0
        out = capsys.readouterr().out
        assert "NLOS 200" not in out

    def test_simulate_deterministic_bytes(self, tmp_path, capsys):
        sc = self.write_scenario(tmp_path)
        for sub in ("a", "b"):
            assert main(["simulate", "--scenario", sc, "--trials", "5",
                         "--out", str(tmp_path / sub)]) == 0
        files_a = sorted((tmp_path / "a").iterdir())
        files_b = sorted((tmp_path / "b").iterdir())
        assert [p.name for p in files_a] == [p.name for p in files_b]
        for pa, pb in zip(files_a, files_b):
            assert pa.read_bytes() == pb.read_bytes()

    def test_simulate_seed_flag_overrides_scenario(self, tmp_path, capsys):
        sc = self.write_scenario(tmp_path)
        assert main(["simulate", "--scenario", sc, "--trials", "2",
                     "--seed", "99", "--out", str(tmp_path / "o")]) == 0
        meta = json.loads((tmp_path / "o" / "metadata.json").read_text())
        assert meta["seed"] == 99

    def test_out_dir_from_environment(self, tmp_path, monkeypatch, capsys):
        sc = self.write_scenario(tmp_path)
        monkeypatch.setenv("MMWCOMP_OUT", str(tmp_path / "envout"))
        assert main(["simulate", "--scenario", sc, "--trials", "2"]) == 0
        assert (tmp_path / "envout" / "reception.csv").is_file()

    def test_no_out_dir_writes_nothing(self, tmp_path, monkeypatch, capsys):
        sc = self.write_scenario(tmp_path)
        monkeypatch.delenv("MMWCOMP_OUT", raising=False)
        monkeypatch.chdir(tmp_path)
        before = set(tmp_path.rglob("*"))
        assert main(["simulate", "--scenario", sc, "--trials", "2"]) == 0
        assert set(tmp_path.rglob("*")) == before

    def test_enumerate_counts(self, tmp_path, capsys):
        topo = tmp_path / "topology.json"
        topo.write_text(json.dumps({u: list(s)
                                    for u, s in CAMPAIGN_SERVING_SETS.items()}))
        assert main(["enumerate", "--topology", str(topo)]) == 0
        out = capsys.readouterr().out
        assert "counts: 36,54,42,17,3" in out

    def test_enumerate_with_masks(self, tmp_path, capsys):
        topo = tmp_path / "topology.json"
        topo.write_text(json.dumps({u: list(s)
                                    for u, s in CAMPAIGN_SERVING_SETS.items()}))
        links = [(u, b) for u in sorted(CAMPAIGN_SERVING_SETS)
                 for b in sorted(CAMPAIGN_SERVING_SETS[u])]
        records = {}
        for i, link in enumerate(links):
            bits = [True] * 72
            if i >= 20:
                bits[i % 72] = False
            records[link] = ReceptionRecord(link, tuple(bits))
        masks = tmp_path / "masks.csv"
        write_masks_csv(records, masks)
        assert main(["enumerate", "--topology", str(topo),
                     "--masks", str(masks)]) == 0
        out = capsys.readouterr().out
        assert "k=1: 36 combinations, reception=55.6%" in out

    def test_fit_end_to_end(self, tmp_path, capsys):
        import numpy as np
        from mmwcomp import CiModel, ci_sample_path_loss_db, substream
        model = CiModel(73.5, 4.6, 11.4, Condition.NLOS)
        rng = substream(5, 0)
        d = 10.0 ** rng.uniform(1, np.log10(200.0), size=2000)
        pl = ci_sample_path_loss_db(model, d, rng)
        samples = [PathLossSample(float(a), float(b), Condition.NLOS)
                   for a, b in zip(d, pl)]
        csv_path = tmp_path / "samples.csv"
        write_samples_csv(samples, csv_path)
        out_dir = tmp_path / "fit"
        assert main(["fit", "--samples", str(csv_path),
                     "--out", str(out_dir)]) == 0
        [card] = load_model_cards(out_dir / "models.json")
        assert card.ple == pytest.approx(4.6, abs=0.15)
        assert card.sigma_db == pytest.approx(11.4, abs=0.7)

    def test_report_summarizes_bundle(self, tmp_path, capsys):
        sc = self.write_scenario(tmp_path)
        out_dir = tmp_path / "run"
        assert main(["simulate", "--scenario", sc, "--trials", "3",
                     "--out", str(out_dir)]) == 0
        capsys.readouterr()
        assert main(["report", "--bundle", str(out_dir)]) == 0
        out = capsys.readouterr().out
        assert "run: simulate" in out
        assert "reception.csv" in out

    def test_missing_file_exits_1(self, tmp_path, capsys):
        assert main(["simulate", "--scenario",
                     str(tmp_path / "nope.json")]) == 1
        assert "error" in capsys.readouterr().err

    def test_invalid_scenario_exits_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"base_stations": [], "ues": []}))
        assert main(["simulate", "--scenario", str(bad)]) == 1

    def test_usage_error_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["no-such-command"])
        assert exc.value.code == 2
