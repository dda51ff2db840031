"""Config loading, the sweep/round commands, and output contracts."""

import json
from dataclasses import replace

import pytest

from gms.cli import (
    ConfigError,
    config_digest,
    config_from_dict,
    load_config,
    main,
)
from gms.engine import ExperimentConfig
from gms.market import Mechanism
from pathlib import Path

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload) if isinstance(payload, dict) else payload)
    return path


class TestLoadConfig:
    def test_empty_object_is_the_default_preset(self, tmp_path):
        cfg = load_config(write_config(tmp_path, {}))
        assert cfg == ExperimentConfig()
        assert cfg.population.n_owners == 10
        assert cfg.sizes == tuple(range(1, 11))
        assert cfg.replications == 1000
        assert set(cfg.mechanisms) == {Mechanism.SECOND_SCORE, Mechanism.SECOND_PRICE}

    def test_committed_default_file_matches_the_defaults(self):
        assert load_config(CONFIG_DIR / "default.json") == ExperimentConfig()

    def test_invariant_violation_is_a_config_error(self, tmp_path):
        path = write_config(tmp_path, {"replications": 0})
        with pytest.raises(ConfigError, match="replications"):
            load_config(path)

    def test_single_cell_sweep(self, tmp_path):
        cfg = load_config(write_config(tmp_path, {"sizes": [5], "mechanisms": ["second_score"]}))
        assert cfg.sizes == (5,)
        assert cfg.mechanisms == (Mechanism.SECOND_SCORE,)

    def test_unknown_field_rejected(self, tmp_path):
        path = write_config(tmp_path, {"replication": 10})
        with pytest.raises(ConfigError, match="unknown config fields: replication"):
            load_config(path)

    def test_unknown_scoring_field_rejected(self, tmp_path):
        path = write_config(tmp_path, {"scoring": {"bonus_weight": 1.0}})
        with pytest.raises(ConfigError, match="unknown scoring fields"):
            load_config(path)

    def test_malformed_json_reports_position(self, tmp_path):
        path = write_config(tmp_path, '{"sizes": [1,\n "oops"')
        with pytest.raises(ConfigError, match="line 2"):
            load_config(path)

    def test_missing_file_reported(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "absent.json")

    def test_non_object_root_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="JSON object"):
            load_config(write_config(tmp_path, "[1, 2]"))

    def test_unknown_mechanism_rejected(self, tmp_path):
        path = write_config(tmp_path, {"mechanisms": ["third_price"]})
        with pytest.raises(ConfigError, match="unknown mechanism"):
            load_config(path)

    def test_wrongly_typed_field_is_a_config_error(self, tmp_path):
        with pytest.raises(ConfigError, match="invalid configuration"):
            load_config(write_config(tmp_path, {"owners": "ten"}))

    def test_boolean_sizes_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="list of integers"):
            load_config(write_config(tmp_path, {"sizes": [True, 2]}))

    def test_catalog_resolved_relative_to_config_file(self, tmp_path):
        (tmp_path / "catalog.json").write_text(
            '[{"name": "m", "family": "GAN", "latency": "low", "cost": "low"}]'
        )
        cfg = load_config(write_config(tmp_path, {"catalog": "catalog.json"}))
        assert cfg.population.catalog is not None
        assert cfg.population.catalog[0].name == "m"

    def test_constrained_preset_loads(self):
        cfg = load_config(CONFIG_DIR / "constrained.json")
        assert cfg.population.capacity.memory_units == 2.0
        assert cfg.population.catalog is not None


class TestDigest:
    def test_stable_under_field_reordering(self):
        a = config_from_dict({"replications": 7, "owners": 3})
        b = config_from_dict({"owners": 3, "replications": 7})
        assert config_digest(a) == config_digest(b)

    def test_mechanism_listing_order_does_not_matter(self):
        a = config_from_dict({"mechanisms": ["second_score", "second_price"]})
        b = config_from_dict({"mechanisms": ["second_price", "second_score"]})
        assert config_digest(a) == config_digest(b)

    def test_changes_with_any_semantic_field(self):
        base = ExperimentConfig()
        assert config_digest(base) != config_digest(replace(base, master_seed=43))
        assert config_digest(base) != config_digest(replace(base, replications=999))
        assert config_digest(base) != config_digest(
            replace(base, population=replace(base.population, request_fraction=0.25))
        )

    def test_empty_object_matches_committed_default_file(self, tmp_path):
        assert config_digest(config_from_dict({})) == config_digest(
            load_config(CONFIG_DIR / "default.json")
        )


class TestSweepCommand:
    def sweep(self, tmp_path, *extra):
        out = tmp_path / "out"
        code = main(["sweep", "--output", str(out), *extra])
        return code, out

    def test_writes_curve_and_manifest(self, tmp_path, capsys):
        code, out = self.sweep(tmp_path, "--replications", "2")
        assert code == 0
        lines = (out / "revenue_curve.csv").read_text().splitlines()
        assert lines[0] == "size_billions,mechanism,mean_revenue,revenue_stderr,mean_welfare,replications"
        assert len(lines) == 21  # 10 sizes x 2 mechanisms + header
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config_digest"]
        assert manifest["config"]["replications"] == 2
        assert "revenue_curve" in manifest["outputs"]

    def test_rows_sorted_by_size_then_mechanism(self, tmp_path):
        _, out = self.sweep(tmp_path, "--replications", "2", "--size", "3")
        rows = (out / "revenue_curve.csv").read_text().splitlines()[1:]
        assert [r.split(",")[:2] for r in rows] == [
            ["3", "second_price"],
            ["3", "second_score"],
        ]

    def test_reruns_are_byte_identical(self, tmp_path):
        _, first = self.sweep(tmp_path / "a", "--replications", "3", "--seed", "11")
        _, second = self.sweep(tmp_path / "b", "--replications", "3", "--seed", "11")
        assert (first / "revenue_curve.csv").read_bytes() == (
            second / "revenue_curve.csv"
        ).read_bytes()

    def test_seed_flag_overrides_config_file(self, tmp_path):
        config = write_config(tmp_path, {"master_seed": 1, "replications": 2, "sizes": [2]})
        out = tmp_path / "out"
        code = main(["sweep", "--config", str(config), "--seed", "2", "--output", str(out)])
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["master_seed"] == 2

    def test_invalid_config_exits_2_without_partial_output(self, tmp_path, capsys):
        config = write_config(tmp_path, {"replications": 0})
        out = tmp_path / "out"
        code = main(["sweep", "--config", str(config), "--output", str(out)])
        assert code == 2
        assert not (out / "revenue_curve.csv").exists()
        assert "config error" in capsys.readouterr().err

    def test_runtime_failure_exits_3(self, tmp_path, monkeypatch, capsys):
        import gms.cli as cli_module

        def boom(cfg, workers=1):
            raise RuntimeError("sweep exploded")

        monkeypatch.setattr(cli_module, "sweep_sizes", boom)
        code = main(["sweep", "--output", str(tmp_path / "out"), "--replications", "2"])
        assert code == 3
        assert "sweep exploded" in capsys.readouterr().err

    def test_env_var_provides_default_output_dir(self, tmp_path, monkeypatch):
        target = tmp_path / "env_out"
        monkeypatch.setenv("GMS_OUTPUT_DIR", str(target))
        code = main(["sweep", "--replications", "2", "--size", "2"])
        assert code == 0
        assert (target / "revenue_curve.csv").exists()


class TestRoundCommand:
    def test_trace_contains_the_whole_round(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["round", "--seed", "7", "--size", "5", "--output", str(out)])
        assert code == 0
        trace = json.loads((out / "round_trace.json").read_text())
        assert trace["size_billions"] == 5
        assert len(trace["bids"]) == 10
        for bid in trace["bids"]:
            assert {"owner_id", "price", "score", "feasible"} <= set(bid)
        for name in ("second_score", "second_price"):
            section = trace["mechanisms"][name]
            assert {"winner", "payment", "welfare", "ranked_ledger"} <= set(section)
        printed = json.loads(capsys.readouterr().out)
        assert printed == trace

    def test_single_owner_round_clears_at_reserve(self, tmp_path):
        out = tmp_path / "out"
        main(["round", "--owners", "1", "--output", str(out)])
        trace = json.loads((out / "round_trace.json").read_text())
        for section in trace["mechanisms"].values():
            assert section["payment"] == 0.0

    def test_mechanism_flag_selects_a_price_ranked_ledger(self, tmp_path):
        out = tmp_path / "out"
        main(["round", "--mechanism", "second_price", "--size", "4", "--output", str(out)])
        trace = json.loads((out / "round_trace.json").read_text())
        assert list(trace["mechanisms"]) == ["second_price"]
        ledger = trace["mechanisms"]["second_price"]["ranked_ledger"]
        prices = [entry["price"] for entry in ledger]
        assert prices == sorted(prices, reverse=True)
        assert all(entry["score"] == entry["price"] for entry in ledger)

    def test_round_trace_is_reproducible(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        main(["round", "--seed", "3", "--size", "2", "--output", str(out_a)])
        main(["round", "--seed", "3", "--size", "2", "--output", str(out_b)])
        assert (out_a / "round_trace.json").read_bytes() == (out_b / "round_trace.json").read_bytes()

    def test_oversized_round_is_a_config_error(self, tmp_path, capsys):
        code = main(["round", "--size", "12", "--output", str(tmp_path / "out")])
        assert code == 2
        assert "universe" in capsys.readouterr().err

    def test_bad_flag_value_is_a_config_error(self, tmp_path, capsys):
        code = main(["round", "--owners", "0", "--output", str(tmp_path / "out")])
        assert code == 2
        assert "config error" in capsys.readouterr().err
