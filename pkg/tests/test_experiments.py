import json
import math
import os

import pytest

from vexlab.experiments import (
    ExperimentConfig,
    eq41_char_scaling,
    eq51_union_membership,
    lemma41_ratio_study,
    run_experiment,
    section3_xa_witness,
    thm31_closedness_check,
    thm32_interval_norms,
    thm42_maximal_divergence,
    write_summary_csv,
)


@pytest.fixture(scope="module")
def cfg(tmp_path_factory):
    out = tmp_path_factory.mktemp("reports")
    return ExperimentConfig(out_dir=str(out), trials=20, truncation=30)


def test_thm31_passes_on_bump_exponent(cfg):
    rep = thm31_closedness_check(cfg)
    assert rep.verdict == "pass"
    assert rep.metrics["min_interval_norm"] >= 1.0 / math.e


def test_thm31_fails_on_constant_exponent(cfg):
    rep = thm31_closedness_check(cfg, exponent_kind="constant")
    assert rep.verdict == "fail"
    assert rep.metrics["min_interval_norm"] < 1.0 / math.e


def test_thm32_floors(cfg):
    rep = thm32_interval_norms(cfg)
    assert rep.verdict == "pass"
    assert rep.metrics["min_divergence_floor"] >= 1.0 / math.e
    assert rep.metrics["min_lo"] >= 1.0 / math.e


def test_section3_witness(cfg):
    rep = section3_xa_witness(cfg)
    assert rep.verdict == "pass"
    assert rep.metrics["max_level_value"] >= 8.0
    for A in (2, 4, 8):
        assert math.isfinite(rep.metrics[f"modular_A{A}"])


def test_eq41_scaling(cfg):
    rep = eq41_char_scaling(cfg)
    assert rep.verdict == "pass"
    assert 0.5 <= rep.metrics["ratio_min"]
    assert rep.metrics["ratio_max"] <= 2.0 * math.e
    assert any(p.endswith(".csv") for p in rep.artifacts)


def test_lemma41_band(cfg):
    rep = lemma41_ratio_study(cfg)
    assert rep.verdict == "pass"
    assert rep.metrics["band_width"] <= 20.0
    assert rep.metrics["mass_decades"] >= 4.0


def test_thm42_curve(cfg):
    rep = thm42_maximal_divergence(cfg)
    assert rep.verdict == "pass"
    assert rep.metrics["logj_max_rel_dev"] <= 0.2


def test_eq51_membership(cfg):
    rep = eq51_union_membership(cfg)
    assert rep.verdict == "pass"
    assert rep.metrics["certificate_gap"] <= 1e-10


def test_determinism_byte_identical(cfg):
    rep1 = thm32_interval_norms(cfg)
    rep2 = thm32_interval_norms(cfg)
    assert json.dumps(rep1.to_json(), sort_keys=True) == json.dumps(rep2.to_json(), sort_keys=True)


def test_run_experiment_writes_report(cfg):
    rep = run_experiment("thm3.2", cfg)
    path = os.path.join(cfg.out_dir, "thm3_2.json")
    assert os.path.exists(path)
    with open(path) as fh:
        doc = json.load(fh)
    assert doc["id"] == "thm3.2"
    assert doc["verdict"] == "pass"
    assert set(doc) == {"id", "config_digest", "verdict", "metrics", "artifacts", "checks"}


def test_unknown_experiment_id(cfg):
    with pytest.raises(KeyError):
        run_experiment("nope", cfg)


def test_summary_csv(cfg, tmp_path):
    rep = thm32_interval_norms(cfg)
    path = tmp_path / "summary.csv"
    write_summary_csv([rep], str(path))
    lines = path.read_text().splitlines()
    assert lines[0].startswith("id,verdict")
    assert lines[1].startswith("thm3.2,pass")


def test_config_digest_changes_with_seed():
    c1 = ExperimentConfig(seed=1)
    c2 = ExperimentConfig(seed=2)
    assert c1.digest() != c2.digest()
