import json

import pytest

from fraclap import DomainError
from fraclap import verify as vf

QUICK = ["constant-oracle", "harnack", "layer-tail", "surprise3-gap", "surprise4-harmonic"]


def test_check_ids_sorted_and_cover_required_groups():
    ids = vf.check_ids()
    assert ids == sorted(ids)
    for group in ("constant-oracle", "surprise2-kernel", "surprise3-gap", "surprise4-harmonic", "harnack",
                  "surprise5-torsion-quadrature", "surprise5-torsion-extension", "surprise5-torsion-dirichlet",
                  "bump-tail", "layer-tail", "cross-engine-gaussian"):
        assert any(i.startswith(group) for i in ids), group


def test_resolve_groups_and_unknown():
    assert vf.resolve("surprise5") == ["surprise5-torsion-dirichlet", "surprise5-torsion-extension",
                                       "surprise5-torsion-quadrature"]
    assert len(vf.resolve(["constant-oracle"])) == 9
    with pytest.raises(DomainError):
        vf.resolve(["nonexistent"])
    with pytest.raises(DomainError):
        vf.run_check("nonexistent", vf.SuiteConfig())


def test_quick_checks_pass_and_report_is_deterministic():
    cfg = vf.SuiteConfig()
    a = vf.run_suite(QUICK, cfg)
    b = vf.run_suite(QUICK, cfg)
    assert all(r.passed for r in a)
    assert vf.report_json(a, cfg) == vf.report_json(b, cfg)
    doc = json.loads(vf.report_json(a, cfg))
    assert doc["schema"] == vf.SCHEMA
    assert [r["check_id"] for r in doc["results"]] == sorted(r["check_id"] for r in doc["results"])
    assert "runtime_millis" not in doc["results"][0]
    assert "runtime_millis" in json.loads(vf.report_json(a, cfg, timing=True))["results"][0]


def test_failure_does_not_abort_suite(monkeypatch):
    def boom(cfg):
        raise RuntimeError("broken")

    monkeypatch.setitem(vf.CHECKS, "harnack-0.5", boom)
    res = vf.run_suite(["harnack"], vf.SuiteConfig())
    assert [r.passed for r in res] == [False, True]
    assert "broken" in res[0].detail["error"]
    assert "FAIL" in vf.report_table(res)


def test_config_roundtrip_and_validation():
    cfg = vf.SuiteConfig.from_mapping({"seed": 7, "dirichlet_h": 0.0078125,
                                       "heat_grid": {"half_width": 20.0, "modes": 2048}})
    assert cfg.seed == 7 and cfg.heat_grid.modes == 2048
    back = vf.SuiteConfig.from_mapping(cfg.as_dict())
    assert back.as_dict() == cfg.as_dict()
    with pytest.raises(DomainError):
        vf.SuiteConfig.from_mapping({"colour": "blue"})


def test_provenance_tags():
    res = {r.check_id: r for r in vf.run_suite(["surprise4-harmonic", "harnack-0.5", "constant-oracle-s0.5"])}
    assert res["surprise4-harmonic"].provenance == vf.PAPER
    assert res["harnack-0.5"].provenance == vf.DERIVED
    assert res["constant-oracle-s0.5"].provenance == vf.DERIVED
