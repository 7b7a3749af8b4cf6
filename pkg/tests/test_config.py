import pytest

from wireqfi.config import ConfigError, ExperimentConfig, parse_config, validate


def test_parse_values_and_ranges():
    cfg = parse_config(
        """
        # comment line
        name = scan
        probe = single-particle
        target = alpha_y, alpha_z
        L = range(10, 31, 10)
        alpha = linspace(0.1, 0.5, 3)   # trailing comment
        B = 0.05
        T = geomspace(0.01, 1, 3)
        fit = qfim
        check_exponent = [1.5, 2.5]
        """
    )
    assert cfg.name == "scan"
    assert cfg.target == ("alpha_y", "alpha_z")
    assert cfg.grid["L"] == [10, 20, 30]
    assert cfg.grid["alpha"] == pytest.approx([0.1, 0.3, 0.5])
    assert cfg.grid["B"] == [0.05]
    assert cfg.grid["T"] == pytest.approx([0.01, 0.1, 1.0])
    assert cfg.fit == ("qfim",)
    assert cfg.check_exponent == (1.5, 2.5)
    assert cfg.lines["L"] == 6


def test_parse_errors_report_every_line():
    with pytest.raises(ConfigError) as exc:
        parse_config("L = [4]\nbogus = 1\nL = [5]\njust words\n")
    errs = exc.value.errors
    assert any("line 2" in e and "unknown key" in e for e in errs)
    assert any("line 3" in e and "duplicate" in e for e in errs)
    assert any("line 4" in e for e in errs)


def test_type_errors():
    with pytest.raises(ConfigError, match="integer"):
        parse_config("L = [4]\nworkers = two")
    with pytest.raises(ConfigError, match="numbers"):
        parse_config("L = [4, 'x']")
    with pytest.raises(ConfigError, match="empty"):
        parse_config("L = []")


def test_short_chain_rejected_with_line():
    rep = validate(parse_config("name = x\nL = 1\nB = 1.0"))
    assert not rep.ok
    assert any("line 2" in e and "L >= 2" in e for e in rep.errors)


def test_errors_collected_together():
    rep = validate(parse_config("probe = psychic\ntarget = gamma\nL = [1]\nT = -1\nfit = magic\nmode = shuffle"))
    text = " ".join(rep.errors)
    for fragment in ("probe", "target", "L >= 2", "T >= 0", "fit", "mode"):
        assert fragment in text
    assert len(rep.errors) >= 6


def test_preset_config_ok():
    assert validate(parse_config("preset = fig2")).ok
    assert validate(ExperimentConfig(preset="fig5", scale="quick")).ok


def test_preset_rejects_grid_keys():
    rep = validate(parse_config("preset = fig1\nL = [4]"))
    assert any("line 2" in e and "preset" in e for e in rep.errors)


def test_zeeman_floor_warning():
    rep = validate(parse_config("L = [100]\nB = 0.001"))
    assert rep.ok and any("degeneracy-safe floor" in w for w in rep.warnings)
    assert not validate(parse_config("L = [100]\nB = 0.01")).warnings


def test_many_body_sector_limits(monkeypatch):
    monkeypatch.delenv("WIREQFI_SECTOR_CAP", raising=False)
    cfg = "probe = many-body-ed\nL = [10]\nB = 0.5"
    rep = validate(parse_config(cfg))
    assert rep.ok and any("iterative" in w for w in rep.warnings)  # C(20,10) = 184756
    rep = validate(parse_config(cfg + "\nsector_cap = 100000"))
    assert any("184756" in e and "cap" in e for e in rep.errors)
    thermal = validate(parse_config("probe = many-body-thermal\nL = [7]\nB = 1.0\nT = [0.1]"))
    assert any("full spectrum" in e for e in thermal.errors)
    monkeypatch.setenv("WIREQFI_SECTOR_CAP", "1000")
    assert not validate(parse_config(cfg)).ok


def test_incompatible_probe_and_target():
    rep = validate(parse_config("probe = thermal\ntarget = alpha_y, alpha_z\nL = [10]\nB = 1\nT = [1]"))
    assert any("pure probe" in e for e in rep.errors)
    rep = validate(parse_config("probe = slater\nmeasure = current\nL = [10]\nB = 1"))
    assert any("current" in e for e in rep.errors)
    rep = validate(parse_config("L = [10]\nalpha = 0.1\nalpha_z = 0.2\nB = 1"))
    assert any("ties" in e for e in rep.errors)


def test_zip_mode_lengths():
    rep = validate(parse_config("mode = zip\nL = [10, 20]\nB = [1, 2, 3]"))
    assert any("zip" in e for e in rep.errors)


def test_hash_ignores_output_location():
    a = parse_config("L = [10]\nB = 1\nout = a\nworkers = 1")
    b = parse_config("out = b\nworkers = 4\nB = 1\nL = [10]")
    assert a.config_hash() == b.config_hash()
    assert parse_config("L = [11]\nB = 1").config_hash() != a.config_hash()
