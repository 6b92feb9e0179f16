import json

import numpy as np
import pytest

from qwdefect.config import load_config, parse_angle, parse_config
from qwdefect.errors import ConfigError


def base(**extra):
    doc = {"schema": 1, "theta": "0.25pi"}
    doc.update(extra)
    return doc


class TestAngles:
    @pytest.mark.parametrize(
        "text,value",
        [
            ("0.5pi", 0.5 * np.pi),
            ("pi", np.pi),
            ("-pi", -np.pi),
            ("+pi", np.pi),
            ("-0.8pi", -0.8 * np.pi),
            ("2*pi", 2 * np.pi),
            (".25pi", 0.25 * np.pi),
            ("1e-1pi", 0.1 * np.pi),
            (1.25, 1.25),
            ("1.25", 1.25),
        ],
    )
    def test_forms(self, text, value):
        assert parse_angle(text, "x") == pytest.approx(value)

    @pytest.mark.parametrize("bad", ["pie", "0.5 pi pi", True, None, [1], "nan", float("inf")])
    def test_rejects(self, bad):
        with pytest.raises(ConfigError) as e:
            parse_angle(bad, "phase")
        assert e.value.field == "phase"
        assert e.value.code == "E_ANGLE"


class TestValidation:
    def test_minimal(self):
        cfg = parse_config(base())
        assert cfg.theta == pytest.approx(np.pi / 4)
        assert cfg.coin.theta == pytest.approx(np.pi / 4)

    @pytest.mark.parametrize(
        "doc,field,code",
        [
            ({"theta": 0.5}, "schema", "E_SCHEMA"),
            ({"schema": 2, "theta": 0.5}, "schema", "E_SCHEMA"),
            ({"schema": 1}, "theta", "E_THETA"),
            ({"schema": 1, "theta": 0}, "theta", "E_THETA_RANGE"),
            ({"schema": 1, "theta": "0.5pi"}, "theta", "E_THETA_RANGE"),
            ({"schema": 1, "theta": 0.5, "colour": 1}, "colour", "E_UNKNOWN_KEY"),
            (base(defects=[{"position": 1.5, "phase": 0}]), "defects[0].position", "E_POSITION"),
            (base(defects=[{"position": "a", "phase": 0}]), "defects[0].position", "E_POSITION"),
            (base(defects=[{"position": 0}]), "defects[0]", "E_DEFECTS"),
            (base(defects={"position": 0}), "defects", "E_DEFECTS"),
            (base(k_grid={"min": 0.1, "max": 3, "count": 10}), "k_grid", "E_K_BAND"),
            (base(k_grid={"min": "0.5pi", "max": "1.5pi", "count": 10}), "k_grid", "E_K_BAND"),
            (base(k_grid={"min": 2, "max": 3}), "k_grid", "E_GRID"),
            (base(k_grid={"min": 3, "max": 2, "count": 4}), "k_grid", "E_GRID"),
            (base(thetas=[0.3, 1.6]), "thetas", "E_THETA_RANGE"),
            (base(simulation={"k0": 2.0}), "simulation", "E_SIM"),
            (base(simulation={"k0": 2.0, "sigma_k": 0.5}), "simulation.sigma_k", "E_SIM"),
            (
                base(simulation={"k0": 2.0, "sigma_k": 0.02, "steps": 0}),
                "simulation.steps",
                "E_SIM",
            ),
            (base(output={"format": "xml"}), "output.format", "E_OUTPUT"),
        ],
    )
    def test_errors_name_field(self, doc, field, code):
        with pytest.raises(ConfigError) as e:
            parse_config(doc)
        assert e.value.field == field
        assert e.value.code == code

    def test_open_band_grid(self):
        cfg = parse_config(
            base(k_grid={"min": "0.5pi", "max": "1.5pi", "count": 4, "endpoints": False})
        )
        assert cfg.k_grid.size == 4
        assert np.all((cfg.k_grid > np.pi / 2) & (cfg.k_grid < 3 * np.pi / 2))

    def test_default_k_points_open(self):
        ks = parse_config(base()).k_points()
        assert ks.size == 2001
        assert ks[0] > np.pi / 2 and ks[-1] < 3 * np.pi / 2

    def test_defect_forms(self):
        cfg = parse_config(base(defects=[[0, "0.5pi"], {"position": 4, "phase": 1.0}]))
        assert cfg.defects.positions == [0, 4]
        assert cfg.defects.defects[0].phase == pytest.approx(np.pi / 2)

    def test_phase_grid(self):
        cfg = parse_config(base(phases={"min": 0, "max": "pi", "count": 5}))
        np.testing.assert_allclose(cfg.phases, np.linspace(0, np.pi, 5))

    def test_simulation(self):
        cfg = parse_config(base(simulation={"k0": "0.75pi", "sigma_k": 0.02, "window": 900}))
        assert cfg.simulation.k0 == pytest.approx(0.75 * np.pi)
        assert cfg.simulation.window == 900
        assert cfg.simulation.steps is None


class TestLoad:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps(base(phase="pi")))
        assert load_config(path).phase == pytest.approx(np.pi)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError) as e:
            load_config(tmp_path / "none.json")
        assert e.value.code == "E_IO"

    def test_bad_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{schema: 1")
        with pytest.raises(ConfigError) as e:
            load_config(path)
        assert e.value.code == "E_JSON"
