from pathlib import Path

import pytest

from swarmtraj.cli import main
from swarmtraj.scenario import read_campaign


def write_config(path: Path, **kv) -> str:
    lines = ["# test configuration"]
    for key, value in kv.items():
        if isinstance(value, (tuple, list)):
            value = ",".join(str(v) for v in value)
        lines.append(f"{key} = {value}")
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture()
def tiny_setup(tmp_path):
    """A 1-object, 4-date campaign plus a small swarm configuration."""
    cfg = write_config(
        tmp_path / "config.txt",
        truth_rows="1",
        nights=2,
        photos_per_night=2,
        fictitious_counts=(0, 1, 0, 0),
        particles=12,
        iterations=8,
        neighborhood_size=4,
        seed=3,
    )
    out = tmp_path / "gen"
    assert main(["generate", "--config", cfg, "--out", str(out)]) == 0
    return cfg, out / "campaign.txt", tmp_path


class TestGenerate:
    def test_default_config_structure(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["generate", "--out", str(out)]) == 0
        campaign = read_campaign(out / "campaign.txt")
        sizes = campaign.observations.batch_sizes
        assert campaign.observations.n_dates == 30
        assert all(10 <= m <= 12 for m in sizes)
        assert "30" in capsys.readouterr().out

    def test_two_date_file(self, tmp_path):
        cfg = write_config(tmp_path / "c.txt", nights=1, photos_per_night=2)
        out = tmp_path / "out"
        assert main(["generate", "--config", cfg, "--out", str(out)]) == 0
        assert read_campaign(out / "campaign.txt").observations.n_dates == 2

    def test_invalid_latitude_names_field(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.txt", station_lat_deg=100.0)
        rc = main(["generate", "--config", cfg, "--out", str(tmp_path / "o")])
        assert rc == 2
        assert "station_lat_deg" in capsys.readouterr().err

    def test_unknown_key_rejected(self, tmp_path, capsys):
        (tmp_path / "c.txt").write_text("bogus_field = 3\n")
        rc = main(["generate", "--config", str(tmp_path / "c.txt"),
                   "--out", str(tmp_path / "o")])
        assert rc == 2
        assert "bogus_field" in capsys.readouterr().err


class TestOptimize:
    def test_warm_start_truth_gives_zero_fitness(self, tiny_setup, capsys):
        cfg, campaign, tmp = tiny_setup
        out = tmp / "opt"
        rc = main(["optimize", "--campaign", str(campaign), "--config", cfg,
                   "--out", str(out), "--warm-start-truth"])
        assert rc == 0
        trace = (out / "trace.csv").read_text().splitlines()
        first_best = float(trace[1].split(",")[1])
        # The campaign file quantizes angles through degrees, so the truth
        # scores essentially-but-not-exactly zero through the file path.
        assert first_best < 1e-12
        scores = dict(
            line.split(",") for line in
            (out / "scores.csv").read_text().splitlines()[1:]
        )
        assert float(scores["purity"]) == 1.0
        assert float(scores["permutation_consistency"]) == 1.0

    def test_outputs_written_and_reparse(self, tiny_setup):
        cfg, campaign, tmp = tiny_setup
        out = tmp / "opt2"
        rc = main(["optimize", "--campaign", str(campaign), "--config", cfg,
                   "--out", str(out)])
        assert rc == 0
        for name in ("elements.csv", "trace.csv", "residuals.csv",
                     "assignments.csv", "scores.csv"):
            assert (out / name).exists()
        rows = (out / "trace.csv").read_text().splitlines()
        assert rows[0] == "iteration,best_fitness,mean_fitness,evaluations"
        best = [float(r.split(",")[1]) for r in rows[1:]]
        assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))
        elements = (out / "elements.csv").read_text().splitlines()
        assert elements[0].startswith("object,a_km,e,inc_deg")
        assert len(elements) == 2  # one object

    def test_every_output_field_reparses(self, tiny_setup):
        cfg, campaign, tmp = tiny_setup
        out = tmp / "opt3"
        assert main(["optimize", "--campaign", str(campaign), "--config", cfg,
                     "--out", str(out)]) == 0
        for path in sorted(out.glob("*.csv")):
            lines = path.read_text().splitlines()
            width = len(lines[0].split(","))
            for line in lines[1:]:
                fields = line.split(",")
                assert len(fields) == width, path.name
                for field in fields[1:]:
                    float(field)  # numeric round trip, no exceptions

    def test_worker_count_invariance(self, tiny_setup):
        cfg, campaign, tmp = tiny_setup
        out1, out2 = tmp / "w1", tmp / "w2"
        assert main(["optimize", "--campaign", str(campaign), "--config", cfg,
                     "--out", str(out1), "--workers", "1"]) == 0
        assert main(["optimize", "--campaign", str(campaign), "--config", cfg,
                     "--out", str(out2), "--workers", "2"]) == 0
        assert (out1 / "trace.csv").read_bytes() == \
            (out2 / "trace.csv").read_bytes()
        assert (out1 / "elements.csv").read_bytes() == \
            (out2 / "elements.csv").read_bytes()

    def test_missing_campaign_is_config_error(self, tmp_path, capsys):
        rc = main(["optimize", "--campaign", str(tmp_path / "nope.txt"),
                   "--out", str(tmp_path / "o")])
        assert rc == 2


class TestEvaluate:
    def test_truth_elements_score_near_zero(self, tiny_setup, capsys):
        cfg, campaign, tmp = tiny_setup
        out = tmp / "warm"
        main(["optimize", "--campaign", str(campaign), "--config", cfg,
              "--out", str(out), "--warm-start-truth"])
        capsys.readouterr()
        # elements.csv from a warm-started run whose best is the truth
        rc = main(["evaluate", "--campaign", str(campaign),
                   "--elements", str(out / "elements.csv")])
        assert rc == 0
        text = capsys.readouterr().out
        assert "fitness:" in text
        fitness = float(text.splitlines()[0].split(":")[1])
        assert fitness < 1e-12
        assert "dual accounting" in text

    def test_perturbed_truth_positive(self, tiny_setup, tmp_path, capsys):
        cfg, campaign, tmp = tiny_setup
        out = tmp / "warm2"
        main(["optimize", "--campaign", str(campaign), "--config", cfg,
              "--out", str(out), "--warm-start-truth"])
        lines = (out / "elements.csv").read_text().splitlines()
        header, row = lines[0], lines[1].split(",")
        row[1] = str(float(row[1]) + 10.0)  # a += 10 km
        bad = tmp_path / "bad.csv"
        bad.write_text(header + "\n" + ",".join(row) + "\n")
        capsys.readouterr()
        rc = main(["evaluate", "--campaign", str(campaign),
                   "--elements", str(bad)])
        assert rc == 0
        fitness = float(capsys.readouterr().out.splitlines()[0].split(":")[1])
        assert fitness > 1.0


class TestAssign:
    def test_matrix_solved(self, tmp_path, capsys):
        mat = tmp_path / "m.txt"
        mat.write_text("# a comment\n4.0 1.0\n2.0 0.0\n3.0 2.0\n")
        assert main(["assign", "--matrix", str(mat)]) == 0
        out = capsys.readouterr().out
        assert "total cost: 3.0" in out

    def test_ragged_matrix_rejected(self, tmp_path, capsys):
        mat = tmp_path / "m.txt"
        mat.write_text("1.0 2.0\n3.0\n")
        assert main(["assign", "--matrix", str(mat)]) == 2

    def test_negative_entry_rejected(self, tmp_path, capsys):
        mat = tmp_path / "m.txt"
        mat.write_text("1.0 -2.0\n3.0 4.0\n")
        assert main(["assign", "--matrix", str(mat)]) == 2
        assert "finite" in capsys.readouterr().err
