import csv
import json

import pytest

from ambushgames import cli, netflow, polygeom

from example_networks import seven_vertex_network


def write_json(path, obj):
    path.write_text(json.dumps(obj))


@pytest.fixture
def seven_vertex_file(tmp_path):
    obj = netflow.network_to_json(seven_vertex_network())
    path = tmp_path / "game.json"
    write_json(path, obj)
    return path


@pytest.fixture
def corridor_file(tmp_path):
    domain = polygeom.corridor_domain(length=12.0, width=10.0)
    obj = polygeom.domain_to_json(domain, reach=1.0)
    path = tmp_path / "domain.json"
    write_json(path, obj)
    return path


class TestSolveDiscrete:
    def test_value_and_shape(self, seven_vertex_file, tmp_path, capsys):
        out = tmp_path / "solution.json"
        code = cli.main(
            ["solve-discrete", "--input", str(seven_vertex_file), "--output", str(out)]
        )
        assert code == 0
        obj = json.loads(out.read_text())
        assert obj["value"] == pytest.approx(0.5, abs=1e-8)
        assert set(obj) == {"value", "p", "q"}
        assert sum(obj["q"].values()) == pytest.approx(1.0, abs=1e-9)

    def test_round_trip_revalidates(self, seven_vertex_file, tmp_path):
        from ambushgames import discrete_game as dg

        out = tmp_path / "solution.json"
        cli.main(["solve-discrete", "--input", str(seven_vertex_file), "--output", str(out)])
        net = seven_vertex_network()
        rewards = dg.uniform_internal_rewards(net)
        loaded = dg.solution_from_json(json.loads(out.read_text()), net, rewards)
        assert loaded.value == pytest.approx(0.5, abs=1e-8)

    def test_tampered_solution_rejected(self, seven_vertex_file, tmp_path):
        from ambushgames import discrete_game as dg
        from ambushgames.errors import SchemaError

        out = tmp_path / "solution.json"
        cli.main(["solve-discrete", "--input", str(seven_vertex_file), "--output", str(out)])
        obj = json.loads(out.read_text())
        obj["q"]["5"] = 0.9  # no longer a probability distribution
        net = seven_vertex_network()
        with pytest.raises(SchemaError):
            dg.solution_from_json(obj, net, dg.uniform_internal_rewards(net))

    def test_deterministic_bytes(self, seven_vertex_file, tmp_path):
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        cli.main(["solve-discrete", "--input", str(seven_vertex_file), "--output", str(out1)])
        cli.main(["solve-discrete", "--input", str(seven_vertex_file), "--output", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()

    def test_svg(self, seven_vertex_file, tmp_path):
        out = tmp_path / "solution.json"
        code = cli.main(
            ["solve-discrete", "--input", str(seven_vertex_file), "--output", str(out), "--svg"]
        )
        assert code == 0
        svg_text = (tmp_path / "solution.svg").read_text()
        assert svg_text.startswith("<svg")

    def test_malformed_input(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        write_json(path, {"vertices": [0, 1], "source": 0, "sink": 1})
        code = cli.main(["solve-discrete", "--input", str(path)])
        assert code == 2
        err = json.loads(capsys.readouterr().out)
        assert err["error"] == "parse"
        assert err["field"] == "edges"

    def test_infeasible(self, tmp_path, capsys):
        path = tmp_path / "cut.json"
        write_json(
            path,
            {"vertices": [0, 1, 2], "edges": [[1, 0]], "source": 0, "sink": 2},
        )
        code = cli.main(["solve-discrete", "--input", str(path)])
        assert code == 3
        assert json.loads(capsys.readouterr().out)["error"] == "infeasible"


class TestSolvePolygonal:
    def test_corridor(self, corridor_file, tmp_path):
        out = tmp_path / "cut.json"
        code = cli.main(
            ["solve-polygonal", "--input", str(corridor_file), "--output", str(out), "--svg"]
        )
        assert code == 0
        obj = json.loads(out.read_text())
        assert obj["capacity"] == 5
        assert obj["value"] == pytest.approx(0.2)
        assert len(obj["placements"]) == 5
        assert sum(p["probability"] for p in obj["placements"]) == pytest.approx(1.0)
        assert (tmp_path / "cut.svg").read_text().startswith("<svg")

    def test_radius_flag_overrides(self, corridor_file, tmp_path):
        out = tmp_path / "cut.json"
        cli.main(
            [
                "solve-polygonal", "--input", str(corridor_file),
                "--output", str(out), "--radius", "2.5",
            ]
        )
        assert json.loads(out.read_text())["capacity"] == 2

    def test_missing_radius(self, tmp_path, capsys):
        domain = polygeom.corridor_domain(4.0, 4.0)
        path = tmp_path / "noR.json"
        write_json(path, polygeom.domain_to_json(domain))
        code = cli.main(["solve-polygonal", "--input", str(path)])
        assert code == 2
        assert json.loads(capsys.readouterr().out)["field"] == "R"


class TestSolveScag:
    def test_built_graph(self, tmp_path):
        domain = polygeom.corridor_domain(length=6.0, width=4.0)
        path = tmp_path / "scag.json"
        write_json(path, polygeom.domain_to_json(domain, reach=1.0))
        out = tmp_path / "sol.json"
        code = cli.main(
            [
                "solve-scag", "--input", str(path), "--output", str(out),
                "--builder", "grid", "--schedule", "200", "--svg",
            ]
        )
        assert code == 0
        obj = json.loads(out.read_text())
        assert 0.0 < obj["value"] <= 1.0
        assert (tmp_path / "sol.svg").read_text().startswith("<svg")

    def test_deterministic(self, tmp_path):
        domain = polygeom.corridor_domain(length=6.0, width=4.0)
        path = tmp_path / "scag.json"
        write_json(path, polygeom.domain_to_json(domain, reach=1.0))
        outs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            cli.main(
                [
                    "solve-scag", "--input", str(path), "--output", str(out),
                    "--builder", "rrg", "--schedule", "150", "--seed", "3",
                ]
            )
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]


class TestSimulate:
    def test_discrete_report(self, seven_vertex_file, tmp_path):
        out = tmp_path / "report.json"
        code = cli.main(
            [
                "simulate", "--input", str(seven_vertex_file),
                "--output", str(out), "--trials", "20000", "--seed", "5",
            ]
        )
        assert code == 0
        obj = json.loads(out.read_text())
        assert obj["trials"] == 20000
        assert obj["analytic_value"] == pytest.approx(0.5, abs=1e-8)
        assert abs(obj["z_score"]) < 4.0

    def test_reports_reproduce(self, seven_vertex_file, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        argv = ["simulate", "--input", str(seven_vertex_file), "--trials", "5000", "--seed", "9"]
        cli.main(argv + ["--output", str(a)])
        cli.main(argv + ["--output", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestConverge:
    def test_csv_output(self, tmp_path):
        domain = polygeom.corridor_domain(length=6.0, width=4.0)
        path = tmp_path / "domain.json"
        write_json(path, polygeom.domain_to_json(domain, reach=1.0))
        out = tmp_path / "series.csv"
        code = cli.main(
            [
                "converge", "--input", str(path), "--output", str(out),
                "--builder", "grid", "--schedule", "50,150",
            ]
        )
        assert code == 0
        rows = list(csv.DictReader(out.read_text().splitlines()))
        assert [r["n"] for r in rows] == ["50", "150"]
        assert all(r["cag_value"] == rows[0]["cag_value"] for r in rows)
        assert float(rows[0]["cag_value"]) == pytest.approx(0.5)

    def test_deterministic_modulo_runtime(self, tmp_path):
        domain = polygeom.corridor_domain(length=6.0, width=4.0)
        path = tmp_path / "domain.json"
        write_json(path, polygeom.domain_to_json(domain, reach=1.0))
        outs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            cli.main(
                [
                    "converge", "--input", str(path), "--output", str(out),
                    "--builder", "rrg", "--schedule", "40,80", "--seed", "2",
                ]
            )
            rows = [line.rsplit(",", 1)[0] for line in out.read_text().splitlines()]
            outs.append(rows)
        assert outs[0] == outs[1]
