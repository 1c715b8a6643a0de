import json
import textwrap

import pytest

from swarmcover.cli import EXIT_COLLISION, EXIT_OK, EXIT_SCENARIO, main


def write(tmp_path, body, name="s.yaml"):
    f = tmp_path / name
    f.write_text(textwrap.dedent(body))
    return str(f)


HEAD_ON = """\
    arena:
      vertices: [[0, 0], [6, 0], [6, 3], [0, 3]]
    swarm:
      - positions: [[1, 1.5]]
      - positions: [[5, 1.5]]
    agent:
      radius: 0.4
      gain: 1.0
    sim:
      max_iters: 60
"""


def test_validate_ok(capsys):
    assert main(["validate", "--scenario", "example1"]) == EXIT_OK
    assert "2 swarm(s)" in capsys.readouterr().out


def test_validate_bad(tmp_path, capsys):
    path = write(tmp_path, "arena:\n  vertices: [[0, 0], [1, 0]]\nswarm: []\n")
    assert main(["validate", "--scenario", path]) == EXIT_SCENARIO
    assert "scenario error" in capsys.readouterr().err


def test_run_writes_outputs(tmp_path, capsys):
    path = write(tmp_path, HEAD_ON)
    out = tmp_path / "out"
    assert main(["run", "--scenario", path, "--out-dir", str(out), "--csv", "--svg"]) == EXIT_OK
    assert (out / "trajectory.csv").read_text().startswith("iteration,")
    assert (out / "trajectory.svg").read_text().startswith("<?xml")
    assert "collision events 0" in capsys.readouterr().out


def test_no_avoidance_collides_without_error_code(tmp_path):
    path = write(tmp_path, HEAD_ON)
    # both single-agent swarms head for the arena centroid; nothing promised
    assert main(["run", "--scenario", path, "--no-avoidance"]) == EXIT_OK


def test_collision_with_avoidance_exit_code(tmp_path, monkeypatch):
    import swarmcover.cli as cli

    real = cli.run_scenario

    def broken(s):
        log = real(s)
        log.collisions.append((1, 0, 1, -0.1))
        return log

    monkeypatch.setattr(cli, "run_scenario", broken)
    assert main(["run", "--scenario", write(tmp_path, HEAD_ON)]) == EXIT_COLLISION


def test_montecarlo_json(tmp_path):
    body = """\
        arena:
          vertices: [[1, 0], [6, 0], [8, 5], [5, 8], [0, 4]]
        swarm:
          - region: [[1.5, 0.5], [3, 0.5], [3, 2], [1.5, 2]]
            count: 2
          - region: [[4.5, 5.5], [6, 5.5], [6, 7], [4.5, 7]]
            count: 2
        sim:
          max_iters: 30
    """
    path = write(tmp_path, body)
    assert main(["montecarlo", "--scenario", path, "--runs", "2", "--seed", "5", "--out-dir", str(tmp_path)]) == EXIT_OK
    report = json.loads((tmp_path / "campaign.json").read_text())
    assert report["runs"] == 2 and report["collision_free_runs"] == 2
    assert len(report["runs_detail"]) == 2


def test_missing_subcommand():
    with pytest.raises(SystemExit):
        main([])
