import pytest

from fuzzylb.cli import main, parse_config_text


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compare_emits_fifteen_data_rows(capsys, tmp_path):
    out_file = tmp_path / "report.csv"
    code, _, _ = _run(
        capsys,
        ["compare", "--seeds", "2", "--nodes", "5", "--out", str(out_file)],
    )
    assert code == 0
    lines = out_file.read_text().splitlines()
    data = [line for line in lines if line and not line.startswith("#")]
    assert data[0].startswith("task_count,policy,mean_response")
    assert len(data) == 1 + 15


def test_compare_writes_figure_alongside_output(capsys, tmp_path):
    out_file = tmp_path / "report.csv"
    code, stdout, _ = _run(
        capsys,
        ["compare", "--seeds", "1", "--task-counts", "2,4", "--out", str(out_file)],
    )
    assert code == 0
    figure = tmp_path / "report.png"
    assert figure.exists() and figure.stat().st_size > 0
    assert "figure written" in stdout


def test_compare_explicit_plot_path(capsys, tmp_path):
    fig = tmp_path / "fig.png"
    code, stdout, _ = _run(
        capsys,
        ["compare", "--seeds", "1", "--task-counts", "2", "--plot", str(fig)],
    )
    assert code == 0
    assert fig.exists() and fig.stat().st_size > 0


def test_fuzz_eval_idle_node_is_receiver(capsys):
    code, stdout, _ = _run(capsys, ["fuzz-eval", "--load", "0", "--heavy", "0"])
    assert code == 0
    assert "status = receiver" in stdout
    assert "very-light  1.000000" in stdout


def test_fuzz_eval_heavy_node_is_sender(capsys):
    code, stdout, _ = _run(capsys, ["fuzz-eval", "--load", "20", "--heavy", "0"])
    assert code == 0
    assert "status = sender" in stdout


def test_fuzz_eval_honours_breakpoints_flag(capsys):
    # load 2 is a sender with the default thresholds but very light when
    # the partition is stretched out
    _, default_out, _ = _run(capsys, ["fuzz-eval", "--load", "2", "--heavy", "0"])
    assert "status = sender" in default_out
    _, stretched_out, _ = _run(
        capsys,
        ["fuzz-eval", "--load", "2", "--heavy", "0",
         "--breakpoints", "8,10,12,14,16,18,19,20"],
    )
    assert "status = receiver" in stretched_out


def test_compare_text_format(capsys):
    code, stdout, _ = _run(
        capsys,
        ["compare", "--seeds", "1", "--task-counts", "2", "--format", "table"],
    )
    assert code == 0
    assert "mean response time by task count" in stdout
    assert "fuzzy improvement (percent)" in stdout


def test_simulate_is_reproducible(capsys):
    code1, first, _ = _run(capsys, ["simulate", "--policy", "fuzzy", "--tasks", "10", "--seed", "7"])
    code2, second, _ = _run(capsys, ["simulate", "--policy", "fuzzy", "--tasks", "10", "--seed", "7"])
    assert code1 == code2 == 0
    assert first == second


def test_simulate_metadata_includes_seed_rng_and_config(capsys):
    _, stdout, _ = _run(capsys, ["simulate", "--tasks", "3", "--seed", "4"])
    assert "# rng = numpy:PCG64" in stdout
    assert "# seed = 4" in stdout
    assert "# breakpoints = " in stdout
    assert "# rule = very-light & any -> receiver" in stdout


def test_unknown_flag_exits_with_usage_error(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["simulate", "--frobnicate"])
    assert excinfo.value.code == 2


def test_invalid_value_exits_2(capsys):
    code, _, err = _run(capsys, ["simulate", "--tasks", "0"])
    assert code == 2
    assert "error:" in err


def test_bad_policy_exits_2(capsys):
    code, _, err = _run(capsys, ["simulate", "--policy", "lottery"])
    assert code == 2


def test_show_config_round_trips_through_config_file(capsys, tmp_path):
    args = ["simulate", "--nodes", "7", "--seed", "3", "--arrival-rate", "2.5",
            "--breakpoints", "1,2,3,4,5,6,7,30", "--migration-delay", "0.2",
            "--format", "csv", "--show-config"]
    code, first, _ = _run(capsys, args)
    assert code == 0
    config_file = tmp_path / "run.cfg"
    config_file.write_text(first)
    code, second, _ = _run(capsys, ["simulate", "--config", str(config_file), "--show-config"])
    assert code == 0
    assert first == second
    settings = parse_config_text(first)
    assert settings["nodes"] == "7"
    assert settings["arrival_rate"] == "2.5"
    assert settings["breakpoints"] == "1,2,3,4,5,6,7,30"


def test_flags_override_config_file(capsys, tmp_path):
    config_file = tmp_path / "run.cfg"
    config_file.write_text("nodes = 3\nseed = 11\n")
    code, stdout, _ = _run(
        capsys, ["simulate", "--config", str(config_file), "--nodes", "4", "--show-config"]
    )
    assert code == 0
    assert "nodes = 4" in stdout
    assert "seed = 11" in stdout


def test_config_file_rules_replace_defaults(capsys, tmp_path):
    config_file = tmp_path / "rules.cfg"
    config_file.write_text("rule = any & any -> sender\n")
    code, stdout, _ = _run(
        capsys, ["fuzz-eval", "--load", "0", "--heavy", "0", "--config", str(config_file)]
    )
    assert code == 0
    assert "status = sender" in stdout


def test_unknown_config_key_rejected(capsys, tmp_path):
    config_file = tmp_path / "bad.cfg"
    config_file.write_text("warp_drive = 9\n")
    code, _, err = _run(capsys, ["simulate", "--config", str(config_file)])
    assert code == 2
    assert "unknown setting" in err


def test_missing_config_file_rejected(capsys):
    code, _, err = _run(capsys, ["simulate", "--config", "/nonexistent/nope.cfg"])
    assert code == 2


def test_parse_config_text_accumulates_rules_and_strips_comments():
    parsed = parse_config_text(
        "# a comment\nnodes = 4  # trailing\nrule = light & less -> sender\n"
        "rule = very-light & any -> receiver\n\n"
    )
    assert parsed["nodes"] == "4"
    assert parsed["rule"] == ["light & less -> sender", "very-light & any -> receiver"]
