"""
End-to-end tests of the command line through run(argv)
"""
import csv
import io

import numpy as np
import pytest

from src.adapters.tensor_file import read_tensor
from src.cli.app import create_parser, run
from src.utils.config import THREADS_ENV


def invoke(*argv):
    stderr = io.StringIO()
    code = run([str(a) for a in argv], stderr=stderr)
    return code, stderr.getvalue()


def read_rows(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


@pytest.mark.integration
class TestSubcommands:
    """Test each subcommand's output file"""

    def test_select_full_budget(self, make_run, temp_directory):
        out = temp_directory / "selection.csv"
        code, err = invoke("select", "--manifest", make_run(keep=16), "--out", out)
        assert (code, err) == (0, "")
        rows = read_rows(out)
        assert list(rows[0]) == ["image_index", "score", "kept"]
        assert len(rows) == 16
        assert all(r["kept"] == "1" for r in rows)
        scores = [float(r["score"]) for r in rows]
        assert scores == sorted(scores, reverse=True)

    def test_mask_without_ignoring(self, make_run, temp_directory):
        out = temp_directory / "mask.sigt"
        assert invoke("mask", "--manifest", make_run(ignore=0), "--out", out)[0] == 0
        bits = read_tensor(out)
        assert bits.shape == (23,)
        assert bits.sum() == 23

    def test_mask_ignoring(self, make_run, temp_directory):
        out = temp_directory / "mask.sigt"
        assert invoke("mask", "--manifest", make_run(ignore=5), "--out", out)[0] == 0
        bits = read_tensor(out)
        assert set(bits.tolist()) <= {0.0, 1.0}
        assert bits.sum() == 18
        assert np.all(bits[:3] == 1.0) and np.all(bits[-4:] == 1.0)

    def test_heatmap_outputs(self, make_run, temp_directory):
        outputs = [temp_directory / "h.pgm", temp_directory / "h.csv", temp_directory / "h.png"]
        code, err = invoke("heatmap", "--manifest", make_run(), "--out", ",".join(map(str, outputs)),
                           "--query", "5", "--head-agg", "max")
        assert (code, err) == (0, "")
        assert outputs[0].read_text().startswith("P2\n4 4\n255\n")
        assert len(read_rows(outputs[1])) == 4
        assert outputs[2].read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_heatmap_bad_query(self, make_run, temp_directory):
        code, err = invoke("heatmap", "--manifest", make_run(), "--out", temp_directory / "h.pgm",
                           "--query", "first")
        assert code == 1
        assert err.startswith("ERR:UsageError:")

    def test_heatmap_bad_head_agg(self, make_run, temp_directory):
        code, err = invoke("heatmap", "--manifest", make_run(), "--out", temp_directory / "h.pgm",
                           "--head-agg", "median")
        assert code == 1
        assert err.startswith("ERR:UsageError:")

    def test_heatmap_unknown_extension(self, make_run, temp_directory):
        code, err = invoke("heatmap", "--manifest", make_run(), "--out", temp_directory / "h.bmp")
        assert code == 1

    def test_cluster_with_mask(self, make_run, temp_directory):
        out, mask_out, plot = temp_directory / "c.csv", temp_directory / "c.sigt", temp_directory / "c.png"
        code, err = invoke("cluster", "--manifest", make_run(ignore=4), "--out", out, "--k", 3,
                           "--seed", 1, "--ignore-clusters", "0,2", "--mask-out", mask_out, "--plot", plot)
        assert (code, err) == (0, "")
        rows = read_rows(out)
        assert list(rows[0]) == ["index", "x", "y", "label", "ignored"]
        assert sum(r["ignored"] == "1" for r in rows) == 4
        kept = sum(r["label"] == "1" for r in rows)
        assert read_tensor(mask_out).sum() == 3 + kept + 4
        assert plot.exists()

    def test_cluster_mask_flags_go_together(self, make_run, temp_directory):
        code, err = invoke("cluster", "--manifest", make_run(), "--out", temp_directory / "c.csv",
                           "--ignore-clusters", "0")
        assert code == 1
        assert "--mask-out" in err

    def test_cluster_id_out_of_range(self, make_run, temp_directory):
        code, err = invoke("cluster", "--manifest", make_run(), "--out", temp_directory / "c.csv",
                           "--k", 2, "--ignore-clusters", "5", "--mask-out", temp_directory / "m.sigt")
        assert code == 2
        assert err.startswith("ERR:ClusterIdOutOfRange:")

    def test_ablate_trials(self, make_run, temp_directory):
        out = temp_directory / "a.csv"
        code, _ = invoke("ablate", "--manifest", make_run(), "--out", out,
                         "--band", "random", "--ignore", 4, "--trials", 3)
        assert code == 0
        rows = read_rows(out)
        assert len(rows) == 48
        assert {r["trial"] for r in rows} == {"0", "1", "2"}
        for t in "012":
            assert sum(r["kept"] == "0" for r in rows if r["trial"] == t) == 4

    def test_ablate_bad_band(self, make_run, temp_directory):
        code, err = invoke("ablate", "--manifest", make_run(), "--out", temp_directory / "a.csv",
                           "--band", "middle", "--ignore", 4)
        assert code == 1

    def test_sweep(self, make_run, temp_directory):
        out = temp_directory / "s.csv"
        code, _ = invoke("sweep", "--manifest", make_run(), "--out", out, "--ignore-list", "0,4,8,12,16")
        assert code == 0
        rows = read_rows(out)
        assert [int(r["mask_popcount"]) for r in rows] == [23, 19, 15, 11, 7]
        macs = [int(r["mac_count"]) for r in rows]
        assert all(b < a for a, b in zip(macs, macs[1:]))
        assert rows[-1]["kept"] == ""
        assert len(rows[0]["kept"].split()) == 16

    def test_scatter(self, make_run, temp_directory):
        out = temp_directory / "sc.csv"
        assert invoke("scatter", "--manifest", make_run(), "--out", out)[0] == 0
        rows = read_rows(out)
        assert [r["kind"] for r in rows].count("image") == 16
        assert [r["kind"] for r in rows].count("text") == 4


@pytest.mark.integration
class TestRepeatability:
    """Test that two runs on the same manifest write identical bytes"""

    @pytest.mark.parametrize("command,extra,suffix", [
        ("select", (), ".csv"),
        ("mask", (), ".sigt"),
        ("heatmap", ("--head-agg", "max"), ".pgm"),
        ("heatmap", (), ".csv"),
        ("cluster", ("--k", 3, "--seed", 4), ".csv"),
        ("ablate", ("--band", "random", "--ignore", 4, "--trials", 2), ".csv"),
        ("sweep", ("--ignore-list", "0,4,8"), ".csv"),
        ("scatter", (), ".csv"),
    ])
    def test_outputs_are_byte_identical(self, make_run, temp_directory, command, extra, suffix):
        manifest = make_run()
        first, second = temp_directory / f"first{suffix}", temp_directory / f"second{suffix}"
        assert invoke(command, "--manifest", manifest, "--out", first, *extra)[0] == 0
        assert invoke(command, "--manifest", manifest, "--out", second, *extra)[0] == 0
        assert first.read_bytes() == second.read_bytes()

    def test_cluster_mask_is_byte_identical(self, make_run, temp_directory):
        manifest = make_run()
        masks = []
        for name in ("a", "b"):
            mask_out = temp_directory / f"{name}.sigt"
            code, _ = invoke("cluster", "--manifest", manifest, "--out", temp_directory / f"{name}.csv",
                             "--k", 2, "--seed", 7, "--ignore-clusters", "1", "--mask-out", mask_out)
            assert code == 0
            masks.append(mask_out.read_bytes())
        assert masks[0] == masks[1]


@pytest.mark.integration
class TestErrorReporting:
    """Test exit codes and the ERR line"""

    def test_no_subcommand(self):
        code, err = invoke()
        assert code == 1
        assert err.startswith("ERR:UsageError:")

    def test_unknown_flag(self, make_run, temp_directory):
        code, err = invoke("select", "--manifest", make_run(), "--out", temp_directory / "x.csv", "--fast")
        assert code == 1

    def test_bad_int_list(self, make_run, temp_directory):
        code, _ = invoke("sweep", "--manifest", make_run(), "--out", temp_directory / "s.csv",
                         "--ignore-list", "1,two")
        assert code == 1

    def test_invalid_manifest(self, make_run, temp_directory):
        code, err = invoke("select", "--manifest", make_run(keep=1, ignore=1), "--out", temp_directory / "x.csv")
        assert code == 2
        assert err.startswith("ERR:ManifestError:")
        assert err.count("\n") == 1

    def test_tensor_mismatch(self, make_run, temp_directory, rng):
        code, err = invoke("select", "--manifest", make_run(img=rng.normal(size=(9, 8))),
                           "--out", temp_directory / "x.csv")
        assert code == 2
        assert err.startswith("ERR:ManifestError:")

    def test_corrupt_tensor(self, make_run, temp_directory):
        path = make_run()
        (temp_directory / "img.sigt").write_bytes(b"NOPE" + b"\0" * 16)
        code, err = invoke("select", "--manifest", path, "--out", temp_directory / "x.csv")
        assert code == 2
        assert err.startswith("ERR:BadMagic:")

    def test_ignore_above_image_count(self, make_run, temp_directory):
        code, err = invoke("ablate", "--manifest", make_run(), "--out", temp_directory / "a.csv",
                           "--band", "important", "--ignore", 17)
        assert code == 2
        assert err.startswith("ERR:BudgetOutOfRange:")

    def test_bad_thread_setting(self, make_run, temp_directory, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "many")
        code, err = invoke("select", "--manifest", make_run(), "--out", temp_directory / "x.csv")
        assert code == 2
        assert err.startswith("ERR:ConfigurationError:")

    def test_parser_defaults(self):
        args = create_parser().parse_args(["sweep", "--manifest", "m.json", "--out", "s.csv"])
        assert args.ignore_list == [72, 124, 144, 216, 288, 360, 432, 504, 576]
