import csv
import json

import numpy as np
import pytest

from conftest import GAMBLE_52, SURE_ONE, describe, random_pairs
from riskychoice.core import ChoiceTask
from riskychoice.harness import (
    REFERENCE_BASELINES,
    Dataset,
    DuplicateTaskId,
    FileUnreadable,
    MissingLabel,
    MissingPredictions,
    PredictionReport,
    SchemaViolation,
    SplitMix64,
    TooSmall,
    evaluate,
    evaluate_ensemble,
    export_finetune_file,
    load_dataset,
    load_predictions,
    report_table,
    save_dataset,
    save_predictions,
    seeded_shuffle,
    split_dataset,
)

HEAD = "Estimate the percentage of the population choosing Option A over Option B:"


def textual_ds(n, seed=0, prefix="t"):
    rng = np.random.default_rng(seed)
    tasks = [
        ChoiceTask(f"{prefix}{i}", option_a_text=f"a{i}", option_b_text=f"b{i}", observed_rate_a=float(rng.uniform()))
        for i in range(n)
    ]
    return Dataset("d", tasks)


def numeric_ds(n, seed=0):
    pairs = random_pairs(n, seed)
    rng = np.random.default_rng(seed)
    tasks = [
        ChoiceTask(f"n{i}", option_a_lottery=a, option_b_lottery=b, observed_rate_a=float(rng.uniform()), n_participants=30)
        for i, (a, b) in enumerate(pairs)
    ]
    return Dataset("n", tasks, "numeric")


def write_csv(path, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)
    return path


class TestLoad:
    def test_textual_1000(self, tmp_path):
        rows = [["task_id", "text_a", "text_b", "rate_a", "n_participants"]]
        rows += [[str(i), f"Win {i}, sure.", "Gamble, with \"quotes\", commas", "0.5", "40"] for i in range(1000)]
        ds = load_dataset(write_csv(tmp_path / "d.csv", rows))
        assert len(ds) == 1000 and ds.modality == "textual"
        assert ds["7"].option_b_text == 'Gamble, with "quotes", commas'

    def test_numeric_row(self, tmp_path):
        path = tmp_path / "n.csv"
        path.write_text("task_id,lottery_a,lottery_b,rate_a,n_participants\nid,1:1.0,5:0.23;2:0.77,0.35,31\n")
        t = load_dataset(path, "numeric-csv")["id"]
        assert t.option_a_lottery == SURE_ONE
        assert t.option_b_lottery == GAMBLE_52
        assert (t.observed_rate_a, t.n_participants) == (0.35, 31)

    def test_bad_probabilities_name_the_line(self, tmp_path):
        path = tmp_path / "n.csv"
        path.write_text(
            "task_id,lottery_a,lottery_b,rate_a,n_participants\n"
            "ok,1:1.0,5:0.23;2:0.77,0.35,31\n"
            "bad,1:1.0,5:0.2;2:0.7,0.35,31\n"
        )
        with pytest.raises(SchemaViolation, match="line 3"):
            load_dataset(path, "numeric-csv")

    @pytest.mark.parametrize(
        "row",
        [
            "x,1:1.0,5:0.23;2:0.77,1.5,31",
            "x,1:1.0,garbage,0.3,31",
            "x,1:1.0,5:0.23;2:0.77,0.3,2.5",
            ",1:1.0,5:0.23;2:0.77,0.3,31",
        ],
    )
    def test_malformed_rows(self, tmp_path, row):
        path = tmp_path / "n.csv"
        path.write_text("task_id,lottery_a,lottery_b,rate_a,n_participants\n" + row + "\n")
        with pytest.raises(SchemaViolation):
            load_dataset(path, "numeric-csv")

    def test_missing_column(self, tmp_path):
        path = tmp_path / "n.csv"
        path.write_text("task_id,text_a,rate_a\n1,x,0.3\n")
        with pytest.raises(SchemaViolation, match="text_b"):
            load_dataset(path)

    def test_duplicate_ids(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("task_id,text_a,text_b,rate_a,n_participants\n1,x,y,,\n1,x,z,,\n")
        with pytest.raises(DuplicateTaskId):
            load_dataset(path)
        with pytest.raises(DuplicateTaskId):
            Dataset("d", [ChoiceTask("1", option_a_text="x", option_b_text="y")] * 2)

    def test_unreadable(self, tmp_path):
        with pytest.raises(FileUnreadable):
            load_dataset(tmp_path / "absent.csv")
        (tmp_path / "bin.csv").write_bytes(b"\xff\xfe\x00bad")
        with pytest.raises(FileUnreadable):
            load_dataset(tmp_path / "bin.csv")

    def test_unlabelled_rows_allowed(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("task_id,text_a,text_b,rate_a,n_participants\n1,x,y,,\n")
        t = load_dataset(path)["1"]
        assert t.observed_rate_a is None and t.n_participants is None

    def test_modality_guard(self):
        with pytest.raises(SchemaViolation):
            Dataset("d", [ChoiceTask("1", option_a_lottery=SURE_ONE, option_b_lottery=GAMBLE_52)], "textual")

    @pytest.mark.parametrize("build, fmt", [(textual_ds, "textual-csv"), (numeric_ds, "numeric-csv")])
    def test_round_trip(self, tmp_path, build, fmt):
        ds = build(40)
        save_dataset(ds, tmp_path / "d.csv")
        back = load_dataset(tmp_path / "d.csv", fmt, name=ds.name)
        assert back.tasks == ds.tasks and back.modality == ds.modality

    def test_both_modalities_and_sidecar(self, tmp_path):
        pairs = random_pairs(5, 1)
        tasks = [
            ChoiceTask(str(i), describe(a), describe(b), a, b, observed_rate_a=0.25) for i, (a, b) in enumerate(pairs)
        ]
        ds = Dataset("s", tasks, "both")
        save_dataset(ds, tmp_path / "s.csv", metadata={"seed": 3})
        back = load_dataset(tmp_path / "s.csv", "synthetic")
        assert back.modality == "both" and back.tasks == tasks
        assert back.metadata == {"seed": 3}


class TestSplit:
    @pytest.mark.parametrize("n, trainval, test", [(1000, 900, 100), (1039, 935, 104), (10, 9, 1), (15, 13, 2)])
    def test_sizes(self, n, trainval, test):
        s = split_dataset(textual_ds(n), 0.10, 0.10, seed=0)
        assert (len(s.trainval_ids), len(s.test_ids)) == (trainval, test)

    def test_partition_properties(self):
        ds = textual_ds(1000)
        s = split_dataset(ds)
        assert (len(s.train_ids), len(s.val_ids), len(s.test_ids)) == (810, 90, 100)
        ids = s.train_ids + s.val_ids + s.test_ids
        assert len(set(ids)) == 1000 and set(ids) == {t.task_id for t in ds.tasks}

    def test_deterministic_and_order_free(self):
        ds = textual_ds(300)
        shuffled = Dataset("d", list(reversed(ds.tasks)))
        assert split_dataset(ds, seed=4) == split_dataset(shuffled, seed=4)
        assert split_dataset(ds, seed=4).test_ids != split_dataset(ds, seed=5).test_ids

    def test_guards(self):
        with pytest.raises(TooSmall):
            split_dataset(textual_ds(9))
        with pytest.raises(ValueError):
            split_dataset(textual_ds(20), test_fraction=0.0)
        with pytest.raises(ValueError):
            split_dataset(textual_ds(20), val_fraction=1.0)

    def test_splitmix_reference_values(self):
        rng = SplitMix64(0)
        assert [rng.next() for _ in range(3)] == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]

    def test_shuffle_pinned(self):
        # Fisher-Yates from the top, j = below(i + 1) with SplitMix64(0)
        rng = SplitMix64(0)
        out = ["a", "b", "c", "d"]
        for i in (3, 2, 1):
            j = rng.below(i + 1)
            out[i], out[j] = out[j], out[i]
        assert seeded_shuffle(["d", "c", "b", "a"], 0) == out
        assert sorted(seeded_shuffle(list("zyxw"), 9)) == list("wxyz")

    def test_below_is_uniform(self):
        rng = SplitMix64(11)
        counts = np.bincount([rng.below(3) for _ in range(30000)], minlength=3)
        assert np.all(np.abs(counts - 10000) < 400)


class TestEvaluate:
    def setup_method(self):
        self.ds = textual_ds(200, seed=3)
        self.split = split_dataset(self.ds)
        self.labels = {t.task_id: t.observed_rate_a for t in self.ds.tasks}

    def test_constant_baseline(self):
        rep = evaluate({i: 0.5 for i in self.labels}, self.ds, self.split, model_name="constant")
        expected = np.mean([(self.labels[i] - 0.5) ** 2 for i in self.split.test_ids])
        assert rep.test_mse == pytest.approx(expected, abs=1e-15)
        assert set(rep.predictions) == set(self.split.test_ids)
        assert rep.split_seed == 0

    def test_oracle(self):
        assert evaluate(self.labels, self.ds, self.split).test_mse == 0.0

    def test_missing_ids_named(self):
        preds = dict(self.labels)
        dropped = list(self.split.test_ids[:3])
        for i in dropped:
            del preds[i]
        with pytest.raises(MissingPredictions) as e:
            evaluate(preds, self.ds, self.split)
        assert e.value.missing == dropped
        assert all(i in str(e.value) for i in dropped)

    def test_from_file(self, tmp_path):
        save_predictions(self.labels, tmp_path / "p.csv")
        assert load_predictions(tmp_path / "p.csv") == self.labels
        assert evaluate(tmp_path / "p.csv", self.ds, self.split).test_mse == 0.0

    def test_fingerprint_tracks_config(self):
        a = evaluate(self.labels, self.ds, self.split, config={"x": 1})
        b = evaluate(self.labels, self.ds, self.split, config={"x": 2})
        assert a.config_fingerprint != b.config_fingerprint

    def test_ensemble_identical(self):
        member = {i: 0.4 for i in self.labels}
        single = evaluate(member, self.ds, self.split).test_mse
        rep = evaluate_ensemble([member] * 10, self.ds, self.split)
        assert rep.test_mse == pytest.approx(single, abs=1e-15)
        assert rep.member_mse == pytest.approx([single] * 10)

    def test_ensemble_cancellation(self):
        rng = np.random.default_rng(2)
        tasks = [ChoiceTask(f"c{i}", option_a_text="x", option_b_text="y", observed_rate_a=float(rng.uniform(0.1, 0.9)))
                 for i in range(50)]
        ds = Dataset("c", tasks)
        split = split_dataset(ds)
        up = {t.task_id: t.observed_rate_a + 0.05 for t in tasks}
        down = {t.task_id: t.observed_rate_a - 0.05 for t in tasks}
        assert evaluate_ensemble([up, down], ds, split).test_mse == pytest.approx(0.0, abs=1e-30)

    def test_ensemble_jensen(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            k = int(rng.integers(2, 11))
            members = [{i: float(rng.uniform()) for i in self.labels} for _ in range(k)]
            rep = evaluate_ensemble(members, self.ds, self.split)
            assert rep.test_mse <= np.mean(rep.member_mse) + 1e-12

    def test_report_persistence(self, tmp_path):
        rep = evaluate({i: 0.3 for i in self.labels}, self.ds, self.split, model_name="m", training_data="Numeric")
        rep.save(tmp_path / "r.json")
        back = PredictionReport.load(tmp_path / "r.json")
        assert back == rep
        assert abs(back.recompute_mse() - back.test_mse) <= 1e-12

    def test_tampered_report_rejected(self, tmp_path):
        evaluate(self.labels, self.ds, self.split).save(tmp_path / "r.json")
        blob = json.loads((tmp_path / "r.json").read_text())
        blob["test_mse"] = 0.01
        (tmp_path / "r.json").write_text(json.dumps(blob))
        with pytest.raises(ValueError):
            PredictionReport.load(tmp_path / "r.json")


class TestExport:
    def test_lines_and_completion(self, tmp_path):
        tasks = [ChoiceTask("a", option_a_text="x", option_b_text="y", observed_rate_a=0.35)]
        tasks += [ChoiceTask(f"r{i}", option_a_text="p", option_b_text="q", observed_rate_a=r) for i, r in
                  enumerate([0.0, 1.0, 0.285, 0.994, 0.005])]
        n = export_finetune_file(Dataset("d", tasks), None, "all", tmp_path / "f.jsonl")
        recs = [json.loads(line) for line in (tmp_path / "f.jsonl").read_text().splitlines()]
        assert n == 6
        assert recs[0] == {"prompt": f"{HEAD}\nOption A: x\nOption B: y", "completion": "35"}
        assert [r["completion"] for r in recs[1:]] == ["0", "100", "29", "99", "1"]

    def test_train_partition(self, tmp_path):
        ds = textual_ds(1000)
        s = split_dataset(ds)
        assert export_finetune_file(ds, s, "train", tmp_path / "f.jsonl") == 810
        assert export_finetune_file(ds, s, "trainval", tmp_path / "f.jsonl") == 900

    def test_missing_label(self, tmp_path):
        ds = Dataset("d", [ChoiceTask("1", option_a_text="x", option_b_text="y")])
        with pytest.raises(MissingLabel):
            export_finetune_file(ds, None, "all", tmp_path / "f.jsonl")


def report(name, score, data="Textual only"):
    return PredictionReport(name, data, {}, {}, score, 0, "")


class TestReportTable:
    def test_four_decimals(self):
        text = report_table([report("RoBERTa", 0.00952)])
        assert "0.0095" in text and "0.00952" not in text
        assert text.splitlines()[0].split() == ["Model", "Training", "Data", "Test", "MSE"]

    def test_tie_order_by_name(self):
        text = report_table([report("zeta", 0.01231), report("alpha", 0.01229), report("best", 0.0050)], "csv")
        assert [line.split(",")[0] for line in text.splitlines()[1:]] == ["best", "alpha", "zeta"]

    def test_csv(self):
        text = report_table([report("a", 0.1), report("b", 0.2, "")], "csv")
        assert text.splitlines() == ["Model,Training Data,Test MSE", "a,Textual only,0.1000", "b,--,0.2000"]

    def test_markdown(self):
        lines = report_table([report("a", 0.1)], "markdown").splitlines()
        assert lines[0] == "| Model | Training Data | Test MSE |"
        assert lines[2] == "| a | Textual only | 0.1000 |"

    def test_baselines(self):
        text = report_table([report("mine", 0.02)], include_reference_baselines=True)
        for name, _, score in REFERENCE_BASELINES:
            assert name in text and f"{score:.4f}" in text
        assert "0.0092" in text and "0.0095" in text

    def test_guards(self):
        with pytest.raises(ValueError):
            report_table([])
        with pytest.raises(ValueError):
            report_table([report("a", 0.1)], "html")
