"""AUROC exactness and report assembly."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from oodscore.errors import EmptyList, MissingScore, NonFinite, UnknownSplit, UnlabeledImage
from oodscore.evaluation import (
    EvalTask,
    auroc,
    mixture_eval,
    report_to_json,
    report_to_markdown,
    run_tasks,
    save_report,
)
from oodscore.mixture import MixtureResult
from oodscore.scoring import ScoredRecord


class TestAuroc:
    def test_perfect_separation(self):
        assert auroc([0.9, 0.8], [0.1, 0.2]) == 1.0

    def test_all_ties(self):
        assert auroc([0.5, 0.5], [0.5, 0.5]) == 0.5

    def test_frozen_mixed_case(self):
        assert auroc([0.3, 0.7, 0.7], [0.1, 0.7, 0.9]) == 4.0 / 9.0

    def test_reversed_is_zero(self):
        assert auroc([0.1], [0.9]) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(EmptyList):
            auroc([], [0.5])
        with pytest.raises(EmptyList):
            auroc([0.5], [])

    def test_nan_rejected(self):
        with pytest.raises(NonFinite):
            auroc([float("nan")], [0.0])

    def test_bit_equal_to_pairwise_oracle(self):
        rng = np.random.default_rng(99)
        for _ in range(200):
            n, m = int(rng.integers(1, 60)), int(rng.integers(1, 60))
            # coarse grid forces heavy ties
            ood = (rng.integers(0, 8, n) / 4.0).tolist()
            ind = (rng.integers(0, 8, m) / 4.0).tolist()
            assert auroc(ood, ind) == oracles.auroc_pairwise(ood, ind)

    def test_complement_exact(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            a = (rng.integers(0, 6, int(rng.integers(1, 40))) / 2.0).tolist()
            b = (rng.integers(0, 6, int(rng.integers(1, 40))) / 2.0).tolist()
            assert auroc(a, b) + auroc(b, a) == 1.0

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(6)
        ood = rng.normal(size=30).tolist()
        ind = rng.normal(size=25).tolist()
        base = auroc(ood, ind)
        # power-of-two scale plus shift preserves float ordering exactly
        assert auroc([4.0 * s + 1.0 for s in ood], [4.0 * s + 1.0 for s in ind]) == base

    @given(st.lists(st.integers(0, 10), min_size=1, max_size=30),
           st.lists(st.integers(0, 10), min_size=1, max_size=30))
    @settings(max_examples=80)
    def test_oracle_property(self, a, b):
        ood = [x / 2.0 for x in a]
        ind = [x / 2.0 for x in b]
        assert auroc(ood, ind) == oracles.auroc_pairwise(ood, ind)
        assert 0.0 <= auroc(ood, ind) <= 1.0


def rec(rid, split, **scores):
    return ScoredRecord(id=rid, split=split, scores=scores)


class TestRunTasks:
    RECORDS = [
        rec("a", "in_seen", max_logit_diff=-0.9, neg_max_prob=-0.8),
        rec("b", "in_seen", max_logit_diff=-0.7, neg_max_prob=-0.6),
        rec("c", "out_seen", max_logit_diff=0.8, neg_max_prob=-0.5),
        rec("d", "out_seen", max_logit_diff=0.9, neg_max_prob=-0.4),
    ]

    def task(self, method="max_logit_diff"):
        return EvalTask(name="seen", positive_split="out_seen",
                        negative_split="in_seen", method=method)

    def test_basic_report(self):
        report = run_tasks(self.RECORDS, [self.task()], config={"k": "v"})
        assert len(report.tasks) == 1
        task = report.tasks[0]
        assert task.auroc == 1.0
        assert (task.n_pos, task.n_neg) == (2, 2)
        assert report.config == {"k": "v"}

    def test_degenerate_single_records(self):
        records = [rec("a", "p", m=0.1), rec("b", "n", m=0.9)]
        task = EvalTask(name="d", positive_split="p", negative_split="n", method="m")
        assert run_tasks(records, [task]).tasks[0].auroc == 0.0

    def test_unknown_split_is_hard_error(self):
        with pytest.raises(UnknownSplit):
            run_tasks(self.RECORDS, [EvalTask(
                name="x", positive_split="nope", negative_split="in_seen",
                method="max_logit_diff")])

    def test_missing_method_is_hard_error(self):
        records = self.RECORDS + [rec("e", "out_seen")]
        with pytest.raises(MissingScore):
            run_tasks(records, [self.task()])

    def test_same_split_rejected(self):
        with pytest.raises(UnknownSplit):
            EvalTask(name="x", positive_split="s", negative_split="s", method="m")

    def test_task_order_preserved(self):
        tasks = [self.task("max_logit_diff"), self.task("neg_max_prob")]
        tasks[1] = EvalTask(name="second", positive_split="out_seen",
                            negative_split="in_seen", method="neg_max_prob")
        report = run_tasks(self.RECORDS, tasks)
        assert [t.name for t in report.tasks] == ["seen", "second"]


class TestMixtureEval:
    def results(self):
        out = []
        for i in range(3):
            out.append(MixtureResult(f"m{i}", (0.9, -0.9), 1.8))
            out.append(MixtureResult(f"i{i}", (-0.9, -0.88), 0.02))
            out.append(MixtureResult(f"o{i}", (0.9, 0.88), 0.02))
        return out

    def truth(self):
        t = {}
        for i in range(3):
            t[f"m{i}"] = "mixed"
            t[f"i{i}"] = "pure_in"
            t[f"o{i}"] = "pure_out"
        return t

    def test_constructed_separation(self):
        report = mixture_eval(self.results(), self.truth(), "max_logit_diff")
        assert [t.name for t in report.tasks] == ["mixed_vs_pure_in", "mixed_vs_pure_out"]
        assert all(t.auroc == 1.0 for t in report.tasks)
        assert all(t.method == "g(max_logit_diff)" for t in report.tasks)

    def test_all_equal_gives_half(self):
        results = [MixtureResult(f"m{i}", (0.1, 0.1), 0.0) for i in range(2)]
        results += [MixtureResult(f"i{i}", (0.1, 0.1), 0.0) for i in range(2)]
        results += [MixtureResult(f"o{i}", (0.1, 0.1), 0.0) for i in range(2)]
        truth = {"m0": "mixed", "m1": "mixed", "i0": "pure_in", "i1": "pure_in",
                 "o0": "pure_out", "o1": "pure_out"}
        report = mixture_eval(results, truth, "max_logit_diff")
        assert all(t.auroc == 0.5 for t in report.tasks)

    def test_unlabeled_image_rejected(self):
        with pytest.raises(UnlabeledImage):
            mixture_eval(self.results(), {}, "max_logit_diff")

    def test_images_without_g_are_skipped(self):
        results = self.results() + [MixtureResult("single", (0.5,), None)]
        truth = self.truth()
        truth["single"] = "mixed"
        report = mixture_eval(results, truth, "max_logit_diff")
        assert report.tasks[0].n_pos == 3


class TestReports:
    def report(self):
        return run_tasks(TestRunTasks.RECORDS, [TestRunTasks().task()],
                         config={"methods": ["max_logit_diff"]})

    def test_json_shape(self):
        obj = report_to_json(self.report())
        assert set(obj) == {"tasks", "config"}
        assert set(obj["tasks"][0]) == {"name", "method", "auroc", "n_pos", "n_neg"}

    def test_file_output_parses(self, tmp_path):
        path = tmp_path / "report.json"
        save_report(self.report(), path)
        obj = json.loads(path.read_text())
        assert obj["tasks"][0]["auroc"] == 1.0

    def test_byte_determinism(self, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save_report(self.report(), p1)
        save_report(self.report(), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_markdown_grid(self):
        md = report_to_markdown(self.report())
        lines = md.splitlines()
        assert lines[0] == "| task | max_logit_diff |"
        assert lines[2].startswith("| seen | 1.0000")
