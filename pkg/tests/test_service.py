"""HTTP layer: endpoints, error-to-status mapping, response shapes."""

import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from oodscore.embeddings import make_store, save_store
from oodscore.service.app import create_app
from oodscore import serialize


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(), raise_server_exceptions=False)


def write_stores(tmp_path):
    """Tiny two-class corpus: anchors on axes, images near them."""
    rng = np.random.default_rng(50)
    dim = 8
    in_anchor = np.zeros(dim)
    in_anchor[0] = 1.0
    out_anchor = np.zeros(dim)
    out_anchor[1] = 1.0
    texts = make_store(dim, [
        ("dog", in_anchor, {"class": "dog", "split": ""}),
        ("cat", out_anchor, {"class": "cat", "split": ""}),
    ])
    records = []
    for i in range(10):
        base = in_anchor if i < 5 else out_anchor
        vec = base + rng.normal(0, 0.05, dim)
        vec = vec / np.linalg.norm(vec)
        split = "in" if i < 5 else "out"
        records.append((f"img{i}", vec, {"class": "dog" if i < 5 else "cat",
                                         "split": split}))
    images = make_store(dim, records)
    images_path = tmp_path / "images.oceb"
    texts_path = tmp_path / "texts.oceb"
    save_store(images, images_path)
    save_store(texts, texts_path)
    labels = {"name": "t",
              "in": [{"name": "dog", "prompts": [], "tier": "seen"}],
              "out": [{"name": "cat", "prompts": [], "tier": "seen"}]}
    labels_path = tmp_path / "labels.json"
    labels_path.write_text(json.dumps(labels))
    return images_path, texts_path, labels_path


class TestMeta:
    def test_healthz(self, client):
        resp = client.get("/healthz")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok"}

    def test_version(self, client):
        body = client.get("/v1/version").json()
        assert body["format_version"] == 1
        assert body["version"].count(".") == 2


class TestInlineScore:
    def test_known_value(self, client):
        resp = client.post("/v1/score/inline", json={
            "in_logits": [2.0], "out_logits": [1.0],
            "methods": ["neg_max_in_prob"]})
        assert resp.status_code == 200
        assert resp.json()["scores"]["neg_max_in_prob"] == pytest.approx(
            -0.7310585786300049)

    def test_unknown_method_is_400(self, client):
        resp = client.post("/v1/score/inline", json={
            "in_logits": [1.0], "methods": ["mahalanobis"]})
        assert resp.status_code == 400
        assert resp.json()["error"]["category"] == "config"

    def test_missing_body_field_is_400(self, client):
        resp = client.post("/v1/score/inline", json={"methods": ["neg_max_prob"]})
        assert resp.status_code == 400

    def test_out_needed_is_400(self, client):
        resp = client.post("/v1/score/inline", json={
            "in_logits": [1.0], "out_logits": [], "methods": ["max_logit_diff"]})
        assert resp.status_code == 400


class TestScoreEndpoint:
    def test_end_to_end(self, client, tmp_path):
        images, texts, labels = write_stores(tmp_path)
        out = tmp_path / "scores.ndjson"
        resp = client.post("/v1/score", json={
            "images": str(images), "texts": str(texts), "labels": str(labels),
            "out": str(out)})
        assert resp.status_code == 200
        body = resp.json()
        assert body["records"] == 10
        assert not body["renormalized_inputs"]
        lines = out.read_text().splitlines()
        assert len(lines) == 10
        first = json.loads(lines[0])
        assert set(first["scores"]) == {
            "neg_max_prob", "sum_out_prob", "max_out_prob", "neg_max_in_prob",
            "max_logit_diff"}

    def test_missing_store_is_422(self, client, tmp_path):
        _, texts, labels = write_stores(tmp_path)
        resp = client.post("/v1/score", json={
            "images": str(tmp_path / "absent.oceb"), "texts": str(texts),
            "labels": str(labels), "out": str(tmp_path / "o.ndjson")})
        assert resp.status_code == 422
        assert resp.json()["error"]["category"] == "data"

    def test_empty_methods_is_400(self, client, tmp_path):
        images, texts, labels = write_stores(tmp_path)
        resp = client.post("/v1/score", json={
            "images": str(images), "texts": str(texts), "labels": str(labels),
            "methods": [], "out": str(tmp_path / "o.ndjson")})
        assert resp.status_code == 400

    def test_missing_class_embedding_is_422(self, client, tmp_path):
        images, texts, _ = write_stores(tmp_path)
        labels = tmp_path / "bad_labels.json"
        labels.write_text(json.dumps({
            "name": "x",
            "in": [{"name": "zebra", "prompts": [], "tier": "seen"}],
            "out": [{"name": "cat", "prompts": [], "tier": "seen"}]}))
        resp = client.post("/v1/score", json={
            "images": str(images), "texts": str(texts), "labels": str(labels),
            "out": str(tmp_path / "o.ndjson")})
        assert resp.status_code == 422
        assert "zebra" in resp.json()["error"]["message"]


class TestEvalEndpoint:
    def test_end_to_end(self, client, tmp_path):
        images, texts, labels = write_stores(tmp_path)
        scores_path = tmp_path / "scores.ndjson"
        client.post("/v1/score", json={
            "images": str(images), "texts": str(texts), "labels": str(labels),
            "out": str(scores_path)})
        report_path = tmp_path / "report.json"
        resp = client.post("/v1/eval", json={
            "scores": str(scores_path),
            "tasks": [{"name": "seen", "positive_split": "out",
                       "negative_split": "in", "method": "max_logit_diff"}],
            "out": str(report_path), "markdown": True})
        assert resp.status_code == 200
        body = resp.json()
        assert body["tasks"][0]["auroc"] == 1.0
        assert json.loads(report_path.read_text())["tasks"][0]["n_pos"] == 5
        assert (tmp_path / "report.md").exists()

    def test_unknown_split_is_422(self, client, tmp_path):
        images, texts, labels = write_stores(tmp_path)
        scores_path = tmp_path / "scores.ndjson"
        client.post("/v1/score", json={
            "images": str(images), "texts": str(texts), "labels": str(labels),
            "out": str(scores_path)})
        resp = client.post("/v1/eval", json={
            "scores": str(scores_path),
            "tasks": [{"name": "x", "positive_split": "nope",
                       "negative_split": "in", "method": "max_logit_diff"}],
            "out": str(tmp_path / "r.json")})
        assert resp.status_code == 422


class TestSynthAndMixture:
    def synth_config(self, tmp_path):
        cfg = {
            "dim": 16, "seed": 77,
            "box_corpus": {
                "in_classes": ["dog"],
                "out_classes": ["cat", "car"],
                "n_pure_in": 5, "n_pure_out": 5, "n_mixed": 5,
                "boxes_per_image": 3, "margin": 2.0,
            },
        }
        path = tmp_path / "synth.json"
        path.write_text(serialize.dumps(cfg))
        return path

    def test_synth_then_mixture(self, client, tmp_path):
        cfg_path = self.synth_config(tmp_path)
        out_dir = tmp_path / "corpus"
        resp = client.post("/v1/synth", json={
            "config": str(cfg_path), "out_dir": str(out_dir)})
        assert resp.status_code == 200
        written = resp.json()["written"]
        assert str(out_dir / "boxes.ndjson") in written
        assert str(out_dir / "truth.ndjson") in written
        assert str(out_dir / "labels.json") in written

        resp = client.post("/v1/mixture", json={
            "boxes": str(out_dir / "boxes.ndjson"),
            "labels": str(out_dir / "labels.json"),
            "method": "max_logit_diff",
            "out": str(tmp_path / "mix.ndjson"),
            "truth": str(out_dir / "truth.ndjson"),
            "report_out": str(tmp_path / "mix_report.json")})
        assert resp.status_code == 200
        body = resp.json()
        assert body["images"] == 15
        assert body["with_g"] == 15
        aurocs = {t["name"]: t["auroc"] for t in body["tasks"]}
        assert aurocs["mixed_vs_pure_in"] == 1.0
        assert aurocs["mixed_vs_pure_out"] == 1.0
        assert (tmp_path / "mix_report.json").exists()

    def test_bad_synth_config_is_400(self, client, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"dim": 1, "seed": 0, "classes": []}')
        resp = client.post("/v1/synth", json={
            "config": str(path), "out_dir": str(tmp_path / "d")})
        assert resp.status_code == 400


class TestValidateEndpoint:
    def test_ok(self, client):
        resp = client.post("/v1/labels/validate", json={"labels": {
            "name": "x", "in": [{"name": "dog"}], "out": [{"name": "cat"}]}})
        assert resp.status_code == 200
        assert resp.json() == {"ok": True, "violations": []}

    def test_overlap_reported_not_an_error(self, client):
        resp = client.post("/v1/labels/validate", json={"labels": {
            "name": "x", "in": [{"name": "dog"}], "out": [{"name": "dog"}]}})
        assert resp.status_code == 200
        body = resp.json()
        assert not body["ok"]
        assert len(body["violations"]) == 1
