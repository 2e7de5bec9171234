import numpy as np
import pytest
from fastapi.testclient import TestClient

from fairhpo import storage
from fairhpo.cli import main
from fairhpo.selection import WeightVector, scalarized_select
from fairhpo.webapi import create_app

RUN = "api--mao--seed0"
BIO_RUN = "api--bio-ddsp--seed0"


@pytest.fixture(scope="module")
def client(tmp_path_factory):
    root = tmp_path_factory.mktemp("apistore")
    code = main(["--data-dir", str(root), "run",
                 "--dataset", "german", "--dataset-m", "160",
                 "--learner", "rf", "--name", "api",
                 "--k", "2", "--pop", "6", "--max-evals", "12",
                 "--seeds", "0", "--suite"])
    assert code == 0
    app = create_app(root)
    return TestClient(app), root


def test_list_runs(client):
    c, _ = client
    body = c.get("/runs").json()
    ids = {r["run_id"] for r in body["runs"]}
    assert RUN in ids and BIO_RUN in ids
    assert all(r["n_evals"] == 12 for r in body["runs"])


def test_archive_paging(client):
    c, _ = client
    page = c.get(f"/runs/{RUN}/archive", params={"offset": 4, "limit": 5}).json()
    assert page["total"] == 12
    assert [r["eval_id"] for r in page["records"]] == [4, 5, 6, 7, 8]
    assert c.get("/runs/nope/archive").status_code == 404


def test_front_endpoint_validation_and_content(client):
    c, _ = client
    assert c.get(f"/runs/{RUN}/front",
                 params={"objectives": "f1_obj"}).status_code == 400
    assert c.get(f"/runs/{RUN}/front",
                 params={"objectives": "f1_obj,bogus"}).status_code == 422
    body = c.get(f"/runs/{RUN}/front",
                 params={"objectives": "f1_obj,ddsp"}).json()
    pts = np.array([p["objectives"] for p in body["points"]])
    # mutually non-dominated in the projected plane
    for i in range(len(pts)):
        for j in range(len(pts)):
            if i != j:
                assert not (np.all(pts[i] <= pts[j]) and np.any(pts[i] < pts[j]))


def test_ternary_endpoint(client):
    c, _ = client
    r = c.get(f"/runs/{RUN}/ternary",
              params={"objectives": "f1_obj,ddsp,invd"})
    assert r.status_code == 200
    pts = r.json()["points"]
    assert len(pts) == 12
    assert all(0 <= p["x"] <= 1 and 0 <= p["y"] <= 0.87 for p in pts)
    assert c.get(f"/runs/{RUN}/ternary",
                 params={"objectives": "f1_obj,ddsp"}).status_code == 400


def test_contrast_endpoint(client):
    c, _ = client
    body = c.get("/collections/api/contrast").json()
    m = body["matrices"][0]
    mat = np.array(m["matrix"])
    assert mat.shape == (4, 4)
    assert np.all(np.diag(mat) == 0.0)
    assert c.get("/collections/ghost/contrast").status_code == 404


def test_behavior_endpoint(client):
    c, _ = client
    r = c.get(f"/runs/{BIO_RUN}/behavior/0")
    assert r.status_code == 200
    body = r.json()
    assert body["m"] == 160
    assert "acceptance_rates" in body
    assert c.get(f"/runs/{BIO_RUN}/behavior/9999").status_code == 404


def test_select_endpoint_matches_library_and_cli(client):
    c, root = client
    weights = {"f1_obj": 1.0}
    r = c.post(f"/runs/{RUN}/select", json={"weights": weights})
    assert r.status_code == 200
    body = r.json()
    run = storage.load_run(root, RUN)
    lib = scalarized_select(run.front_view(), WeightVector.from_dict(weights))
    assert body["eval_id"] == lib.eval_id
    # w = <1, 0, ...> reduces to the minimum-f1_obj front member
    fv = run.front_view()
    f0 = fv.values[:, fv.metric_ids.index("f1_obj")]
    assert body["eval_id"] in [fv.eval_ids[i]
                               for i in np.flatnonzero(f0 == f0.min())]


def test_select_error_codes(client):
    c, _ = client
    assert c.post(f"/runs/{RUN}/select", json={"weights": {}}).status_code == 400
    assert c.post(f"/runs/{RUN}/select",
                  json={"weights": {"bogus": 1.0}}).status_code == 422
    assert c.post(f"/runs/{RUN}/select",
                  json={"weights": {"ddsp": -1.0}}).status_code == 400
    assert c.post("/runs/nope/select",
                  json={"weights": {"f1_obj": 1.0}}).status_code == 404
    assert c.post(f"/runs/{RUN}/select",
                  content=b"not json").status_code == 400


def test_select_is_stateless_and_repeatable(client):
    c, _ = client
    w = {"f1_obj": 0.5, "ddsp": 0.2, "invd": 0.3}
    r1 = c.post(f"/runs/{RUN}/select", json={"weights": w}).json()
    r2 = c.post(f"/runs/{RUN}/select", json={"weights": w}).json()
    assert r1 == r2
