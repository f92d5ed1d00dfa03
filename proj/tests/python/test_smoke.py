import math

import numpy as np
import pytest

import adaptube


def test_examples_listed():
    names = {(e["name"], e["n"]) for e in adaptube.list_examples()}
    assert ("heisenberg", 1) in names and ("sphere", 3) in names


def test_manifold_basics():
    M = adaptube.Manifold.example("heisenberg", 1)
    assert M.dim == 3
    assert np.allclose(M.reeb_field(np.zeros(3)), [0, 0, 1])
    assert M.contact_volume(np.zeros(3)) == pytest.approx(2.0)
    assert all(item["pass"] for item in M.validate(20).values())
    assert M.canonical_two_form_rank(np.zeros(3), 0.5) == 4


def test_spec_round_trip(tmp_path):
    M = adaptube.Manifold.example("sphere", 1)
    path = tmp_path / "s.json"
    path.write_text(M.to_json())
    R = adaptube.Manifold.load(str(path))
    assert R.to_json() == M.to_json()


def test_schema_error():
    with pytest.raises(adaptube.SchemaError, match="/coords"):
        adaptube.Manifold.from_json('{"dim_n": 1}')
    with pytest.raises(adaptube.SpecError):
        adaptube.Manifold.example("torus", 1)


def test_flows():
    M = adaptube.Manifold.example("sphere", 1)
    v = adaptube.reeb_flow(M, np.zeros(3), math.pi / 2)
    assert np.allclose(v, [1, 0, 0], atol=1e-9)
    q = M.embed(np.zeros(3))
    assert np.allclose(adaptube.sigma_flow(M, q, 0.3), math.exp(-0.3) * q, atol=1e-10)
    assert adaptube.holomorphy_residual(M, np.zeros(3), 0.2, 0.1) < 1e-8


def test_tube_residuals():
    M = adaptube.Manifold.example("sphere", 1)
    T = adaptube.Tube.closed_form(M, 0.3)
    x = np.array([0.2, -0.1, 0.3, 0.25])
    assert T.kind == "closed-form"
    assert T.ma_residual(x) < 1e-12
    assert T.nondegeneracy(x) == pytest.approx(-16 / (1 + 0.14) ** 3)
    assert T.lemma21_residual(x) < 1e-12
    assert T.nijenhuis_residual(x) < 1e-10
    assert np.allclose(T.J(x) @ T.J(x), -np.eye(4))
    C = T.non_integrable_control()
    assert C.nijenhuis_residual(x) > 1e-2


def test_flow_tube_and_failure():
    M = adaptube.Manifold.example("heisenberg", 1)
    A = adaptube.Tube.closed_form(M)
    B = adaptube.Tube.by_flow(M)
    g, J = A.compare(B, [np.array([0.1, 0.2, -0.3, s]) for s in (-0.2, 0.0, 0.2)])
    assert g < 1e-9 and J < 1e-8
    text = M.to_json()
    # corrupt the Reeb extension: (0, 0, 1, 0) -> (0, 0, u4, 0)
    start = text.index('"reeb_extension"')
    corrupted = text[:start] + text[start:].replace('"1"', '"u4"', 1)
    assert corrupted != text
    with pytest.raises(adaptube.HolomorphyFailure):
        adaptube.Tube.by_flow(adaptube.Manifold.from_json(corrupted))


def test_verify_report():
    r = adaptube.verify("heisenberg", samples=50, include_timing=False)
    assert r["overall_pass"]
    assert [c["name"] for c in r["checks"]] == adaptube.check_names()
    again = adaptube.verify_json("heisenberg", samples=50, include_timing=False)
    assert adaptube.verify_json("heisenberg", samples=50, include_timing=False) == again
