import math

import pytest

import serconv


def test_convergent_and_divergent_runs():
    conv = serconv.run(family="hier-exp", bound="valid-scale", p=2, n_j=200, K=300, seed=1)
    assert conv["label"] == "convergent"
    assert conv["tail_mean"] >= 0.9
    assert len(conv["means"]) == 300

    div = serconv.run(family="rds", bound="nonparametric", c1=0.44, p=0.2, n_j=200, K=300, seed=1)
    assert div["label"] == "divergent"
    assert div["tail_mean"] <= 0.1


def test_run_is_reproducible():
    text = serconv.plan_text(family="dep-normal", bound="general", p=1.5, p2=1.5, n_j=500, K=40)
    assert serconv.run_plan(text)["partial_sums"] == serconv.run_plan(text)["partial_sums"]


def test_plan_text_round_trips():
    text = serconv.normalize_plan(serconv.plan_text(family="ss-exp", q=1.5, fresh_signs=True))
    assert serconv.normalize_plan(text) == text
    assert "family = ss-exp" in text


def test_oracle_labels():
    assert serconv.oracle(serconv.plan_text(family="hier-exp", p=1.0))[0] == "divergent"
    assert serconv.oracle(serconv.plan_text(family="rds", p=0.501))[0] == "convergent"


def test_posterior_closed_form():
    mean, var = serconv.beta_posterior(1, 1.0, 1)
    assert mean == pytest.approx(2 / 3)
    assert var == pytest.approx(1 / 18)
    traj = serconv.posterior_trajectory([True, False, True])
    alpha = sum(1 / j**2 for j in range(1, 4))
    a, b = alpha + 2, 3 + alpha - 2
    assert traj[-1][0] == pytest.approx(a / (a + b), abs=1e-12)


def test_classify_thresholds():
    assert serconv.classify([0.95] * 10)["label"] == "convergent"
    assert serconv.classify([0.5] * 10)["label"] == "inconclusive"


def test_envelope_rate():
    assert serconv.envelope_rate(10, 0.001) == pytest.approx(1.001**10, rel=1e-12)


def test_calibration_prefers_smallest_tie():
    r = serconv.calibrate_c1([2.5, 1.5, 2.0], [3.0], n_j=100, K=200)
    assert r["c1"] == 1.5
    assert r["agreement"] == 1.0


def test_sweep_and_transform():
    values = [15.0] * 9600
    rows = serconv.sweep(values, [15.0], [0.5, 1.0], n_j=240, K=40)
    assert [row[2] for row in rows] == ["convergent", "convergent"]
    x = serconv.transform([16.0], 11.0)
    assert x[0] == pytest.approx(math.log(math.log(16)) - math.log(math.log(11)))


def test_errors_surface_as_serconv_error():
    with pytest.raises(serconv.SerconvError):
        serconv.run_plan("colour = red\n")
    with pytest.raises(ValueError):
        serconv.run(family="rds", bound="general", a=0)
