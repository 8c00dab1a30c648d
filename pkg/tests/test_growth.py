import itertools
import json

import numpy as np
import pytest

import props
from selfsim import (
    MealyMachine,
    activity_direct,
    activity_recursive,
    are_equal,
    ball_sizes,
    catalog,
    classify_activity,
)
from selfsim.growth import GROWTH_DISCLAIMER, REFERENCE_ALPHA, ActivityError, fit_growth, spectral_radius


def brute_ball_sizes(m, gens, n_max):
    """Distinct elements among all products of at most n generators, by pairwise equality."""
    reps = []
    sizes = []
    for n in range(n_max + 1):
        for combo in itertools.product(gens, repeat=n):
            w = m.identity
            for g in combo:
                w = w * g
            if not any(are_equal(w, r) for r in reps):
                reps.append(w)
        sizes.append(len(reps))
    return sizes


def test_ball_sizes_match_brute_force_G(G):
    gens = catalog.load("G").generators
    assert brute_ball_sizes(G, gens, 4) == [1, 4, 8, 14, 22]
    assert ball_sizes(G, gens, 4).sizes == [1, 4, 8, 14, 22]


def test_ball_sizes_match_brute_force_grigorchuk(grig):
    gens = catalog.load("grigorchuk").generators
    assert ball_sizes(grig, gens, 4).sizes == brute_ball_sizes(grig, gens, 4) == [1, 5, 11, 23, 40]


def test_ball_regression(G, grig):
    assert ball_sizes(G, catalog.load("G").generators, 12).sizes == [1, 4, 8, 14, 22, 34, 50, 74, 106, 154, 218, 314, 442]
    assert ball_sizes(grig, catalog.load("grigorchuk").generators, 10).sizes == [1, 5, 11, 23, 40, 68, 108, 176, 271, 427, 643]


def test_first_collision_at_radius_16(G):
    # up to radius 15 the ball is the free product Z/2 * Z/3; the sphere of radius 16 loses two words
    rep = ball_sizes(G, catalog.load("G").generators, 16)
    assert rep.sphere_sizes[15] == 384 and rep.sphere_sizes[16] == 510


@pytest.mark.parametrize("name", catalog.NAMES)
def test_monotone_and_submultiplicative(name):
    e = catalog.load(name)
    s = ball_sizes(e.machine, e.generators, 9).sizes
    assert all(x <= y for x, y in zip(s, s[1:]))
    assert all(s[n + k] <= s[n] * s[k] for n in range(len(s)) for k in range(len(s) - n))


@pytest.mark.parametrize("name, n", [("G", 18), ("grigorchuk", 9), ("H", 10)])
def test_dedup_stability(name, n):
    e = catalog.load(name)
    ok, detail = props.dedup_stability(e.machine, e.generators, n)
    assert ok, detail


def test_generators_must_be_closed_under_inversion(G):
    with pytest.raises(ValueError):
        ball_sizes(G, [G.word("a"), G.word("b")], 3)
    assert ball_sizes(G, [G.word("a"), G.word("b"), G.word("b b")], 3).sizes == [1, 4, 8, 14]


def test_growth_report_outputs(G):
    rep = ball_sizes(G, catalog.load("G").generators, 8)
    lines = rep.to_csv().splitlines()
    assert lines[0] == "n,ball_size" and len(lines) == 10 and lines[-1] == "8,106"
    doc = rep.to_json()
    json.dumps(doc)
    assert doc["sizes"] == rep.sizes
    assert doc["fit"]["disclaimer"] == GROWTH_DISCLAIMER
    assert doc["fit"]["reference_alpha"] == pytest.approx(REFERENCE_ALPHA)


def test_reference_alpha():
    assert REFERENCE_ALPHA == pytest.approx(np.log(8) / (np.log(8) - np.log(7 / 8)))
    assert REFERENCE_ALPHA == pytest.approx(0.9396, abs=1e-4)


def test_fit_recovers_a_stretched_exponential():
    sizes = [int(round(np.exp(2.0 * n**0.5))) for n in range(40)]
    fit = fit_growth(sizes)
    assert fit["alpha_lsq"] == pytest.approx(0.5, abs=0.05)


# --- activity ---------------------------------------------------------------------


@pytest.mark.parametrize("name", catalog.NAMES)
def test_direct_equals_recursive(name):
    m = catalog.load(name).machine
    max_level = 6 if m.d == 2 else 4
    for state in m.names:
        w = m.gen(state)
        for lv in range(1, max_level + 1):
            assert activity_direct(w, lv) == activity_recursive(w, lv), (state, lv)


def test_direct_equals_recursive_level_6_G(G):
    for text in ("a", "b", "ab", "abab-1a"):
        w = G.word(text)
        assert [activity_direct(w, lv) for lv in range(1, 7)] == [activity_recursive(w, lv) for lv in range(1, 7)]


def test_activity_values(G):
    assert [activity_recursive(G.word("b"), lv) for lv in range(1, 21)] == [2**lv for lv in range(1, 21)]
    assert all(activity_recursive(G.word("a"), lv) == 1 for lv in range(1, 31))
    assert [activity_recursive(G.word("ab"), lv) for lv in range(1, 11)] == [3, 5, 9, 17, 33, 65, 129, 257, 513, 1025]
    assert activity_recursive(G.identity, 5) == 0


def test_activity_limits(G):
    with pytest.raises(ActivityError):
        activity_direct(G.word("b"), 7)
    with pytest.raises(ActivityError):
        activity_recursive(G.word("b"), 61)


def test_classify_examples(G, H, grig, grig_exp):
    b = classify_activity(G, "b")
    assert b.classification == "exponential" and b.rate == pytest.approx(2, abs=1e-6)
    assert classify_activity(G, "a").classification == "bounded"
    assert classify_activity(H, "b'").classification == "bounded"
    for s in grig.names:
        assert classify_activity(grig, s).classification == "bounded"
    ae = classify_activity(grig_exp, "a'")
    assert ae.classification == "exponential" and ae.rate == pytest.approx(2, abs=1e-6)
    assert ae.values == [2**k for k in range(1, 11)]


def test_classify_polynomial():
    # s is the binary adding machine (bounded); t = <t, s> has linear activity
    m = MealyMachine.from_dict(
        {
            "alphabet": 2,
            "states": [
                {"name": "s", "perm": "(12)", "transitions": ["id", "s"]},
                {"name": "t", "perm": "()", "transitions": ["t", "s"]},
            ],
        }
    )
    prof = classify_activity(m, "t")
    assert prof.classification == "polynomial" and prof.degree == 1
    assert prof.values == list(range(2, 12))
    assert prof.to_csv().splitlines()[:3] == ["level,count", "1,2", "2,3"]


def test_spectral_radius_against_eigenvalues():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(1, 6))
        a = rng.integers(0, 3, size=(n, n)).astype(float) + np.eye(n, k=1) + np.eye(n, k=-(n - 1))
        expected = max(abs(np.linalg.eigvals(a)))
        assert spectral_radius(a) == pytest.approx(expected, rel=1e-8)
