"""Smoke tests for the Python bindings: one happy path and one error path
per operation family, leaning on the heavyweight C++ suites for depth."""

import json

import pytest

import modalab


def test_decide_valid_and_countermodel_round_trip():
    valid = modalab.decide("<>[]p -> []<>p", "s4.2")
    assert valid["verdict"] == "Valid"

    refuted = modalab.decide("<>[]p -> []<>p", "s4")
    assert refuted["verdict"] == "Countermodel"
    model_json = json.dumps(refuted["model"])
    assert not modalab.model_check(model_json, refuted["world"], "<>[]p -> []<>p")


def test_decide_inconclusive_below_the_least_countermodel():
    assert modalab.decide("<>[]p -> []<>p", "s4", cap=2)["verdict"] == "Inconclusive"


def test_parse_errors_raise_value_error():
    with pytest.raises(ValueError):
        modalab.decide("(p", "s4")
    with pytest.raises(ValueError):
        modalab.canon("p ->")


def test_canonical_rendering():
    assert modalab.canon("((p))->(q)") == "p -> q"
    assert modalab.canon_fo("A x . (x in y)") == "A x . x in y"
    assert modalab.potentialist_translate("A x . E y . x in y") == "[]A x . <>E y . x in y"


def test_frame_reports():
    m = modalab.decide("<>[]p -> []<>p", "s4")["model"]
    mj = json.dumps(m)
    props = modalab.frame_properties(mj)
    assert props["reflexive"] and props["transitive"] and not props["directed"]
    assert modalab.frame_valid(mj, "[]p -> p")["holds"]
    assert not modalab.frame_valid(mj, "<>[]p -> []<>p")["holds"]


def test_switch_host_and_s5_witness():
    host = modalab.make_switch_model_json(2, 3)
    assert modalab.independent_switches(host, "l0_p0", ["s0", "s1"])["ok"]
    w = modalab.s5_witness(host, "l0_p0", ["s0", "s1"], "[](p | q) -> ([]p | []q)")
    assert set(w["substitution"]) == {"p", "q"}
    assert not modalab.model_check(host, w["world"], w["instance"])


def test_button_dial_host_and_s42_witness():
    host = modalab.make_button_dial_model_json(2, 3, 8)
    w = modalab.s42_witness(host, "l0_b0_d0", ["b0", "b1"], ["d0", "d1", "d2"], "<>[]p -> p")
    assert not modalab.model_check(host, w["world"], w["instance"])


def test_multiverse_pipeline():
    sys_json = modalab.make_toy_system_json(13, [2, 3], 3)
    assert modalab.account_check(sys_json)

    report = modalab.corollary_check(
        sys_json,
        ["E x . A y . ~ y in x", "A x . E y . x in y", modalab.button_sentence(2, 3)],
    )
    assert report["ok"] and report["sentences"] == 3

    atoms = {
        "b2": "button 2 3",
        "b3": "button 3 3",
        "d0": "height_mod 3 = 0",
        "d1": "height_mod 3 = 1",
        "d2": "height_mod 3 = 2",
    }
    mj = modalab.induce_model_json(sys_json, atoms)

    assert modalab.classify(mj, "T({},7)", "b2")["role"] == "button"
    scope = [f"T({s},{h})" for s in ["{}", "{2}", "{3}", "{2,3}"] for h in range(7, 11)]
    assert modalab.is_dial(mj, ["d0", "d1", "d2"], scope)["ok"]
    assert not modalab.is_dial(mj, ["d0", "d1", "d2"])["ok"]
    assert modalab.independent_buttons_dial(mj, ["b2", "b3"], ["d0", "d1", "d2"], scope)["ok"]

    probe = modalab.mp_check(mj, "T({},7)", ["b2"])
    assert not probe["ok"] and probe["instance"] == "<>[]b2 -> b2"

    fp = modalab.fingerprint(mj, ["b2", "d0"], depth=1)
    by_name = {s["name"]: s for s in fp["schemes"]}
    assert all(by_name[n]["all_valid"] for n in ["K", "Dual", "S", "4", ".2"])
    assert not by_name["5"]["all_valid"]


def test_eval_sentence_both_routes():
    sys_json = modalab.make_toy_system_json(13, [2, 3], 3)
    # The system has a top whose maximal sets never gain a container, so the
    # growth sentence fails both directly and along the modal route.
    growth = "A x . E y . x in y"
    assert not modalab.eval_sentence(sys_json, "T({},7)", growth)
    assert not modalab.eval_sentence(sys_json, "T({},7)",
                                     modalab.potentialist_translate(growth),
                                     potentialist=True)
    # A button sentence is false low in the system but true at the top; the
    # modal route evaluated at the bottom mirrors the top.
    btn = modalab.button_sentence(2, 3)
    assert not modalab.eval_sentence(sys_json, "T({},7)", btn)
    assert modalab.eval_sentence(sys_json, "T({2,3},13)", btn)
    assert modalab.eval_sentence(sys_json, "T({},7)",
                                 modalab.potentialist_translate(btn),
                                 potentialist=True)


def test_cap_error_is_typed():
    with pytest.raises(modalab.CapError):
        modalab.make_toy_system_json(40, [2], 2)
