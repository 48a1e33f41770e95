"""Finite Kripke-frame laboratory.

Thin wrapper over the C++ core. Models and world systems travel as JSON
strings in the same formats the command-line tool reads and writes; report
shapes match the CLI's stdout documents.
"""

import json as _json

from modalab._core import (
    CapError,
    account_check,
    button_sentence,
    canon,
    canon_fo,
    eval_sentence,
    make_button_dial_model_json,
    make_switch_model_json,
    make_toy_system_json,
    model_check,
    potentialist_translate,
)
from modalab import _core

__all__ = [
    "CapError",
    "account_check",
    "button_sentence",
    "canon",
    "canon_fo",
    "classify",
    "corollary_check",
    "decide",
    "eval_sentence",
    "fingerprint",
    "frame_properties",
    "frame_valid",
    "independent_buttons_dial",
    "independent_switches",
    "induce_model_json",
    "is_dial",
    "make_button_dial_model_json",
    "make_switch_model_json",
    "make_toy_system_json",
    "model_check",
    "mp_check",
    "potentialist_translate",
    "s42_witness",
    "s5_witness",
    "valid_on_model",
]

__version__ = "0.1.0"


def decide(formula, theory, cap=12):
    """Decide a formula over a theory's frame class.

    Returns a dict with a "verdict" of "Valid", "Countermodel" (including the
    failing world and the model as a dict), or "Inconclusive".
    """
    return _json.loads(_core.decide_json(formula, theory, cap))


def valid_on_model(model_json, formula):
    return _json.loads(_core.valid_on_model_json(model_json, formula))


def frame_valid(model_json, formula, atom_cap=4):
    return _json.loads(_core.frame_valid_json(model_json, formula, atom_cap))


def frame_properties(model_json):
    return _json.loads(_core.frame_properties_json(model_json))


def classify(model_json, world, statement):
    return _json.loads(_core.classify_json(model_json, world, statement))


def is_dial(model_json, values, scope=()):
    return _json.loads(_core.is_dial_json(model_json, list(values), list(scope)))


def independent_switches(model_json, world, switches):
    return _json.loads(_core.independent_switches_json(model_json, world, list(switches)))


def independent_buttons_dial(model_json, buttons, dial_values, scope=()):
    return _json.loads(
        _core.independent_buttons_dial_json(
            model_json, list(buttons), list(dial_values), list(scope)
        )
    )


def s5_witness(model_json, world, switches, formula):
    return _json.loads(_core.s5_witness_json(model_json, world, list(switches), formula))


def s42_witness(model_json, world, buttons, dial_values, formula, scope=()):
    return _json.loads(
        _core.s42_witness_json(
            model_json, world, list(buttons), list(dial_values), list(scope), formula
        )
    )


def mp_check(model_json, world, pool, depth=2):
    return _json.loads(_core.mp_check_json(model_json, world, list(pool), depth))


def fingerprint(model_json, pool, depth=2, max_pool=4096):
    return _json.loads(_core.fingerprint_json(model_json, list(pool), depth, max_pool))


def corollary_check(system_json, sentences):
    return _json.loads(_core.corollary_check_json(system_json, list(sentences)))


def induce_model_json(system_json, atoms):
    return _core.induce_model_json(system_json, dict(atoms))
