import random

from iglc.formula import parse
from iglc.iglc_prover import Invalid, Valid, decide_iglc
from iglc.ha import (in_ha_fast_sigma1_logic, in_ha_sigma1_logic,
                     in_selfcompletion_fast_logic)
from iglc.tnnil import is_tnnil
from conftest import random_formula
from test_tnnil import restricted_random_formula


def test_ha_sigma1_examples():
    assert isinstance(in_ha_sigma1_logic(parse("p -> []p")), Valid)
    assert isinstance(in_ha_sigma1_logic(parse("[]([]p -> p) -> []p")), Valid)
    assert isinstance(in_ha_sigma1_logic(parse("[]p -> p")), Invalid)


def test_fast_examples():
    assert isinstance(in_ha_fast_sigma1_logic(parse("p -> []p")), Valid)
    assert isinstance(in_ha_fast_sigma1_logic(parse("[]p -> p")), Invalid)


def test_selfcompletion_examples():
    assert isinstance(in_selfcompletion_fast_logic(parse("p -> []p")), Valid)
    assert isinstance(in_selfcompletion_fast_logic(parse("[]p -> (q | (q -> p))")), Invalid)
    assert isinstance(in_selfcompletion_fast_logic(parse("[]([]p -> p) -> []p")), Valid)


def test_fast_and_ordinary_agree_sampled():
    rng = random.Random(22)
    for _ in range(150):
        f = restricted_random_formula(rng, 7)
        a = in_ha_sigma1_logic(f)
        b = in_ha_fast_sigma1_logic(f)
        assert type(a) is type(b)


def test_tnnil_conservativity_sampled():
    rng = random.Random(23)
    done = 0
    while done < 40:
        f = restricted_random_formula(rng, 7)
        if not is_tnnil(f):
            continue
        assert type(in_ha_sigma1_logic(f)) is type(decide_iglc(f))
        done += 1


def test_iglc_theorems_are_in_the_fast_selfcompletion_logic():
    rng = random.Random(24)
    hits = 0
    for _ in range(300):
        f = random_formula(rng, ("p", "q"), rng.randint(1, 6))
        if isinstance(decide_iglc(f), Valid):
            hits += 1
            assert isinstance(in_selfcompletion_fast_logic(f), Valid)
    assert hits > 5
