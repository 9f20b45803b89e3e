"""Party generation and HP variation bounds."""

import pytest
from hypothesis import given, settings, strategies as st

from ntrl.sim.combat import Party, PartyMember
from ntrl.sim.rng import RngStream
from ntrl.training.partygen import (
    HP_THRESHOLDS,
    HpVariationConfig,
    apply_hp_variation,
    generate_party,
    party_digest,
)


def test_sizes_uniform_over_3_to_8(pack):
    rng = RngStream(1)
    counts = {n: 0 for n in range(3, 9)}
    n_draws = 60_000
    for _ in range(n_draws):
        counts[len(generate_party(pack, rng).members)] += 1
    expected = n_draws / 6
    for n, c in counts.items():
        assert abs(c - expected) < 5 * (n_draws * (1 / 6) * (5 / 6)) ** 0.5, (n, c)


def test_members_drawn_from_templates_with_repetition(pack):
    rng = RngStream(2)
    seen_repeat = False
    for _ in range(200):
        party = generate_party(pack, rng)
        ids = party.template_ids()
        assert all(t in pack.pc_templates for t in ids)
        if len(set(ids)) < len(ids):
            seen_repeat = True
    assert seen_repeat


def test_same_seed_same_party(pack):
    assert generate_party(pack, RngStream(42)).template_ids() == \
        generate_party(pack, RngStream(42)).template_ids()


def test_generated_parties_pass_invariants(pack):
    rng = RngStream(3)
    for _ in range(500):
        party = generate_party(pack, rng)   # Party.__post_init__ validates
        assert 3 <= len(party.members) <= 8


def test_identity_when_threshold_one_and_no_noise(pack):
    party = generate_party(pack, RngStream(5))
    cfg = HpVariationConfig(thresholds=(1.0,), noise=0.0)
    varied = apply_hp_variation(party, cfg, RngStream(6))
    assert varied.hp_list() == [m.base.hp_max for m in party.members]


def test_clamp_formula_hand_case(pack):
    # hp_max 40 at threshold 0.10 with noise forced to -0.05:
    # round(40 * 0.10 * 0.95) = round(3.8) = 4
    assert round(40 * 0.10 * 0.95) == 4

    class FixedRng(RngStream):
        def randint(self, lo, hi):
            return lo          # first threshold in the tuple

        def uniform(self):
            return 0.0         # u = -noise

    base = pack.pc_templates["fighter"]
    import dataclasses
    block = dataclasses.replace(base, hp_max=40)
    party = Party(tuple(PartyMember.fresh(block) for _ in range(3)))
    varied = apply_hp_variation(party, HpVariationConfig(thresholds=(0.10,)), FixedRng(0))
    assert varied.hp_list() == [4, 4, 4]


def test_bounds_over_10k_applications(pack):
    rng = RngStream(7)
    cfg = HpVariationConfig()
    for i in range(10_000 // 6):
        party = generate_party(pack, rng.split(f"p/{i}"))
        varied = apply_hp_variation(party, cfg, rng.split(f"v/{i}"))
        for member in varied.members:
            assert 1 <= member.hp_current <= member.base.hp_max


def test_threshold_set_membership_enforced():
    with pytest.raises(ValueError):
        HpVariationConfig(thresholds=(0.9,))
    assert HpVariationConfig(thresholds=HP_THRESHOLDS)


def test_hp_ratio_within_noise_band(pack):
    # hp/hp_max must sit within [threshold - noise, threshold + noise]
    # up to rounding and the 1-hp floor
    rng = RngStream(8)
    cfg = HpVariationConfig()
    for i in range(2000):
        party = generate_party(pack, rng.split(f"p/{i}"))
        varied = apply_hp_variation(party, cfg, rng.split(f"v/{i}"))
        ratios = [m.hp_current / m.base.hp_max for m in varied.members]
        candidates = [
            t for t in cfg.thresholds
            if all(t * 0.95 - 0.51 / m.base.hp_max <= r <= min(t * 1.05 + 0.51 / m.base.hp_max, 1.0)
                   or (m.hp_current == 1 and t * 1.05 * m.base.hp_max <= 1.51)
                   for r, m in zip(ratios, varied.members))
        ]
        assert candidates, f"no threshold explains ratios {ratios}"


def test_party_digest_distinguishes_hp(pack):
    party = generate_party(pack, RngStream(11))
    varied = apply_hp_variation(party, HpVariationConfig(thresholds=(0.5,)), RngStream(12))
    assert party_digest(party) != party_digest(varied)
    assert party_digest(party) == party_digest(generate_party(pack, RngStream(11)))
