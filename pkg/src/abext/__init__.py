"""Abelian G-extensions of Q as characters of unit groups."""

from .asymptotics import (disc_prob_r, disc_prob_s, disc_prob_s1, empirical_disc_prob, is_pth_power_in_Ql,
                          leading_constant, pole_order, tail_enclosure)
from .counting import (CountingFunction, artin_counting, conductor_counting, counting_by_name,
                       discriminant_counting, fairness, radical_counting)
from .enumeration import EnumerationQuery, enumerate_characters, fast_count, frobenius_census
from .groups import FiniteAbelianGroup, parse_group
from .stats import conditional_probability, empirical_probability
from .units import INF, GlobalCharacter, LocalCharacter, LocalSpec, localize
from .viability import e_group, viability_exact, viability_search, viable_specs_at_2

__all__ = [
    "FiniteAbelianGroup", "parse_group", "CountingFunction", "conductor_counting", "radical_counting",
    "discriminant_counting", "artin_counting", "counting_by_name", "fairness", "EnumerationQuery",
    "enumerate_characters", "fast_count", "frobenius_census", "conditional_probability",
    "empirical_probability", "INF", "GlobalCharacter", "LocalCharacter", "LocalSpec", "localize",
    "e_group", "viability_exact", "viability_search", "viable_specs_at_2", "pole_order",
    "leading_constant", "is_pth_power_in_Ql", "tail_enclosure", "disc_prob_s", "disc_prob_r",
    "disc_prob_s1", "empirical_disc_prob",
]
