"""Dice expressions in NdM+K form and seeded rolling."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ntrl.sim.rng import RngStream

_DICE_RE = re.compile(r"^\s*(?:(\d*)d(\d+)\s*([+-]\s*\d+)?|([+-]?\d+))\s*$")


class DiceParseError(ValueError):
    pass


@dataclass(frozen=True)
class DiceExpr:
    """NdM+K. Any of the three parts may be absent ("2d6", "d20", "3")."""

    n: int
    sides: int
    bonus: int

    @property
    def min(self) -> int:
        return self.n + self.bonus

    @property
    def max(self) -> int:
        return self.n * self.sides + self.bonus

    @property
    def mean(self) -> float:
        return self.n * (self.sides + 1) / 2 + self.bonus

    def __str__(self) -> str:
        if self.n == 0:
            return str(self.bonus)
        s = f"{self.n}d{self.sides}"
        if self.bonus > 0:
            s += f"+{self.bonus}"
        elif self.bonus < 0:
            s += str(self.bonus)
        return s


def parse_dice(expr: str) -> DiceExpr:
    """Parse "2d6+3", "d20", "1d8-1" or a bare integer.

    Raises DiceParseError on anything else; content loading validates with
    this so simulation never sees a bad expression.
    """
    m = _DICE_RE.match(expr)
    if not m:
        raise DiceParseError(f"bad dice expression: {expr!r}")
    n_s, sides_s, bonus_s, flat_s = m.groups()
    if flat_s is not None:
        return DiceExpr(0, 1, int(flat_s))
    n = int(n_s) if n_s else 1
    sides = int(sides_s)
    if n < 1 or sides < 1:
        raise DiceParseError(f"bad dice expression: {expr!r}")
    bonus = int(bonus_s.replace(" ", "")) if bonus_s else 0
    return DiceExpr(n, sides, bonus)


def roll(rng: RngStream, expr: DiceExpr) -> int:
    """Roll the expression; result is in [expr.min, expr.max]."""
    total = expr.bonus
    for _ in range(expr.n):
        total += rng.randint(1, expr.sides)
    return total


def roll_dice_only(rng: RngStream, expr: DiceExpr) -> int:
    """Roll only the dice part, no flat bonus (crit extra damage)."""
    total = 0
    for _ in range(expr.n):
        total += rng.randint(1, expr.sides)
    return total
