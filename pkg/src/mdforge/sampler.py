"""Hash-keyed deterministic sampling of structural specs.

Every draw is a pure function of (seed_index, variant_index, draw_counter,
field_tag), so fields never depend on the order in which they are drawn and
results are bit-identical in any language that implements the same mixing.
"""

from __future__ import annotations

from typing import NamedTuple

from .errors import ContractViolation
from .model import BLOCK_ROTATION, VALIDATOR_VERSION, BlockType, StructuralSpec

MASK64 = (1 << 64) - 1

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_MUL_1 = 0xBF58476D1CE4E5B9
MIX_MUL_2 = 0x94D049BB133111EB

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3

# One tag per sampled quantity. "wrap" is reserved: wrap width is fixed per
# level in sampler version 1 and consumes no draw.
FIELD_TAGS: tuple[str, ...] = ("sections", "depth", "items", "quotes", "wrap", "split", "difficulty")


class DrawKey(NamedTuple):
    seed_index: int
    variant_index: int
    draw_counter: int
    field_tag: str


def fnv1a64(tag: str) -> int:
    h = FNV_OFFSET
    for byte in tag.encode("ascii"):
        h ^= byte
        h = (h * FNV_PRIME) & MASK64
    return h


def rotl64(x: int, r: int) -> int:
    x &= MASK64
    return ((x << r) | (x >> (64 - r))) & MASK64


def mix64(z: int) -> int:
    """SplitMix64 finalizer."""
    z &= MASK64
    z ^= z >> 30
    z = (z * MIX_MUL_1) & MASK64
    z ^= z >> 27
    z = (z * MIX_MUL_2) & MASK64
    z ^= z >> 31
    return z


def draw64(key: DrawKey) -> int:
    seed_index, variant_index, counter, tag = key
    state = (seed_index * GOLDEN_GAMMA) & MASK64
    state ^= rotl64(variant_index * MIX_MUL_1, 17)
    state ^= counter & MASK64
    state ^= fnv1a64(tag)
    return mix64(state)


def draw_range(key: DrawKey, lo: int, hi: int) -> int:
    if lo > hi:
        raise ContractViolation(f"empty range [{lo}, {hi}]")
    return lo + draw64(key) % (hi - lo + 1)


# Sampler version 1 parameters, indexed by difficulty level.
SECTION_RANGES = {1: (3, 5), 2: (4, 6), 3: (5, 7)}
DEPTH_RANGES = {1: (1, 2), 2: (2, 3), 3: (3, 4)}
ITEM_RANGES = {1: (2, 4), 2: (3, 6), 3: (4, 8)}
QUOTE_RANGES = {1: (0, 2), 2: (1, 3), 3: (2, 4)}
WRAP_WIDTHS = {1: None, 2: 100, 3: 80}
ALLOWED_BLOCKS = {
    1: frozenset({BlockType.BULLET_LIST, BlockType.BLOCKQUOTE}),
    2: frozenset({BlockType.BULLET_LIST, BlockType.BLOCKQUOTE, BlockType.TABLE, BlockType.ORDERED_LIST}),
    3: frozenset(BLOCK_ROTATION),
}


def sample_spec(seed_index: int, variant_index: int, difficulty: int) -> StructuralSpec:
    if difficulty not in SECTION_RANGES:
        raise ContractViolation(f"difficulty must be 1, 2 or 3, got {difficulty}")

    def draw(tag: str, bounds: tuple[int, int]) -> int:
        return draw_range(DrawKey(seed_index, variant_index, 0, tag), *bounds)

    return StructuralSpec(
        seed_index=seed_index,
        variant_index=variant_index,
        difficulty=difficulty,
        section_count=draw("sections", SECTION_RANGES[difficulty]),
        max_list_depth=draw("depth", DEPTH_RANGES[difficulty]),
        list_item_count=draw("items", ITEM_RANGES[difficulty]),
        blockquote_count=draw("quotes", QUOTE_RANGES[difficulty]),
        allowed_blocks=ALLOWED_BLOCKS[difficulty],
        wrap_width=WRAP_WIDTHS[difficulty],
        validator_version=VALIDATOR_VERSION,
    )


def pick_difficulty(seed_index: int, variant_index: int, mix: tuple[float, float, float]) -> int:
    """Deterministically assign a difficulty level according to mix weights."""
    if len(mix) != 3 or any(w < 0 for w in mix) or sum(mix) <= 0:
        raise ContractViolation(f"difficulty mix needs three non-negative weights, got {mix}")
    ticket = draw64(DrawKey(seed_index, variant_index, 0, "difficulty")) % 10000
    total = float(sum(mix))
    cumulative = 0.0
    for level, weight in enumerate(mix, start=1):
        cumulative += weight
        if ticket < round(10000 * cumulative / total):
            return level
    return max(level for level, w in enumerate(mix, start=1) if w > 0)


def is_test_split(seed_index: int, variant_index: int, train_fraction: float) -> bool:
    if not 0.0 < train_fraction < 1.0:
        raise ContractViolation(f"train_fraction must be in (0, 1), got {train_fraction}")
    ticket = draw64(DrawKey(seed_index, variant_index, 0, "split")) % 10000
    return ticket < round(10000 * (1.0 - train_fraction))
