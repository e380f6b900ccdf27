"""Counter-based random streams.

Every random draw in the package is a pure function of
``(seed, stream, counter)``: sample ``i`` of a Monte-Carlo loop uses the
generator at counter ``i``, so serial, chunked and parallel evaluation all
produce bit-identical statistics.  Philox is used because its output for a
given (key, counter) does not depend on how many values were drawn before.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1

# Multiplier/increment of the splitmix64 step, used to derive child streams.
_SPLIT_MULT = 6364136223846793005
_SPLIT_INC = 1442695040888963407


@dataclass(frozen=True)
class RngStream:
    """Immutable handle on a family of counter-indexed generators."""

    seed: int
    stream: int = 0

    def generator(self, counter: int = 0) -> np.random.Generator:
        """Generator positioned at `counter`; same arguments, same draws."""
        if counter < 0:
            raise ValueError("counter must be non-negative")
        key = np.array([self.seed & _MASK64, self.stream & _MASK64], dtype=np.uint64)
        ctr = np.array(
            [0, counter & _MASK64, (counter >> 64) & _MASK64, 0], dtype=np.uint64
        )
        return np.random.Generator(np.random.Philox(key=key, counter=ctr))

    def substream(self, index: int) -> "RngStream":
        """Derived independent stream (for distinct roles inside one task)."""
        mixed = (self.stream * _SPLIT_MULT + _SPLIT_INC + index) & _MASK64
        return RngStream(self.seed, mixed)
