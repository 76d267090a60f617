"""Named random sub-streams derived from a single root seed."""

import numpy as np

STREAMS = {"scene": 0, "radar": 1, "fusion": 2, "mission": 3}


def substream(seed, name, *extra):
    """Return a Generator for stream `name` under root `seed`.

    Extra integers further key the stream (e.g. a trial or tree index), so
    that independent lanes never share state.
    """
    if name not in STREAMS:
        raise KeyError(f"unknown random stream {name!r}")
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF, STREAMS[name], *(int(e) for e in extra)]
    return np.random.default_rng(np.random.SeedSequence(key))
