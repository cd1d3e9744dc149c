"""Seedable random streams for offline datasets and online rewards.

Every trial owns a :class:`TrialRng`.  Streams are Philox (counter-based)
generators whose keys are derived from ``(master_seed, trial_index, tag,
arm)`` through :class:`numpy.random.SeedSequence`, so

* a trial's draws do not depend on which worker runs it or in what order;
* offline and online draws never share a stream, hence changing ``T_S``
  leaves the online rewards untouched;
* each arm has its own online stream: the j-th pull of arm i always sees
  the same noise, whatever policy chose it.  Comparing policies on one
  seed is therefore a common-random-numbers comparison.
"""

from __future__ import annotations

import numpy as np

from lucbh.core import Instance, OfflineSummary

_TAG_OFFLINE = 0
_TAG_ONLINE = 1
_TAG_MISC = 2

#: Online noise is drawn per arm in blocks of this many values.
BLOCK = 1024


class TrialRng:
    def __init__(self, master_seed: int, trial_index: int):
        if not 0 <= master_seed < 2**64:
            raise ValueError(f"master seed must be an unsigned 64-bit integer, got {master_seed}")
        if trial_index < 0:
            raise ValueError(f"trial index must be nonnegative, got {trial_index}")
        self.master_seed = int(master_seed)
        self.trial_index = int(trial_index)
        self._misc: np.random.Generator | None = None

    def __repr__(self) -> str:
        return f"TrialRng(master_seed={self.master_seed}, trial_index={self.trial_index})"

    def stream(self, *tags: int) -> np.random.Generator:
        """A fresh generator for the substream identified by ``tags``."""
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.trial_index, *tags))
        return np.random.Generator(np.random.Philox(seq))

    def offline(self, arm: int) -> np.random.Generator:
        return self.stream(_TAG_OFFLINE, arm)

    def online(self, arm: int) -> np.random.Generator:
        return self.stream(_TAG_ONLINE, arm)

    @property
    def misc(self) -> np.random.Generator:
        """General-purpose stream, disjoint from the offline and online ones."""
        if self._misc is None:
            self._misc = self.stream(_TAG_MISC)
        return self._misc


def draw_gaussian(rng: TrialRng, mean: float) -> float:
    """One draw from N(mean, 1) off the trial's general-purpose stream."""
    return mean + float(rng.misc.standard_normal())


def generate_offline(inst: Instance, rng: TrialRng) -> OfflineSummary:
    x_hat = []
    for arm in range(inst.k):
        count = inst.t_s[arm]
        if count == 0:
            x_hat.append(0.0)
            continue
        noise = rng.offline(arm).standard_normal(count)
        x_hat.append(float(inst.mu_off[arm] + noise.mean()))
    return OfflineSummary(t_s=inst.t_s, x_hat=tuple(x_hat))


class OnlineRewards:
    """Buffered per-arm N(mu_on[i], 1) reward streams for one trial.

    ``noise[i, pos[i]]`` is the next standard-normal value for arm ``i``.  The
    compiled policy loop reads these arrays directly and asks for a refill
    when an arm's row is used up.
    """

    def __init__(self, mu_on: tuple[float, ...], rng: TrialRng, block: int = BLOCK):
        self.mu_on = np.asarray(mu_on, dtype=np.float64)
        self._gens = [rng.online(arm) for arm in range(len(mu_on))]
        self.noise = np.empty((len(mu_on), block), dtype=np.float64)
        self.pos = np.zeros(len(mu_on), dtype=np.int64)
        for arm in range(len(mu_on)):
            self.refill(arm)

    def refill(self, arm: int) -> None:
        self._gens[arm].standard_normal(out=self.noise[arm])
        self.pos[arm] = 0

    def draw(self, arm: int) -> float:
        if self.pos[arm] == self.noise.shape[1]:
            self.refill(arm)
        z = self.noise[arm, self.pos[arm]]
        self.pos[arm] += 1
        return float(self.mu_on[arm] + z)
