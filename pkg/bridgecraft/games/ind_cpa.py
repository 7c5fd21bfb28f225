"""IND-CPA experiments: the one- and two-challenge games, bridge games and knowledge games.

Each trial draws its keys, its adversary coins and its challenge coins from
three separate streams derived from the game seed, so two games run on the
same seed see the same keys and the same challenge randomness.
"""

import copy
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Optional, Tuple

from bridgecraft.bridges.base import Bridge, BridgePublicKey, graph_scheme
from bridgecraft.errors import AdversaryError, ParameterError
from bridgecraft.schemes.base import EncryptionScheme, KeyPair, KnowledgeWrapped
from bridgecraft.utils.findist import HOEFFDING_LOG_TERM, GameReport, count_ones
from bridgecraft.utils.streams import Rng, derive_rng, derive_seed, run_trials

logger = logging.getLogger("bridgecraft.games.ind_cpa")

MIN_TRIALS = 100


class Adversary(ABC):
    """A left-right adversary.

    ``choose`` sees the security level and either the public key or, against a
    symmetric scheme, an ``EncryptionOracle``. The same object then receives the
    challenge in ``guess``; state kept between the two calls is fine because the
    harness clones the adversary for every trial.
    """

    name: str = "adversary"

    @abstractmethod
    def choose(self, level: int, pk: Any, rng: Rng) -> Tuple[Any, Any]:
        pass

    @abstractmethod
    def guess(self, challenge: Any, rng: Rng) -> int:
        pass

    def clone(self, trial_seed: Optional[int] = None) -> "Adversary":
        """A private copy for one trial; ``trial_seed`` is an opaque per-trial value for its own coins."""
        player = copy.deepcopy(self)
        if trial_seed is not None:
            player.reseed(trial_seed)
        return player

    def reseed(self, trial_seed: int) -> None:
        """Hook for adversaries holding private random coins; the default keeps none."""


class EncryptionOracle:
    """Encryption under a hidden key, plus whatever public data the scheme reveals."""

    def __init__(self, scheme: EncryptionScheme, pk: Any, rng: Rng):
        self._scheme = scheme
        self._pk = pk
        self._rng = rng
        self.queries = 0
        self.public_info = scheme.public_info(pk)

    def __call__(self, m: Any) -> Any:
        if not self._scheme.plaintext_space.contains(m):
            raise AdversaryError(f"oracle query {m!r} is not a plaintext of {self._scheme.name}")
        self.queries += 1
        return self._scheme.enc(self._pk, m, self._rng)


def _check_messages(scheme: EncryptionScheme, m0: Any, m1: Any) -> None:
    space = scheme.plaintext_space
    for m in (m0, m1):
        if not space.contains(m):
            raise AdversaryError(f"challenge message {m!r} is not a plaintext of {scheme.name}")
    if m0 == m1:
        raise AdversaryError(f"challenge messages must differ, both are {m0!r}")


def _check_guess(guess: Any) -> int:
    if isinstance(guess, bool) or guess not in (0, 1):
        raise AdversaryError(f"adversary guessed {guess!r}, expected 0 or 1")
    return int(guess)


def _experiment(
    scheme: EncryptionScheme,
    adv: Adversary,
    trials: int,
    rng: Rng,
    challenges: int,
    fixed_key: bool,
    jobs: int,
    label: str,
) -> GameReport:
    if trials < MIN_TRIALS:
        raise ParameterError(f"a game needs at least {MIN_TRIALS} trials, got {trials}")
    half = trials // 2
    seed = rng.getrandbits(64)
    shared: Optional[KeyPair] = scheme.keygen(derive_rng(seed, "keygen")) if fixed_key else None
    if fixed_key:
        logger.warning(f"{label}: running with one key for all trials (non-standard experiment)")

    def experiment(b: int) -> Callable[[int, Rng], int]:
        def trial(i: int, _trial_rng: Rng) -> int:
            keys = shared or scheme.keygen(derive_rng(seed, "keygen", b, i))
            adv_rng = derive_rng(seed, "adversary", b, i)
            challenge_rng = derive_rng(seed, "challenge", b, i)
            player = adv.clone(derive_seed(seed, "coins", b, i))

            if scheme.symmetric:
                handle = EncryptionOracle(scheme, keys.pk, derive_rng(seed, "oracle", b, i))
            else:
                handle = keys.pk
            m0, m1 = player.choose(scheme.level, handle, adv_rng)
            _check_messages(scheme, m0, m1)

            m = m1 if b else m0
            cts = tuple(scheme.enc(keys.pk, m, challenge_rng) for _ in range(challenges))
            challenge = cts[0] if challenges == 1 else cts
            return _check_guess(player.guess(challenge, adv_rng))

        return trial

    outputs0 = run_trials(experiment(0), half, seed, f"{label}/0", jobs)
    outputs1 = run_trials(experiment(1), half, seed, f"{label}/1", jobs)
    report = GameReport(
        half,
        count_ones(outputs0),
        count_ones(outputs1),
        seed,
        label,
        extra={"scheme": scheme.name, "adversary": adv.name, "fixed_key": fixed_key},
        outcomes=(tuple(outputs0), tuple(outputs1)),
    )
    logger.info(
        f"{label} on {scheme.name} vs {adv.name}: advantage {report.advantage:.4f} "
        f"+/- {report.half_width:.4f} ({half} runs per side)"
    )
    return report


def run_ind_cpa(
    scheme: EncryptionScheme,
    adv: Adversary,
    trials: int,
    rng: Rng,
    fixed_key: bool = False,
    jobs: int = 1,
) -> GameReport:
    """Run Exp_0 and Exp_1 ``trials // 2`` times each.

    Keys are fresh in every trial unless ``fixed_key`` is set.
    """
    return _experiment(scheme, adv, trials, rng, 1, fixed_key, jobs, "ind-cpa")


def run_2ind_cpa(
    scheme: EncryptionScheme,
    adv: Adversary,
    trials: int,
    rng: Rng,
    fixed_key: bool = False,
    jobs: int = 1,
) -> GameReport:
    """Like ``run_ind_cpa`` but the challenge is a pair of independent encryptions of m_b."""
    return _experiment(scheme, adv, trials, rng, 2, fixed_key, jobs, "2ind-cpa")


def run_bridge_game(
    bridge: Bridge,
    adv: Adversary,
    trials: int,
    rng: Rng,
    fixed_key: bool = False,
    jobs: int = 1,
) -> GameReport:
    """IND-CPA of a bridge, i.e. of its graph scheme."""
    return run_ind_cpa(graph_scheme(bridge), adv, trials, rng, fixed_key=fixed_key, jobs=jobs)


def bridge_knowledge(bridge: Bridge) -> Callable[[Any, Any, Rng], BridgePublicKey]:
    """The public part of stages two and three of the bridge key generation.

    Appending it to the source scheme gives the scheme whose two-challenge game
    is equivalent to the bridge game.
    """

    def knowledge(sk1: Any, pk1: Any, rng: Rng) -> BridgePublicKey:
        material = bridge.extend_keys(sk1, pk1, rng)
        return BridgePublicKey(None, material.pk2, material.bk)

    return knowledge


def run_knowledge_game(
    scheme: EncryptionScheme,
    knowledge: Callable[[Any, Any, Rng], Any],
    adv: Adversary,
    trials: int,
    rng: Rng,
    two_challenge: bool = False,
    fixed_key: bool = False,
    jobs: int = 1,
) -> GameReport:
    wrapped = KnowledgeWrapped(scheme, knowledge)
    if two_challenge:
        return run_2ind_cpa(wrapped, adv, trials, rng, fixed_key=fixed_key, jobs=jobs)
    return run_ind_cpa(wrapped, adv, trials, rng, fixed_key=fixed_key, jobs=jobs)


@dataclass(frozen=True)
class KnowledgeGap:
    with_knowledge: GameReport
    without_knowledge: GameReport

    @property
    def gap(self) -> float:
        return self.with_knowledge.advantage - self.without_knowledge.advantage

    @property
    def bound(self) -> float:
        # union of the two 95% bands, each at 97.5%
        t0 = self.with_knowledge.trials
        t1 = self.without_knowledge.trials
        term = HOEFFDING_LOG_TERM + math.log(2)
        return math.sqrt(term / t0) + math.sqrt(term / t1)

    @property
    def negligible(self) -> bool:
        return self.gap <= self.bound

    def to_dict(self) -> dict:
        return {
            "gap": self.gap,
            "bound": self.bound,
            "negligible": self.negligible,
            "with_knowledge": self.with_knowledge.to_dict(),
            "without_knowledge": self.without_knowledge.to_dict(),
        }


def knowledge_gap(
    scheme: EncryptionScheme,
    knowledge: Callable[[Any, Any, Rng], Any],
    adv_with: Adversary,
    adv_without: Adversary,
    trials: int,
    rng: Rng,
    jobs: int = 1,
) -> KnowledgeGap:
    """Measure how much advantage the extra public data buys a given adversary pair.

    Both games run on the same seed. This only ever measures the adversaries it
    is given; it cannot show the knowledge is negligible for all of them.
    """
    seed = rng.getrandbits(64)
    with_k = run_knowledge_game(scheme, knowledge, adv_with, trials, derive_rng(seed, "game"), jobs=jobs)
    without_k = run_ind_cpa(scheme, adv_without, trials, derive_rng(seed, "game"), jobs=jobs)
    result = KnowledgeGap(with_k, without_k)
    logger.info(f"Knowledge gap on {scheme.name}: {result.gap:.4f} (bound {result.bound:.4f})")
    return result
