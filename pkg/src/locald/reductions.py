"""Local reductions to ``cover`` and ``containment``.

Node ``v`` outputs its radius-``t`` view as the element and, as its family,
every set of radius-``t`` views of a member configuration with at most
``psi(v)`` nodes, inputs of at most ``psi(v)`` bits and identities of at
most ``psi(v)`` bits, where ``psi(v) = 2 ** (|Id(v)| + |x(v)|)`` truncated at
``cap``.  The family is emitted in its succinct generated form (language,
radius, bound), which has exactly the same members as the listed family.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .bits import id_length
from .cover import CoverInput, GeneratedFamily
from .errors import GraphTooLarge, PsiCapExceeded
from .graph import Configuration, IdAssignment, all_configurations, ball, id_assignments
from .languages import CONTAINMENT, COVER, Language
from .runtime import Coins, Flooding, Knowledge, NodeAlgorithm, OneRound, run

DEFAULT_CAP = 4


@dataclass(frozen=True)
class PsiBudget:
    psi: tuple[int, ...]
    cap: int


def psi_value(ident: int, node_input: str, cap: int = DEFAULT_CAP) -> int:
    """``2 ** (|Id| + |x|)`` truncated at ``cap``.

    Raises :class:`PsiCapExceeded` when the node's own identity or input is
    longer than ``cap`` bits: no generated family could then describe it.
    """
    if id_length(ident) > cap or len(node_input) > cap:
        raise PsiCapExceeded(f"identity {ident} or input {node_input!r} needs more than {cap} bits")
    return min(2 ** (id_length(ident) + len(node_input)), cap)


def psi(config: Configuration, ids: IdAssignment, cap: int = DEFAULT_CAP) -> PsiBudget:
    return PsiBudget(tuple(psi_value(ids[v], config.inputs[v], cap) for v in config.graph.nodes), cap)


class ViewFamilyTransform(Flooding):
    """Collect the radius-``radius`` ball, then output a ``CoverInput`` bitstring."""

    name = "view-family"

    def __init__(self, lang: Language, radius: int, cap: int = DEFAULT_CAP):
        if radius < 0:
            raise ValueError("radius must be non-negative")
        self.lang = lang
        self.radius = radius
        self.cap = cap

    def decide(self, know: Knowledge, rnd: int, coins: Coins) -> str | None:
        if rnd < self.radius + 1 and not know.saturated():
            return None
        config, ids = know.ball(self.radius)
        center = ids.node_of(know.me)
        element = ball(config, ids, center, self.radius).encode()
        bound = psi_value(know.me, config.inputs[center], self.cap)
        return CoverInput(element, GeneratedFamily(self.lang.name, self.radius, bound)).encode()


class IdentityTransform(OneRound):
    """Outputs the node's own input unchanged."""

    name = "identity"

    def step(self, state, rnd, inbox, coins):
        return state, {}, state.node_input


@dataclass(frozen=True)
class LocalReduction:
    transform: NodeAlgorithm
    source: Language
    target: Language
    rounds: int

    def apply(self, config: Configuration, ids: IdAssignment) -> Configuration:
        result = run(self.transform, config, ids, round_cap=max(self.rounds, 1))
        return config.with_inputs(result.outputs)


def cover_reduction(lang: Language, cap: int = DEFAULT_CAP) -> LocalReduction:
    return LocalReduction(ViewFamilyTransform(lang, 1, cap), lang, COVER, 2)


def containment_reduction(lang: Language, t: int, cap: int = DEFAULT_CAP) -> LocalReduction:
    return LocalReduction(ViewFamilyTransform(lang, t, cap), lang, CONTAINMENT, t + 1)


def identity_reduction(source: Language, target: Language) -> LocalReduction:
    return LocalReduction(IdentityTransform(), source, target, 0)


def _check_size(config: Configuration, cap: int) -> None:
    # A member larger than ``cap`` nodes is in no generated family, so the
    # reduction would silently map it to a non-member.
    if config.n > cap:
        raise PsiCapExceeded(f"{config.n} nodes exceed the enumeration bound {cap}")


def reduce_to_cover(lang: Language, config: Configuration, ids: IdAssignment, cap: int = DEFAULT_CAP) -> Configuration:
    _check_size(config, cap)
    return cover_reduction(lang, cap).apply(config, ids)


def reduce_to_containment(
    lang: Language, t: int, config: Configuration, ids: IdAssignment, cap: int = DEFAULT_CAP
) -> Configuration:
    _check_size(config, cap)
    return containment_reduction(lang, t, cap).apply(config, ids)


@dataclass(frozen=True)
class ReductionCounterexample:
    config: Configuration
    ids: IdAssignment
    image: Configuration
    source_member: bool
    target_member: bool


def check_reduction(
    red: LocalReduction,
    node_cap: int,
    id_pool: Iterable[int],
    alphabet: Iterable[str],
) -> tuple[bool, ReductionCounterexample | None]:
    """Membership equivalence on every configuration and id assignment in range."""
    if node_cap > 8:
        raise GraphTooLarge("exhaustive graph enumeration is limited to 8 nodes")
    pool = sorted(set(id_pool))
    alphabet = tuple(alphabet)
    for config in all_configurations(node_cap, alphabet):
        if config.n > len(pool):
            continue
        for ids in id_assignments(config.n, pool):
            image = red.apply(config, ids)
            a = red.source.member(config)
            b = red.target.member(image)
            if a != b:
                return False, ReductionCounterexample(config, ids, image, a, b)
    return True, None
