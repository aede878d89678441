"""Report documents shared by the fooling constructions and experiments."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

from .graph import Configuration, IdAssignment
from .jsonio import config_to_json
from .runtime import verdict


@dataclass(frozen=True)
class Instance:
    """A configuration with identities and the outputs a run produced on it."""

    config: Configuration
    ids: IdAssignment
    outputs: tuple[str, ...]

    @property
    def verdict(self) -> str:
        return verdict(self.outputs)

    def to_json(self, certificate: Sequence[str] | None = None) -> dict[str, Any]:
        doc = config_to_json(self.config, self.ids, certificate)
        doc["outputs"] = dict(zip(self.config.graph.names, self.outputs))
        doc["verdict"] = self.verdict
        return doc


@dataclass(frozen=True)
class FoolingReport:
    """A member instance, a non-member built from it, and what the algorithm said.

    ``fooled`` is true only when the non-member was accepted.  ``witness`` is
    the certificate used on the non-member, if the algorithm consumes one.
    """

    construction: str
    member_instance: Instance | tuple[Instance, ...]
    nonmember_instance: Instance
    witness: Any = None
    fooled: bool = False
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.fooled and self.nonmember_instance.verdict != "accept":
            raise ValueError("fooled requires the non-member to be accepted")

    @property
    def member_instances(self) -> tuple[Instance, ...]:
        m = self.member_instance
        return m if isinstance(m, tuple) else (m,)

    def to_json(self) -> dict[str, Any]:
        witness = getattr(self.witness, "values", self.witness)
        members = [inst.to_json() for inst in self.member_instances]
        return {
            "construction": self.construction,
            "member_instance": members[0] if len(members) == 1 else members,
            "nonmember_instance": self.nonmember_instance.to_json(witness),
            "witness": None if witness is None else list(witness),
            "fooled": self.fooled,
            "details": self.details,
        }
