"""Wire format of the session protocol. Field names are the compatibility surface."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class _Model(BaseModel):
    model_config = ConfigDict(populate_by_name=True)


class CommandRequest(_Model):
    text: str


class EventView(_Model):
    seq: int
    kind: str
    data: dict = Field(default_factory=dict)


class CommandResponse(_Model):
    ok: bool
    value: float | None = None
    display: str | None = None
    output_lines: list[str] = Field(default_factory=list, alias="output-lines")
    events: list[EventView] = Field(default_factory=list)


class NodeView(_Model):
    term_text: str = Field(alias="term-text")
    label: list[list[str]]
    is_premise: bool = Field(alias="is-premise")
    probability: float | None = None


class AssumptionView(_Model):
    display_name: str = Field(alias="display-name")
    kind: str
    weight: float | None = None
    retracted: bool = False


class ChooseMemberView(_Model):
    display_name: str = Field(alias="display-name")
    weight: float


class ChooseSetView(_Model):
    id: int
    tag: str
    members: list[ChooseMemberView]


class JustificationView(_Model):
    antecedents: list[str]
    consequent: str


class NetworkSnapshotView(_Model):
    nodes: list[NodeView]
    assumptions: list[AssumptionView]
    choose_sets: list[ChooseSetView] = Field(alias="choose-sets")
    nogoods: list[list[str]]
    justifications: list[JustificationView]


class SessionCreated(_Model):
    session_id: str = Field(alias="session-id")
