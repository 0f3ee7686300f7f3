"""Tree-structured messages, traces, and path-based value extraction.

A message is an ordered tree: each node is an element with a name and
child nodes, or a text leaf, never both.  Traces are finite message
sequences serialized as JSON Lines; a lasso trace is a finite prefix
plus a nonempty loop repeated forever.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator

from .formula import Path


class MalformedInputError(ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class EmptyLoopError(ValueError):
    def __init__(self) -> None:
        super().__init__("lasso loop must hold at least one message")


@dataclass(frozen=True)
class Leaf:
    text: str


@dataclass(frozen=True)
class Element:
    name: str
    children: tuple[Element | Leaf, ...] = ()


Node = Element | Leaf


@dataclass(frozen=True)
class Message:
    root: Element


@dataclass(frozen=True)
class Trace:
    messages: tuple[Message, ...] = ()

    def __len__(self) -> int:
        return len(self.messages)


@dataclass(frozen=True)
class LassoTrace:
    """Ultimately periodic word prefix . loop^omega."""

    prefix: tuple[Message, ...]
    loop: tuple[Message, ...]

    def __post_init__(self) -> None:
        if not self.loop:
            raise EmptyLoopError()


def canonical_position(trace: LassoTrace, index: int) -> int:
    """Fold an absolute position into the prefix plus one loop unrolling."""
    k = len(trace.prefix)
    if index < k:
        return index
    return k + (index - k) % len(trace.loop)


def position_message(trace: LassoTrace, index: int) -> Message:
    pos = canonical_position(trace, index)
    k = len(trace.prefix)
    return trace.prefix[pos] if pos < k else trace.loop[pos - k]


def _is_text_only(element: Element) -> bool:
    return len(element.children) == 1 and isinstance(element.children[0], Leaf)


def dom(message: Message, path: Path) -> frozenset[str]:
    """Values of text-only elements reached by the path, duplicate free.

    The first segment must equal the root element's name; each further
    segment steps to children with that name.  An element contributes
    its text only when its entire child list is a single leaf.  A path
    that matches nothing yields the empty set.
    """
    if message.root.name != path.segments[0]:
        return frozenset()
    nodes: list[Element] = [message.root]
    for segment in path.segments[1:]:
        nodes = [
            child
            for node in nodes
            for child in node.children
            if isinstance(child, Element) and child.name == segment
        ]
    return frozenset(node.children[0].text for node in nodes if _is_text_only(node))


def _element_from_obj(name: str, value: object, line: int) -> tuple[Element, ...]:
    if isinstance(value, str):
        return (Element(name, (Leaf(value),)),)
    if isinstance(value, dict):
        children: list[Element] = []
        for key, sub in value.items():
            children.extend(_element_from_obj(key, sub, line))
        return (Element(name, tuple(children)),)
    if isinstance(value, list):
        out: list[Element] = []
        for item in value:
            if not isinstance(item, (str, dict)):
                raise MalformedInputError(line, f"array items under {name!r} must be strings or objects")
            out.extend(_element_from_obj(name, item, line))
        return tuple(out)
    raise MalformedInputError(line, f"value under {name!r} must be a string, object, or array")


def message_from_obj(obj: object, line: int = 0) -> Message:
    """Build a message from one decoded JSON object."""
    if not isinstance(obj, dict) or len(obj) != 1:
        raise MalformedInputError(line, "message must be an object with exactly one root key")
    ((name, value),) = obj.items()
    elements = _element_from_obj(name, value, line)
    if len(elements) != 1:
        raise MalformedInputError(line, "root element cannot repeat")
    return Message(elements[0])


def message_to_obj(message: Message) -> dict:
    """Inverse of message_from_obj for JSON-expressible trees.

    Runs of same-named sibling elements become arrays; a name occurring
    in two separate runs has no JSON object encoding and is rejected.
    """
    return {message.root.name: _element_to_value(message.root)}


def _element_to_value(element: Element):
    if _is_text_only(element):
        return element.children[0].text
    out: dict[str, object] = {}
    runs: list[tuple[str, list]] = []
    for child in element.children:
        if isinstance(child, Leaf):
            raise ValueError("mixed leaf and element children are not JSON expressible")
        if runs and runs[-1][0] == child.name:
            runs[-1][1].append(_element_to_value(child))
        else:
            runs.append((child.name, [_element_to_value(child)]))
    for name, values in runs:
        if name in out:
            raise ValueError(f"sibling runs of {name!r} are not adjacent, no JSON object encoding")
        out[name] = values[0] if len(values) == 1 else values
    return out


def parse_message(text: str, line: int = 0) -> Message:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise MalformedInputError(line, f"invalid JSON: {err.msg}") from err
    return message_from_obj(obj, line)


def iter_messages(lines: Iterable[str]) -> Iterator[Message]:
    """Stream messages from JSON Lines text, skipping blank lines."""
    for number, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        yield parse_message(stripped, line=number)


def load_trace(text: str) -> Trace:
    return Trace(tuple(iter_messages(text.splitlines())))


def load_lasso(text: str) -> LassoTrace:
    """Read a lasso file: one object with "prefix" and "loop" arrays."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise MalformedInputError(0, f"invalid JSON: {err.msg}") from err
    return lasso_from_obj(obj)


def lasso_from_obj(obj: object) -> LassoTrace:
    if not isinstance(obj, dict):
        raise MalformedInputError(0, "lasso must be a JSON object")
    unknown = set(obj) - {"prefix", "loop"}
    if unknown:
        raise MalformedInputError(0, f"unknown lasso keys: {sorted(unknown)}")
    if "loop" not in obj:
        raise MalformedInputError(0, "lasso needs a \"loop\" array")
    prefix = obj.get("prefix", [])
    loop = obj["loop"]
    if not isinstance(prefix, list) or not isinstance(loop, list):
        raise MalformedInputError(0, "\"prefix\" and \"loop\" must be arrays of messages")
    return LassoTrace(
        prefix=tuple(message_from_obj(m) for m in prefix),
        loop=tuple(message_from_obj(m) for m in loop),
    )


def lasso_to_obj(trace: LassoTrace) -> dict:
    return {
        "prefix": [message_to_obj(m) for m in trace.prefix],
        "loop": [message_to_obj(m) for m in trace.loop],
    }


def lasso_to_json(trace: LassoTrace) -> str:
    return json.dumps(lasso_to_obj(trace), separators=(",", ":"))
