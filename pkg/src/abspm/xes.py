"""XES XML serialization of event logs.

The writer emits a deterministic byte layout (sorted auxiliary attributes,
fixed two-space indentation) so identical logs always serialize to identical
files; the reader is the exact inverse on writer output and preserves
unrecognized typed attributes opaquely.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from datetime import datetime, timezone
from xml.sax.saxutils import escape, quoteattr

from abspm.eventlog import Event, EventLog, Trace

_EXTENSIONS = (
    ("Concept", "concept", "http://www.xes-standard.org/concept.xesext"),
    ("Time", "time", "http://www.xes-standard.org/time.xesext"),
)


class XesError(ValueError):
    """Malformed XES input; message carries element context."""


def _attr_lines(attributes: dict, indent: str) -> list[str]:
    lines = []
    for key in sorted(attributes):
        value = attributes[key]
        if isinstance(value, bool):
            tag, text = "boolean", "true" if value else "false"
        elif isinstance(value, int):
            tag, text = "int", str(value)
        elif isinstance(value, float):
            tag, text = "float", repr(value)
        elif isinstance(value, datetime):
            tag, text = "date", value.isoformat()
        else:
            tag, text = "string", str(value)
        lines.append(f'{indent}<{tag} key={quoteattr(key)} value={quoteattr(text)}/>')
    return lines


def xes_to_string(log: EventLog) -> str:
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             '<log xes.version="1.0" xes.features="">']
    for name, prefix, uri in _EXTENSIONS:
        lines.append(f'  <extension name="{name}" prefix="{prefix}" uri="{uri}"/>')
    meta = dict(log.metadata)
    if "name" in meta:
        lines.append(f'  <string key="concept:name" value={quoteattr(meta.pop("name"))}/>')
    lines.extend(_attr_lines(meta, "  "))
    for trace in log.traces:
        lines.append("  <trace>")
        lines.append(f'    <string key="concept:name" value={quoteattr(trace.case_id)}/>')
        for event in trace.events:
            lines.append("    <event>")
            lines.append(f'      <string key="concept:name" value={quoteattr(event.activity)}/>')
            lines.append(f'      <date key="time:timestamp" value={quoteattr(event.timestamp.isoformat())}/>')
            lines.extend(_attr_lines(event.attributes, "      "))
            lines.append("    </event>")
        lines.append("  </trace>")
    lines.append("</log>")
    lines.append("")
    return "\n".join(lines)


def write_xes(log: EventLog, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(xes_to_string(log))


def _parse_timestamp(text: str) -> datetime:
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt


def _parse_value(elem: ET.Element, context: str):
    tag = elem.tag
    value = elem.get("value")
    if value is None:
        raise XesError(f"{context}: <{tag}> attribute missing value")
    if tag == "int":
        return int(value)
    if tag == "float":
        return float(value)
    if tag == "boolean":
        return value == "true"
    if tag == "date":
        return _parse_timestamp(value)
    return value  # string and unknown extensions kept opaque


def xes_from_string(text: str) -> EventLog:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise XesError(f"XML parse error at line {exc.position[0]}: {exc.msg}") from exc
    if root.tag != "log":
        raise XesError(f"root element is <{root.tag}>, expected <log>")

    metadata: dict = {}
    traces: list[Trace] = []
    for child in root:
        if child.tag == "extension":
            continue
        if child.tag == "trace":
            t_index = len(traces)
            case_id = None
            events: list[Event] = []
            for sub in child:
                if sub.tag == "event":
                    activity = None
                    timestamp = None
                    attributes: dict = {}
                    for attr in sub:
                        key = attr.get("key")
                        value = _parse_value(attr, f"trace {t_index} event {len(events)}")
                        if key == "concept:name":
                            activity = value
                        elif key == "time:timestamp":
                            timestamp = value
                        else:
                            attributes[key] = value
                    if activity is None:
                        raise XesError(f"trace {t_index} event {len(events)}: missing concept:name")
                    if timestamp is None:
                        raise XesError(f"trace {t_index} event {len(events)}: missing time:timestamp")
                    events.append(Event(activity, timestamp, attributes))
                elif sub.get("key") == "concept:name":
                    case_id = sub.get("value")
                # other trace-level attributes ignored
            if case_id is None:
                raise XesError(f"trace {t_index}: missing concept:name")
            traces.append(Trace(case_id=case_id, events=tuple(events)))
        else:
            key = child.get("key")
            if key is None:
                raise XesError(f"unexpected element <{child.tag}> in <log>")
            value = _parse_value(child, "log attributes")
            metadata["name" if key == "concept:name" else key] = value
    return EventLog(traces=tuple(traces), metadata=metadata)


def read_xes(path) -> EventLog:
    with open(path, encoding="utf-8") as fh:
        return xes_from_string(fh.read())
