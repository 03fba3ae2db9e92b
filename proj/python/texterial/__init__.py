"""Python access to the texterial engine (mock provider, scripted clock)."""

import json

from . import _texterial

__all__ = ["Session", "build_prompt", "replay", "canonical_hash", "parse_marked", "mock_response"]


class Session:
    """A clay-and-garden session whose clock only moves when told to."""

    def __init__(self, writing_context=None, config=None):
        self._s = _texterial.Session(writing_context, json.dumps(config) if config else None)

    @property
    def now(self):
        return self._s.now()

    def at(self, ms):
        self._s.set_time(ms)
        return self

    def add_block(self, text, x=None, y=None):
        return self._s.add_block(text, x, y)

    def gesture(self, kind, points=(), target=None, payload=None):
        event = {"kind": kind, "points": [{"x": p[0], "y": p[1], "t": p[2] if len(p) > 2 else self.now} for p in points]}
        if target is not None:
            event["target"] = target
        if payload is not None:
            event["payload"] = payload if isinstance(payload, str) else json.dumps(payload)
        return json.loads(self._s.gesture(json.dumps(event)))

    def tick(self):
        return [json.loads(r) for r in self._s.tick()]

    def undo(self):
        self._s.undo()

    def redo(self):
        self._s.redo()

    @property
    def hash(self):
        return self._s.hash()

    def view(self):
        return json.loads(self._s.view())

    def state(self):
        return json.loads(self._s.state())

    def trace(self):
        return [json.loads(line) for line in self._s.trace().splitlines() if line]

    def prompts(self):
        return self._s.prompts()

    def save(self, path):
        self._s.save(str(path))


def build_prompt(template, context=None, **slots):
    return _texterial.build_prompt(template, json.dumps(slots), context)


def replay(trace_path, seed_path, strict=False):
    return json.loads(_texterial.replay(str(trace_path), str(seed_path), strict))


def canonical_hash(value):
    return _texterial.canonical_hash(json.dumps(value))


parse_marked = _texterial.parse_marked
mock_response = _texterial.mock_response
