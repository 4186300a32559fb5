"""Line-delimited JSON protocol over stdio.

Requests:   {"cmd": "reset", "mdp_id"?: str, "seed"?: int, "render"?: bool}
            {"cmd": "step", "action": {...}, "render"?: bool}
            {"cmd": "close"}
Responses:  {"scene": {...}, "image_ref"?: {...}, "reward": float,
             "done": bool, "termination": str}
Errors:     {"error": {"type": str, "message": str}} — the server answers
            and keeps reading; nothing short of EOF stops it.

The optional image_ref carries the rendered observation inline as base64
raw RGB bytes (row-major), since the transport is a pipe with no shared
filesystem contract.
"""

from __future__ import annotations

import base64
import json

from .dataio import scene_to_json
from .env import (
    EnvConfig,
    EpisodeDone,
    VariantMismatch,
    action_from_json,
    reset,
    step,
    termination_string,
)
from .render import DEFAULT_PALETTE, render
from .scene import fingerprint_hex, scene_fingerprint


def _error(kind: str, message: str) -> dict:
    return {"error": {"type": kind, "message": message}}


class ProtocolServer:
    """One episode state machine, driven by parsed request dicts."""

    def __init__(self, mdps, default_id: str | None = None,
                 base_config: EnvConfig | None = None, palette=None):
        self.mdps = {m.id: m for m in mdps}
        self.default_id = default_id
        self.base_config = base_config
        self.palette = palette if palette is not None else DEFAULT_PALETTE
        self._config = None
        self._context = None
        self._state = None

    # -- request handling ---------------------------------------------------

    def handle(self, request):
        """-> (response dict, server should keep running)."""
        if not isinstance(request, dict):
            return _error("bad_request", "request must be a JSON object"), True
        if "cmd" not in request and "type" in request:
            # bare action lines are shorthand for a step request
            request = {"cmd": "step", "action": request}
        cmd = request.get("cmd")
        if cmd == "reset":
            return self._reset(request), True
        if cmd == "step":
            return self._step(request), True
        if cmd == "close":
            return {"ok": True}, False
        return _error("unknown_cmd", f"unknown cmd {cmd!r}"), True

    def _reset(self, request):
        mdp_id = request.get("mdp_id", self.default_id)
        if mdp_id not in self.mdps:
            return _error("unknown_mdp", f"no MDP with id {mdp_id!r}")
        mdp = self.mdps[mdp_id]
        self._config = mdp.env_config(self.base_config)
        self._context = mdp.context()
        self._state = reset(self._config, mdp.initial_scenes,
                            request.get("seed"))
        return self._response(0.0, bool(request.get("render")))

    def _step(self, request):
        if self._state is None:
            return _error("no_episode", "send a reset request first")
        try:
            action = action_from_json(request.get("action"))
        except (ValueError, TypeError) as exc:
            return _error("bad_action", str(exc))
        try:
            self._state, reward, _info = step(self._state, action,
                                              self._context, self._config)
        except (VariantMismatch, ValueError) as exc:
            return _error("bad_action", str(exc))
        except EpisodeDone:
            return _error("episode_done", "episode over; reset to continue")
        return self._response(reward, bool(request.get("render")))

    def _response(self, reward: float, with_image: bool) -> dict:
        scene = self._state.scene
        scene_json = {"variant": scene.variant.value,
                      "fingerprint": fingerprint_hex(scene_fingerprint(scene)),
                      **scene_to_json(scene)}
        response = {
            "scene": scene_json,
            "reward": reward,
            "done": self._state.done,
            "termination": termination_string(self._state.termination),
        }
        if with_image:
            image = render(scene, self.palette)
            response["image_ref"] = {
                "encoding": "base64",
                "shape": list(image.shape),
                "data": base64.b64encode(image.tobytes()).decode("ascii"),
            }
        return response


def serve(server: ProtocolServer, input_stream, output_stream) -> None:
    """Pump requests until EOF or a close request."""
    for line in input_stream:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError as exc:
            response, keep_going = _error("bad_json", str(exc)), True
        else:
            response, keep_going = server.handle(request)
        output_stream.write(json.dumps(response, sort_keys=True) + "\n")
        output_stream.flush()
        if not keep_going:
            return
