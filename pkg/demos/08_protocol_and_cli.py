"""The JSON-lines protocol and the command-line front end.

Anything that can spawn a child process and pipe newline-delimited JSON
can drive episodes -- that is how the TypeScript binding consumes the
engine.  This demo drives the same server in-process, then shells out to
the installed CLI.

Run:  python3 demos/08_protocol_and_cli.py
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

from tribox import ProtocolServer, generate_fixtures, load_dataset

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    files = generate_fixtures(seed=31, count=4, out_dir=tmp)
    specs, _ = load_dataset(files[0])
    server = ProtocolServer(specs)

    mdp = specs[0]
    print(f"driving {mdp.id}: {mdp.statement!r}\n")

    def send(request):
        response, _ = server.handle(request)
        shown = {k: v for k, v in response.items() if k != "scene"}
        shown["scene.fingerprint"] = response.get("scene", {}).get("fingerprint")
        print(f"  -> {json.dumps(request)}")
        print(f"  <- {json.dumps(shown, sort_keys=True)}")
        return response

    send({"cmd": "reset", "mdp_id": mdp.id, "seed": 7})
    plan = json.loads(subprocess.run(
        [sys.executable, "-m", "tribox.cli", "solve",
         "--dataset", str(files[0]), "--id", mdp.id],
        capture_output=True, text=True, check=True).stdout)["plans"][0]
    for action in plan:
        send({"cmd": "step", "action": action})
    send({"cmd": "close"})

    # The CLI wraps the same machinery: eval/validate/rollout/render...
    print("\nCLI one-liners:")
    scene_file = tmp / "empty.json"
    scene_file.write_text(json.dumps({"variant": "scatter", "objects": []}))
    program_file = tmp / "program.txt"
    program_file.write_text("exist(all_items)")
    result = subprocess.run(
        [sys.executable, "-m", "tribox.cli", "eval",
         "--program", str(program_file), "--scene", str(scene_file)],
        capture_output=True, text=True)
    print(f"  eval exist(all_items) on empty scene -> "
          f"{result.stdout.strip()} (exit {result.returncode})")

    result = subprocess.run(
        [sys.executable, "-m", "tribox.cli", "validate",
         "--dataset", str(files[2])],
        capture_output=True, text=True)
    summary = json.loads(result.stdout)["summary"]["total"]
    print(f"  validate {files[2].name} -> {summary} (exit {result.returncode})")

    result = subprocess.run(
        [sys.executable, "-m", "tribox.cli", "rollout",
         "--dataset", str(files[1]), "--policy", "oracle", "--seed", "1",
         "--out", str(tmp / "trajectories.jsonl")],
        capture_output=True, text=True)
    report = json.loads(result.stdout)
    print(f"  rollout oracle -> completion "
          f"{report['task_completion_accuracy']}% over {report['n_rollouts']} episodes")
