"""Dataset files: schema, validation, summaries, and round trips.

A dataset is a JSONL file: one header line naming the schema, then one
MDP record per line.  Loading is all-or-nothing -- a single bad record
fails the file with a line-numbered report.

Run:  python3 demos/07_datasets.py
"""

import json
import tempfile
from pathlib import Path

from tribox import (
    DatasetError,
    generate_fixtures,
    load_dataset,
    mdp_problems,
    save_dataset,
    summarize,
    validate_annotation,
)

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    files = generate_fixtures(seed=23, count=5, out_dir=tmp)
    for f in files:
        specs, summary = load_dataset(f)
        print(f"{f.name}: {summary['total']['mdps']} MDPs, "
              f"{summary['total']['initial_states']} initial states, "
              f"splits {sorted(summary['splits'])}")

    specs, _ = load_dataset(files[3])
    mdp = specs[0]
    print(f"\nrecord: id={mdp.id} variant={mdp.variant.value} "
          f"condition={mdp.condition.value} split={mdp.split}")
    print(f"  statement: {mdp.statement!r}")
    print(f"  program:   {mdp.program_source}")
    print(f"  scenes:    {len(mdp.initial_scenes)} (flipit draws one per reset)")
    print(f"  problems:  {mdp_problems(mdp)}")

    # Consistency between statements and labeled scenes is checkable
    # directly: evaluate the program everywhere and compare.  A flipit
    # scene never satisfies its target, so these labels are all wrong.
    labeled = [(scene, mdp.target) for scene in mdp.initial_scenes]
    issues = validate_annotation(mdp.program_source, labeled)
    print(f"\nannotation check against wrong labels: {len(issues)} mismatches")

    # save/load round-trips byte-exactly (records are canonical JSON).
    out = tmp / "copy.jsonl"
    save_dataset(out, specs)
    reloaded, _ = load_dataset(out)
    print("round trip preserved records:", reloaded == specs)
    print("summary of copy:", json.dumps(summarize(reloaded)["total"]))

    # Corrupt one line and the loader names it.
    lines = out.read_text().splitlines()
    record = json.loads(lines[2])
    record["target"] = not record["target"]
    lines[2] = json.dumps(record)
    out.write_text("\n".join(lines) + "\n")
    try:
        load_dataset(out)
    except DatasetError as err:
        first = err.errors[0]
        print(f"rejected: line {first['line']} [{first['kind']}] {first['message']}")
