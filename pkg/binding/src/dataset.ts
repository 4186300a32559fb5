import { readFileSync } from "node:fs";

import type { VariantName } from "./wire.js";

/**
 * The per-MDP fields the observation needs.  The engine process reads the
 * same file, so ids here are exactly the ids it will accept.
 */
export interface MdpRecord {
  id: string;
  variant: VariantName;
  condition: "scratch" | "flipit";
  statement: string;
  target: boolean;
  split: string;
}

/**
 * Read the MDP records out of a JSONL dataset file.
 *
 * The first line is a header object (schema/version/layout) and is
 * skipped; every following non-empty line is one MDP record.
 */
export function readDataset(path: string): Map<string, MdpRecord> {
  const text = readFileSync(path, "utf8");
  const records = new Map<string, MdpRecord>();
  let sawHeader = false;
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (line.length === 0) {
      continue;
    }
    const data = JSON.parse(line) as Record<string, unknown>;
    if (!sawHeader && typeof data.schema === "string") {
      sawHeader = true;
      continue;
    }
    const record: MdpRecord = {
      id: String(data.id),
      variant: data.variant as VariantName,
      condition: data.condition as "scratch" | "flipit",
      statement: String(data.statement),
      target: Boolean(data.target),
      split: String(data.split),
    };
    records.set(record.id, record);
  }
  return records;
}
