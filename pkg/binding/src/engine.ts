import { spawn, type ChildProcessWithoutNullStreams } from "node:child_process";
import { createInterface, type Interface } from "node:readline";

import {
  EngineError,
  TransportError,
  isErrorResponse,
  type Request,
  type Response,
} from "./wire.js";

export interface EngineOptions {
  /** JSONL dataset file the engine process will serve MDPs from. */
  dataset: string;
  /** Interpreter to launch, default "python3". */
  python?: string;
  /** Extra environment variables for the child (merged over process.env). */
  env?: Record<string, string>;
}

const STDERR_TAIL_LINES = 20;

/**
 * One engine child process speaking the line-delimited JSON protocol.
 *
 * Exactly one request may be in flight at a time; a second concurrent
 * request() throws rather than queueing, so misuse fails loudly instead
 * of silently reordering an episode.
 */
export class EngineProcess {
  private readonly child: ChildProcessWithoutNullStreams;
  private readonly lines: Interface;
  private pending: {
    resolve: (r: Response) => void;
    reject: (e: Error) => void;
  } | null = null;
  private stderrTail: string[] = [];
  private exitReason: string | null = null;

  constructor(options: EngineOptions) {
    const python = options.python ?? "python3";
    this.child = spawn(
      python,
      ["-m", "tribox.cli", "step", "--mdp", options.dataset],
      {
        stdio: ["pipe", "pipe", "pipe"],
        env: { ...process.env, ...options.env },
      },
    );
    this.lines = createInterface({ input: this.child.stdout });
    this.lines.on("line", (line) => this.onLine(line));
    this.child.stderr.on("data", (chunk: Buffer) => {
      const tail = this.stderrTail.concat(chunk.toString("utf8").split("\n"));
      this.stderrTail = tail.slice(-STDERR_TAIL_LINES);
    });
    this.child.on("error", (err) => {
      this.fail(`engine process failed to start: ${err.message}`);
    });
    this.child.on("exit", (code, signal) => {
      const why = signal !== null ? `signal ${signal}` : `exit code ${code}`;
      this.fail(`engine process ended (${why})${this.diagnostics()}`);
    });
  }

  get alive(): boolean {
    return this.exitReason === null;
  }

  /** Send one request and await its one response line. */
  request(req: Request): Promise<Response> {
    if (this.pending !== null) {
      return Promise.reject(
        new TransportError("a request is already in flight on this engine"),
      );
    }
    if (this.exitReason !== null) {
      return Promise.reject(new TransportError(this.exitReason));
    }
    return new Promise<Response>((resolve, reject) => {
      this.pending = { resolve, reject };
      this.child.stdin.write(JSON.stringify(req) + "\n", (err) => {
        if (err && this.pending !== null) {
          const waiter = this.pending;
          this.pending = null;
          waiter.reject(new TransportError(`engine stdin closed: ${err.message}`));
        }
      });
    });
  }

  /** Ask the engine to shut down and wait for it to go. */
  async close(): Promise<void> {
    if (this.exitReason !== null) {
      return;
    }
    try {
      await this.request({ cmd: "close" });
    } catch (err) {
      if (!(err instanceof TransportError)) {
        throw err;
      }
    }
    this.child.stdin.end();
    await new Promise<void>((resolve) => {
      if (this.child.exitCode !== null || this.exitReason !== null) {
        resolve();
        return;
      }
      this.child.once("exit", () => resolve());
    });
  }

  /** Hard-kill the child; for cleanup paths where close() is too polite. */
  dispose(): void {
    if (this.child.exitCode === null) {
      this.child.kill("SIGKILL");
    }
  }

  private onLine(line: string): void {
    const waiter = this.pending;
    this.pending = null;
    if (waiter === null) {
      return; // nothing asked for this; stale line after a failure
    }
    let parsed: Response;
    try {
      parsed = JSON.parse(line) as Response;
    } catch {
      waiter.reject(
        new TransportError(`engine wrote a non-JSON line: ${line.slice(0, 200)}`),
      );
      return;
    }
    if (isErrorResponse(parsed)) {
      waiter.reject(new EngineError(parsed.error.type, parsed.error.message));
      return;
    }
    waiter.resolve(parsed);
  }

  private fail(reason: string): void {
    if (this.exitReason !== null) {
      return;
    }
    this.exitReason = reason;
    if (this.pending !== null) {
      const waiter = this.pending;
      this.pending = null;
      waiter.reject(new TransportError(reason));
    }
  }

  private diagnostics(): string {
    const tail = this.stderrTail.filter((l) => l.trim().length > 0);
    return tail.length > 0 ? `; stderr: ${tail.join(" | ")}` : "";
  }
}
