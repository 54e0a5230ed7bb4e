import { type ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import net from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";

export const SUBMITTER_KEY = "e2e-submitter-secret";
export const REVIEWER_KEY = "e2e-reviewer-secret";

export interface RunningService {
  baseUrl: string;
  child: ChildProcess;
  stop(): void;
}

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = net.createServer();
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

/** Spawn a real registry service on a fresh data dir and wait for /healthz. */
export async function startService(): Promise<RunningService> {
  const dir = mkdtempSync(join(tmpdir(), "triage-e2e-"));
  const keysPath = join(dir, "keys.txt");
  writeFileSync(
    keysPath,
    `e2e-sub submitter ${SUBMITTER_KEY}\ne2e-rev reviewer ${REVIEWER_KEY}\n`,
  );
  const port = await freePort();
  const configPath = join(dir, "config.json");
  writeFileSync(
    configPath,
    JSON.stringify({
      addr: `127.0.0.1:${port}`,
      data_dir: join(dir, "data"),
      keys_file: keysPath,
    }),
  );
  const child = spawn("python3", ["-m", "cdi_registry.cli", "serve", "--config", configPath], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  const logs: string[] = [];
  child.stdout?.on("data", (chunk) => logs.push(String(chunk)));
  child.stderr?.on("data", (chunk) => logs.push(String(chunk)));

  const baseUrl = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const response = await fetch(`${baseUrl}/healthz`);
      if (response.ok) break;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      child.kill();
      throw new Error(`service did not start:\n${logs.join("")}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  return {
    baseUrl,
    child,
    stop() {
      child.kill();
    },
  };
}
