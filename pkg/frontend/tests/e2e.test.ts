/** Editor end to end against a real service process.
 *
 * Spawns `wi serve` on a scratch data directory, then drives the capture
 * layer exactly as the editor view does: type 10 characters, paste a
 * 100-character block, save, and inspect the issued certificate through
 * the public lookup.
 */
import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { CaptureSession } from "../src/capture.js";

const wiAvailable = spawnSync("wi", ["--help"], { stdio: "ignore" }).status === 0;

describe.skipIf(!wiAvailable)("editor end to end", () => {
  const port = 21000 + Math.floor(Math.random() * 3000);
  const base = `http://127.0.0.1:${port}`;
  let dir: string;
  let server: ChildProcess | null = null;

  beforeAll(async () => {
    dir = mkdtempSync(join(tmpdir(), "wi-e2e-"));
    const usersFile = join(dir, "users.json");
    writeFileSync(usersFile, JSON.stringify({ sanad: "hunter2" }));
    server = spawn(
      "wi",
      ["serve", "--port", String(port), "--data-dir", join(dir, "data"),
       "--seed-users", usersFile],
      { stdio: "ignore" },
    );
    await waitForServer(base);
  }, 30_000);

  afterAll(() => {
    server?.kill();
    rmSync(dir, { recursive: true, force: true });
  });

  it("typed and pasted input end up separated on the certificate", async () => {
    const api = new ApiClient(base);
    await api.login("sanad", "hunter2");
    const doc = await api.createDocument("Draft");

    const speeds: number[] = [];
    const errors: unknown[] = [];
    const capture = new CaptureSession({
      send: (events) => api.postEvents(doc.document_id, events),
      debounceMs: 50,
      onSpeed: (cpm) => speeds.push(cpm),
      onError: (error) => errors.push(error),
    });

    // Ten keystrokes, one full-text snapshot each.
    const typed = "humanwork!";
    let text = "";
    for (const ch of typed) {
      text += ch;
      capture.noteTyped(text);
    }
    await capture.flush();
    expect(errors).toEqual([]);
    expect(speeds.length).toBeGreaterThan(0); // live cpm updated after the batch
    expect(speeds[speeds.length - 1]).toBeGreaterThan(0);

    // One 100-character paste (leading space keeps it a separate word run).
    const block = (
      " lorem ipsum dolor sit amet consectetur adipiscing elit sed do " +
      "eiusmod tempor incididunt ut labore et dolore magna aliqua"
    ).slice(0, 100);
    expect(block.length).toBe(100);
    text += block;
    capture.notePaste(text, block);
    await capture.flush();
    expect(errors).toEqual([]);
    expect(speeds.length).toBeGreaterThan(1); // one update per batch

    const saved = await api.saveDocument(doc.document_id);

    // Certificate lookup is public: a fresh unauthenticated client suffices.
    const cert = await new ApiClient(base).getCertificate(saved.certificate_id);
    expect(cert.document_name).toBe("Draft");
    expect(cert.author).toBe("sanad");

    const pasteLines = cert.log_lines.filter((line) => line.includes("Pasted:"));
    expect(pasteLines).toHaveLength(1);
    expect(pasteLines[0]).toContain("(length 100)");

    expect(cert.stats_line).toContain("Number of Pastes: 1");
    // 100 pasted of 110 total characters pins typed characters at 10.
    expect(cert.stats_line).toContain("Paste Ratio to Typed Text: 90.91%");
    // "humanwork!" is the only word not delivered by the paste.
    expect(cert.stats_line).toContain("Total Length of Typed Text: 1");
  }, 30_000);
});

async function waitForServer(base: string): Promise<void> {
  const deadline = Date.now() + 20_000;
  while (Date.now() < deadline) {
    try {
      await fetch(`${base}/documents`);
      return; // any HTTP response means the server is up
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 150));
    }
  }
  throw new Error("service did not come up in time");
}
