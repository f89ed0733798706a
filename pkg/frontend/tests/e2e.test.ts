/**
 * End-to-end human path against the real service and PC adapter, driving
 * the same client core the page uses (keys, inbox, responder). Needs the
 * python package installed in the environment.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ServiceApi } from "../src/api.js";
import { HoldToConfirm } from "../src/hold.js";
import { InboxController, type UiPendingRequest } from "../src/inbox.js";
import { KeyStore, MemoryStorage, type KeyState } from "../src/keys.js";
import { Responder } from "../src/responder.js";

const PORT = 18_200 + (process.pid % 1_500);
const BASE_URL = `http://127.0.0.1:${PORT}`;
const USER_ID = "user-e2e";

let service: ChildProcess;
let api: ServiceApi;
let keys: KeyState;
let responder: Responder;
let adapterConfigPath: string;

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      await fetch(`${BASE_URL}/v1/unknown`);
      return;
    } catch {
      await new Promise((r) => setTimeout(r, 100));
    }
  }
  throw new Error("service did not come up");
}

interface AdapterRun {
  prompt: Promise<{ code: string; at: number }>;
  exit: Promise<number>;
  report: Promise<Record<string, string>>;
}

function runAdapter(timeoutMs = 15_000): AdapterRun {
  const child = spawn("python3", [
    "-m",
    "pushauth.adapter.cli",
    "--user",
    "alice",
    "--config",
    adapterConfigPath,
    "--timeout-ms",
    String(timeoutMs),
    "--report",
  ]);
  let stdout = "";
  let stderr = "";
  const prompt = new Promise<{ code: string; at: number }>((resolve, reject) => {
    child.stdout.on("data", (chunk: Buffer) => {
      stdout += chunk.toString();
      const match = stdout.match(/code: (\d{3})/);
      if (match) resolve({ code: match[1], at: performance.now() });
    });
    child.on("exit", () =>
      setTimeout(() => reject(new Error(`no prompt in: ${stdout}`)), 10),
    );
  });
  const exit = new Promise<number>((resolve) => {
    child.stderr.on("data", (chunk: Buffer) => (stderr += chunk.toString()));
    child.on("exit", (code) => resolve(code ?? -1));
  });
  const report = exit.then(() => {
    const line = stderr.split("\n").find((l) => l.startsWith("state="));
    if (!line) return {};
    return Object.fromEntries(line.trim().split(" ").map((kv) => kv.split("=", 2)));
  });
  prompt.catch(() => {});
  return { prompt, exit, report };
}

function startInbox(onChange?: (inbox: InboxController) => void): InboxController {
  const inbox = new InboxController({
    api,
    deviceId: keys.deviceId!,
    activeRepollMs: 100,
    onChange: (c) => onChange?.(c),
  });
  void inbox.start();
  return inbox;
}

function nextArrival(inbox: InboxController): Promise<{ item: UiPendingRequest; at: number }> {
  return new Promise((resolve) => {
    const check = () => {
      if (inbox.pending.length > 0) {
        clearInterval(timer);
        resolve({ item: inbox.pending[0], at: performance.now() });
      }
    };
    const timer = setInterval(check, 10);
    check();
  });
}

beforeAll(async () => {
  service = spawn("python3", [
    "-m",
    "pushauth.service.cli",
    "--listen",
    `127.0.0.1:${PORT}`,
    "--sweep-interval-ms",
    "100",
  ]);
  await waitForService();
  api = new ServiceApi(BASE_URL);
  keys = await new KeyStore(new MemoryStorage()).ensureEnrolled(api, {
    userId: USER_ID,
    label: "e2e browser",
    deviceClass: "phone",
  });
  responder = new Responder(api, keys.signer, keys.deviceId!);
  const dir = mkdtempSync(join(tmpdir(), "pushauth-e2e-"));
  adapterConfigPath = join(dir, "adapter.json");
  writeFileSync(
    adapterConfigPath,
    JSON.stringify({
      service_url: BASE_URL,
      user_mapping: { alice: USER_ID },
      timeout_ms: 15_000,
    }),
  );
});

afterAll(() => {
  service?.kill();
});

describe("end-to-end human path", () => {
  it("ten scripted trials: arrival under 1 s, equal codes, exit 0", async () => {
    for (let trial = 0; trial < 10; trial++) {
      const inbox = startInbox();
      try {
        const adapter = runAdapter();
        const prompt = await adapter.prompt;
        const arrival = await nextArrival(inbox);
        expect(arrival.at - prompt.at).toBeLessThan(1_000);
        expect(arrival.item.comparisonCode).toBe(prompt.code);
        expect(await responder.respond(arrival.item, "confirm")).toBe("submitted");
        expect(await adapter.exit).toBe(0);
        expect((await adapter.report).state).toBe("success");
      } finally {
        inbox.stop();
      }
    }
  });

  it("deny maps to adapter exit 1", async () => {
    const inbox = startInbox();
    try {
      const adapter = runAdapter();
      await adapter.prompt;
      const arrival = await nextArrival(inbox);
      expect(await responder.respond(arrival.item, "deny")).toBe("submitted");
      expect(await adapter.exit).toBe(1);
    } finally {
      inbox.stop();
    }
  });

  it("a failed hold submits nothing and leaves the request answerable", async () => {
    const inbox = startInbox();
    try {
      const adapter = runAdapter();
      await adapter.prompt;
      const arrival = await nextArrival(inbox);

      let clock = 0;
      let confirms = 0;
      let fails = 0;
      const hold = new HoldToConfirm({
        onConfirm: () => {
          confirms += 1;
          void responder.respond(arrival.item, "confirm");
        },
        onFail: () => (fails += 1),
        now: () => clock,
      });

      hold.pointerDown();
      clock += 399;
      expect(hold.pointerUp()).toBe("fail");
      expect(fails).toBe(1);
      expect(confirms).toBe(0);

      // Still answerable: the server must re-deliver it on a fresh poll.
      const again = await api.pollPending(keys.deviceId!, 1_000);
      expect(again.map((i) => i.requestId)).toContain(arrival.item.requestId);

      hold.pointerDown();
      clock += 400;
      expect(hold.pointerUp()).toBe("confirm");
      expect(confirms).toBe(1);
      expect(await adapter.exit).toBe(0);
    } finally {
      inbox.stop();
    }
  });

  it("tapping an already settled row reports already_settled", async () => {
    const inbox = startInbox();
    try {
      const adapter = runAdapter();
      await adapter.prompt;
      const arrival = await nextArrival(inbox);
      expect(await responder.respond(arrival.item, "confirm")).toBe("submitted");
      expect(await adapter.exit).toBe(0);
      expect(await responder.respond(arrival.item, "confirm")).toBe(
        "already_settled",
      );
    } finally {
      inbox.stop();
    }
  });
});
