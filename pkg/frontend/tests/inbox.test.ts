import { describe, expect, it } from "vitest";

import { ServiceApi, TransportFailure, type PendingItem } from "../src/api.js";
import { InboxController } from "../src/inbox.js";

function item(requestId: string, expiresAt: number, code = "042"): PendingItem {
  return { requestId, nonce: new Uint8Array(32), comparisonCode: code, expiresAt };
}

/** An api stub whose poll results are scripted per call. */
function scriptedApi(script: Array<PendingItem[] | "transport">) {
  let call = 0;
  const api = Object.create(ServiceApi.prototype) as ServiceApi;
  api.pollPending = async () => {
    const step = script[Math.min(call++, script.length - 1)];
    if (step === "transport") throw new TransportFailure("down");
    return step.map((entry) => ({ ...entry }));
  };
  return api;
}

function controller(
  script: Array<PendingItem[] | "transport">,
  nowRef: { t: number },
  stopAfterCalls: number,
) {
  let polls = 0;
  const states: Array<{ status: string; ids: string[] }> = [];
  const inbox = new InboxController({
    api: scriptedApi(script),
    deviceId: "dev-1",
    now: () => nowRef.t,
    sleep: async () => {},
    onChange: (c) => {
      states.push({ status: c.status, ids: c.pending.map((p) => p.requestId) });
      if (++polls >= stopAfterCalls) c.stop();
    },
  });
  return { inbox, states };
}

describe("inbox controller", () => {
  it("renders arrivals from the poll loop", async () => {
    const now = { t: 1_000 };
    const { inbox } = controller([[item("req-1", 61_000)]], now, 2);
    await inbox.start();
    expect(inbox.pending.map((p) => p.requestId)).toEqual(["req-1"]);
    expect(inbox.pending[0].secondsRemaining).toBe(60);
    expect(inbox.pending[0].comparisonCode).toBe("042");
  });

  it("lists two simultaneous requests independently", async () => {
    const now = { t: 0 };
    const { inbox } = controller(
      [[item("req-1", 60_000, "111"), item("req-2", 60_000, "222")]],
      now,
      2,
    );
    await inbox.start();
    expect(inbox.pending.map((p) => p.comparisonCode)).toEqual(["111", "222"]);
  });

  it("drops rows at countdown zero", async () => {
    const now = { t: 0 };
    const { inbox } = controller([[item("req-1", 5_000)]], now, 2);
    await inbox.start();
    expect(inbox.pending).toHaveLength(1);
    now.t = 5_000;
    inbox.tick();
    expect(inbox.pending).toHaveLength(0);
  });

  it("prunes rows the server no longer lists (settled elsewhere)", async () => {
    const now = { t: 0 };
    const { inbox } = controller([[item("req-1", 60_000)], []], now, 3);
    await inbox.start();
    expect(inbox.pending).toHaveLength(0);
  });

  it("flips to reconnecting on transport loss and resumes", async () => {
    const now = { t: 0 };
    const { inbox, states } = controller(
      ["transport", [item("req-1", 60_000)]],
      now,
      3,
    );
    await inbox.start();
    expect(states.some((s) => s.status === "reconnecting")).toBe(true);
    expect(inbox.pending.map((p) => p.requestId)).toEqual(["req-1"]);
  });

  it("drop removes a locally settled row immediately", async () => {
    const now = { t: 0 };
    const { inbox } = controller([[item("req-1", 60_000)]], now, 2);
    await inbox.start();
    inbox.drop("req-1");
    expect(inbox.pending).toHaveLength(0);
  });
});
