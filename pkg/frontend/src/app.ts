/**
 * DOM wiring for the authenticator page: enrollment form, the live
 * request inbox, confirm/deny buttons, the hold-to-verify fingerprint
 * control, and the mock lock screen toggle.
 */

import { ServiceApi } from "./api.js";
import { HoldToConfirm } from "./hold.js";
import { InboxController, type UiPendingRequest } from "./inbox.js";
import { KeyStore, type KeyState } from "./keys.js";
import { Responder } from "./responder.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function defaultServiceUrl(): string {
  const fromQuery = new URLSearchParams(location.search).get("service");
  if (fromQuery) return fromQuery;
  return localStorage.getItem("pushauth.service_url") ?? "http://127.0.0.1:8470";
}

interface AppState {
  api: ServiceApi;
  keys: KeyState;
  responder: Responder;
  inbox: InboxController;
  confirmMethod: "button" | "biometric";
  locked: boolean;
  notices: Map<string, string>;
}

let app: AppState | null = null;

async function enroll(): Promise<void> {
  const serviceUrl = el<HTMLInputElement>("service-url").value.trim();
  const userId = el<HTMLInputElement>("user-id").value.trim();
  const label = el<HTMLInputElement>("label").value.trim() || "browser authenticator";
  const deviceClass = el<HTMLSelectElement>("device-class").value as "phone" | "watch";
  if (!serviceUrl || !userId) {
    el("enroll-status").textContent = "service URL and user id are required";
    return;
  }
  localStorage.setItem("pushauth.service_url", serviceUrl);

  const api = new ServiceApi(serviceUrl);
  const store = new KeyStore(localStorage);
  el("enroll-status").textContent = "enrolling…";
  let keys: KeyState;
  try {
    keys = await store.ensureEnrolled(api, { userId, label, deviceClass });
  } catch (err) {
    el("enroll-status").textContent = `enrollment failed: ${err}`;
    return;
  }
  el("enroll-status").textContent =
    `enrolled as ${keys.deviceId} (${keys.signer.backend} signing)`;

  const inbox = new InboxController({
    api,
    deviceId: keys.deviceId!,
    onChange: render,
  });
  app = {
    api,
    keys,
    responder: new Responder(api, keys.signer, keys.deviceId!),
    inbox,
    confirmMethod: "button",
    locked: false,
    notices: new Map(),
  };
  void inbox.start();
  setInterval(() => inbox.tick(), 500);
  el("inbox-panel").hidden = false;
  render(inbox);
}

async function respond(row: UiPendingRequest, decision: "confirm" | "deny"): Promise<void> {
  if (!app) return;
  const result = await app.responder.respond(row, decision);
  if (result === "submitted") {
    app.inbox.drop(row.requestId);
  } else if (result === "already_settled") {
    app.notices.set(row.requestId, "already settled on another device");
  } else if (result === "transport_error") {
    app.notices.set(row.requestId, "network error, try again");
  } else if (result === "rejected") {
    app.notices.set(row.requestId, "request no longer valid");
  }
  render(app.inbox);
}

function fingerprintControl(row: UiPendingRequest): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "fingerprint-wrap";
  const button = document.createElement("button");
  button.className = "fingerprint";
  button.title = "press and hold to verify";
  button.textContent = "◉";
  const hold = new HoldToConfirm({
    onConfirm: () => void respond(row, "confirm"),
    onFail: () => {
      app?.notices.set(row.requestId, "held too short, authentication failed");
      if (app) render(app.inbox);
    },
    onRippleChange: (active) => button.classList.toggle("ripple", active),
  });
  button.addEventListener("pointerdown", () => hold.pointerDown());
  button.addEventListener("pointerup", () => hold.pointerUp());
  button.addEventListener("pointerleave", () => hold.cancel());
  wrap.appendChild(button);
  return wrap;
}

function render(inbox: InboxController): void {
  if (!app) return;
  el("status-line").textContent =
    inbox.status === "reconnecting" ? "reconnecting…" : `status: ${inbox.status}`;
  el("lock-screen").hidden = !app.locked;
  el("request-list").hidden = app.locked;

  const list = el("request-list");
  list.innerHTML = "";
  if (inbox.pending.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty";
    empty.textContent = "no pending authentication requests";
    list.appendChild(empty);
    return;
  }
  for (const row of inbox.pending) {
    const card = document.createElement("div");
    card.className = "request-card";
    const code = document.createElement("div");
    code.className = "code";
    code.textContent = row.comparisonCode;
    const meta = document.createElement("div");
    meta.className = "meta";
    meta.textContent = `expires in ${row.secondsRemaining}s`;
    card.append(code, meta);

    const notice = app.notices.get(row.requestId);
    if (notice) {
      const note = document.createElement("div");
      note.className = "notice";
      note.textContent = notice;
      card.appendChild(note);
    }

    const actions = document.createElement("div");
    actions.className = "actions";
    if (app.confirmMethod === "button") {
      const confirm = document.createElement("button");
      confirm.className = "confirm";
      confirm.textContent = "Confirm";
      confirm.addEventListener("click", () => void respond(row, "confirm"));
      actions.appendChild(confirm);
    } else {
      actions.appendChild(fingerprintControl(row));
    }
    const deny = document.createElement("button");
    deny.className = "deny";
    deny.textContent = "Deny";
    deny.addEventListener("click", () => void respond(row, "deny"));
    actions.appendChild(deny);
    card.appendChild(actions);
    list.appendChild(card);
  }
}

function wireStaticControls(): void {
  el<HTMLInputElement>("service-url").value = defaultServiceUrl();
  el("enroll-button").addEventListener("click", () => void enroll());
  el<HTMLSelectElement>("confirm-method").addEventListener("change", (event) => {
    if (app) {
      app.confirmMethod = (event.target as HTMLSelectElement).value as
        | "button"
        | "biometric";
      render(app.inbox);
    }
  });
  el<HTMLInputElement>("lock-toggle").addEventListener("change", (event) => {
    if (app) {
      app.locked = (event.target as HTMLInputElement).checked;
      render(app.inbox);
    }
  });
  el("unlock-button").addEventListener("click", () => {
    if (app) {
      app.locked = false;
      el<HTMLInputElement>("lock-toggle").checked = false;
      render(app.inbox);
    }
  });
}

document.addEventListener("DOMContentLoaded", wireStaticControls);
