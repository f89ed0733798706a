/**
 * The request inbox: a long-poll loop that mirrors the device's server
 * queue. Rows appear as requests arrive, show a live countdown, and
 * disappear at expiry or settlement. Transport loss flips the status to
 * "reconnecting" and polling resumes by itself.
 */

import { ServiceApi, TransportFailure, type PendingItem } from "./api.js";

export interface UiPendingRequest {
  requestId: string;
  nonce: Uint8Array;
  comparisonCode: string;
  expiresAt: number;
  secondsRemaining: number;
}

export type InboxStatus = "idle" | "polling" | "reconnecting" | "stopped";

export interface InboxOptions {
  api: ServiceApi;
  deviceId: string;
  onChange: (inbox: InboxController) => void;
  now?: () => number;
  sleep?: (ms: number) => Promise<void>;
  idleWaitMs?: number;
  activeRepollMs?: number;
  reconnectDelayMs?: number;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class InboxController {
  pending: UiPendingRequest[] = [];
  status: InboxStatus = "idle";

  private api: ServiceApi;
  private deviceId: string;
  private onChange: (inbox: InboxController) => void;
  private now: () => number;
  private sleep: (ms: number) => Promise<void>;
  private idleWaitMs: number;
  private activeRepollMs: number;
  private reconnectDelayMs: number;
  private running = false;
  private loopPromise: Promise<void> | null = null;

  constructor(opts: InboxOptions) {
    this.api = opts.api;
    this.deviceId = opts.deviceId;
    this.onChange = opts.onChange;
    this.now = opts.now ?? (() => Date.now());
    this.sleep = opts.sleep ?? defaultSleep;
    this.idleWaitMs = opts.idleWaitMs ?? 20_000;
    this.activeRepollMs = opts.activeRepollMs ?? 750;
    this.reconnectDelayMs = opts.reconnectDelayMs ?? 1_000;
  }

  start(): Promise<void> {
    if (this.running) return this.loopPromise!;
    this.running = true;
    this.loopPromise = this.loop();
    return this.loopPromise;
  }

  stop(): void {
    this.running = false;
    this.setStatus("stopped");
  }

  /** Recompute countdowns and drop expired rows. Safe to call anytime. */
  tick(): void {
    const now = this.now();
    const kept = this.pending.filter((row) => row.expiresAt > now);
    const changed = kept.length !== this.pending.length;
    for (const row of kept) {
      row.secondsRemaining = Math.max(0, Math.ceil((row.expiresAt - now) / 1000));
    }
    this.pending = kept;
    if (changed || kept.length > 0) this.onChange(this);
  }

  /** Remove a settled row immediately (confirmed or denied locally). */
  drop(requestId: string): void {
    const before = this.pending.length;
    this.pending = this.pending.filter((row) => row.requestId !== requestId);
    if (this.pending.length !== before) this.onChange(this);
  }

  private setStatus(status: InboxStatus): void {
    if (this.status !== status) {
      this.status = status;
      this.onChange(this);
    }
  }

  private absorb(items: PendingItem[]): void {
    const now = this.now();
    this.pending = items
      .filter((item) => item.expiresAt > now)
      .map((item) => ({
        requestId: item.requestId,
        nonce: item.nonce,
        comparisonCode: item.comparisonCode,
        expiresAt: item.expiresAt,
        secondsRemaining: Math.max(0, Math.ceil((item.expiresAt - now) / 1000)),
      }));
    this.onChange(this);
  }

  private async loop(): Promise<void> {
    while (this.running) {
      try {
        const items = await this.api.pollPending(this.deviceId, this.idleWaitMs);
        if (!this.running) break;
        this.setStatus("polling");
        this.absorb(items);
      } catch (err) {
        if (!this.running) break;
        if (err instanceof TransportFailure) {
          this.setStatus("reconnecting");
          await this.sleep(this.reconnectDelayMs);
          continue;
        }
        throw err;
      }
      // A non-empty queue makes the long poll return immediately; pace
      // the next reconciliation instead of hot-looping.
      if (this.pending.length > 0) {
        await this.sleep(this.activeRepollMs);
      }
    }
  }
}
