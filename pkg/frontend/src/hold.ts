/**
 * Hold-to-verify fingerprint control. Pressing starts a ripple; releasing
 * at or past the threshold confirms, anything shorter fails. A failed
 * hold must never submit anything, so the outcome callback fires only on
 * a completed hold.
 */

export type HoldOutcome = "confirm" | "fail";

export const HOLD_THRESHOLD_MS = 400;

export interface HoldOptions {
  onConfirm: () => void;
  onFail: () => void;
  onRippleChange?: (active: boolean) => void;
  thresholdMs?: number;
  now?: () => number;
}

export class HoldToConfirm {
  private pressedAt: number | null = null;
  private thresholdMs: number;
  private now: () => number;

  constructor(private opts: HoldOptions) {
    this.thresholdMs = opts.thresholdMs ?? HOLD_THRESHOLD_MS;
    this.now = opts.now ?? (() => performance.now());
  }

  get pressed(): boolean {
    return this.pressedAt !== null;
  }

  pointerDown(): void {
    if (this.pressedAt !== null) return;
    this.pressedAt = this.now();
    this.opts.onRippleChange?.(true);
  }

  pointerUp(): HoldOutcome | null {
    if (this.pressedAt === null) return null;
    const heldMs = this.now() - this.pressedAt;
    this.pressedAt = null;
    this.opts.onRippleChange?.(false);
    if (heldMs >= this.thresholdMs) {
      this.opts.onConfirm();
      return "confirm";
    }
    this.opts.onFail();
    return "fail";
  }

  /** Pointer left the control: abandon the press without any outcome. */
  cancel(): void {
    if (this.pressedAt === null) return;
    this.pressedAt = null;
    this.opts.onRippleChange?.(false);
  }
}
