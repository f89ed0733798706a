/**
 * Signs decisions client-side and submits them, enforcing at most one
 * in-flight response per request. The private key never touches the
 * wire; only the signature does.
 */

import { ApiError, ServiceApi, TransportFailure } from "./api.js";
import type { Signer } from "./ed25519.js";
import { payloadBytes, type Decision } from "./payload.js";

export type RespondResult =
  | "submitted"
  | "already_settled"
  | "rejected"
  | "busy"
  | "transport_error";

export interface Respondable {
  requestId: string;
  nonce: Uint8Array;
}

export class Responder {
  private inFlight = new Set<string>();

  constructor(
    private api: ServiceApi,
    private signer: Signer,
    private deviceId: string,
  ) {}

  async respond(item: Respondable, decision: Decision): Promise<RespondResult> {
    if (this.inFlight.has(item.requestId)) return "busy";
    this.inFlight.add(item.requestId);
    try {
      const payload = payloadBytes(item.requestId, item.nonce, this.deviceId, decision);
      const signature = await this.signer.sign(payload);
      await this.api.submitResponse(item.requestId, this.deviceId, decision, signature);
      return "submitted";
    } catch (err) {
      if (err instanceof ApiError) {
        return err.body?.reason === "already_settled" ? "already_settled" : "rejected";
      }
      if (err instanceof TransportFailure) return "transport_error";
      throw err;
    } finally {
      this.inFlight.delete(item.requestId);
    }
  }
}
