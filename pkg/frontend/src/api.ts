/** Typed client for the authentication service wire protocol. */

import { fromBase64, toBase64 } from "./base64.js";
import type { Decision } from "./payload.js";

export class TransportFailure extends Error {}

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: Record<string, unknown>,
  ) {
    super(`service returned ${status}: ${JSON.stringify(body)}`);
  }
}

export interface DeviceRecordWire {
  device_id: string;
  user_id: string;
  label: string;
  device_class: string;
  public_key: string;
  enrolled_at: number;
}

export interface PendingItem {
  requestId: string;
  nonce: Uint8Array;
  comparisonCode: string;
  expiresAt: number;
}

type FetchLike = typeof fetch;

export class ServiceApi {
  constructor(
    public baseUrl: string,
    private fetchFn: FetchLike = (...args) => fetch(...args),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request(
    method: string,
    path: string,
    body?: Record<string, unknown>,
  ): Promise<Record<string, unknown>> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, {
        method,
        headers: body === undefined ? {} : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new TransportFailure(String(err));
    }
    let payload: Record<string, unknown>;
    try {
      payload = (await response.json()) as Record<string, unknown>;
    } catch {
      payload = {};
    }
    if (!response.ok) throw new ApiError(response.status, payload);
    return payload;
  }

  async enrollDevice(
    userId: string,
    label: string,
    deviceClass: string,
    publicKey: Uint8Array,
  ): Promise<DeviceRecordWire> {
    const record = await this.request("POST", "/v1/devices", {
      user_id: userId,
      label,
      device_class: deviceClass,
      public_key: toBase64(publicKey),
    });
    return record as unknown as DeviceRecordWire;
  }

  async pollPending(deviceId: string, maxWaitMs: number): Promise<PendingItem[]> {
    const payload = await this.request(
      "GET",
      `/v1/devices/${deviceId}/pending?max_wait_ms=${maxWaitMs}`,
    );
    const items = (payload.requests ?? []) as Array<Record<string, unknown>>;
    return items.map((item) => ({
      requestId: item.request_id as string,
      nonce: fromBase64(item.nonce as string),
      comparisonCode: item.comparison_code as string,
      expiresAt: item.expires_at as number,
    }));
  }

  async submitResponse(
    requestId: string,
    deviceId: string,
    decision: Decision,
    signature: Uint8Array,
  ): Promise<Record<string, unknown>> {
    return this.request("POST", `/v1/auth-requests/${requestId}/response`, {
      device_id: deviceId,
      decision,
      signature: toBase64(signature),
    });
  }

  async openAuthRequest(
    userId: string,
    ttlMs?: number,
  ): Promise<Record<string, unknown>> {
    const body: Record<string, unknown> = { user_id: userId };
    if (ttlMs !== undefined) body.ttl_ms = ttlMs;
    return this.request("POST", "/v1/auth-requests", body);
  }

  async awaitResult(
    requestId: string,
    maxWaitMs: number,
  ): Promise<Record<string, unknown>> {
    return this.request(
      "GET",
      `/v1/auth-requests/${requestId}/result?max_wait_ms=${maxWaitMs}`,
    );
  }
}
