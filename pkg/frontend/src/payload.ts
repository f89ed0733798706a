/**
 * Canonical signing payload. Must stay byte-identical with the service's
 * layout: utf8(request_id) || 0x00 || nonce || 0x00 || utf8(device_id) ||
 * 0x00 || one byte (0x01 confirm / 0x00 deny).
 */

export type Decision = "confirm" | "deny";

const encoder = new TextEncoder();

export function payloadBytes(
  requestId: string,
  nonce: Uint8Array,
  deviceId: string,
  decision: Decision,
): Uint8Array {
  const rid = encoder.encode(requestId);
  const did = encoder.encode(deviceId);
  const out = new Uint8Array(rid.length + 1 + nonce.length + 1 + did.length + 2);
  let at = 0;
  out.set(rid, at);
  at += rid.length + 1; // 0x00 separator already zeroed
  out.set(nonce, at);
  at += nonce.length + 1;
  out.set(did, at);
  at += did.length + 1;
  out[at] = decision === "confirm" ? 0x01 : 0x00;
  return out;
}
