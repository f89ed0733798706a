/**
 * Ed25519 signing for the browser. Prefers the platform's WebCrypto
 * implementation; falls back to the vendored constant-time one. The
 * scheme is deterministic, so the wire bytes are identical either way.
 */

import * as noble from "./vendor/noble-ed25519.js";

export interface Signer {
  publicKey: Uint8Array;
  backend: "webcrypto" | "bundled";
  sign(message: Uint8Array): Promise<Uint8Array>;
}

// PKCS#8 wrapping for a raw 32-byte Ed25519 seed.
const PKCS8_PREFIX = new Uint8Array([
  0x30, 0x2e, 0x02, 0x01, 0x00, 0x30, 0x05, 0x06, 0x03, 0x2b, 0x65, 0x70,
  0x04, 0x22, 0x04, 0x20,
]);

function pkcs8(seed: Uint8Array): Uint8Array {
  const out = new Uint8Array(PKCS8_PREFIX.length + seed.length);
  out.set(PKCS8_PREFIX, 0);
  out.set(seed, PKCS8_PREFIX.length);
  return out;
}

export function generateSeed(): Uint8Array {
  const seed = new Uint8Array(32);
  crypto.getRandomValues(seed);
  return seed;
}

export async function derivePublicKey(seed: Uint8Array): Promise<Uint8Array> {
  return noble.getPublicKeyAsync(seed);
}

async function tryWebCryptoKey(seed: Uint8Array): Promise<CryptoKey | null> {
  try {
    return await crypto.subtle.importKey(
      "pkcs8",
      pkcs8(seed) as BufferSource,
      { name: "Ed25519" },
      false,
      ["sign"],
    );
  } catch {
    return null;
  }
}

export async function createSigner(seed: Uint8Array): Promise<Signer> {
  if (seed.length !== 32) throw new Error("seed must be 32 bytes");
  const publicKey = await derivePublicKey(seed);
  const webKey = await tryWebCryptoKey(seed);
  if (webKey !== null) {
    return {
      publicKey,
      backend: "webcrypto",
      async sign(message: Uint8Array): Promise<Uint8Array> {
        const raw = await crypto.subtle.sign(
          "Ed25519",
          webKey,
          message as BufferSource,
        );
        return new Uint8Array(raw);
      },
    };
  }
  return {
    publicKey,
    backend: "bundled",
    async sign(message: Uint8Array): Promise<Uint8Array> {
      return noble.signAsync(message, seed);
    },
  };
}

export async function verify(
  publicKey: Uint8Array,
  message: Uint8Array,
  signature: Uint8Array,
): Promise<boolean> {
  try {
    return await noble.verifyAsync(signature, message, publicKey);
  } catch {
    return false;
  }
}
