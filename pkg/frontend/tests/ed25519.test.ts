import { describe, expect, it } from "vitest";

import { fromHex, toHex } from "../src/base64.js";
import { createSigner, derivePublicKey, verify } from "../src/ed25519.js";
import * as noble from "../src/vendor/noble-ed25519.js";

// RFC 8032 test vector 1 (empty message).
const RFC_SEED = "9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60";
const RFC_PUBLIC = "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a";
const RFC_SIGNATURE =
  "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e06522490155" +
  "5fb8821590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b";

// Vector frozen from the service implementation (seed 00..1f over the
// canonical confirm payload for req-ab / dev-cd).
const SVC_SEED = "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f";
const SVC_PUBLIC = "03a107bff3ce10be1d70dd18e74bc09967e4d6309ba50d5f1ddc8664125531b8";
const SVC_PAYLOAD =
  "7265712d616200000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f006465762d63640001";
const SVC_SIGNATURE =
  "e7b9b959a6a26c9b39e129d5b2ebcd8290d177ebb7c1ef4700c78ecd53ce3aec" +
  "66009005937e3515ef2e8fadd48d51fe4df5bcdad3228a2439b1e4e62eaadf0c";

describe("ed25519 signer", () => {
  it("matches RFC 8032 vector 1", async () => {
    const signer = await createSigner(fromHex(RFC_SEED));
    expect(toHex(signer.publicKey)).toBe(RFC_PUBLIC);
    const signature = await signer.sign(new Uint8Array(0));
    expect(toHex(signature)).toBe(RFC_SIGNATURE);
  });

  it("produces wire bytes identical to the service implementation", async () => {
    const signer = await createSigner(fromHex(SVC_SEED));
    expect(toHex(signer.publicKey)).toBe(SVC_PUBLIC);
    const signature = await signer.sign(fromHex(SVC_PAYLOAD));
    expect(toHex(signature)).toBe(SVC_SIGNATURE);
  });

  it("bundled implementation agrees with the platform one", async () => {
    const seed = fromHex(SVC_SEED);
    const payload = fromHex(SVC_PAYLOAD);
    const bundled = await noble.signAsync(payload, seed);
    expect(toHex(bundled)).toBe(SVC_SIGNATURE);
    expect(toHex(await noble.getPublicKeyAsync(seed))).toBe(
      toHex(await derivePublicKey(seed)),
    );
  });

  it("verify accepts genuine and rejects tampered signatures", async () => {
    const signer = await createSigner(fromHex(SVC_SEED));
    const message = fromHex(SVC_PAYLOAD);
    const signature = await signer.sign(message);
    expect(await verify(signer.publicKey, message, signature)).toBe(true);
    const tampered = Uint8Array.from(signature);
    tampered[0] ^= 1;
    expect(await verify(signer.publicKey, message, tampered)).toBe(false);
  });

  it("rejects seeds of the wrong length", async () => {
    await expect(createSigner(new Uint8Array(16))).rejects.toThrow(/32 bytes/);
  });
});
